#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "silunet/errors.hpp"
#include "silunet/network.hpp"

namespace silunet {

namespace {

using json = nlohmann::ordered_json;

constexpr int format_version = 1;

// Large, mostly empty layers are written as (row, col, value) triples.
bool write_sparse(const WeightMatrix& w) {
  const std::size_t cells = w.rows() * w.cols();
  return cells > 4096 && w.nnz() * 4 < cells;
}

[[noreturn]] void schema_error(const std::string& what) {
  throw ParseError("network JSON: " + what, 0);
}

double real_from(const json& v, const char* where) {
  if (v.is_string()) {
    try {
      return parse_real(v.get_ref<const std::string&>());
    } catch (const ParseError&) {
      schema_error(std::string("bad real '") + v.get<std::string>() + "' in " + where);
    }
  }
  if (v.is_number()) return v.get<double>();
  schema_error(std::string("expected a real in ") + where);
}

std::size_t size_from(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned())
    schema_error("missing or invalid '" + std::string(key) + "' in " + where);
  return obj[key].get<std::size_t>();
}

}  // namespace

std::string format_real(double x) {
  if (!std::isfinite(x)) throw DomainError("format_real: non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("invalid real '" + std::string(s) + "'",
                     static_cast<std::size_t>(res.ptr - s.data()));
  if (!std::isfinite(v)) throw ParseError("non-finite real '" + std::string(s) + "'", 0);
  return v;
}

std::string serialize(const FeedForwardNet& net) {
  json doc;
  doc["version"] = format_version;
  doc["input_dim"] = net.input_dim();
  json layers = json::array();
  for (const auto& L : net.layers()) {
    json jl;
    jl["rows"] = L.weights.rows();
    jl["cols"] = L.weights.cols();
    jl["activation"] = activation_name(L.activation);
    if (write_sparse(L.weights)) {
      json ent = json::array();
      for (const auto& e : L.weights.entries()) ent.push_back({e.row, e.col, format_real(e.value)});
      jl["entries"] = std::move(ent);
    } else {
      json w = json::array();
      for (double v : L.weights.to_dense()) w.push_back(format_real(v));
      jl["weights"] = std::move(w);
    }
    json b = json::array();
    for (double v : L.bias) b.push_back(format_real(v));
    jl["bias"] = std::move(b);
    layers.push_back(std::move(jl));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1) + "\n";
}

FeedForwardNet deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) schema_error("top level is not an object");
  if (!doc.contains("version") || doc["version"] != format_version)
    schema_error("unsupported or missing version");
  const std::size_t input_dim = size_from(doc, "input_dim", "document");
  if (!doc.contains("layers") || !doc["layers"].is_array()) schema_error("missing 'layers' array");

  std::vector<DenseLayer> layers;
  std::size_t idx = 0;
  for (const auto& jl : doc["layers"]) {
    const std::string where = "layer " + std::to_string(idx++);
    if (!jl.is_object()) schema_error(where + " is not an object");
    const std::size_t rows = size_from(jl, "rows", where);
    const std::size_t cols = size_from(jl, "cols", where);
    DenseLayer L;
    const std::string act = jl.value("activation", "");
    if (act == "silu")
      L.activation = Activation::silu;
    else if (act == "identity")
      L.activation = Activation::identity;
    else
      schema_error("unknown activation '" + act + "' in " + where);

    if (jl.contains("weights")) {
      const auto& w = jl["weights"];
      if (!w.is_array() || w.size() != rows * cols)
        schema_error("'weights' of " + where + " must hold rows*cols reals");
      std::vector<double> dense;
      dense.reserve(w.size());
      for (const auto& v : w) dense.push_back(real_from(v, where.c_str()));
      L.weights = WeightMatrix::dense(rows, cols, dense);
    } else if (jl.contains("entries")) {
      std::vector<WeightMatrix::Entry> ent;
      for (const auto& e : jl["entries"]) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
          schema_error("bad entry in " + where);
        const auto r = e[0].get<std::size_t>();
        const auto c = e[1].get<std::size_t>();
        if (r >= rows || c >= cols) schema_error("entry out of range in " + where);
        ent.push_back({r, c, real_from(e[2], where.c_str())});
      }
      L.weights = WeightMatrix::from_entries(rows, cols, std::move(ent));
    } else {
      schema_error(where + " has neither 'weights' nor 'entries'");
    }

    if (!jl.contains("bias") || !jl["bias"].is_array() || jl["bias"].size() != rows)
      schema_error("'bias' of " + where + " must hold rows reals");
    for (const auto& v : jl["bias"]) L.bias.push_back(real_from(v, where.c_str()));
    layers.push_back(std::move(L));
  }
  try {
    return FeedForwardNet(input_dim, std::move(layers));
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

FeedForwardNet load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

void save_net(const FeedForwardNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << serialize(net);
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace silunet
