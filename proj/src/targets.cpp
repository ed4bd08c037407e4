#include "silunet/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "silunet/errors.hpp"
#include "silunet/scalar_math.hpp"
#include "silunet/stepfun.hpp"

namespace silunet {

double Target::operator()(double x) const {
  const double in[1] = {x};
  return f(in);
}

std::function<double(double)> Target::scalar() const {
  if (dim != 1) throw ContractError("target '" + spec + "' is not univariate");
  auto g = f;
  return [g](double x) {
    const double in[1] = {x};
    return g(in);
  };
}

namespace {

std::vector<double> parse_list(const std::string& s, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_real(item));
    } catch (const ParseError&) {
      throw DomainError("target '" + spec + "': bad number '" + item + "'");
    }
  }
  if (out.empty()) throw DomainError("target '" + spec + "': empty list");
  return out;
}

// Derivative of order p of sin(w x + phase) scaled by amp.
double sin_deriv(int p, double x, double w = 1.0, double phase = 0.0) {
  return std::pow(w, p) * std::sin(w * x + phase + p * std::numbers::pi / 2.0);
}

Target poly_target(const std::string& spec, std::vector<double> c) {
  Target t;
  t.spec = spec;
  t.f = [c](std::span<const double> x) { return poly_eval(c, x[0]); };
  t.deriv = [c](std::span<const double> x, const MultiIndex& al) {
    std::vector<double> d = c;
    for (int p = 0; p < al.entries[0]; ++p) {
      if (d.size() <= 1) return 0.0;
      for (std::size_t i = 1; i < d.size(); ++i) d[i - 1] = d[i] * static_cast<double>(i);
      d.pop_back();
    }
    return poly_eval(d, x[0]);
  };
  if (c.size() <= 2) t.lipschitz = c.size() == 2 ? std::abs(c[1]) : 0.0;
  return t;
}

Target sampled_target(const std::string& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sampled target '" + path + "'");
  auto xs = std::make_shared<std::vector<double>>();
  auto ys = std::make_shared<std::vector<double>>();
  std::string line;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    const std::size_t here = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("sampled target: expected 'x,y'", here);
    try {
      xs->push_back(parse_real(line.substr(0, comma)));
      ys->push_back(parse_real(line.substr(comma + 1)));
    } catch (const ParseError&) {
      if (xs->size() > ys->size()) xs->pop_back();
      if (xs->empty() && ys->empty()) continue;  // header row
      throw ParseError("sampled target: bad number", here);
    }
  }
  if (xs->size() < 2) throw ParseError("sampled target: need at least two rows", offset);
  for (std::size_t i = 1; i < xs->size(); ++i)
    if (!((*xs)[i] > (*xs)[i - 1])) throw ParseError("sampled target: x must increase", 0);
  Target t;
  t.spec = spec;
  t.f = [xs, ys](std::span<const double> x) {
    const double v = x[0];
    if (v <= xs->front()) return ys->front();
    if (v >= xs->back()) return ys->back();
    const auto it = std::upper_bound(xs->begin(), xs->end(), v);
    const std::size_t i = static_cast<std::size_t>(it - xs->begin());
    const double w = (v - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
    return (*ys)[i - 1] + w * ((*ys)[i] - (*ys)[i - 1]);
  };
  return t;
}

}  // namespace

Target parse_target(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  Target t;
  t.spec = spec;

  if (spec.rfind("x^", 0) == 0 || head == "pow") {
    const std::string ms = spec.rfind("x^", 0) == 0 ? spec.substr(2) : arg;
    int m = -1;
    try {
      std::size_t used = 0;
      m = std::stoi(ms, &used);
      if (used != ms.size()) m = -1;
    } catch (const std::exception&) {
    }
    if (m < 0 || m > 64) throw DomainError("target '" + spec + "': bad exponent");
    std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
    c.back() = 1.0;
    return poly_target(spec, c);
  }
  if (head == "poly") return poly_target(spec, parse_list(arg, spec));
  if (spec == "x") return poly_target(spec, {0.0, 1.0});
  if (head == "const") {
    const auto v = parse_list(arg, spec);
    return poly_target(spec, {v.at(0)});
  }
  if (spec == "sin" || spec == "cos") {
    const double phase = spec == "cos" ? std::numbers::pi / 2.0 : 0.0;
    t.f = [phase](std::span<const double> x) { return std::sin(x[0] + phase); };
    t.deriv = [phase](std::span<const double> x, const MultiIndex& al) {
      return sin_deriv(al.entries[0], x[0], 1.0, phase);
    };
    t.lipschitz = 1.0;
    return t;
  }
  if (spec == "sigmoid") {
    t.f = [](std::span<const double> x) { return sigmoid(x[0]); };
    t.deriv = [](std::span<const double> x, const MultiIndex& al) {
      return sigmoid_deriv(al.entries[0], x[0]);
    };
    t.lipschitz = 0.25;
    return t;
  }
  if (spec == "logcos") {
    t.f = [](std::span<const double> x) {
      const double v = x[0];
      return std::log(7.0 + v) * std::cos(v * v * v);
    };
    return t;
  }
  if (head == "indicator") {
    const auto v = parse_list(arg, spec);
    if (v.size() != 2 || !(v[0] < v[1]))
      throw DomainError("target '" + spec + "': expected indicator:lo,hi with lo < hi");
    const double lo = v[0], hi = v[1];
    t.f = [lo, hi](std::span<const double> x) { return x[0] >= lo && x[0] < hi ? 1.0 : 0.0; };
    t.jumps = {lo, hi};
    return t;
  }
  if (head == "sampled") {
    if (arg.empty()) throw DomainError("target '" + spec + "': missing file name");
    return sampled_target(spec, arg);
  }
  if (spec == "t4") {
    const double pi = std::numbers::pi;
    t.dim = 2;
    t.f = [pi](std::span<const double> x) {
      return std::sin(pi * x[0]) * std::cos(pi * x[0]) / (2.0 * pi);
    };
    // sin(pi x) cos(pi x) / (2 pi) = sin(2 pi x) / (4 pi).
    t.deriv = [pi](std::span<const double> x, const MultiIndex& al) {
      if (al.entries[1] != 0) return 0.0;
      return sin_deriv(al.entries[0], x[0], 2.0 * pi) / (4.0 * pi);
    };
    return t;
  }
  if (spec == "sinprod") {
    t.dim = 2;
    t.f = [](std::span<const double> x) { return std::sin(x[0]) * std::sin(x[1]); };
    t.deriv = [](std::span<const double> x, const MultiIndex& al) {
      return sin_deriv(al.entries[0], x[0]) * sin_deriv(al.entries[1], x[1]);
    };
    return t;
  }
  if (spec == "xy") {
    t.dim = 2;
    t.f = [](std::span<const double> x) { return x[0] * x[1]; };
    t.deriv = [](std::span<const double> x, const MultiIndex& al) {
      const int a = al.entries[0], b = al.entries[1];
      const double fx = a == 0 ? x[0] : a == 1 ? 1.0 : 0.0;
      const double fy = b == 0 ? x[1] : b == 1 ? 1.0 : 0.0;
      return fx * fy;
    };
    return t;
  }
  throw DomainError("unknown target '" + spec + "'\n" + target_help());
}

std::string target_help() {
  return "targets: x^m | pow:m | poly:c0,c1,... | x | const:c | sin | cos | sigmoid | logcos | "
         "indicator:lo,hi | sampled:file.csv | t4 | sinprod | xy";
}

}  // namespace silunet
