#include "silunet/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "silunet/errors.hpp"
#include "silunet/scalar_math.hpp"

namespace silunet {

const char* activation_name(Activation a) noexcept {
  return a == Activation::silu ? "silu" : "identity";
}

namespace {

bool is_positive_zero(double v) { return std::bit_cast<std::uint64_t>(v) == 0; }

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

// WeightMatrix ------------------------------------------------------------

WeightMatrix::WeightMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

WeightMatrix WeightMatrix::dense(std::size_t rows, std::size_t cols,
                                 std::span<const double> row_major) {
  if (row_major.size() != rows * cols)
    throw ContractError("WeightMatrix::dense: expected " + std::to_string(rows * cols) +
                        " entries, got " + std::to_string(row_major.size()));
  WeightMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = row_major[r * cols + c];
      if (is_positive_zero(v)) continue;
      m.col_.push_back(c);
      m.values_.push_back(v);
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

WeightMatrix WeightMatrix::from_entries(std::size_t rows, std::size_t cols,
                                        std::vector<Entry> entries) {
  for (const auto& e : entries)
    if (e.row >= rows || e.col >= cols)
      throw ContractError("WeightMatrix: entry (" + std::to_string(e.row) + ", " +
                          std::to_string(e.col) + ") outside " + dims(rows, cols));
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  WeightMatrix m(rows, cols);
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < entries.size() && entries[i].row == r) {
      const std::size_t c = entries[i].col;
      double v = entries[i].value;
      ++i;
      while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
        v += entries[i].value;
        ++i;
      }
      if (is_positive_zero(v)) continue;
      m.col_.push_back(c);
      m.values_.push_back(v);
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

WeightMatrix WeightMatrix::identity(std::size_t n) {
  WeightMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    m.col_.push_back(r);
    m.values_.push_back(1.0);
    m.row_ptr_[r + 1] = r + 1;
  }
  return m;
}

double WeightMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_)
    throw ContractError("WeightMatrix::at: index outside " + dims(rows_, cols_));
  const auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(b, e, c);
  if (it == e || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<double> WeightMatrix::to_dense() const {
  std::vector<double> out(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) out[r * cols_ + col_[i]] = values_[i];
  return out;
}

std::vector<WeightMatrix::Entry> WeightMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) out.push_back({r, col_[i], values_[i]});
  return out;
}

void WeightMatrix::apply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::size_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) acc += values_[i] * x[col_[i]];
    y[r] = acc;
  }
}

double WeightMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool WeightMatrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool WeightMatrix::bitwise_equal(const WeightMatrix& o) const noexcept {
  if (rows_ != o.rows_ || cols_ != o.cols_ || row_ptr_ != o.row_ptr_ || col_ != o.col_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (std::bit_cast<std::uint64_t>(values_[i]) != std::bit_cast<std::uint64_t>(o.values_[i]))
      return false;
  return true;
}

WeightMatrix multiply(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.cols() != b.rows())
    throw ContractError("multiply: " + dims(a.rows(), a.cols()) + " times " +
                        dims(b.rows(), b.cols()));
  std::vector<WeightMatrix::Entry> out;
  const auto ap = a.row_ptr();
  const auto ac = a.col_index();
  const auto av = a.values();
  const auto bp = b.row_ptr();
  const auto bc = b.col_index();
  const auto bv = b.values();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t i = ap[r]; i < ap[r + 1]; ++i)
      for (std::size_t j = bp[ac[i]]; j < bp[ac[i] + 1]; ++j) out.push_back({r, bc[j], av[i] * bv[j]});
  return WeightMatrix::from_entries(a.rows(), b.cols(), std::move(out));
}

// FeedForwardNet ----------------------------------------------------------

FeedForwardNet::FeedForwardNet(std::size_t input_dim, std::vector<DenseLayer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) throw ContractError("FeedForwardNet: input_dim must be positive");
  if (layers_.empty()) throw ContractError("FeedForwardNet: no layers");
  std::size_t width = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.weights.cols() != width)
      throw ContractError("FeedForwardNet: layer " + std::to_string(l) + " expects " +
                          std::to_string(L.weights.cols()) + " inputs, previous width is " +
                          std::to_string(width));
    if (L.bias.size() != L.weights.rows())
      throw ContractError("FeedForwardNet: layer " + std::to_string(l) + " bias length " +
                          std::to_string(L.bias.size()) + " != rows " +
                          std::to_string(L.weights.rows()));
    if (L.weights.rows() == 0)
      throw ContractError("FeedForwardNet: layer " + std::to_string(l) + " has no rows");
    if (!L.weights.all_finite() ||
        !std::all_of(L.bias.begin(), L.bias.end(), [](double v) { return std::isfinite(v); }))
      throw DomainError("FeedForwardNet: layer " + std::to_string(l) + " has non-finite entries");
    width = L.weights.rows();
  }
}

std::size_t FeedForwardNet::output_dim() const noexcept {
  return layers_.empty() ? 0 : layers_.back().weights.rows();
}

std::vector<double> FeedForwardNet::evaluate(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw ContractError("evaluate: input has dimension " + std::to_string(x.size()) +
                        ", net expects " + std::to_string(input_dim_));
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("evaluate: non-finite input");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    next.assign(L.weights.rows(), 0.0);
    L.weights.apply(cur, next);
    for (std::size_t r = 0; r < next.size(); ++r) {
      const double z = next[r] + L.bias[r];
      if (!(std::abs(z) <= overflow_guard))
        throw OverflowError("evaluate: intermediate out of range in layer " + std::to_string(l), l);
      next[r] = L.activation == Activation::silu ? silu_unchecked(z) : z;
    }
    cur.swap(next);
  }
  return cur;
}

double FeedForwardNet::evaluate1(double x) const {
  const double in[1] = {x};
  return evaluate(in).at(0);
}

bool FeedForwardNet::bitwise_equal(const FeedForwardNet& o) const noexcept {
  if (input_dim_ != o.input_dim_ || layers_.size() != o.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& a = layers_[l];
    const auto& b = o.layers_[l];
    if (a.activation != b.activation || !a.weights.bitwise_equal(b.weights)) return false;
    if (a.bias.size() != b.bias.size()) return false;
    for (std::size_t i = 0; i < a.bias.size(); ++i)
      if (std::bit_cast<std::uint64_t>(a.bias[i]) != std::bit_cast<std::uint64_t>(b.bias[i]))
        return false;
  }
  return true;
}

// Summary -----------------------------------------------------------------

NetSummary summary(const FeedForwardNet& net) {
  NetSummary s;
  s.depth = net.layers().size();
  for (const auto& L : net.layers()) {
    const std::size_t r = L.weights.rows();
    const std::size_t c = L.weights.cols();
    s.max_width = std::max(s.max_width, r);
    s.param_count += r * c + r;
    s.max_abs_weight = std::max(s.max_abs_weight, L.weights.max_abs());
    s.nonzero_weights += L.weights.nnz();
    s.bias_count += r;
  }
  s.sparse_param_count = s.nonzero_weights + s.bias_count;
  return s;
}

std::string format_summary(const NetSummary& s) {
  std::ostringstream os;
  os.precision(17);
  os << "depth=" << s.depth << " max_width=" << s.max_width << " param_count=" << s.param_count
     << " sparse_param_count=" << s.sparse_param_count << " nonzero_weights=" << s.nonzero_weights
     << " max_abs_weight=" << s.max_abs_weight;
  return os.str();
}

// Structural operations ---------------------------------------------------

namespace {

using Entry = WeightMatrix::Entry;

// next(prev(x)) for an Identity layer prev.
DenseLayer fold(const DenseLayer& prev, const DenseLayer& next) {
  DenseLayer out;
  out.weights = multiply(next.weights, prev.weights);
  out.bias.assign(next.weights.rows(), 0.0);
  next.weights.apply(prev.bias, out.bias);
  for (std::size_t r = 0; r < out.bias.size(); ++r) out.bias[r] += next.bias[r];
  out.activation = next.activation;
  return out;
}

DenseLayer identity_layer(std::size_t n) {
  return {WeightMatrix::identity(n), std::vector<double>(n, 0.0), Activation::identity};
}

// Prepends e pass-through SiLU layers to a canonical net; its first layer
// then reads x as (p - q).
std::vector<DenseLayer> pad_front(const FeedForwardNet& net, std::size_t e) {
  const std::size_t p = net.input_dim();
  std::vector<DenseLayer> out;
  if (e == 0) return net.layers();
  {
    std::vector<Entry> ent;
    for (std::size_t i = 0; i < p; ++i) {
      ent.push_back({i, i, 1.0});
      ent.push_back({p + i, i, -1.0});
    }
    out.push_back({WeightMatrix::from_entries(2 * p, p, std::move(ent)),
                   std::vector<double>(2 * p, 0.0), Activation::silu});
  }
  for (std::size_t l = 1; l < e; ++l) {
    std::vector<Entry> ent;
    for (std::size_t i = 0; i < p; ++i) {
      ent.push_back({i, i, 1.0});
      ent.push_back({i, p + i, -1.0});
      ent.push_back({p + i, i, -1.0});
      ent.push_back({p + i, p + i, 1.0});
    }
    out.push_back({WeightMatrix::from_entries(2 * p, 2 * p, std::move(ent)),
                   std::vector<double>(2 * p, 0.0), Activation::silu});
  }
  const auto& first = net.layers().front();
  std::vector<Entry> ent;
  for (const auto& x : first.weights.entries()) {
    ent.push_back({x.row, x.col, x.value});
    ent.push_back({x.row, p + x.col, -x.value});
  }
  out.push_back({WeightMatrix::from_entries(first.weights.rows(), 2 * p, std::move(ent)), first.bias,
                 first.activation});
  for (std::size_t l = 1; l < net.layers().size(); ++l) out.push_back(net.layers()[l]);
  return out;
}

void check_same_input(const std::vector<FeedForwardNet>& nets, const char* who) {
  if (nets.empty()) throw ContractError(std::string(who) + ": empty list of nets");
  for (const auto& n : nets)
    if (n.input_dim() != nets.front().input_dim())
      throw ContractError(std::string(who) + ": input dimensions differ (" +
                          std::to_string(n.input_dim()) + " vs " +
                          std::to_string(nets.front().input_dim()) + ")");
}

std::vector<FeedForwardNet> canonical_parts(const std::vector<FeedForwardNet>& nets,
                                            std::size_t& depth) {
  std::vector<FeedForwardNet> parts;
  parts.reserve(nets.size());
  depth = 0;
  for (const auto& n : nets) {
    parts.push_back(canonicalize(n));
    depth = std::max(depth, parts.back().depth());
  }
  return parts;
}

}  // namespace

FeedForwardNet canonicalize(const FeedForwardNet& net) {
  std::vector<DenseLayer> out;
  bool have_pending = false;
  DenseLayer pending;
  for (const auto& L : net.layers()) {
    DenseLayer cur = have_pending ? fold(pending, L) : L;
    have_pending = false;
    if (cur.activation == Activation::identity) {
      pending = std::move(cur);
      have_pending = true;
    } else {
      out.push_back(std::move(cur));
    }
  }
  if (have_pending)
    out.push_back(std::move(pending));
  else
    out.push_back(identity_layer(net.output_dim()));
  return FeedForwardNet(net.input_dim(), std::move(out));
}

FeedForwardNet merge_trailing_affine(const FeedForwardNet& net) {
  const auto& L = net.layers();
  if (L.size() < 2 || L[L.size() - 1].activation != Activation::identity ||
      L[L.size() - 2].activation != Activation::identity)
    return net;
  std::vector<DenseLayer> out(L.begin(), L.end() - 2);
  out.push_back(fold(L[L.size() - 2], L.back()));
  return FeedForwardNet(net.input_dim(), std::move(out));
}

FeedForwardNet compose(const FeedForwardNet& outer, const FeedForwardNet& inner,
                       const std::vector<WireSource>& wiring) {
  if (wiring.size() != outer.input_dim())
    throw ContractError("compose: wiring has " + std::to_string(wiring.size()) +
                        " entries, outer net takes " + std::to_string(outer.input_dim()) +
                        " inputs");
  std::vector<std::size_t> raw;
  for (const auto& w : wiring) {
    const bool inner_src = w.kind == WireSource::Kind::inner_output;
    const std::size_t limit = inner_src ? inner.output_dim() : inner.input_dim();
    if (w.index >= limit)
      throw ContractError(std::string("compose: wiring refers to ") +
                          (inner_src ? "inner output " : "raw input ") + std::to_string(w.index) +
                          " of " + std::to_string(limit));
    if (!inner_src) raw.push_back(w.index);
  }
  std::sort(raw.begin(), raw.end());
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  const std::size_t r = raw.size();
  auto slot = [&](std::size_t i) {
    return static_cast<std::size_t>(std::lower_bound(raw.begin(), raw.end(), i) - raw.begin());
  };

  const FeedForwardNet ci = canonicalize(inner);
  const auto& IL = ci.layers();
  const std::size_t n = IL.size();
  const std::size_t d = inner.input_dim();
  std::vector<DenseLayer> out;

  // Hidden inner layers, widened by the carried raw-input pairs.
  std::size_t prev_rows = d;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const auto& L = IL[l];
    const std::size_t h = L.weights.rows();
    std::vector<Entry> ent = L.weights.entries();
    const std::size_t cols = l == 0 ? d : prev_rows + 2 * r;
    for (std::size_t s = 0; s < r; ++s) {
      if (l == 0) {
        ent.push_back({h + s, raw[s], 1.0});
        ent.push_back({h + r + s, raw[s], -1.0});
      } else {
        ent.push_back({h + s, prev_rows + s, 1.0});
        ent.push_back({h + s, prev_rows + r + s, -1.0});
        ent.push_back({h + r + s, prev_rows + s, -1.0});
        ent.push_back({h + r + s, prev_rows + r + s, 1.0});
      }
    }
    std::vector<double> bias = L.bias;
    bias.resize(h + 2 * r, 0.0);
    out.push_back({WeightMatrix::from_entries(h + 2 * r, cols, std::move(ent)), std::move(bias),
                   Activation::silu});
    prev_rows = h;
  }

  // Inner output map and wiring folded into the outer first layer.
  const auto& F = IL.back();
  const auto& O = outer.layers().front();
  const std::size_t cols = n == 1 ? d : prev_rows + 2 * r;
  std::vector<Entry> ent;
  std::vector<double> acc(O.weights.rows(), 0.0);
  const auto fp = F.weights.row_ptr();
  const auto fc = F.weights.col_index();
  const auto fv = F.weights.values();
  for (const auto& e : O.weights.entries()) {
    const auto& w = wiring[e.col];
    if (w.kind == WireSource::Kind::inner_output) {
      for (std::size_t i = fp[w.index]; i < fp[w.index + 1]; ++i)
        ent.push_back({e.row, fc[i], e.value * fv[i]});
      acc[e.row] += e.value * F.bias[w.index];
    } else if (n == 1) {
      ent.push_back({e.row, w.index, e.value});
    } else {
      ent.push_back({e.row, prev_rows + slot(w.index), e.value});
      ent.push_back({e.row, prev_rows + r + slot(w.index), -e.value});
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += O.bias[i];
  out.push_back({WeightMatrix::from_entries(O.weights.rows(), cols, std::move(ent)), std::move(acc),
                 O.activation});
  for (std::size_t l = 1; l < outer.layers().size(); ++l) out.push_back(outer.layers()[l]);
  return FeedForwardNet(d, std::move(out));
}

FeedForwardNet compose(const FeedForwardNet& outer, const FeedForwardNet& inner) {
  std::vector<WireSource> wiring;
  for (std::size_t i = 0; i < outer.input_dim(); ++i) wiring.push_back(WireSource::inner(i));
  return compose(outer, inner, wiring);
}

FeedForwardNet stack_parallel(const std::vector<FeedForwardNet>& nets) {
  check_same_input(nets, "stack_parallel");
  std::size_t depth = 0;
  const auto parts = canonical_parts(nets, depth);
  std::vector<std::vector<DenseLayer>> padded;
  padded.reserve(parts.size());
  for (const auto& p : parts) padded.push_back(pad_front(p, depth - p.depth()));

  std::vector<DenseLayer> out;
  for (std::size_t l = 0; l < depth; ++l) {
    std::vector<Entry> ent;
    std::vector<double> bias;
    std::size_t row_off = 0;
    std::size_t col_off = 0;
    for (const auto& p : padded) {
      const auto& L = p[l];
      for (const auto& e : L.weights.entries())
        ent.push_back({row_off + e.row, (l == 0 ? 0 : col_off) + e.col, e.value});
      bias.insert(bias.end(), L.bias.begin(), L.bias.end());
      row_off += L.weights.rows();
      col_off += L.weights.cols();
    }
    const std::size_t cols = l == 0 ? nets.front().input_dim() : out.back().weights.rows();
    out.push_back({WeightMatrix::from_entries(row_off, cols, std::move(ent)), std::move(bias),
                   l + 1 == depth ? Activation::identity : Activation::silu});
  }
  return FeedForwardNet(nets.front().input_dim(), std::move(out));
}

FeedForwardNet affine_combination(const std::vector<FeedForwardNet>& nets,
                                  const std::vector<double>& coeffs, double constant) {
  check_same_input(nets, "affine_combination");
  if (coeffs.size() != nets.size())
    throw ContractError("affine_combination: " + std::to_string(nets.size()) + " nets but " +
                        std::to_string(coeffs.size()) + " coefficients");
  for (const auto& n : nets)
    if (n.output_dim() != 1)
      throw ContractError("affine_combination: parts must have scalar output");
  const FeedForwardNet stacked = stack_parallel(nets);
  auto layers = stacked.layers();
  layers.push_back({WeightMatrix::dense(1, coeffs.size(), coeffs), {constant}, Activation::identity});
  return FeedForwardNet(stacked.input_dim(), std::move(layers));
}

std::size_t padding_param_count(const std::vector<FeedForwardNet>& nets) {
  check_same_input(nets, "padding_param_count");
  std::size_t depth = 0;
  const auto parts = canonical_parts(nets, depth);
  const std::size_t p = nets.front().input_dim();
  std::size_t total = 0;
  for (const auto& part : parts) {
    const std::size_t e = depth - part.depth();
    if (e == 0) continue;
    total += 4 * p + (e - 1) * 6 * p + part.layers().front().weights.nnz();
  }
  return total;
}

FeedForwardNet affine_net(const WeightMatrix& w, std::vector<double> b) {
  return FeedForwardNet(w.cols(), {{w, std::move(b), Activation::identity}});
}

FeedForwardNet identity_net(std::size_t dim) {
  return FeedForwardNet(dim, {identity_layer(dim)});
}

FeedForwardNet constant_net(std::size_t input_dim, double value) {
  return FeedForwardNet(input_dim, {{WeightMatrix(1, input_dim), {value}, Activation::identity}});
}

}  // namespace silunet
