#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace silunet {

enum class Activation { silu, identity };

const char* activation_name(Activation a) noexcept;

/// Real matrix with dense semantics, stored row-compressed.  Entries that
/// are exactly +0.0 are not stored; -0.0 is kept so that serialization
/// round-trips bit for bit.
class WeightMatrix {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };

  WeightMatrix() = default;
  /// All-zero rows x cols matrix.
  WeightMatrix(std::size_t rows, std::size_t cols);

  static WeightMatrix dense(std::size_t rows, std::size_t cols, std::span<const double> row_major);
  /// Duplicate (row, col) entries are summed in input order.
  static WeightMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<Entry> entries);
  static WeightMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  double at(std::size_t r, std::size_t c) const;
  std::vector<double> to_dense() const;
  std::vector<Entry> entries() const;

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_index() const noexcept { return col_; }
  std::span<const double> values() const noexcept { return values_; }

  /// y = W x.
  void apply(std::span<const double> x, std::span<double> y) const;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  /// Same shape and bitwise-identical stored entries.
  bool bitwise_equal(const WeightMatrix& other) const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<double> values_;
};

/// a * b.
WeightMatrix multiply(const WeightMatrix& a, const WeightMatrix& b);

struct DenseLayer {
  WeightMatrix weights;
  std::vector<double> bias;
  Activation activation = Activation::identity;
};

/// Chain of affine maps, each followed by SiLU or the identity.
/// Validated on construction and immutable afterwards.
class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  FeedForwardNet(std::size_t input_dim, std::vector<DenseLayer> layers);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept;
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::size_t depth() const noexcept { return layers_.size(); }

  /// Forward pass.  ContractError on a dimension mismatch, DomainError on
  /// non-finite input, OverflowError naming the layer when an intermediate
  /// leaves [-1e300, 1e300].
  std::vector<double> evaluate(std::span<const double> x) const;
  /// Scalar-in, first-output convenience.
  double evaluate1(double x) const;

  bool bitwise_equal(const FeedForwardNet& other) const noexcept;

 private:
  std::size_t input_dim_ = 0;
  std::vector<DenseLayer> layers_;
};

inline constexpr double overflow_guard = 1e300;

/// Layer-count and parameter bookkeeping.
///
/// param_count is the dense count sum(rows * cols + rows).  The sparse count
/// (stored nonzero weights plus every bias) is the one that stays additive
/// under stacking and matches hand counts of constructed nets.
struct NetSummary {
  std::size_t depth = 0;
  std::size_t max_width = 0;
  std::size_t param_count = 0;
  double max_abs_weight = 0.0;
  std::size_t nonzero_weights = 0;
  std::size_t bias_count = 0;
  std::size_t sparse_param_count = 0;
};

NetSummary summary(const FeedForwardNet& net);
std::string format_summary(const NetSummary& s);

/// Where an input of the outer net comes from in compose().
struct WireSource {
  enum class Kind { inner_output, raw_input };
  Kind kind = Kind::inner_output;
  std::size_t index = 0;

  static WireSource inner(std::size_t i) { return {Kind::inner_output, i}; }
  static WireSource raw(std::size_t i) { return {Kind::raw_input, i}; }
};

/// Net computing x -> outer(u) with u_i = inner(x)[w_i] or x[w_i].
/// Raw inputs needed after the first inner layer are carried through the
/// inner SiLU layers as pairs (SiLU(x), SiLU(-x)), using x = SiLU(x) - SiLU(-x).
FeedForwardNet compose(const FeedForwardNet& outer, const FeedForwardNet& inner,
                       const std::vector<WireSource>& wiring);

/// Plain sequential composition: outer(inner(x)).
FeedForwardNet compose(const FeedForwardNet& outer, const FeedForwardNet& inner);

/// Folds interior Identity layers into their successor and appends an
/// Identity output layer when the net ends in SiLU.  The result has only
/// SiLU hidden layers and one Identity output layer.
FeedForwardNet canonicalize(const FeedForwardNet& net);

/// Folds the last layer into the one before it when both are Identity.
FeedForwardNet merge_trailing_affine(const FeedForwardNet& net);

/// sum_i coeffs[i] * nets[i](x) + constant.  Parts are canonicalized,
/// shallower parts are front-padded with pass-through SiLU layers, the parts
/// run side by side and a final Identity layer forms the combination.
FeedForwardNet affine_combination(const std::vector<FeedForwardNet>& nets,
                                  const std::vector<double>& coeffs, double constant);

/// Runs the nets side by side; output i is nets[i]'s scalar output.
FeedForwardNet stack_parallel(const std::vector<FeedForwardNet>& nets);

/// Number of pass-through weights and biases affine_combination adds for
/// padding, so that the sparse count obeys
/// combined = sum(parts) + padding + (n + 1).
std::size_t padding_param_count(const std::vector<FeedForwardNet>& nets);

/// x -> W x + b as a single Identity layer.
FeedForwardNet affine_net(const WeightMatrix& w, std::vector<double> b);
FeedForwardNet identity_net(std::size_t dim);
FeedForwardNet constant_net(std::size_t input_dim, double value);

// serialize.cpp

/// JSON text; reals are shortest round-trip decimal strings.
std::string serialize(const FeedForwardNet& net);
/// ParseError with the byte offset on malformed input.
FeedForwardNet deserialize(std::string_view text);

FeedForwardNet load_net(const std::string& path);
void save_net(const FeedForwardNet& net, const std::string& path);

/// Shortest decimal string that reads back to exactly x.
std::string format_real(double x);
/// Inverse of format_real.  ParseError (offset within s) on bad input.
double parse_real(std::string_view s);

}  // namespace silunet
