#pragma once

#include <string>
#include <vector>

#include "silunet/constructors.hpp"
#include "silunet/kernels.hpp"
#include "silunet/network.hpp"

namespace silunet {

enum class Builder { square, product, monomial_deep, monomial_shallow, polynomial };

/// Accepts both "monomial-deep" and "monomial_deep".  DomainError otherwise.
Builder parse_builder(const std::string& name);
const char* builder_name(Builder b) noexcept;

/// Builder-specific extras live next to the grids: m for the monomials,
/// coeffs for the polynomial.
struct SweepSpec {
  Builder builder = Builder::square;
  std::vector<double> a_grid{0.0};
  std::vector<double> beta_grid{0.27};
  std::vector<int> k_grid{3};
  double B = 1.0;
  std::size_t grid_per_dim = 0;
  int m = 2;
  std::vector<double> coeffs{1.0, 1.0, 1.0};
  PolyVariant variant = PolyVariant::deep;

  /// Nonempty grids, B > 0, m in [1, 12]; DomainError otherwise.
  void validate() const;
};

FeedForwardNet build_cell(const SweepSpec& spec, double a, double beta, int k);
ScalarField builder_target(const SweepSpec& spec);
Box builder_box(const SweepSpec& spec);
/// Exponent p in beta^(-p k) that the builder's weights reach.
int builder_scale_power(const SweepSpec& spec);

struct SweepRow {
  Builder builder = Builder::square;
  double a = 0.0;
  double beta = 0.0;
  int k = 0;
  /// NaN for error rows.
  double sup_error = 0.0;
  std::vector<double> argmax;
  double runtime_ms = 0.0;
  /// Empty for ok rows, otherwise "<kind>: <message>".
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

/// Every (a, beta, k) cell, sorted by (a, beta, k).  Cells run on up to
/// `jobs` threads; failures become error rows.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

/// '#' comment lines with the sweep parameters, a header, one row per cell.  Numbers use
/// %.17g; runtime_ms is emitted only when `timing` is set.
std::string sweep_csv(const SweepSpec& spec, const SweepResult& result, bool timing = false);

/// Heatmap of log10 error over the two grids with more than one value
/// (first value of the third), or a line plot when only one grid varies.
std::string sweep_svg(const SweepSpec& spec, const SweepResult& result);

struct CalibrateOutcome {
  RateFit fit;
  /// Only the square builder carries the omega check.
  bool omega_checked = false;
  bool omega_ok = true;
};

/// Front end to calibrate_rate.  ContractError for fewer than three ks.
CalibrateOutcome run_calibrate(const SweepSpec& spec, double a, double beta, std::vector<int> ks);

std::string calibrate_csv(const SweepSpec& spec, double a, const CalibrateOutcome& out);

/// Figures 3 and 5 to 16.  Writes fig<id>.csv and fig<id>.svg under
/// out_dir and returns the paths.  DomainError with an explanation for the
/// architecture diagrams and training plots, and for unknown ids.
std::vector<std::string> run_figure(int id, const std::string& out_dir);
std::vector<int> supported_figures();

/// RFC-4180 quoting when needed.
std::string csv_field(const std::string& s);
/// %.17g.
std::string csv_real(double v);

}  // namespace silunet
