#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "silunet/constructors.hpp"
#include "silunet/kernels.hpp"
#include "silunet/network.hpp"

namespace silunet {

/// Smoothed indicator of [lo, hi): difference of two half-steps.
struct BumpParams {
  double lo = 0.0;
  double hi = 1.0;
  double tau = 0.125;
  double kappa = 10.0;
};

/// Piecewise-constant function: values[i] on [breakpoints[i], breakpoints[i+1]),
/// zero elsewhere.
struct StepSpec {
  std::vector<double> breakpoints;
  std::vector<double> values;

  void validate() const;
  double operator()(double x) const;
  double min_length() const;
};

/// Inverse modulus of continuity: the largest width over which f moves by
/// at most eps.
class ModulusSpec {
 public:
  enum class Kind { lipschitz, hoelder, sampled };

  static ModulusSpec lipschitz(double L);
  static ModulusSpec hoelder(double C, double exponent);
  /// Sliding max - min over a uniform sample of f, inflated by a safety
  /// factor of 2.
  static ModulusSpec sampled(const std::function<double(double)>& f, double lo, double hi,
                             std::size_t samples = 20001);

  Kind kind() const noexcept { return kind_; }
  /// Nonincreasing as eps decreases; +inf for a constant function.
  double inverse(double eps) const;

  static constexpr double sampled_safety = 2.0;

 private:
  Kind kind_ = Kind::lipschitz;
  double L_ = 0.0;
  double C_ = 0.0;
  double exponent_ = 1.0;
  double spacing_ = 0.0;
  std::vector<double> values_;

  double sampled_oscillation(std::size_t steps) const;
};

/// x -> w SiLU(kappa (1 - 2 w SiLU(kappa (alpha - x) / tau))), w = 1/kappa.
FeedForwardNet build_half_step(double alpha, double tau, double kappa);

/// Two half-steps side by side with a subtracting output layer.
FeedForwardNet build_bump(const BumpParams& p);

struct KappaTau {
  double kappa = 0.0;
  double tau = 0.0;
};

/// kappa = max(10, 4 / (e delta)), tau = min_len / 8.  delta in (0, 1/2).
KappaTau choose_kappa_tau(double delta, double min_len);

/// [edge - tau, edge + tau] for every edge; each half-step's transition lies
/// inside [edge - tau, edge].
std::vector<Band> transition_bands(std::span<const double> edges, double tau);

struct StepApprox {
  FeedForwardNet net;
  KappaTau schedule;
  /// Delta handed to choose_kappa_tau (after splitting across the bumps).
  double bump_delta = 0.0;
  /// Bumps in the net; intervals with value 0 get none.
  std::size_t bumps = 0;
  std::vector<Band> bands;
};

/// sum_j values[j] * bump_j with one shared (kappa, tau); the bump output
/// layers are merged into the combination layer.
StepApprox build_step_approx(const StepSpec& spec, double delta);

struct ContinuousApprox {
  StepApprox step;
  /// Midpoint values on the uniform cells; the last cell is stretched by
  /// half a cell past hi.
  StepSpec psi;
  /// Cells of the uniform partition.
  std::size_t N = 0;
  double cell_width = 0.0;
  /// omega^{-1}(eps) and omega^{-1}(eps / 2).
  double inverse_modulus = 0.0;
  double inverse_modulus_half = 0.0;
};

inline constexpr std::size_t max_partition_cells = 1000000;

/// Uniform partition with cells no wider than omega^{-1}(eps/2), the
/// midpoint values as a step function, then build_step_approx at eps/2.
ContinuousApprox build_continuous_approx(const std::function<double(double)>& f, double lo,
                                         double hi, const ModulusSpec& modulus, double eps);

struct PolyApprox {
  /// Coefficients in x, lowest degree first.
  std::vector<double> coeffs;
  /// Coefficients in t = x / B.
  std::vector<double> coeffs_scaled;
  double B = 1.0;
  double residual = 0.0;
  int degree = 0;
};

inline constexpr int weierstrass_degree_cap = 64;

/// Chebyshev interpolation on [-B, B] at degrees 2, 4, 8, ... up to 64 until
/// the residual on a uniform grid of 10 (n + 1) + 1 points is below delta,
/// then trailing coefficients are dropped while the residual stays below
/// delta.  InfeasibleError when the cap is reached.
PolyApprox weierstrass_poly(const std::function<double(double)>& f, double B, double delta);

/// Horner evaluation, lowest degree first.
double poly_eval(std::span<const double> coeffs, double x);

struct PolyNetApprox {
  FeedForwardNet net;
  PolyApprox poly;
  RateFit fit;
  int k = 0;
  /// sup |net - poly| on [-B, B] at the chosen k.
  double network_error = 0.0;
};

/// weierstrass_poly at eps/2, realized by build_polynomial in t = x/B with
/// k from calibrate_rate + choose_k at eps/2 (raised while the measured
/// network error is still above eps/2).
PolyNetApprox build_continuous_via_poly(const std::function<double(double)>& f, double B,
                                        double eps, double a = 0.0, double beta = 0.27,
                                        PolyVariant variant = PolyVariant::deep);

}  // namespace silunet
