#pragma once

#include <climits>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "silunet/kernels.hpp"
#include "silunet/network.hpp"

namespace silunet {

struct SquareParams {
  double a = 0.0;
  double beta = 0.27;
  int k = 3;
  double B = 1.0;
};

struct MonomialParams {
  int m = 2;
  double a = 0.0;
  double beta = 0.27;
  int k = 3;
  double B = 1.0;
};

/// err(k) ~ C_est * omega_est^(-rate_exponent * k), fitted in log space.
struct RateFit {
  double C_est = 0.0;
  double omega_est = 0.0;
  int rate_exponent = 2;
  /// RMS residual of the free log-linear fit.
  double residual = 0.0;
  /// RMS residuals with omega pinned to 1/beta and rate 1 or 2.
  double residual_rate1 = 0.0;
  double residual_rate2 = 0.0;
  /// Fitted d ln(err) / dk.
  double slope = 0.0;
  /// The error sequence stopped decreasing; only the prefix was fitted.
  bool truncated = false;
  double beta = 0.0;
  /// Largest k the scale guard admits for the calibrated builder.
  int k_max = INT_MAX;
  std::vector<int> ks;
  std::vector<double> errors;
  std::size_t fitted_points = 0;
};

/// power * k * ln(1/beta) must stay below this, so beta^(-power k) is finite.
inline constexpr double scale_exponent_guard = 600.0;

/// OverflowError unless beta^(-power k) passes the guard; DomainError for
/// beta outside (0, 1) or negative k.
void check_scale(int power, int k, double beta, const char* who);
int max_k_for_scale(int power, double beta);

/// Q_k(x) = gamma . SiLU(W x + b), one hidden layer of 3 neurons.
FeedForwardNet build_square(const SquareParams& p);

/// M_k(x, y) ~ x y, one hidden layer of 4 neurons.
FeedForwardNet build_product(double a, double beta, int k);

/// P_{m,k} ~ x^m by P_{j+1} = M_k(P_j(x), x), with P_1 = x and P_2 = Q_k.
FeedForwardNet build_monomial_deep(const MonomialParams& p);

/// B + max_{|x| <= B} |P_{j,k}(x)| for j = 1..m, measured on a grid: the
/// range the product stage j + 1 has to cover.
std::vector<double> deep_monomial_input_bounds(const MonomialParams& p, std::size_t grid = 2001);

/// y_0 = 1, y_i = W_y . SiLU(W_h y_{i-1} + U_h x + b_h); returns y_0..y_m.
std::vector<double> run_rnn_monomials(int m, double a, double beta, int k, double x);

/// The recurrence unrolled into nets y_0..y_m (y_0 is the constant 1).
std::vector<FeedForwardNet> rnn_basis(int m, double a, double beta, int k);

/// Q^m_k, one hidden layer of m + 1 neurons built from the m-th finite
/// difference of SiLU(a + beta^k t x).  DegenerateShiftError when K_m(a)
/// vanishes, which includes a = 0 for odd m >= 3.
FeedForwardNet build_monomial_shallow(const MonomialParams& p);

enum class PolyVariant { deep, shallow };

inline constexpr int max_poly_degree = 12;

/// sum_m coeffs[m] x^m as an affine combination of monomial nets.
/// coeffs[0] becomes the bias of the combination layer.
FeedForwardNet build_polynomial(std::span<const double> coeffs, double a, double beta, int k,
                                PolyVariant variant = PolyVariant::deep);

/// Smallest k with C omega^(-rate k) <= eps.  0 when eps >= C_est;
/// InfeasibleError when k would exceed fit.k_max.
int choose_k(double eps, const RateFit& fit);

/// Measures sup_error(builder(k), target) for each k and fits the rate.
/// ks needs at least three values.
RateFit calibrate_rate(const std::function<FeedForwardNet(int)>& builder, const ScalarField& target,
                       const Box& box, std::vector<int> ks, double beta, int scale_power,
                       std::size_t grid_per_dim = 0);

/// Fit on a given error sequence (ks ascending).
RateFit fit_rate(std::vector<int> ks, std::vector<double> errors, double beta);

std::string rate_fit_csv_header();
std::string rate_fit_csv_row(const RateFit& f);

struct PolyFit {
  std::vector<double> coeffs;
  long rank = 0;
  bool rank_deficient = false;
  std::string warning;
};

/// Least squares min ||y - P c|| with P[j][m] = basis[m](xs[j]).  The
/// minimum-norm solution is returned for rank-deficient designs.
PolyFit fit_poly_coeffs(std::span<const double> xs, std::span<const double> ys,
                        const std::vector<FeedForwardNet>& basis);

}  // namespace silunet
