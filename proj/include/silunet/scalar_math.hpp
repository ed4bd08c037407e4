#pragma once

#include <cmath>
#include <vector>

namespace silunet {

/// |K| below this is treated as a vanishing leading coefficient.
inline constexpr double degenerate_shift_tol = 1e-10;

/// Logistic sigmoid, evaluated on the branch that never overflows.
/// Throws DomainError for non-finite input.
double sigmoid(double x);

/// x * sigmoid(x).  Throws DomainError for non-finite input.
double silu(double x);

// Hot-path versions used by the network kernels; no argument checking.
inline double sigmoid_unchecked(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double silu_unchecked(double x) noexcept { return x * sigmoid_unchecked(x); }

/// Exact integer polynomials P_n with sigma^(n)(x) = P_n(sigma(x)).
///
/// Built from P_0(s) = s and P_{n+1}(s) = P_n'(s) * (s - s^2).  Coefficients
/// are held as 128-bit integers; construction fails with CapacityError if a
/// coefficient would overflow.  Immutable after construction.
class DerivPolyTable {
 public:
  __extension__ typedef __int128 Int;

  explicit DerivPolyTable(int max_order = 20);

  /// Process-wide table of order 20.
  static const DerivPolyTable& standard();

  int max_order() const noexcept { return max_order_; }
  /// Coefficients of P_n, lowest power of s first; size n + 2.
  const std::vector<Int>& coeffs(int n) const;
  int degree(int n) const;
  Int coefficient_sum(int n) const;

  /// P_n(s), Horner in long double.
  long double evaluate(int n, long double s) const;

 private:
  int max_order_;
  std::vector<std::vector<Int>> coeffs_;
};

/// n-th derivative of the sigmoid at a.  CapacityError when n exceeds the
/// table order.
double sigmoid_deriv(int n, double a);
double sigmoid_deriv(const DerivPolyTable& table, int n, double a);

/// Coefficient of x^n in the Taylor expansion of SiLU(x + a):
/// [a sigma^(n)(a) + n sigma^(n-1)(a)] / n!, and a*sigma(a) for n = 0.
double silu_shift_coeff(int n, double a);

/// K(a) = 2 sigma'(a) + a sigma''(a), the x^2 coefficient of
/// SiLU(a + x) + SiLU(a - x) - 2 SiLU(a).
double leading_coeff_square(double a);

/// K_m(a) = a sigma^(m)(a) + m sigma^(m-1)(a).  Equals leading_coeff_square
/// for m = 2.
double leading_coeff_monomial(int m, double a);

/// Root of K on [lo, hi] by bisection; requires a sign change.
double find_degenerate_shift(double lo, double hi);

struct DerivBoundCert {
  double a = 0.0;
  int n_max = 0;
  /// max over n <= n_max of |sigma^(n)(a)| / (n! rho^n).
  double fitted_C = 0.0;
  double rho = 0.0;
  int argmax_n = 0;
  /// log of |sigma^(n)(a)| / (n! rho^n); -inf where the derivative vanishes.
  std::vector<double> log_ratios;
  /// Least-squares slope of the finite log ratios over the upper half of
  /// the range (0 when fewer than three points are available).
  double tail_slope = 0.0;
  bool valid = false;

  /// Re-derives fitted_C from the table and compares.
  bool recheck(const DerivPolyTable& table, double rel_tol = 1e-12) const;
};

/// Empirical certificate for |sigma^(n)(a) / n!| <= C (2/pi)^n, n <= n_max.
/// The ratios are formed in the log domain so n! never overflows.  The
/// certificate is valid when fitted_C is finite and positive and the tail
/// of the ratio sequence shows no growth.
DerivBoundCert verify_cauchy_bound(double a, int n_max);

/// c_{2j}(a), the x^{2j} coefficient of g_a(x) / K(a); j >= 2.
double residual_coeff_square(int j, double a);

/// A_n, the x^n coefficient of g_{a,m}(x) / K_m(a); n > m.
double residual_coeff_monomial(int m, int n, double a);

}  // namespace silunet
