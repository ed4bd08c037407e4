#include "silunet/scalar_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "silunet/errors.hpp"
#include "silunet/findiff.hpp"

namespace silunet {

namespace {

void require_finite(double x, const char* who) {
  if (!std::isfinite(x)) throw DomainError(std::string(who) + ": non-finite argument");
}

double factorial(int n) {
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

// Exact for n <= 22, which covers every table order we use.
double factorial_exact(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double sigmoid(double x) {
  require_finite(x, "sigmoid");
  return sigmoid_unchecked(x);
}

double silu(double x) {
  require_finite(x, "silu");
  return silu_unchecked(x);
}

DerivPolyTable::DerivPolyTable(int max_order) : max_order_(max_order) {
  if (max_order < 0) throw CapacityError("DerivPolyTable: negative order");
  coeffs_.reserve(static_cast<std::size_t>(max_order) + 1);
  coeffs_.push_back({0, 1});
  for (int n = 0; n < max_order; ++n) {
    const auto& p = coeffs_.back();
    // P_n'(s) has coefficients i * p[i] on s^(i-1); multiply by (s - s^2).
    std::vector<Int> next(p.size() + 1, 0);
    for (std::size_t i = 1; i < p.size(); ++i) {
      Int d = 0;
      if (__builtin_mul_overflow(static_cast<Int>(i), p[i], &d) ||
          __builtin_add_overflow(next[i], d, &next[i]) ||
          __builtin_sub_overflow(next[i + 1], d, &next[i + 1]))
        throw CapacityError("DerivPolyTable: coefficient overflow at order " +
                            std::to_string(n + 1));
    }
    coeffs_.push_back(std::move(next));
  }
}

const DerivPolyTable& DerivPolyTable::standard() {
  static const DerivPolyTable table(20);
  return table;
}

const std::vector<DerivPolyTable::Int>& DerivPolyTable::coeffs(int n) const {
  if (n < 0 || n > max_order_)
    throw CapacityError("derivative order " + std::to_string(n) + " exceeds table order " +
                        std::to_string(max_order_));
  return coeffs_[static_cast<std::size_t>(n)];
}

int DerivPolyTable::degree(int n) const {
  const auto& c = coeffs(n);
  int d = static_cast<int>(c.size()) - 1;
  while (d > 0 && c[static_cast<std::size_t>(d)] == 0) --d;
  return d;
}

DerivPolyTable::Int DerivPolyTable::coefficient_sum(int n) const {
  Int s = 0;
  for (Int c : coeffs(n)) s += c;
  return s;
}

long double DerivPolyTable::evaluate(int n, long double s) const {
  const auto& c = coeffs(n);
  long double acc = 0.0L;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + static_cast<long double>(*it);
  return acc;
}

double sigmoid_deriv(const DerivPolyTable& table, int n, double a) {
  require_finite(a, "sigmoid_deriv");
  if (n < 0 || n > table.max_order())
    throw CapacityError("sigmoid_deriv: order " + std::to_string(n) + " exceeds table order " +
                        std::to_string(table.max_order()));
  // sigma^(n)(a) = (-1)^(n+1) sigma^(n)(-a) for n >= 1; evaluating where
  // sigma <= 1/2 keeps the alternating sum from cancelling.
  if (n >= 1 && a > 0.0) {
    const long double v = table.evaluate(n, sigmoid_unchecked(-a));
    return static_cast<double>(n % 2 == 1 ? v : -v);
  }
  return static_cast<double>(table.evaluate(n, sigmoid_unchecked(a)));
}

double sigmoid_deriv(int n, double a) {
  return sigmoid_deriv(DerivPolyTable::standard(), n, a);
}

double silu_shift_coeff(int n, double a) {
  if (n < 0) throw ContractError("silu_shift_coeff: negative order");
  if (n == 0) return a * sigmoid(a);
  return (a * sigmoid_deriv(n, a) + n * sigmoid_deriv(n - 1, a)) / factorial_exact(n);
}

double leading_coeff_square(double a) {
  return 2.0 * sigmoid_deriv(1, a) + a * sigmoid_deriv(2, a);
}

double leading_coeff_monomial(int m, double a) {
  if (m < 1) throw ContractError("leading_coeff_monomial: m must be >= 1");
  return a * sigmoid_deriv(m, a) + m * sigmoid_deriv(m - 1, a);
}

double find_degenerate_shift(double lo, double hi) {
  double flo = leading_coeff_square(lo);
  const double fhi = leading_coeff_square(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw DomainError("find_degenerate_shift: K has no sign change on the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = leading_coeff_square(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool DerivBoundCert::recheck(const DerivPolyTable& table, double rel_tol) const {
  double best = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double d = std::abs(static_cast<double>(table.evaluate(n, sigmoid_unchecked(a))));
    if (d == 0.0) continue;
    const double r = std::exp(std::log(d) - std::lgamma(n + 1.0) - n * std::log(rho));
    best = std::max(best, r);
  }
  return std::abs(best - fitted_C) <= rel_tol * std::max(best, fitted_C);
}

DerivBoundCert verify_cauchy_bound(double a, int n_max) {
  const auto& table = DerivPolyTable::standard();
  if (n_max < 0 || n_max > table.max_order())
    throw CapacityError("verify_cauchy_bound: n_max " + std::to_string(n_max) +
                        " exceeds table order");
  DerivBoundCert cert;
  cert.a = a;
  cert.n_max = n_max;
  cert.rho = 2.0 / std::numbers::pi;
  const double log_rho = std::log(cert.rho);
  double best = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= n_max; ++n) {
    const double d = std::abs(sigmoid_deriv(n, a));
    const double lr = d == 0.0 ? -std::numeric_limits<double>::infinity()
                               : std::log(d) - std::lgamma(n + 1.0) - n * log_rho;
    cert.log_ratios.push_back(lr);
    if (lr > best) {
      best = lr;
      cert.argmax_n = n;
    }
  }
  cert.fitted_C = std::exp(best);

  // Trend over the upper half: a positive slope means the ratios grow.
  std::vector<double> ns, ys;
  for (int n = n_max / 2; n <= n_max; ++n) {
    const double lr = cert.log_ratios[static_cast<std::size_t>(n)];
    if (std::isfinite(lr)) {
      ns.push_back(n);
      ys.push_back(lr);
    }
  }
  if (ns.size() >= 3) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      mx += ns[i];
      my += ys[i];
    }
    mx /= static_cast<double>(ns.size());
    my /= static_cast<double>(ns.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      sxy += (ns[i] - mx) * (ys[i] - my);
      sxx += (ns[i] - mx) * (ns[i] - mx);
    }
    cert.tail_slope = sxy / sxx;
  }
  cert.valid = std::isfinite(cert.fitted_C) && cert.fitted_C > 0.0 && cert.tail_slope <= 0.0;
  return cert;
}

double residual_coeff_square(int j, double a) {
  if (j < 2) throw ContractError("residual_coeff_square: j must be >= 2");
  const double K = leading_coeff_square(a);
  if (std::abs(K) < degenerate_shift_tol)
    throw DegenerateShiftError("residual_coeff_square: K(a) vanishes at a=" + std::to_string(a));
  const double odd = sigmoid_deriv(2 * j - 1, a) / factorial_exact(2 * j - 1);
  const double even = sigmoid_deriv(2 * j, a) / factorial_exact(2 * j);
  return 2.0 * (odd + a * even) / K;
}

double residual_coeff_monomial(int m, int n, double a) {
  if (m < 1 || n <= m)
    throw ContractError("residual_coeff_monomial: requires n > m >= 1 (got m=" +
                        std::to_string(m) + ", n=" + std::to_string(n) + ")");
  const double Km = leading_coeff_monomial(m, a);
  if (std::abs(Km) < degenerate_shift_tol)
    throw DegenerateShiftError("residual_coeff_monomial: K_m(a) vanishes at m=" +
                               std::to_string(m) + ", a=" + std::to_string(a));
  const double diff = findiff::centered_power_diff(m, n);
  const double bracket = a * sigmoid_deriv(n, a) + n * sigmoid_deriv(n - 1, a);
  return diff / (factorial(n) * Km) * bracket;
}

}  // namespace silunet
