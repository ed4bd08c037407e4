#include "silunet/constructors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

#include "silunet/errors.hpp"
#include "silunet/findiff.hpp"
#include "silunet/scalar_math.hpp"

namespace silunet {

namespace {

using Entry = WeightMatrix::Entry;

void check_common(double a, double beta, int k, const char* who) {
  if (!std::isfinite(a)) throw DomainError(std::string(who) + ": shift a must be finite");
  check_scale(2, k, beta, who);
}

double checked_leading(double K, const std::string& who, const std::string& detail) {
  if (std::abs(K) < degenerate_shift_tol)
    throw DegenerateShiftError(who + ": leading coefficient vanishes (" + detail + ")");
  return K;
}

}  // namespace

void check_scale(int power, int k, double beta, const char* who) {
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError(std::string(who) + ": beta must lie in (0, 1)");
  if (k < 0) throw DomainError(std::string(who) + ": k must be >= 0");
  const double e = power * static_cast<double>(k) * std::log(1.0 / beta);
  if (e > scale_exponent_guard) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: beta^(-%d k) = exp(%.6g) exceeds the scale guard exp(%g)",
                  who, power, e, scale_exponent_guard);
    throw OverflowError(buf);
  }
}

int max_k_for_scale(int power, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("max_k_for_scale: beta must lie in (0, 1)");
  return static_cast<int>(std::floor(scale_exponent_guard / (power * std::log(1.0 / beta))));
}

FeedForwardNet build_square(const SquareParams& p) {
  check_common(p.a, p.beta, p.k, "build_square");
  const double K = checked_leading(leading_coeff_square(p.a), "build_square",
                                   "K(a) = 0 at a = " + std::to_string(p.a));
  const double bk = std::pow(p.beta, p.k);
  const double g = std::pow(p.beta, -2.0 * p.k) / K;
  const double w[3] = {bk, -bk, 0.0};
  const double gamma[3] = {g, g, -2.0 * g};
  return FeedForwardNet(1, {{WeightMatrix::dense(3, 1, w), {p.a, p.a, p.a}, Activation::silu},
                            {WeightMatrix::dense(1, 3, gamma), {0.0}, Activation::identity}});
}

FeedForwardNet build_product(double a, double beta, int k) {
  check_common(a, beta, k, "build_product");
  const double K = checked_leading(leading_coeff_square(a), "build_product",
                                   "K(a) = 0 at a = " + std::to_string(a));
  const double bk = std::pow(beta, k);
  const double g = std::pow(beta, -2.0 * k) / (4.0 * K);
  const double w[8] = {bk, bk, -bk, -bk, bk, -bk, -bk, bk};
  const double gamma[4] = {g, g, -g, -g};
  return FeedForwardNet(2, {{WeightMatrix::dense(4, 2, w), {a, a, a, a}, Activation::silu},
                            {WeightMatrix::dense(1, 4, gamma), {0.0}, Activation::identity}});
}

FeedForwardNet build_monomial_deep(const MonomialParams& p) {
  if (p.m < 1) throw DomainError("build_monomial_deep: m must be >= 1");
  if (p.m > max_poly_degree)
    throw CapacityError("build_monomial_deep: degree " + std::to_string(p.m) + " exceeds " +
                        std::to_string(max_poly_degree));
  if (p.m == 1) return identity_net(1);
  FeedForwardNet net = build_square({p.a, p.beta, p.k, p.B});
  if (p.m == 2) return net;
  const FeedForwardNet M = build_product(p.a, p.beta, p.k);
  const std::vector<WireSource> wiring{WireSource::inner(0), WireSource::raw(0)};
  for (int j = 3; j <= p.m; ++j) net = compose(M, net, wiring);
  return net;
}

std::vector<double> deep_monomial_input_bounds(const MonomialParams& p, std::size_t grid) {
  const auto xs = linspace(-p.B, p.B, grid);
  std::vector<double> out;
  for (int j = 1; j <= p.m; ++j) {
    MonomialParams q = p;
    q.m = j;
    const FeedForwardNet net = build_monomial_deep(q);
    double mx = 0.0;
    for (double x : xs) mx = std::max(mx, std::abs(net.evaluate1(x)));
    out.push_back(p.B + mx);
  }
  return out;
}

std::vector<double> run_rnn_monomials(int m, double a, double beta, int k, double x) {
  if (m < 0) throw DomainError("run_rnn_monomials: m must be >= 0");
  check_common(a, beta, k, "run_rnn_monomials");
  if (!std::isfinite(x)) throw DomainError("run_rnn_monomials: non-finite input");
  const double K = checked_leading(leading_coeff_square(a), "run_rnn_monomials",
                                   "K(a) = 0 at a = " + std::to_string(a));
  const double bk = std::pow(beta, k);
  const double g = std::pow(beta, -2.0 * k) / (4.0 * K);
  // Shared across every step.
  const double Wh[4] = {bk, -bk, bk, -bk};
  const double Uh[4] = {bk, -bk, -bk, bk};
  const double Wy[4] = {g, g, -g, -g};
  std::vector<double> y{1.0};
  for (int i = 1; i <= m; ++i) {
    double acc = 0.0;
    for (int r = 0; r < 4; ++r) acc += Wy[r] * silu_unchecked(Wh[r] * y.back() + Uh[r] * x + a);
    if (!(std::abs(acc) <= overflow_guard))
      throw OverflowError("run_rnn_monomials: state out of range at step " + std::to_string(i));
    y.push_back(acc);
  }
  return y;
}

std::vector<FeedForwardNet> rnn_basis(int m, double a, double beta, int k) {
  if (m < 0) throw DomainError("rnn_basis: m must be >= 0");
  std::vector<FeedForwardNet> out{constant_net(1, 1.0)};
  if (m == 0) return out;
  const FeedForwardNet M = build_product(a, beta, k);
  const std::vector<WireSource> wiring{WireSource::inner(0), WireSource::raw(0)};
  for (int i = 1; i <= m; ++i) out.push_back(compose(M, out.back(), wiring));
  return out;
}

FeedForwardNet build_monomial_shallow(const MonomialParams& p) {
  if (p.m < 1) throw DomainError("build_monomial_shallow: m must be >= 1");
  if (p.m > max_poly_degree)
    throw CapacityError("build_monomial_shallow: degree " + std::to_string(p.m) + " exceeds " +
                        std::to_string(max_poly_degree));
  if (!std::isfinite(p.a)) throw DomainError("build_monomial_shallow: shift a must be finite");
  check_scale(p.m, p.k, p.beta, "build_monomial_shallow");
  const double Km = leading_coeff_monomial(p.m, p.a);
  std::string detail = "K_" + std::to_string(p.m) + "(a) = 0 at a = " + std::to_string(p.a);
  if (p.a == 0.0 && p.m >= 3 && p.m % 2 == 1)
    detail += "; K_m(0) = m sigma^(m-1)(0) and even-order derivatives of the sigmoid vanish "
              "at 0, so odd m >= 3 needs a != 0";
  checked_leading(Km, "build_monomial_shallow", detail);

  const int m = p.m;
  const double bk = std::pow(p.beta, p.k);
  const double scale = std::pow(p.beta, -static_cast<double>(m) * p.k) / Km;
  std::vector<double> w(static_cast<std::size_t>(m) + 1);
  std::vector<double> gamma(w.size());
  for (int j = 0; j <= m; ++j) {
    w[static_cast<std::size_t>(j)] = (j - 0.5 * m) * bk;
    const double c = static_cast<double>(findiff::binomial(m, j));
    gamma[static_cast<std::size_t>(j)] = ((m - j) % 2 == 0 ? c : -c) * scale;
  }
  return FeedForwardNet(
      1, {{WeightMatrix::dense(w.size(), 1, w), std::vector<double>(w.size(), p.a), Activation::silu},
          {WeightMatrix::dense(1, gamma.size(), gamma), {0.0}, Activation::identity}});
}

FeedForwardNet build_polynomial(std::span<const double> coeffs, double a, double beta, int k,
                                PolyVariant variant) {
  if (coeffs.empty()) throw ContractError("build_polynomial: no coefficients");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw DomainError("build_polynomial: non-finite coefficient");
  int degree = static_cast<int>(coeffs.size()) - 1;
  while (degree > 0 && coeffs[static_cast<std::size_t>(degree)] == 0.0) --degree;
  if (degree > max_poly_degree)
    throw CapacityError("build_polynomial: degree " + std::to_string(degree) + " exceeds " +
                        std::to_string(max_poly_degree));
  std::vector<FeedForwardNet> parts;
  std::vector<double> weights;
  for (int m = 1; m <= degree; ++m) {
    const double c = coeffs[static_cast<std::size_t>(m)];
    if (c == 0.0) continue;
    const MonomialParams mp{m, a, beta, k, 1.0};
    parts.push_back(variant == PolyVariant::deep || m == 1 ? build_monomial_deep(mp)
                                                           : build_monomial_shallow(mp));
    weights.push_back(c);
  }
  if (parts.empty()) return constant_net(1, coeffs[0]);
  return affine_combination(parts, weights, coeffs[0]);
}

int choose_k(double eps, const RateFit& fit) {
  if (!(eps > 0.0)) throw DomainError("choose_k: eps must be positive");
  if (!(fit.omega_est > 1.0)) throw ContractError("choose_k: fitted omega must exceed 1");
  if (!(fit.C_est > 0.0)) throw ContractError("choose_k: fitted C must be positive");
  if (eps >= fit.C_est) return 0;
  const double raw =
      (std::log(fit.C_est) - std::log(eps)) / (fit.rate_exponent * std::log(fit.omega_est));
  const double k = std::ceil(raw - 1e-9);
  if (k > fit.k_max) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "choose_k: eps = %.6g needs k = %.0f, beyond the scale guard limit k = %d", eps,
                  k, fit.k_max);
    throw InfeasibleError(buf);
  }
  return static_cast<int>(k);
}

RateFit fit_rate(std::vector<int> ks, std::vector<double> errors, double beta) {
  if (ks.size() != errors.size()) throw ContractError("fit_rate: size mismatch");
  if (ks.size() < 3) throw ContractError("fit_rate: need at least three k values");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("fit_rate: beta must lie in (0, 1)");
  RateFit f;
  f.beta = beta;
  f.ks = ks;
  f.errors = errors;

  std::size_t n = 1;
  if (!(errors[0] > 0.0)) n = 0;
  while (n > 0 && n < errors.size() && errors[n] > 0.0 && errors[n] < errors[n - 1]) ++n;
  f.truncated = n < errors.size();
  f.fitted_points = n;
  if (n < 2) {
    f.C_est = n == 1 ? errors[0] : 0.0;
    f.omega_est = 1.0;
    return f;
  }

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ks[i];
    y[i] = std::log(errors[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  const double intercept = my - f.slope * mx;
  auto rms = [&](double c0, double s) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (y[i] - c0 - s * x[i]) * (y[i] - c0 - s * x[i]);
    return std::sqrt(ss / static_cast<double>(n));
  };
  f.residual = rms(intercept, f.slope);
  const double lb = std::log(1.0 / beta);
  for (int r = 1; r <= 2; ++r) {
    const double s = -r * lb;
    const double c0 = my - s * mx;
    (r == 1 ? f.residual_rate1 : f.residual_rate2) = rms(c0, s);
  }
  f.rate_exponent = f.residual_rate1 < f.residual_rate2 ? 1 : 2;
  f.C_est = std::exp(intercept);
  f.omega_est = std::exp(-f.slope / f.rate_exponent);
  return f;
}

RateFit calibrate_rate(const std::function<FeedForwardNet(int)>& builder, const ScalarField& target,
                       const Box& box, std::vector<int> ks, double beta, int scale_power,
                       std::size_t grid_per_dim) {
  if (ks.size() < 3) throw ContractError("calibrate_rate: need at least three k values");
  std::sort(ks.begin(), ks.end());
  const std::size_t g = grid_per_dim ? grid_per_dim : default_grid_per_dim(box.dim());
  std::vector<double> errors;
  for (int k : ks) errors.push_back(sup_error(builder(k), target, box, g).sup_error);
  RateFit f = fit_rate(ks, errors, beta);
  f.k_max = max_k_for_scale(scale_power, beta);
  return f;
}

std::string rate_fit_csv_header() {
  return "C_est,omega_est,rate_exponent,residual,residual_rate1,residual_rate2,slope,truncated,"
         "fitted_points,inv_beta";
}

std::string rate_fit_csv_row(const RateFit& f) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%d,%zu,%.17g", f.C_est,
                f.omega_est, f.rate_exponent, f.residual, f.residual_rate1, f.residual_rate2,
                f.slope, f.truncated ? 1 : 0, f.fitted_points, 1.0 / f.beta);
  return buf;
}

PolyFit fit_poly_coeffs(std::span<const double> xs, std::span<const double> ys,
                        const std::vector<FeedForwardNet>& basis) {
  if (basis.empty()) throw ContractError("fit_poly_coeffs: empty basis");
  if (xs.size() != ys.size())
    throw ContractError("fit_poly_coeffs: xs and ys differ in length");
  if (xs.size() < basis.size())
    throw ContractError("fit_poly_coeffs: " + std::to_string(xs.size()) + " samples for " +
                        std::to_string(basis.size()) + " basis functions");
  const auto rows = static_cast<Eigen::Index>(xs.size());
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd P(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index j = 0; j < rows; ++j) {
    y(j) = ys[static_cast<std::size_t>(j)];
    for (Eigen::Index m = 0; m < cols; ++m)
      P(j, m) = basis[static_cast<std::size_t>(m)].evaluate1(xs[static_cast<std::size_t>(j)]);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(P);
  const Eigen::VectorXd c = cod.solve(y);
  PolyFit out;
  out.coeffs.assign(c.data(), c.data() + c.size());
  out.rank = static_cast<long>(cod.rank());
  out.rank_deficient = cod.rank() < cols;
  if (out.rank_deficient)
    out.warning = "design matrix has rank " + std::to_string(out.rank) + " < " +
                  std::to_string(cols) + "; returning the minimum-norm solution";
  return out;
}

}  // namespace silunet
