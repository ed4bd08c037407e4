#include "silunet/stepfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>

#include "silunet/errors.hpp"

namespace silunet {

// StepSpec ----------------------------------------------------------------

void StepSpec::validate() const {
  if (breakpoints.size() < 2) throw DomainError("StepSpec: need at least two breakpoints");
  if (values.size() + 1 != breakpoints.size())
    throw DomainError("StepSpec: expected " + std::to_string(breakpoints.size() - 1) +
                      " values, got " + std::to_string(values.size()));
  for (double b : breakpoints)
    if (!std::isfinite(b)) throw DomainError("StepSpec: non-finite breakpoint");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1]))
      throw DomainError("StepSpec: breakpoints must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("StepSpec: non-finite value");
}

double StepSpec::operator()(double x) const {
  if (x < breakpoints.front() || x >= breakpoints.back()) return 0.0;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double StepSpec::min_length() const {
  double m = breakpoints[1] - breakpoints[0];
  for (std::size_t i = 2; i < breakpoints.size(); ++i)
    m = std::min(m, breakpoints[i] - breakpoints[i - 1]);
  return m;
}

// ModulusSpec -------------------------------------------------------------

ModulusSpec ModulusSpec::lipschitz(double L) {
  if (!(L >= 0.0) || !std::isfinite(L)) throw DomainError("ModulusSpec: Lipschitz constant must be >= 0");
  ModulusSpec m;
  m.kind_ = Kind::lipschitz;
  m.L_ = L;
  return m;
}

ModulusSpec ModulusSpec::hoelder(double C, double exponent) {
  if (!(C >= 0.0) || !std::isfinite(C)) throw DomainError("ModulusSpec: Hoelder constant must be >= 0");
  if (!(exponent > 0.0 && exponent <= 1.0))
    throw DomainError("ModulusSpec: Hoelder exponent must lie in (0, 1]");
  ModulusSpec m;
  m.kind_ = Kind::hoelder;
  m.C_ = C;
  m.exponent_ = exponent;
  return m;
}

ModulusSpec ModulusSpec::sampled(const std::function<double(double)>& f, double lo, double hi,
                                 std::size_t samples) {
  if (!(lo < hi)) throw DomainError("ModulusSpec: need lo < hi");
  ModulusSpec m;
  m.kind_ = Kind::sampled;
  const auto xs = linspace(lo, hi, samples);
  m.spacing_ = (hi - lo) / static_cast<double>(samples - 1);
  m.values_.reserve(samples);
  for (double x : xs) {
    const double v = f(x);
    if (!std::isfinite(v)) throw DomainError("ModulusSpec: non-finite sample");
    m.values_.push_back(v);
  }
  return m;
}

double ModulusSpec::sampled_oscillation(std::size_t steps) const {
  // max - min over every window of steps + 1 consecutive samples.
  std::deque<std::size_t> hi, lo;
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    while (!hi.empty() && values_[hi.back()] <= values_[i]) hi.pop_back();
    while (!lo.empty() && values_[lo.back()] >= values_[i]) lo.pop_back();
    hi.push_back(i);
    lo.push_back(i);
    if (hi.front() + steps < i) hi.pop_front();
    if (lo.front() + steps < i) lo.pop_front();
    if (i >= steps) best = std::max(best, values_[hi.front()] - values_[lo.front()]);
  }
  return best;
}

double ModulusSpec::inverse(double eps) const {
  if (!(eps > 0.0)) throw DomainError("ModulusSpec::inverse: eps must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case Kind::lipschitz:
      return L_ == 0.0 ? inf : eps / L_;
    case Kind::hoelder:
      return C_ == 0.0 ? inf : std::pow(eps / C_, 1.0 / exponent_);
    case Kind::sampled: {
      const std::size_t last = values_.size() - 1;
      if (sampled_safety * sampled_oscillation(last) <= eps) return inf;
      std::size_t good = 0, bad = last;
      while (bad - good > 1) {
        const std::size_t mid = good + (bad - good) / 2;
        if (sampled_safety * sampled_oscillation(mid) <= eps)
          good = mid;
        else
          bad = mid;
      }
      return static_cast<double>(good) * spacing_;
    }
  }
  return 0.0;
}

// Bumps -------------------------------------------------------------------

FeedForwardNet build_half_step(double alpha, double tau, double kappa) {
  if (!std::isfinite(alpha)) throw DomainError("build_half_step: alpha must be finite");
  if (!(tau > 0.0) || !(kappa > 0.0) || !std::isfinite(tau) || !std::isfinite(kappa))
    throw DomainError("build_half_step: tau and kappa must be positive");
  const double s = kappa / tau;
  const double w1[1] = {-s};
  const double w2[1] = {-2.0};
  const double w3[1] = {1.0 / kappa};
  return FeedForwardNet(1, {{WeightMatrix::dense(1, 1, w1), {s * alpha}, Activation::silu},
                            {WeightMatrix::dense(1, 1, w2), {kappa}, Activation::silu},
                            {WeightMatrix::dense(1, 1, w3), {0.0}, Activation::identity}});
}

FeedForwardNet build_bump(const BumpParams& p) {
  if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || !(p.lo < p.hi))
    throw DomainError("build_bump: need lo < hi");
  if (!(p.kappa >= 1.0) || !std::isfinite(p.kappa)) throw DomainError("build_bump: kappa must be >= 1");
  if (!(p.tau > 0.0) || p.tau > 0.25 * (p.hi - p.lo))
    throw DomainError("build_bump: tau must lie in (0, (hi - lo) / 4]");
  const double s = p.kappa / p.tau;
  const double w = 1.0 / p.kappa;
  const double w1[2] = {-s, -s};
  const double w2[4] = {-2.0, 0.0, 0.0, -2.0};
  const double w3[2] = {w, -w};
  return FeedForwardNet(
      1, {{WeightMatrix::dense(2, 1, w1), {s * p.lo, s * p.hi}, Activation::silu},
          {WeightMatrix::dense(2, 2, w2), {p.kappa, p.kappa}, Activation::silu},
          {WeightMatrix::dense(1, 2, w3), {0.0}, Activation::identity}});
}

KappaTau choose_kappa_tau(double delta, double min_len) {
  if (!(delta > 0.0 && delta < 0.5)) throw DomainError("choose_kappa_tau: delta must lie in (0, 1/2)");
  if (!(min_len > 0.0) || !std::isfinite(min_len))
    throw DomainError("choose_kappa_tau: min_len must be positive");
  return {std::max(10.0, 4.0 / (std::numbers::e * delta)), min_len / 8.0};
}

std::vector<Band> transition_bands(std::span<const double> edges, double tau) {
  std::vector<Band> out;
  out.reserve(edges.size());
  for (double e : edges) out.push_back({0, e - tau, e + tau});
  return out;
}

StepApprox build_step_approx(const StepSpec& spec, double delta) {
  spec.validate();
  if (!(delta > 0.0)) throw DomainError("build_step_approx: delta must be positive");
  double max_abs = 0.0;
  for (double v : spec.values) max_abs = std::max(max_abs, std::abs(v));
  if (max_abs == 0.0) throw DomainError("build_step_approx: step values are all zero");

  StepApprox out;
  const double m = static_cast<double>(spec.values.size());
  out.bump_delta = std::min(0.25, delta / (m * max_abs));
  out.schedule = choose_kappa_tau(out.bump_delta, spec.min_length());
  std::vector<FeedForwardNet> bumps;
  std::vector<double> coeffs;
  for (std::size_t j = 0; j < spec.values.size(); ++j) {
    if (spec.values[j] == 0.0) continue;
    bumps.push_back(build_bump({spec.breakpoints[j], spec.breakpoints[j + 1], out.schedule.tau,
                                out.schedule.kappa}));
    coeffs.push_back(spec.values[j]);
  }
  out.bumps = bumps.size();
  out.net = merge_trailing_affine(affine_combination(bumps, coeffs, 0.0));
  out.bands = transition_bands(spec.breakpoints, out.schedule.tau);
  return out;
}

ContinuousApprox build_continuous_approx(const std::function<double(double)>& f, double lo,
                                         double hi, const ModulusSpec& modulus, double eps) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("build_continuous_approx: need a finite interval lo < hi");
  if (!(eps > 0.0)) throw DomainError("build_continuous_approx: eps must be positive");
  ContinuousApprox out;
  out.inverse_modulus = modulus.inverse(eps);
  out.inverse_modulus_half = modulus.inverse(eps / 2.0);
  const double len = hi - lo;
  if (!(out.inverse_modulus_half > 0.0))
    throw InfeasibleError("build_continuous_approx: modulus gives zero cell width at eps/2");
  const double cells = std::isinf(out.inverse_modulus_half)
                           ? 1.0
                           : std::max(1.0, std::ceil(len / out.inverse_modulus_half - 1e-12));
  if (cells > static_cast<double>(max_partition_cells)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "build_continuous_approx: %.0f cells exceed the guard of %zu",
                  cells, max_partition_cells);
    throw InfeasibleError(buf);
  }
  out.N = static_cast<std::size_t>(cells);
  out.cell_width = len / cells;
  out.psi.breakpoints = linspace(lo, hi, out.N + 1);
  for (std::size_t i = 0; i < out.N; ++i)
    out.psi.values.push_back(f(0.5 * (out.psi.breakpoints[i] + out.psi.breakpoints[i + 1])));
  // The last cell reaches past hi so that x = hi sits on its plateau.
  out.psi.breakpoints.back() = hi + 0.5 * out.cell_width;
  const bool all_zero = std::all_of(out.psi.values.begin(), out.psi.values.end(),
                                    [](double v) { return v == 0.0; });
  if (all_zero) {
    out.step.net = constant_net(1, 0.0);
    out.step.bands = transition_bands(out.psi.breakpoints, 0.0);
  } else {
    out.step = build_step_approx(out.psi, eps / 2.0);
  }
  return out;
}

// Polynomial route --------------------------------------------------------

double poly_eval(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

namespace {

// Chebyshev interpolant of degree n in t on [-1, 1], as monomial
// coefficients in t.
std::vector<double> chebyshev_monomial(const std::function<double(double)>& f, double B, int n) {
  const int npts = n + 1;
  std::vector<double> fv(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    const double t = std::cos(std::numbers::pi * (j + 0.5) / npts);
    fv[static_cast<std::size_t>(j)] = f(B * t);
  }
  std::vector<long double> cheb(static_cast<std::size_t>(npts));
  for (int k = 0; k < npts; ++k) {
    long double s = 0.0L;
    for (int j = 0; j < npts; ++j)
      s += fv[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi_v<long double> * k * (j + 0.5L) / npts);
    cheb[static_cast<std::size_t>(k)] = (k == 0 ? 1.0L : 2.0L) * s / npts;
  }
  // T_0 = 1, T_1 = t, T_{k+1} = 2 t T_k - T_{k-1}.
  std::vector<long double> mono(static_cast<std::size_t>(npts), 0.0L);
  std::vector<long double> prev(static_cast<std::size_t>(npts), 0.0L), cur = prev, next = prev;
  prev[0] = 1.0L;
  mono[0] += cheb[0];
  if (n >= 1) {
    cur[1] = 1.0L;
    mono[1] += cheb[1];
  }
  for (int k = 1; k < n; ++k) {
    std::fill(next.begin(), next.end(), 0.0L);
    for (int i = 0; i <= k; ++i) next[static_cast<std::size_t>(i) + 1] += 2.0L * cur[static_cast<std::size_t>(i)];
    for (int i = 0; i < npts; ++i) next[static_cast<std::size_t>(i)] -= prev[static_cast<std::size_t>(i)];
    for (int i = 0; i < npts; ++i) mono[static_cast<std::size_t>(i)] += cheb[static_cast<std::size_t>(k) + 1] * next[static_cast<std::size_t>(i)];
    prev.swap(cur);
    cur.swap(next);
  }
  return {mono.begin(), mono.end()};
}

double residual_on_grid(const std::function<double(double)>& f, double B,
                        std::span<const double> coeffs_t, std::span<const double> xs) {
  double r = 0.0;
  for (double x : xs) r = std::max(r, std::abs(f(x) - poly_eval(coeffs_t, x / B)));
  return r;
}

}  // namespace

PolyApprox weierstrass_poly(const std::function<double(double)>& f, double B, double delta) {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("weierstrass_poly: B must be positive");
  if (!(delta > 0.0)) throw DomainError("weierstrass_poly: delta must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= weierstrass_degree_cap; n *= 2) {
    std::vector<double> ct = chebyshev_monomial(f, B, n);
    const auto xs = linspace(-B, B, static_cast<std::size_t>(10 * (n + 1) + 1));
    double res = residual_on_grid(f, B, ct, xs);
    best = std::min(best, res);
    if (!(res < delta)) continue;
    while (ct.size() > 1) {
      const std::span<const double> shorter(ct.data(), ct.size() - 1);
      const double r2 = residual_on_grid(f, B, shorter, xs);
      if (!(r2 < delta)) break;
      ct.pop_back();
      res = r2;
    }
    PolyApprox out;
    out.B = B;
    out.coeffs_scaled = ct;
    out.residual = res;
    out.degree = static_cast<int>(ct.size()) - 1;
    out.coeffs.resize(ct.size());
    for (std::size_t m = 0; m < ct.size(); ++m) out.coeffs[m] = ct[m] / std::pow(B, static_cast<double>(m));
    return out;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "weierstrass_poly: degree cap %d reached, best residual %.6g >= delta %.6g",
                weierstrass_degree_cap, best, delta);
  throw InfeasibleError(buf);
}

PolyNetApprox build_continuous_via_poly(const std::function<double(double)>& f, double B,
                                        double eps, double a, double beta, PolyVariant variant) {
  if (!(eps > 0.0)) throw DomainError("build_continuous_via_poly: eps must be positive");
  PolyNetApprox out;
  out.poly = weierstrass_poly(f, B, eps / 2.0);
  if (out.poly.degree > max_poly_degree) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "build_continuous_via_poly: approximating polynomial has degree %d > %d",
                  out.poly.degree, max_poly_degree);
    throw InfeasibleError(buf);
  }
  const double inv_b[1] = {1.0 / B};
  const FeedForwardNet scale = affine_net(WeightMatrix::dense(1, 1, inv_b), {0.0});
  const std::vector<double> ct = out.poly.coeffs_scaled;
  auto builder = [&](int k) {
    return compose(build_polynomial(ct, a, beta, k, variant), scale);
  };
  const ScalarField target = [&](std::span<const double> x) { return poly_eval(ct, x[0] / B); };
  const Box box = Box::interval(-B, B);
  const std::size_t grid = 2001;
  const int power = variant == PolyVariant::shallow ? std::max(2, out.poly.degree) : 2;
  out.fit = calibrate_rate(builder, target, box, {1, 2, 3, 4}, beta, power, grid);
  try {
    out.k = choose_k(eps / 2.0, out.fit);
  } catch (const ContractError&) {
    out.k = 1;
  }
  for (int extra = 0;; ++extra) {
    out.net = builder(out.k);
    out.network_error = sup_error(out.net, target, box, default_grid_per_dim(1)).sup_error;
    if (out.network_error <= eps / 2.0) break;
    if (extra >= 8 || out.k >= out.fit.k_max) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "build_continuous_via_poly: network error %.6g above eps/2 = %.6g at k = %d",
                    out.network_error, eps / 2.0, out.k);
      throw InfeasibleError(buf);
    }
    ++out.k;
  }
  return out;
}

}  // namespace silunet
