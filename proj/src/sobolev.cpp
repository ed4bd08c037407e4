#include "silunet/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#include <json.hpp>

#include "silunet/errors.hpp"
#include "silunet/findiff.hpp"

namespace silunet {

// Multi-indices -----------------------------------------------------------

int MultiIndex::order() const noexcept {
  int s = 0;
  for (int a : entries) s += a;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int a : entries)
    for (int i = 2; i <= a; ++i) f *= i;
  return f;
}

double MultiIndex::monomial(std::span<const double> x, std::span<const double> c) const {
  double v = 1.0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (int p = 0; p < entries[i]; ++p) v *= x[i] - c[i];
  return v;
}

namespace {

void enumerate_order(int d, int order, std::size_t axis, std::vector<int>& cur,
                     std::vector<MultiIndex>& out) {
  if (axis + 1 == static_cast<std::size_t>(d)) {
    cur[axis] = order;
    out.push_back({cur});
    return;
  }
  for (int v = 0; v <= order; ++v) {
    cur[axis] = v;
    enumerate_order(d, order - v, axis + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int d, int max_order) {
  if (d < 1) throw DomainError("multi_indices: d must be >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(d), 0);
  for (int o = 0; o <= max_order; ++o) enumerate_order(d, o, 0, cur, out);
  return out;
}

// Cube grid ---------------------------------------------------------------

CubeGrid CubeGrid::make(double B, int d, int M) {
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("CubeGrid: B must be positive");
  if (d < 1 || M < 1) throw DomainError("CubeGrid: d and M must be >= 1");
  double count = 1.0;
  for (int i = 0; i < d; ++i) count *= M;
  if (count > static_cast<double>(max_cube_count))
    throw InfeasibleError("CubeGrid: M^d = " + std::to_string(static_cast<long long>(count)) +
                          " cubes exceed the guard");
  return {B, d, M, 2.0 * B / M};
}

std::size_t CubeGrid::cube_count() const noexcept {
  std::size_t c = 1;
  for (int i = 0; i < d; ++i) c *= static_cast<std::size_t>(M);
  return c;
}

std::vector<int> CubeGrid::index(std::size_t flat) const {
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (int a = d - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(M));
    flat /= static_cast<std::size_t>(M);
  }
  return idx;
}

std::size_t CubeGrid::flat(std::span<const int> idx) const {
  std::size_t f = 0;
  for (int v : idx) f = f * static_cast<std::size_t>(M) + static_cast<std::size_t>(v);
  return f;
}

double CubeGrid::edge(int i) const noexcept { return i >= M ? B : -B + i * h; }

double CubeGrid::center_coord(int i) const noexcept { return -B + (i + 0.5) * h; }

std::vector<double> CubeGrid::center(std::size_t flat) const {
  const auto idx = index(flat);
  std::vector<double> c(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) c[a] = center_coord(idx[a]);
  return c;
}

// Formulas ----------------------------------------------------------------

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_eps_dn(double eps, int d, int n, const char* who) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError(std::string(who) + ": eps must lie in (0, 1)");
  if (d < 1 || n < 1) throw DomainError(std::string(who) + ": d and n must be >= 1");
}

}  // namespace

int choose_M(double eps, int d, int n, double B) {
  check_eps_dn(eps, d, n, "choose_M");
  if (!(B > 0.0)) throw DomainError("choose_M: B must be positive");
  if (B > 1.0)
    throw DomainError("choose_M: B must be <= 1; rescale the target to [-1, 1]^d first");
  const double arg = B * std::pow(std::pow(2.0, d + 1) / (factorial(n) * eps), 1.0 / n);
  const double M = std::max(1.0, std::ceil(arg - 1e-12));
  if (std::pow(M, d) > static_cast<double>(max_cube_count)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "choose_M: M = %.0f gives M^d above %zu cubes", M, max_cube_count);
    throw InfeasibleError(buf);
  }
  return static_cast<int>(M);
}

double choose_eta(double eps, int d, int n) {
  check_eps_dn(eps, d, n, "choose_eta");
  return eps / (std::pow(2.0, d + 1) * std::pow(static_cast<double>(d), n) *
                (std::pow(2.0, n - 2) - 1.0 + d));
}

double local_error_bound(int n, int d, double h) {
  return std::pow(2.0, d) * std::pow(h, n) / (factorial(n) * std::pow(2.0, n));
}

// Oracles -----------------------------------------------------------------

std::size_t oracle_active_cube(const CubeGrid& grid, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(grid.d))
    throw ContractError("oracle_active_cube: point has the wrong dimension");
  std::vector<int> idx(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double v = x[a];
    if (!(v >= -grid.B && v <= grid.B)) throw DomainError("oracle_active_cube: point outside the domain");
    int i = static_cast<int>(std::floor((v + grid.B) / grid.h));
    i = std::clamp(i, 0, grid.M - 1);
    // Settle rounding at faces against the edges themselves.
    while (i > 0 && v < grid.edge(i)) --i;
    while (i < grid.M - 1 && v >= grid.edge(i + 1)) ++i;
    idx[a] = i;
  }
  return grid.flat(idx);
}

double oracle_psi(const CubeGrid& grid, std::size_t j, std::span<const double> x) {
  return oracle_active_cube(grid, x) == j ? 1.0 : 0.0;
}

double taylor_eval(const TaylorData& td, std::size_t j, std::span<const double> x) {
  const auto c = td.grid.center(j);
  double s = 0.0;
  for (std::size_t a = 0; a < td.alphas.size(); ++a) s += td.coeffs[j][a] * td.alphas[a].monomial(x, c);
  return s;
}

double oracle_approx(const TaylorData& td, std::span<const double> x) {
  return taylor_eval(td, oracle_active_cube(td.grid, x), x);
}

double error_propagation_bound(int unit, int wide, double eta) {
  if (unit < 0 || wide < 0) throw DomainError("error_propagation_bound: negative factor count");
  if (wide >= 1) return eta * (std::pow(2.0, wide - 1) - 1.0 + unit);
  if (unit >= 1) return eta * (unit - 1);
  return 0.0;
}

double error_propagation_unroll(int unit, int wide, double eta) {
  if (unit < 0 || wide < 0) throw DomainError("error_propagation_unroll: negative factor count");
  // Innermost first: wide factors, then unit factors.
  std::vector<int> factors(static_cast<std::size_t>(wide), 2);
  factors.insert(factors.end(), static_cast<std::size_t>(unit), 1);
  double gamma = 0.0;
  for (std::size_t i = 1; i < factors.size(); ++i) gamma = eta + factors[i] * gamma;
  return gamma;
}

// Term networks -----------------------------------------------------------

BumpParams cube_bump(const CubeGrid& grid, int i, KappaTau schedule) {
  const double lo = grid.edge(i);
  const double hi = i == grid.M - 1 ? grid.B + grid.h : grid.edge(i + 1);
  return {lo, hi, schedule.tau, schedule.kappa};
}

namespace {

FeedForwardNet select_axis(int d, int axis, double shift) {
  std::vector<double> w(static_cast<std::size_t>(d), 0.0);
  w[static_cast<std::size_t>(axis)] = 1.0;
  return affine_net(WeightMatrix::dense(1, static_cast<std::size_t>(d), w), {-shift});
}

}  // namespace

FeedForwardNet build_term_net(std::size_t j, const MultiIndex& alpha, const CubeGrid& grid,
                              KappaTau schedule, const ProductParams& product) {
  if (alpha.entries.size() != static_cast<std::size_t>(grid.d))
    throw ContractError("build_term_net: multi-index dimension differs from the grid");
  if (j >= grid.cube_count()) throw ContractError("build_term_net: cube index out of range");
  const auto idx = grid.index(j);
  std::vector<FeedForwardNet> factors;
  for (int a = 0; a < grid.d; ++a)
    factors.push_back(compose(build_bump(cube_bump(grid, idx[static_cast<std::size_t>(a)], schedule)),
                              select_axis(grid.d, a, 0.0)));
  for (int a = 0; a < grid.d; ++a)
    for (int p = 0; p < alpha.entries[static_cast<std::size_t>(a)]; ++p)
      factors.push_back(select_axis(grid.d, a, grid.center_coord(idx[static_cast<std::size_t>(a)])));

  FeedForwardNet acc = factors.back();
  if (factors.size() == 1) return acc;
  const FeedForwardNet M = build_product(product.a, product.beta, product.k);
  for (std::size_t i = factors.size() - 1; i-- > 0;) acc = compose(M, stack_parallel({factors[i], acc}));
  return acc;
}

double term_oracle(std::size_t j, const MultiIndex& alpha, const CubeGrid& grid,
                   std::span<const double> x) {
  if (oracle_active_cube(grid, x) != j) return 0.0;
  return alpha.monomial(x, grid.center(j));
}

std::vector<Band> cube_face_bands(const CubeGrid& grid, double tau) {
  std::vector<Band> out;
  for (int a = 0; a < grid.d; ++a)
    for (int i = 1; i < grid.M; ++i) out.push_back({static_cast<std::size_t>(a), grid.edge(i) - tau, grid.edge(i) + tau});
  return out;
}

// Derivative data ---------------------------------------------------------

TaylorData derivative_data_from_callback(const ScalarField& f, const CubeGrid& grid, int n,
                                         DerivScheme scheme, const DerivCallback& exact,
                                         double h_fd) {
  if (n < 1) throw DomainError("derivative_data_from_callback: n must be >= 1");
  if (scheme == DerivScheme::exact && !exact)
    throw ContractError("derivative_data_from_callback: exact scheme needs a derivative callback");
  if (scheme == DerivScheme::central && (!f || !(h_fd > 0.0)))
    throw ContractError("derivative_data_from_callback: central scheme needs f and h_fd > 0");
  TaylorData td;
  td.d = grid.d;
  td.n = n;
  td.grid = grid;
  td.alphas = multi_indices(grid.d, n - 1);
  const std::size_t cubes = grid.cube_count();
  td.coeffs.assign(cubes, std::vector<double>(td.alphas.size(), 0.0));
  td.one_sided.assign(cubes, false);
  const auto d = static_cast<std::size_t>(grid.d);

  for (std::size_t j = 0; j < cubes; ++j) {
    const auto c = grid.center(j);
    for (std::size_t ai = 0; ai < td.alphas.size(); ++ai) {
      const MultiIndex& al = td.alphas[ai];
      double deriv = 0.0;
      if (scheme == DerivScheme::exact) {
        deriv = exact(c, al);
      } else {
        // Per-axis stencil offsets (p/2 - s) h with weights (-1)^s C(p, s) / h^p.
        std::vector<std::vector<double>> offs(d), wts(d);
        for (std::size_t a = 0; a < d; ++a) {
          const int p = al.entries[a];
          double shift = 0.0;
          const double reach = 0.5 * p * h_fd;
          if (c[a] + reach > grid.B) shift = grid.B - (c[a] + reach);
          if (c[a] - reach < -grid.B) shift = -grid.B - (c[a] - reach);
          if (shift != 0.0) td.one_sided[j] = true;
          for (int s = 0; s <= p; ++s) {
            offs[a].push_back((0.5 * p - s) * h_fd + shift);
            const double b = static_cast<double>(findiff::binomial(p, s));
            wts[a].push_back((s % 2 == 0 ? b : -b) / std::pow(h_fd, p));
          }
        }
        std::vector<std::size_t> pos(d, 0);
        std::vector<double> x(d);
        for (;;) {
          double w = 1.0;
          for (std::size_t a = 0; a < d; ++a) {
            x[a] = c[a] + offs[a][pos[a]];
            w *= wts[a][pos[a]];
          }
          deriv += w * f(x);
          std::size_t a = 0;
          while (a < d && ++pos[a] == offs[a].size()) pos[a++] = 0;
          if (a == d) break;
        }
      }
      td.coeffs[j][ai] = deriv / al.factorial();
      if (std::abs(td.coeffs[j][ai]) > 1.0) td.exceeds_unit = true;
    }
  }
  return td;
}

std::string TaylorData::to_json() const {
  nlohmann::ordered_json doc;
  doc["d"] = d;
  doc["n"] = n;
  doc["M"] = grid.M;
  doc["B"] = grid.B;
  auto cubes = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    nlohmann::ordered_json cj;
    cj["center"] = grid.center(j);
    auto cs = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < alphas.size(); ++a)
      cs.push_back({{"alpha", alphas[a].entries}, {"value", coeffs[j][a]}});
    cj["coeffs"] = std::move(cs);
    cubes.push_back(std::move(cj));
  }
  doc["cubes"] = std::move(cubes);
  return doc.dump(1) + "\n";
}

// Assembly ----------------------------------------------------------------

std::string sobolev_report_csv_header() {
  return "M,cube_count,k,eta,net_size,net_depth,predicted_local_bound,measured_error,"
         "network_gap,term_count,kappa,tau,product_error,product_box";
}

std::string sobolev_report_csv_row(const SobolevBuildReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%zu,%d,%.17g,%zu,%zu,%.17g,%.17g,%.17g,%zu,%.17g,%.17g,%.17g,%.17g",
                r.M, r.cube_count, r.k, r.eta, r.net_size, r.net_depth, r.predicted_local_bound,
                r.measured_error, r.network_gap, r.term_count, r.schedule.kappa, r.schedule.tau,
                r.product_error, r.product_box);
  return buf;
}

SobolevResult build_sobolev_net(const TaylorData& td, double eps, int d, int n, double B,
                                const SobolevOptions& opt) {
  if (td.d != d || td.n != n || td.grid.B != B)
    throw ContractError("build_sobolev_net: Taylor data was built for different (d, n, B)");
  const int M = choose_M(eps, d, n, B);
  if (td.grid.M != M)
    throw ContractError("build_sobolev_net: Taylor data grid has M = " + std::to_string(td.grid.M) +
                        ", expected " + std::to_string(M));
  SobolevResult res;
  auto& rep = res.report;
  rep.M = M;
  rep.cube_count = td.grid.cube_count();
  rep.eta = choose_eta(eps, d, n);
  rep.predicted_local_bound = local_error_bound(n, d, td.grid.h);
  rep.schedule = choose_kappa_tau(std::min(rep.eta, 0.25), td.grid.h);

  // Product depth from the fitted M_k rate on the range the chain covers.
  const double R = 1.1 * std::pow(std::max(1.0, 2.0 * B), std::max(0, n - 1));
  rep.product_box = R;
  const Box pbox = Box::cube(2, R);
  const ScalarField uv = [](std::span<const double> x) { return x[0] * x[1]; };
  const std::size_t pgrid = 101;
  auto product_err = [&](int k) {
    return sup_error(build_product(opt.a, opt.beta, k), uv, pbox, pgrid).sup_error;
  };
  rep.product_fit = calibrate_rate([&](int k) { return build_product(opt.a, opt.beta, k); }, uv,
                                   pbox, {1, 2, 3, 4}, opt.beta, 2, pgrid);
  if (opt.k) {
    rep.k = *opt.k;
    rep.product_error = product_err(rep.k);
  } else {
    try {
      rep.k = std::max(1, choose_k(rep.eta, rep.product_fit));
    } catch (const ContractError&) {
      rep.k = 1;
    }
    rep.product_error = product_err(rep.k);
    for (int extra = 0; rep.product_error > rep.eta && extra < 10 && rep.k < rep.product_fit.k_max; ++extra)
      rep.product_error = product_err(++rep.k);
  }
  const ProductParams pp{opt.a, opt.beta, rep.k};

  const std::size_t per_cube = td.alphas.size();
  const std::size_t terms = rep.cube_count * per_cube;
  std::vector<FeedForwardNet> nets(terms);
  std::vector<double> coeffs(terms);
  std::exception_ptr fail;
  const auto total = static_cast<long long>(terms);
#pragma omp parallel for schedule(dynamic)
  for (long long t = 0; t < total; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const std::size_t j = ut / per_cube;
    const std::size_t a = ut % per_cube;
    try {
      nets[ut] = build_term_net(j, td.alphas[a], td.grid, rep.schedule, pp);
      coeffs[ut] = td.coeffs[j][a];
    } catch (...) {
#pragma omp critical(silunet_sobolev_fail)
      if (!fail) fail = std::current_exception();
    }
  }
  if (fail) std::rethrow_exception(fail);
  res.net = affine_combination(nets, coeffs, 0.0);
  rep.term_count = terms;
  const NetSummary s = summary(res.net);
  rep.net_size = s.sparse_param_count;
  rep.net_depth = s.depth;
  res.bands = cube_face_bands(td.grid, rep.schedule.tau);

  rep.measured_error = std::numeric_limits<double>::quiet_NaN();
  if (opt.measure) {
    const Box box = Box::cube(static_cast<std::size_t>(d), B);
    const std::size_t g = opt.grid_per_dim ? opt.grid_per_dim : default_grid_per_dim(static_cast<std::size_t>(d));
    const ScalarField oracle = [&td](std::span<const double> x) { return oracle_approx(td, x); };
    rep.network_gap = sup_error(res.net, oracle, box, g, res.bands).sup_error;
    if (opt.f) rep.measured_error = sup_error(res.net, opt.f, box, g, res.bands).sup_error;
  }
  return res;
}

}  // namespace silunet
