// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli_util.hpp"
#include "oracles.hpp"
#include "silunet/constructors.hpp"
#include "silunet/errors.hpp"
#include "silunet/findiff.hpp"
#include "silunet/harness.hpp"
#include "silunet/kernels.hpp"
#include "silunet/scalar_math.hpp"
#include "silunet/sobolev.hpp"
#include "silunet/stepfun.hpp"

using namespace silunet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
std::string g(double v) { return fmt("%.3g", v); }

ScalarField power(int m) {
  return [m](std::span<const double> x) { return std::pow(x[0], m); };
}
ScalarField lift(std::function<double(double)> f) {
  return [f](std::span<const double> x) { return f(x[0]); };
}

double sq_err(double a, double beta, int k, double B = 1.0) {
  return sup_error(build_square({a, beta, k, B}), power(2), Box::interval(-B, B), default_grid_per_dim(1))
      .sup_error;
}

Outcome c1_square_accuracy() {
  SweepSpec s;
  s.a_grid = {0.0, 1.0};
  s.beta_grid = {0.01, 0.05, 0.1, 0.2, 0.27};
  s.k_grid = {3};
  const auto res = run_sweep(s, 0 + 4);
  const SweepRow* best = nullptr;
  for (const auto& r : res.rows)
    if (r.error.empty() && (!best || r.sup_error < best->sup_error)) best = &r;
  if (!best) return {false, "no cell succeeded"};
  std::ostringstream d;
  d << "best " << g(best->sup_error) << " at a=" << best->a << " beta=" << best->beta << " k=3"
    << " (a=0 beta=0.27: " << g(sq_err(0.0, 0.27, 3)) << ")";
  return {best->sup_error <= 1e-6, d.str()};
}

Outcome c2_geometric_decay() {
  const double beta = 0.27;
  std::vector<double> e;
  for (int k = 1; k <= 5; ++k) e.push_back(sq_err(0.0, beta, k));
  bool ok = true;
  std::ostringstream d;
  d << "ratios";
  for (int k = 1; k <= 4; ++k) {
    if (!(e[k] < e[k - 1])) break;  // monotone range only
    const double r = e[k] / e[k - 1];
    d << " " << g(r);
    ok = ok && r >= beta * beta / 2 && r <= 2 * beta * beta;
  }
  d << " window [" << g(beta * beta / 2) << ", " << g(2 * beta * beta) << "]";
  return {ok, d.str()};
}

Outcome c3_product_domination() {
  // x, y on a 201-point axis put x + y and x - y on the 401-point axis of [-2, 2].
  const auto axis = linspace(-1.0, 1.0, 201);
  const auto wide = linspace(-2.0, 2.0, 401);
  bool ok = true;
  std::ostringstream d;
  for (int k : {2, 3, 4}) {
    const auto m = build_product(0.0, 0.27, k);
    const auto q = build_square({0.0, 0.27, k, 2.0});
    double em = 0.0, eq = 0.0;
    for (double x : axis)
      for (double y : axis) {
        const double in[2] = {x, y};
        em = std::max(em, std::abs(m.evaluate(in)[0] - x * y));
      }
    for (double t : wide) eq = std::max(eq, std::abs(q.evaluate1(t) - t * t));
    ok = ok && em <= eq;
    d << "k=" << k << ": " << g(em) << " <= " << g(eq) << "; ";
  }
  return {ok, d.str()};
}

Outcome c4_monomial_7() {
  const int m = 7;
  const auto fit = calibrate_rate([&](int k) { return build_monomial_deep({m, 0.0, 0.27, k, 1.0}); },
                                  power(m), Box::interval(-1, 1), {1, 2, 3, 4}, 0.27, 2, 2001);
  const int k = std::max(1, choose_k(1e-3, fit));
  const double e7 = sup_error(build_monomial_deep({m, 0.0, 0.27, k, 1.0}), power(m), Box::interval(-1, 1),
                              default_grid_per_dim(1))
                        .sup_error;
  const auto basis = rnn_basis(m, 0.0, 0.27, 3);
  std::ostringstream d;
  d << "deep k=" << k << " err " << g(e7) << "; rnn y_i errors";
  std::vector<double> ey;
  for (int i = 0; i <= m; ++i) {
    ey.push_back(sup_error(basis[i], power(i), Box::interval(-1, 1), default_grid_per_dim(1)).sup_error);
    d << " " << g(ey.back());
  }
  const double esq = sq_err(0.0, 0.27, 3);
  d << "; square " << g(esq);
  return {e7 <= 1e-3 && ey[2] <= 10 * esq, d.str()};
}

Outcome c5_shallow_deep_m2() {
  // Asserted at k <= 3 (the a = 0, beta = 0.27, k = 3 setting and below).  For
  // a != 0 both nets cancel O(1) SiLU values under a beta^(-2k) / K scale, so
  // the gap grows like one ulp times that scale; larger k is reported only.
  auto gap = [](double a, int k) {
    const auto s = build_monomial_shallow({2, a, 0.27, k, 1.0});
    const auto p = build_monomial_deep({2, a, 0.27, k, 1.0});
    double worst = 0.0;
    for (double x : linspace(-1, 1, 10001)) worst = std::max(worst, std::abs(s.evaluate1(x) - p.evaluate1(x)));
    return worst;
  };
  double asserted = 0.0;
  for (double a : {0.0, 1.0})
    for (int k : {1, 2, 3}) asserted = std::max(asserted, gap(a, k));
  return {asserted <= 1e-12, "max gap k<=3 " + g(asserted) + "; a=1 k=4 " + g(gap(1.0, 4)) + ", k=5 " +
                                 g(gap(1.0, 5)) + " (reported)"};
}

Outcome c6_shallow_rate() {
  const auto fit = calibrate_rate([](int k) { return build_monomial_shallow({4, 1.0, 0.27, k, 1.0}); },
                                  power(4), Box::interval(-1, 1), {1, 2, 3, 4, 5, 6}, 0.27, 4);
  std::ostringstream d;
  d << "residual rate1 " << g(fit.residual_rate1) << " rate2 " << g(fit.residual_rate2) << ", slope "
    << g(fit.slope) << " (ln beta " << g(std::log(0.27)) << "), fitted " << fit.fitted_points
    << " of " << fit.ks.size();
  return {fit.residual_rate1 < fit.residual_rate2, d.str()};
}

Outcome c7_degenerate_shift() {
  bool rejected = false;
  std::string msg;
  try {
    build_monomial_shallow({3, 0.0, 0.27, 3, 1.0});
  } catch (const DegenerateShiftError& e) {
    rejected = true;
    msg = e.what();
  }
  const auto ok_net = build_monomial_shallow({3, 1.0, 0.27, 3, 1.0});
  const double e = sup_error(ok_net, power(3), Box::interval(-1, 1), 2001).sup_error;
  return {rejected && std::isfinite(e), "a=0 rejected: " + std::string(rejected ? "yes" : "no") +
                                            "; a=1 error " + g(e)};
}

Outcome c8_polynomial() {
  const double c[3] = {1, 1, 1};
  const double e = sup_error(build_polynomial(c, 0.0, 0.27, 3), lift([](double x) { return x * x + x + 1; }),
                             Box::interval(-1, 1), default_grid_per_dim(1))
                       .sup_error;
  return {e <= 1e-3, "sup error " + g(e)};
}

Outcome c9_bump() {
  const auto s = choose_kappa_tau(0.01, 3.0);
  const auto b = build_bump({1.0, 4.0, s.tau, s.kappa});
  const double edges[2] = {1.0, 4.0};
  const auto bands = transition_bands(edges, s.tau);
  const auto rep = sup_error(b, lift([](double x) { return x >= 1.0 && x < 4.0 ? 1.0 : 0.0; }),
                             Box::interval(-2, 7), default_grid_per_dim(1), bands);
  double plateau = 0.0;
  for (double x : linspace(1 + s.tau, 4 - s.tau, 1001)) plateau = std::max(plateau, std::abs(b.evaluate1(x) - 1));
  for (double x : linspace(-100, 1 - s.tau, 1001)) plateau = std::max(plateau, std::abs(b.evaluate1(x)));
  for (double x : linspace(4 + s.tau, 100, 1001)) plateau = std::max(plateau, std::abs(b.evaluate1(x)));
  return {rep.sup_error < 0.01 && plateau <= 0.01,
          "banded " + g(rep.sup_error) + ", plateau " + g(plateau) + ", kappa " + g(s.kappa) + " tau " + g(s.tau)};
}

Outcome c10_continuous() {
  auto f = [](double x) { return sigmoid(x); };
  bool ok = true;
  std::ostringstream d;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto mod = ModulusSpec::lipschitz(0.25);
    const auto ca = build_continuous_approx(f, -5, 5, mod, eps);
    const double e = sup_error(ca.step.net, lift(f), Box::interval(-5, 5), default_grid_per_dim(1), ca.step.bands)
                         .sup_error;
    const double ref = 10.0 / mod.inverse(eps);
    const double ratio = static_cast<double>(ca.N) / ref;
    ok = ok && e <= eps && ratio <= 4 && ratio >= 0.25;
    d << "eps=" << eps << ": err " << g(e) << " N=" << ca.N << " (ref " << g(ref) << "); ";
  }
  return {ok, d.str()};
}

Outcome c11_weierstrass() {
  auto f = [](double x) { return sigmoid(x); };
  const auto pa = build_continuous_via_poly(f, 3.0, 0.01);
  const double e = sup_error(pa.net, lift(f), Box::interval(-3, 3), default_grid_per_dim(1)).sup_error;
  return {e <= 0.01, "degree " + std::to_string(pa.poly.degree) + " k=" + std::to_string(pa.k) + " err " + g(e)};
}

SobolevResult sobolev_sin(double eps, int n, bool measure) {
  auto sn = [](std::span<const double> x) { return std::sin(x[0]); };
  auto dsn = [](std::span<const double> x, const MultiIndex& a) {
    const double v[4] = {std::sin(x[0]), std::cos(x[0]), -std::sin(x[0]), -std::cos(x[0])};
    return v[a.entries[0] % 4];
  };
  const auto grid = CubeGrid::make(1.0, 1, choose_M(eps, 1, n, 1.0));
  const auto td = derivative_data_from_callback(sn, grid, n, DerivScheme::exact, dsn);
  SobolevOptions opt;
  opt.f = sn;
  opt.measure = measure;
  return build_sobolev_net(td, eps, 1, n, 1.0, opt);
}

Outcome c12_sobolev() {
  std::ostringstream d;
  const auto main = sobolev_sin(0.1, 3, true);
  bool ok = main.report.measured_error <= 0.1;
  d << "sin err " << g(main.report.measured_error) << " M=" << main.report.M << "; depths";
  std::size_t depth0 = 0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto r = sobolev_sin(eps, 3, false);
    if (!depth0) depth0 = r.report.net_depth;
    ok = ok && r.report.net_depth == depth0;
    d << " " << r.report.net_depth;
  }
  // Least-squares slope of log size against log(1/eps) at (d, n) = (1, 2).
  std::vector<double> lx, ly;
  for (double eps : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
    lx.push_back(std::log(1 / eps));
    ly.push_back(std::log(static_cast<double>(sobolev_sin(eps, 2, false).report.net_size)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  const double slope = sxy / sxx;
  ok = ok && std::abs(slope - 0.5) <= 0.3 * 0.5;
  d << "; size slope " << g(slope);

  // Formula checks.
  bool formulas = choose_eta(0.1, 1, 2) == 0.1 / 4.0 && local_error_bound(1, 1, 1.0) == 1.0 &&
                  choose_M(1e-3, 2, 5, 1.0) == 3;
  for (double eps : {0.3, 0.1, 0.01})
    for (int n = 1; n <= 5; ++n)
      for (int dd = 1; dd <= 2; ++dd) {
        const double arg = std::pow(2.0, dd + 1) / (std::tgamma(n + 1.0) * eps);
        const double M = std::ceil(std::pow(arg, 1.0 / n));
        try {
          formulas = formulas && choose_M(eps, dd, n, 1.0) == static_cast<int>(M);
        } catch (const InfeasibleError&) {
          formulas = formulas && std::pow(M, dd) > 1e6;
        }
      }
  for (int unit = 0; unit <= 4; ++unit)
    for (int wide = 0; wide <= 6; ++wide)
      formulas = formulas && error_propagation_bound(unit, wide, 0.0625) == error_propagation_unroll(unit, wide, 0.0625);
  formulas = formulas && error_propagation_bound(2, 2, 1.0) == 3.0;
  d << "; formulas " << (formulas ? "ok" : "mismatch");
  return {ok && formulas, d.str()};
}

Outcome c13_oracles() {
  bool ok = true;
  double worst_fd = 0.0;
  for (int n = 1; n <= 6; ++n)
    for (double a : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
      const double ref = static_cast<double>(
          oracle::richardson_deriv([](long double x) { return oracle::sigmoid(x); }, n, a));
      const double got = sigmoid_deriv(n, a);
      const double rel = std::abs(got - ref) / std::max(std::abs(got), 1e-2);
      worst_fd = std::max(worst_fd, rel);
    }
  ok = ok && worst_fd <= 1e-6;
  const double c4 = residual_coeff_square(2, 0.0);
  const double c4_oracle = static_cast<double>(oracle::square_residual_c4());
  ok = ok && std::abs(c4 + 1.0 / 12) <= 1e-10 && std::abs(c4 - c4_oracle) <= 1e-10;
  bool cert = true;
  for (double a : {0.0, 1.0}) {
    const auto c = verify_cauchy_bound(a, 20);
    cert = cert && c.valid && std::isfinite(c.fitted_C) && c.recheck(DerivPolyTable::standard());
  }
  bool diffs = true;
  double fact = 1.0;
  for (int m = 1; m <= 12; ++m) {
    fact *= m;
    diffs = diffs && findiff::forward_diff([m](double t) { return findiff::falling_factorial_value(t, m); }, m) == fact;
    for (int n = m + 1; n <= 12; ++n) diffs = diffs && findiff::check_diff_bound(m, n);
    for (int j = 0; j <= m; ++j) diffs = diffs && findiff::binomial(m, j) == oracle::binomial(m, j);
  }
  ok = ok && cert && diffs;
  std::ostringstream d;
  d << "fd rel " << g(worst_fd) << "; c4 " << fmt("%.12g", c4) << "; cert " << (cert ? "ok" : "bad")
    << "; diffs " << (diffs ? "ok" : "bad");
  return {ok, d.str()};
}

Outcome c14_determinism() {
  std::vector<FeedForwardNet> nets{build_square({0.0, 0.27, 3, 1.0}),
                                   build_product(1.0, 0.2, 3),
                                   build_monomial_deep({7, 0.0, 0.27, 3, 1.0}),
                                   build_monomial_shallow({4, 1.0, 0.27, 3, 1.0}),
                                   build_bump({1.0, 4.0, 0.375, 147.0})};
  const double c[3] = {1, 1, 1};
  nets.push_back(build_polynomial(c, 0.0, 0.27, 3));
  nets.push_back(build_step_approx({{0.0, 1.0, 2.0, 3.0}, {1.0, -2.0, 0.5}}, 0.05).net);
  nets.push_back(build_continuous_approx([](double x) { return sigmoid(x); }, -5, 5, ModulusSpec::lipschitz(0.25), 0.1)
                     .step.net);
  nets.push_back(sobolev_sin(0.1, 3, false).net);
  for (const auto& b : rnn_basis(3, 0.0, 0.27, 3)) nets.push_back(b);
  bool rt = true;
  for (const auto& n : nets) {
    const auto text = serialize(n);
    const auto back = deserialize(text);
    rt = rt && back.bitwise_equal(n) && serialize(back) == text;
  }
  const auto dir = cli::scratch("acceptance");
  const std::vector<std::string> cmds{
      "sweep --beta 0.01,0.1,0.27 --k 1,2,3 --a 0,1 --grid 2001",
      "calibrate --builder square --beta 0.27 --k 1,2,3,4,5",
      "build sobolev --d 1 --n 3 --eps 0.1 --target sin -o " + (dir / "s.json").string(),
      "figures 9 --out-dir " + dir.string()};
  bool cli_same = true;
  for (const auto& cmd : cmds) {
    const auto r1 = cli::run(cmd);
    const std::string f1 = cli::slurp(dir / "s.json") + cli::slurp(dir / "fig9.csv");
    const auto r2 = cli::run(cmd);
    const std::string f2 = cli::slurp(dir / "s.json") + cli::slurp(dir / "fig9.csv");
    cli_same = cli_same && r1.status == 0 && r1.status == r2.status && r1.out == r2.out && f1 == f2;
  }
  return {rt && cli_same, std::to_string(nets.size()) + " nets round-trip " + (rt ? "ok" : "bad") +
                              "; repeated CLI runs " + (cli_same ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"square accuracy", c1_square_accuracy},
      {"geometric decay", c2_geometric_decay},
      {"product domination", c3_product_domination},
      {"monomial m=7", c4_monomial_7},
      {"shallow/deep agreement at m=2", c5_shallow_deep_m2},
      {"shallow rate exponent", c6_shallow_rate},
      {"degenerate shift rejection", c7_degenerate_shift},
      {"polynomial x^2+x+1", c8_polynomial},
      {"bump/indicator", c9_bump},
      {"continuous approximation", c10_continuous},
      {"Weierstrass route", c11_weierstrass},
      {"Sobolev pipeline", c12_sobolev},
      {"oracle suites", c13_oracles},
      {"determinism and round-trip", c14_determinism},
  };
  // Optional criterion numbers select a subset.
  std::vector<bool> run(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..%zu ...]\n", criteria.size());
      return 2;
    }
    run[static_cast<std::size_t>(id - 1)] = true;
  }
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!run[i]) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria failed\n", failed, ran);
  return failed ? 1 : 0;
}
