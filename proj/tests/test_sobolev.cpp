#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "silunet/errors.hpp"
#include "silunet/kernels.hpp"
#include "silunet/sobolev.hpp"

using namespace silunet;

namespace {
double fact(int n) { return std::tgamma(n + 1.0); }

// D^alpha sin(x) in one variable.
double sin_deriv(std::span<const double> x, const MultiIndex& a) {
  switch (a.entries[0] % 4) {
    case 0: return std::sin(x[0]);
    case 1: return std::cos(x[0]);
    case 2: return -std::sin(x[0]);
    default: return -std::cos(x[0]);
  }
}
}  // namespace

TEST_SUITE("sobolev") {
  TEST_CASE("multi_indices") {
    const auto a = multi_indices(2, 2);
    REQUIRE(a.size() == 6);
    CHECK(a[0].entries == std::vector<int>{0, 0});
    CHECK(a[1].entries == std::vector<int>{0, 1});
    CHECK(a[2].entries == std::vector<int>{1, 0});
    CHECK(a[3].entries == std::vector<int>{0, 2});
    CHECK(a[5].entries == std::vector<int>{2, 0});
    // C(d + n, d) indices.
    CHECK(multi_indices(3, 4).size() == 35);
    CHECK(MultiIndex{{2, 3}}.factorial() == 12.0);
  }

  TEST_CASE("choose_M") {
    CHECK(choose_M(0.9, 1, 3, 1.0) == static_cast<int>(std::ceil(std::cbrt(4.0 / (6 * 0.9)))));
    CHECK(choose_M(0.9, 1, 3, 1.0) == 1);
    CHECK(choose_M(1e-3, 2, 5, 1.0) == 3);
    for (double eps : {0.2, 0.1, 0.05, 0.01})
      for (int n = 1; n <= 4; ++n) {
        const double expect = std::ceil(std::pow(4.0 / (fact(n) * eps), 1.0 / n));
        CHECK(choose_M(eps, 1, n, 1.0) == static_cast<int>(expect));
      }
    CHECK_THROWS_AS(choose_M(1e-9, 3, 1, 1.0), InfeasibleError);
  }

  TEST_CASE("choose_eta") {
    CHECK(choose_eta(0.1, 1, 2) == doctest::Approx(0.025).epsilon(1e-15));
    CHECK(choose_eta(0.2, 2, 3) == doctest::Approx(0.2 / (8.0 * 8.0 * 3.0)).epsilon(1e-15));
  }

  TEST_CASE("local_error_bound") {
    CHECK(local_error_bound(1, 1, 1.0) == 1.0);
    CHECK(local_error_bound(2, 1, 0.5) == doctest::Approx(local_error_bound(2, 1, 1.0) / 4));
    CHECK(local_error_bound(3, 2, 0.4) == doctest::Approx(4.0 * 0.064 / (6 * 8)));
  }

  TEST_CASE("error propagation closed form against the recursion") {
    const double eta = 0.01;
    CHECK(error_propagation_bound(2, 0, eta) == eta);
    CHECK(error_propagation_bound(2, 2, eta) == doctest::Approx(3 * eta));
    CHECK(error_propagation_bound(3, 4, 0.0) == 0.0);
    for (int unit = 0; unit <= 4; ++unit)
      for (int wide = 0; wide <= 6; ++wide) {
        CAPTURE(unit);
        CAPTURE(wide);
        CHECK(error_propagation_bound(unit, wide, 0.125) == error_propagation_unroll(unit, wide, 0.125));
      }
  }

  TEST_CASE("cube grid and the partition oracle") {
    const auto g = CubeGrid::make(1.0, 2, 4);
    CHECK(g.cube_count() == 16);
    CHECK(g.edge(4) == 1.0);
    CHECK(g.edge(0) == -1.0);
    for (std::size_t j = 0; j < g.cube_count(); ++j) CHECK(g.flat(g.index(j)) == j);
    const double corner[2] = {1.0, -1.0};
    CHECK(oracle_active_cube(g, corner) == g.flat(std::vector<int>{3, 0}));
    const double corner2[2] = {1.0, 1.0};
    CHECK(oracle_active_cube(g, corner2) == g.cube_count() - 1);
    // An interior face belongs to the cube it opens (half-open cells).
    const double face[2] = {0.0, -0.75};
    CHECK(oracle_active_cube(g, face) == g.flat(std::vector<int>{2, 0}));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double x[2] = {u(rng), u(rng)};
      double s = 0.0;
      for (std::size_t j = 0; j < g.cube_count(); ++j) s += oracle_psi(g, j, x);
      CHECK(s == 1.0);
    }
    const double out[2] = {1.5, 0.0};
    CHECK_THROWS_AS(oracle_active_cube(g, out), DomainError);
  }

  TEST_CASE("taylor data") {
    const auto g = CubeGrid::make(1.0, 1, 4);
    // f(x) = x with n = 2 is reproduced exactly.
    auto id = [](std::span<const double> x) { return x[0]; };
    auto id_d = [](std::span<const double> x, const MultiIndex& a) { return a.entries[0] == 0 ? x[0] : 1.0; };
    const auto td = derivative_data_from_callback(id, g, 2, DerivScheme::exact, id_d);
    for (double x = -1.0; x <= 1.0; x += 0.01) {
      const double p[1] = {x};
      CHECK(std::abs(oracle_approx(td, p) - x) <= 1e-15);
    }
    // n = 1 is piecewise constant.
    auto sn = [](std::span<const double> x) { return std::sin(x[0]); };
    const auto t1 = derivative_data_from_callback(sn, g, 1, DerivScheme::exact, sin_deriv);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto c = g.center(j);
      CHECK(taylor_eval(t1, j, c) == std::sin(c[0]));
      const double off[1] = {c[0] + 0.1};
      CHECK(taylor_eval(t1, j, off) == std::sin(c[0]));
    }
    // sin with n = 3 obeys the local bound.
    const auto t3 = derivative_data_from_callback(sn, g, 3, DerivScheme::exact, sin_deriv);
    double worst = 0.0;
    for (double x : linspace(-1, 1, 4001)) {
      const double p[1] = {x};
      worst = std::max(worst, std::abs(oracle_approx(t3, p) - std::sin(x)));
    }
    CHECK(worst <= std::pow(g.h, 3) / (6 * 8) + 1e-15);
  }

  TEST_CASE("central differences against analytic derivatives") {
    const auto g = CubeGrid::make(1.0, 1, 5);
    auto sn = [](std::span<const double> x) { return std::sin(x[0]); };
    const auto ex = derivative_data_from_callback(sn, g, 4, DerivScheme::exact, sin_deriv);
    const auto fd = derivative_data_from_callback(sn, g, 4, DerivScheme::central);
    for (std::size_t j = 0; j < g.cube_count(); ++j)
      for (std::size_t a = 0; a < ex.alphas.size(); ++a) {
        const double scale = ex.alphas[a].factorial();
        CHECK(std::abs((ex.coeffs[j][a] - fd.coeffs[j][a]) * scale) <= 1e-5);
      }
    // A coarse grid pushes stencils at the edge cubes outside.
    const auto g1 = CubeGrid::make(1.0, 1, 1);
    const auto edge = derivative_data_from_callback(sn, g1, 4, DerivScheme::central, {}, 0.8);
    CHECK(edge.one_sided[0]);
    CHECK_FALSE(fd.one_sided[2]);
  }

  TEST_CASE("polynomial with an exact callback") {
    const auto g = CubeGrid::make(1.0, 2, 2);
    // f = 1 + 2x - y^2 + x y.
    auto f = [](std::span<const double> x) { return 1 + 2 * x[0] - x[1] * x[1] + x[0] * x[1]; };
    auto df = [](std::span<const double> x, const MultiIndex& a) {
      const int i = a.entries[0], j = a.entries[1];
      if (i == 0 && j == 0) return 1 + 2 * x[0] - x[1] * x[1] + x[0] * x[1];
      if (i == 1 && j == 0) return 2 + x[1];
      if (i == 0 && j == 1) return -2 * x[1] + x[0];
      if (i == 1 && j == 1) return 1.0;
      if (i == 0 && j == 2) return -2.0;
      return 0.0;
    };
    const auto td = derivative_data_from_callback(f, g, 3, DerivScheme::exact, df);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double x[2] = {u(rng), u(rng)};
      CHECK(std::abs(oracle_approx(td, x) - f(x)) <= 1e-13);
    }
  }

  TEST_CASE("term nets") {
    const auto g1 = CubeGrid::make(1.0, 1, 4);
    const auto sched = choose_kappa_tau(0.01, g1.h);
    const ProductParams pp{0.0, 0.27, 4};
    // alpha = 0 in one dimension is a single bump.
    const auto t0 = build_term_net(1, MultiIndex{{0}}, g1, sched, pp);
    const auto bump = build_bump(cube_bump(g1, 1, sched));
    for (double x = -1.0; x <= 1.0; x += 0.01) CHECK(std::abs(t0.evaluate1(x) - bump.evaluate1(x)) <= 1e-12);

    const auto bands1 = cube_face_bands(g1, sched.tau);
    CHECK(bands1.size() == 3);
    const auto t1 = build_term_net(2, MultiIndex{{1}}, g1, sched, pp);
    auto o1 = [&](std::span<const double> x) { return term_oracle(2, MultiIndex{{1}}, g1, x); };
    const auto r1 = sup_error(t1, o1, Box::interval(-1, 1), 10001, bands1);
    MESSAGE("d=1 alpha=(1) term error " << r1.sup_error);
    CHECK(r1.sup_error <= 0.01 * g1.h + 1e-3);

    const auto g2 = CubeGrid::make(1.0, 2, 2);
    const double eta = choose_eta(0.2, 2, 3);
    const auto s2 = choose_kappa_tau(eta, g2.h);
    const ProductParams p2{0.0, 0.27, 6};
    const MultiIndex a11{{1, 1}};
    const auto t2 = build_term_net(0, a11, g2, s2, p2);
    auto o2 = [&](std::span<const double> x) { return term_oracle(0, a11, g2, x); };
    const auto r2 = sup_error(t2, o2, Box::cube(2, 1.0), 201, cube_face_bands(g2, s2.tau));
    MESSAGE("d=2 alpha=(1,1) term error " << r2.sup_error << " against 3 eta = " << 3 * eta);
    CHECK(r2.sup_error <= 3 * eta);
    CHECK_THROWS_AS(build_term_net(0, MultiIndex{{1}}, g2, s2, p2), ContractError);
  }

  TEST_CASE("sobolev net for sin") {
    const double eps = 0.1;
    const int M = choose_M(eps, 1, 3, 1.0);
    const auto g = CubeGrid::make(1.0, 1, M);
    auto sn = [](std::span<const double> x) { return std::sin(x[0]); };
    const auto td = derivative_data_from_callback(sn, g, 3, DerivScheme::exact, sin_deriv);
    SobolevOptions opt;
    opt.f = sn;
    const auto res = build_sobolev_net(td, eps, 1, 3, 1.0, opt);
    CHECK(res.report.M == M);
    CHECK(res.report.term_count == static_cast<std::size_t>(M) * 3);
    CHECK(res.report.measured_error <= eps);
    const auto rep = sup_error(res.net, sn, Box::interval(-1, 1), 10001, res.bands);
    CHECK(rep.sup_error == res.report.measured_error);
    CHECK_THROWS_AS(build_sobolev_net(td, 0.001, 1, 3, 1.0, opt), ContractError);
  }

  TEST_CASE("sobolev net for a constant") {
    for (int d : {1, 2}) {
      const double eps = 0.2;
      const int n = 2;
      const auto g = CubeGrid::make(1.0, d, choose_M(eps, d, n, 1.0));
      auto c = [](std::span<const double>) { return 0.6; };
      auto dc = [](std::span<const double>, const MultiIndex& a) { return a.order() == 0 ? 0.6 : 0.0; };
      const auto td = derivative_data_from_callback(c, g, n, DerivScheme::exact, dc);
      SobolevOptions opt;
      opt.f = c;
      opt.grid_per_dim = d == 1 ? 2001 : 81;
      const auto res = build_sobolev_net(td, eps, d, n, 1.0, opt);
      CAPTURE(d);
      CHECK(res.report.measured_error <= eps);
    }
  }
}
