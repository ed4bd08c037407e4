#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "silunet/errors.hpp"
#include "silunet/findiff.hpp"
#include "silunet/scalar_math.hpp"

using namespace silunet;

TEST_SUITE("scalar_math") {
  TEST_CASE("sigmoid values and stability") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::abs(sigmoid(40.0) - 1.0) <= 1e-15);
    CHECK(sigmoid(-3.0) == doctest::Approx(static_cast<double>(oracle::sigmoid(-3.0L))).epsilon(1e-15));
    for (double x : {-700.0, -300.0, 300.0, 700.0}) {
      const double s = sigmoid(x);
      CHECK(std::isfinite(s));
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    CHECK_THROWS_AS(sigmoid(std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(sigmoid(std::numeric_limits<double>::infinity()), DomainError);
  }

  TEST_CASE("silu") {
    CHECK(silu(0.0) == 0.0);
    CHECK(silu(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    for (double x = -30.0; x <= 30.0; x += 0.01) CHECK(std::abs(silu(x) - silu(-x) - x) <= 1e-12);
    CHECK_THROWS_AS(silu(std::numeric_limits<double>::infinity()), DomainError);
  }

  TEST_CASE("derivative table structure") {
    const auto& t = DerivPolyTable::standard();
    CHECK(t.max_order() == 20);
    REQUIRE(t.coeffs(0).size() == 2);
    CHECK(t.coeffs(0)[0] == 0);
    CHECK(t.coeffs(0)[1] == 1);
    CHECK(t.coeffs(1)[1] == 1);
    CHECK(t.coeffs(1)[2] == -1);
    for (int n = 0; n <= 20; ++n) CHECK(t.degree(n) == n + 1);
    for (int n = 1; n <= 20; ++n) CHECK(t.coefficient_sum(n) == 0);
    // P_{n+1} = P_n' * (s - s^2), recomputed here.
    for (int n = 0; n < 20; ++n) {
      const auto& p = t.coeffs(n);
      std::vector<DerivPolyTable::Int> d(p.size() + 1, 0);
      for (std::size_t i = 1; i < p.size(); ++i) {
        const auto dp = p[i] * static_cast<DerivPolyTable::Int>(i);
        d[i] += dp;       // times s
        d[i + 1] -= dp;   // times -s^2
      }
      const auto& q = t.coeffs(n + 1);
      for (std::size_t i = 0; i < q.size(); ++i) CHECK(q[i] == d[i]);
    }
  }

  TEST_CASE("sigmoid_deriv examples") {
    CHECK(sigmoid_deriv(1, 0.0) == 0.25);
    CHECK(std::abs(sigmoid_deriv(2, 0.0)) <= 1e-16);
    CHECK(sigmoid_deriv(3, 0.0) == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK_THROWS_AS(sigmoid_deriv(21, 0.0), CapacityError);
  }

  TEST_CASE("sigmoid_deriv against the finite-difference oracle") {
    for (int n = 1; n <= 6; ++n)
      for (double a : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const long double ref =
            oracle::richardson_deriv([](long double x) { return oracle::sigmoid(x); }, n, a);
        const double got = sigmoid_deriv(n, a);
        CAPTURE(n);
        CAPTURE(a);
        // Even orders vanish at 0, so the relative error is floored at 1e-2.
        CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-6 * std::max(std::abs(got), 1e-2));
      }
  }

  TEST_CASE("sigmoid_deriv against the Stirling expansion up to order 20") {
    for (int n = 0; n <= 20; ++n)
      for (double a : {-1.5, 0.0, 0.7, 3.0}) {
        const double ref = static_cast<double>(oracle::sigmoid_deriv_stirling(n, a));
        CAPTURE(n);
        CHECK(sigmoid_deriv(n, a) == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
      }
  }

  TEST_CASE("silu_shift_coeff") {
    CHECK(silu_shift_coeff(1, 0.0) == 0.5);
    CHECK(silu_shift_coeff(2, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(silu_shift_coeff(0, 1.3) == doctest::Approx(1.3 * sigmoid(1.3)).epsilon(1e-15));
    // Taylor coefficient of SiLU(x + 1) at x^3 from finite differences.
    const long double d3 =
        oracle::richardson_deriv([](long double x) { return oracle::silu(x); }, 3, 1.0L);
    CHECK(silu_shift_coeff(3, 1.0) == doctest::Approx(static_cast<double>(d3 / 6)).epsilon(1e-7));
  }

  TEST_CASE("leading coefficients") {
    CHECK(leading_coeff_square(0.0) == 0.5);
    CHECK(leading_coeff_square(1.0) ==
          doctest::Approx(2 * sigmoid_deriv(1, 1.0) + sigmoid_deriv(2, 1.0)).epsilon(1e-15));
    for (double a : {-2.0, -0.3, 0.0, 1.0, 2.5})
      CHECK(leading_coeff_monomial(2, a) == doctest::Approx(leading_coeff_square(a)).epsilon(1e-14));
    CHECK(std::abs(leading_coeff_monomial(3, 0.0)) <= 1e-16);
    CHECK(std::abs(leading_coeff_monomial(3, 1.0)) > 1e-6);
  }

  TEST_CASE("degenerate shift by bisection") {
    const double root = find_degenerate_shift(1.0, 4.0);
    CHECK(std::abs(leading_coeff_square(root)) < 1e-10);
    // K(a) = sigma'(a) (2 - a tanh(a / 2)), so the root solves a tanh(a / 2) = 2.
    CHECK(root * std::tanh(root / 2) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS(find_degenerate_shift(-1.0, 1.0));
  }

  TEST_CASE("Cauchy bound certificate") {
    const double rho = 2.0 / std::numbers::pi;
    for (double a : {0.0, 1.0}) {
      const auto cert = verify_cauchy_bound(a, 20);
      CAPTURE(a);
      CHECK(cert.valid);
      CHECK(std::isfinite(cert.fitted_C));
      CHECK(cert.fitted_C > 0.0);
      CHECK(cert.fitted_C < 10.0);
      CHECK(cert.rho == doctest::Approx(rho));
      CHECK(cert.recheck(DerivPolyTable::standard()));
      for (int n = 0; n <= 20; ++n) {
        const double lhs = std::abs(sigmoid_deriv(n, a)) / std::tgamma(n + 1.0);
        CHECK(lhs <= cert.fitted_C * std::pow(rho, n) * (1 + 1e-12));
      }
      MESSAGE("fitted_C(a=" << a << ") = " << cert.fitted_C);
    }
    CHECK(verify_cauchy_bound(0.0, 0).fitted_C == 0.5);
  }

  TEST_CASE("residual_coeff_square") {
    CHECK(residual_coeff_square(2, 0.0) == doctest::Approx(-1.0 / 12.0).epsilon(1e-12));
    CHECK(std::abs(residual_coeff_square(2, 0.0) - static_cast<double>(oracle::square_residual_c4())) <
          1e-10);
    // 2 x tanh(x/2) = x^2 - x^4/12 + x^6/120 - 17 x^8/20160 + ...
    CHECK(residual_coeff_square(3, 0.0) == doctest::Approx(1.0 / 120.0).epsilon(1e-12));
    CHECK(residual_coeff_square(4, 0.0) == doctest::Approx(-17.0 / 20160.0).epsilon(1e-12));
    // With a = 0 only the odd derivative contributes.
    for (int j = 2; j <= 6; ++j) {
      const double odd_only =
          2.0 * sigmoid_deriv(2 * j - 1, 0.0) / std::tgamma(2.0 * j) / leading_coeff_square(0.0);
      CHECK(residual_coeff_square(j, 0.0) == doctest::Approx(odd_only).epsilon(1e-13));
    }
    CHECK_THROWS_AS(residual_coeff_square(1, 0.0), ContractError);
    CHECK_THROWS_AS(residual_coeff_square(2, find_degenerate_shift(1.0, 4.0)), DegenerateShiftError);
  }

  TEST_CASE("partial series matches f_0") {
    for (double x = -0.3; x <= 0.3; x += 0.001) {
      double s = x * x;
      for (int j = 2; j <= 6; ++j) s += residual_coeff_square(j, 0.0) * std::pow(x, 2 * j);
      const double f0 = (silu(x) + silu(-x)) / leading_coeff_square(0.0);
      CHECK(std::abs(s - f0) <= 1e-8);
    }
  }

  TEST_CASE("residual_coeff_monomial") {
    CHECK(residual_coeff_monomial(2, 4, 0.0) ==
          doctest::Approx(residual_coeff_square(2, 0.0)).epsilon(1e-13));
    CHECK_THROWS_AS(residual_coeff_monomial(3, 3, 1.0), ContractError);
    CHECK_THROWS_AS(residual_coeff_monomial(3, 2, 1.0), ContractError);
    CHECK_THROWS_AS(residual_coeff_monomial(3, 5, 0.0), DegenerateShiftError);
    // |A_n| <= 2^m C (|a| + 1/rho) / |K_m| * (m / pi)^n from the certificate.
    const int m = 3, n = 5;
    const double a = 1.0, rho = 2.0 / std::numbers::pi;
    const double C = verify_cauchy_bound(a, 20).fitted_C;
    const double bound = std::pow(2.0, m) * C * (std::abs(a) + 1.0 / rho) /
                         std::abs(leading_coeff_monomial(m, a)) * std::pow(m / std::numbers::pi, n);
    CHECK(std::abs(residual_coeff_monomial(m, n, a)) <= bound);
  }
}
