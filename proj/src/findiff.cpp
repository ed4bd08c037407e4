#include "silunet/findiff.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "silunet/errors.hpp"

namespace silunet::findiff {

namespace {

constexpr int max_binomial_order = 62;

struct PascalTable {
  std::array<std::array<std::int64_t, max_binomial_order + 1>, max_binomial_order + 1> c{};

  PascalTable() {
    for (int m = 0; m <= max_binomial_order; ++m) {
      c[m][0] = 1;
      c[m][m] = 1;
      for (int j = 1; j < m; ++j) {
        std::int64_t v = 0;
        if (__builtin_add_overflow(c[m - 1][j - 1], c[m - 1][j], &v))
          throw CapacityError("binomial table saturated at m=" + std::to_string(m));
        c[m][j] = v;
      }
    }
  }
};

const PascalTable& pascal() {
  static const PascalTable table;
  return table;
}

double pairwise_range(const double* p, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_range(p, half) + pairwise_range(p + half, n - half);
}

}  // namespace

std::int64_t binomial(int m, int j) {
  if (m < 0 || j < 0 || j > m || m > max_binomial_order)
    throw CapacityError("binomial(" + std::to_string(m) + ", " + std::to_string(j) +
                        ") outside 0 <= j <= m <= 62");
  return pascal().c[m][j];
}

double pairwise_sum(std::span<const double> terms) {
  return pairwise_range(terms.data(), terms.size());
}

double falling_factorial_value(double x, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= (x - i);
  return v;
}

double centered_power_diff(int m, int n) {
  const double shift = 0.5 * m;
  return forward_diff([&](double t) { return std::pow(t - shift, n); }, m);
}

bool check_diff_bound(int m, int n) {
  const double lhs = std::abs(centered_power_diff(m, n));
  const double rhs = std::pow(2.0, m) * std::pow(0.5 * m, n);
  return lhs <= rhs;
}

}  // namespace silunet::findiff
