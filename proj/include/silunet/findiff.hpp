#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace silunet::findiff {

/// Exact binomial coefficient from a Pascal table, 0 <= j <= m <= 62.
/// CapacityError outside that range.
std::int64_t binomial(int m, int j);

/// Sum with pairwise (cascade) reduction.
double pairwise_sum(std::span<const double> terms);

/// Delta^m f(x0) = sum_j (-1)^(m-j) C(m, j) f(x0 + j).
template <class F>
double forward_diff(F&& f, int m, double x0 = 0.0) {
  std::vector<double> terms(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    const double c = static_cast<double>(binomial(m, j));
    const double v = f(x0 + j);
    terms[static_cast<std::size_t>(j)] = ((m - j) % 2 == 0 ? c : -c) * v;
  }
  return pairwise_sum(terms);
}

/// x (x-1) ... (x-k+1); 1 for k = 0.
double falling_factorial_value(double x, int k);

struct FallingFactorial {
  double base = 0.0;
  int order = 0;

  double value() const { return falling_factorial_value(base, order); }
};

/// Delta^m p_n(0) with p_n(t) = (t - m/2)^n.
double centered_power_diff(int m, int n);

/// |Delta^m p_n(0)| <= 2^m (m/2)^n, for n > m >= 1.
bool check_diff_bound(int m, int n);

}  // namespace silunet::findiff
