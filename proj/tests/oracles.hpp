#pragma once

// Reference computations that do not go through the library's own
// formulas: long double finite differences, Stirling-number expansions,
// multiplicative binomials and a straight-line forward pass.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "silunet/network.hpp"

namespace oracle {

inline long double sigmoid(long double x) { return 1.0L / (1.0L + std::exp(-x)); }
inline long double silu(long double x) { return x * sigmoid(x); }

/// n-th central difference quotient with nodes x + (j - n/2) h.
inline long double central_diff(const std::function<long double(long double)>& f, int n,
                                long double x, long double h) {
  long double sum = 0.0L, c = 1.0L;
  for (int j = 0; j <= n; ++j) {
    if (j > 0) c = c * (n - j + 1) / j;
    const long double sign = ((n - j) % 2 == 0) ? 1.0L : -1.0L;
    sum += sign * c * f(x + (j - n / 2.0L) * h);
  }
  return sum / std::pow(h, static_cast<long double>(n));
}

/// Two Richardson levels on top of central_diff (error O(h^6)).
inline long double richardson_deriv(const std::function<long double(long double)>& f, int n,
                                    long double x, long double h = 0.1L) {
  const long double d1 = central_diff(f, n, x, h);
  const long double d2 = central_diff(f, n, x, h / 2);
  const long double d3 = central_diff(f, n, x, h / 4);
  const long double r1 = (4 * d2 - d1) / 3;
  const long double r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

/// sigma^(n) = sum_k (-1)^k k! S(n+1, k+1) sigma^(k+1), S the Stirling
/// numbers of the second kind.
inline long double sigmoid_deriv_stirling(int n, long double x) {
  std::vector<std::vector<long double>> S(n + 2, std::vector<long double>(n + 2, 0.0L));
  S[0][0] = 1.0L;
  for (int i = 1; i <= n + 1; ++i)
    for (int k = 1; k <= i; ++k) S[i][k] = k * S[i - 1][k] + S[i - 1][k - 1];
  // Reflect to sigma <= 1/2, where the alternating terms shrink.
  const bool flip = n >= 1 && x > 0;
  const long double s = sigmoid(flip ? -x : x);
  long double sum = 0.0L, fact = 1.0L;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    sum += (k % 2 ? -1.0L : 1.0L) * fact * S[n + 1][k + 1] * std::pow(s, static_cast<long double>(k + 1));
  }
  return flip && n % 2 == 0 ? -sum : sum;
}

/// Exact binomial by the multiplicative formula in 128-bit integers.
inline std::int64_t binomial(int m, int j) {
  __extension__ typedef unsigned __int128 U;
  U c = 1;
  for (int i = 0; i < j; ++i) c = c * static_cast<U>(m - i) / static_cast<U>(i + 1);
  return static_cast<std::int64_t>(c);
}

/// Limit of (2 x tanh(x/2) - x^2) / x^4 as x -> 0, by Richardson
/// extrapolation in x^2.  This is c_4(0).
inline long double square_residual_c4() {
  auto r = [](long double x) { return (2 * x * std::tanh(x / 2) - x * x) / (x * x * x * x); };
  const long double h = 0.02L;
  const long double a = r(h), b = r(h / 2), c = r(h / 4);
  const long double r1 = (4 * b - a) / 3, r2 = (4 * c - b) / 3;
  return (16 * r2 - r1) / 15;
}

/// Forward pass from the dense weights, long double accumulation.
inline std::vector<double> forward(const silunet::FeedForwardNet& net, const std::vector<double>& x) {
  std::vector<long double> v(x.begin(), x.end());
  for (const auto& layer : net.layers()) {
    const auto W = layer.weights.to_dense();
    const std::size_t rows = layer.bias.size();
    const std::size_t cols = v.size();
    std::vector<long double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      long double acc = layer.bias[r];
      for (std::size_t c = 0; c < cols; ++c) acc += static_cast<long double>(W[r * cols + c]) * v[c];
      out[r] = layer.activation == silunet::Activation::silu ? silu(acc) : acc;
    }
    v = std::move(out);
  }
  return {v.begin(), v.end()};
}

}  // namespace oracle
