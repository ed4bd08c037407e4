#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "silunet/constructors.hpp"
#include "silunet/kernels.hpp"
#include "silunet/network.hpp"
#include "silunet/stepfun.hpp"

namespace silunet {

struct MultiIndex {
  std::vector<int> entries;

  int order() const noexcept;
  double factorial() const;
  /// prod_i (x_i - c_i)^{alpha_i}.
  double monomial(std::span<const double> x, std::span<const double> c) const;
};

/// All alpha in N^d with |alpha| <= max_order: by total order, then
/// lexicographically ascending within an order.
std::vector<MultiIndex> multi_indices(int d, int max_order);

/// M^d cubes of side h = 2B/M tiling [-B, B]^d.  Cubes are half-open
/// [e_j, e_{j+1}) per axis except that x = B belongs to the last cube.
/// Flat indices are row-major (axis 0 slowest).
struct CubeGrid {
  double B = 1.0;
  int d = 1;
  int M = 1;
  double h = 2.0;

  static CubeGrid make(double B, int d, int M);
  std::size_t cube_count() const noexcept;
  std::vector<int> index(std::size_t flat) const;
  std::size_t flat(std::span<const int> idx) const;
  /// -B + i h, with edge(M) = B exactly.
  double edge(int i) const noexcept;
  double center_coord(int i) const noexcept;
  std::vector<double> center(std::size_t flat) const;
};

struct TaylorData {
  int d = 1;
  int n = 1;
  CubeGrid grid;
  std::vector<MultiIndex> alphas;
  /// coeffs[cube][a] = D^alpha f(c) / alpha!, alpha = alphas[a].
  std::vector<std::vector<double>> coeffs;
  /// Cubes where a finite-difference stencil had to be shifted inside the
  /// domain.
  std::vector<bool> one_sided;
  /// Some |C| > 1, i.e. f is outside the unit ball (warning only).
  bool exceeds_unit = false;

  std::string to_json() const;
};

/// ceil(B (2^{d+1} / (n! eps))^{1/n}).  InfeasibleError when M^d > 1e6.
int choose_M(double eps, int d, int n, double B);
/// eps / (2^{d+1} d^n (2^{n-2} - 1 + d)).
double choose_eta(double eps, int d, int n);
/// 2^d h^n / (n! 2^n).
double local_error_bound(int n, int d, double h);

inline constexpr std::size_t max_cube_count = 1000000;

/// The cube whose indicator is 1 at x.  DomainError outside [-B, B]^d.
std::size_t oracle_active_cube(const CubeGrid& grid, std::span<const double> x);
/// Exact indicator of cube j at x (0 or 1).
double oracle_psi(const CubeGrid& grid, std::size_t j, std::span<const double> x);

double taylor_eval(const TaylorData& td, std::size_t j, std::span<const double> x);
/// sum_j psi_j(x) T_j(x).
double oracle_approx(const TaylorData& td, std::span<const double> x);

/// Closed form of the product-chain error recursion: the first factor is
/// exact, each further wide factor (|u| <= 2) maps gamma to eta + 2 gamma,
/// each unit factor (|u| <= 1) to eta + gamma; wide factors are innermost.
double error_propagation_bound(int num_unit_factors, int num_wide_factors, double eta);
/// The same recursion applied step by step.
double error_propagation_unroll(int num_unit_factors, int num_wide_factors, double eta);

struct ProductParams {
  double a = 0.0;
  double beta = 0.27;
  int k = 3;
};

/// Bump for the i-th cube along an axis.  The last cube's bump reaches past
/// B so that x = B sits on its plateau.
BumpParams cube_bump(const CubeGrid& grid, int i, KappaTau schedule);

/// M(u_1, M(u_2, ..., M(u_{F-1}, u_F))) over the d bump factors followed by
/// the |alpha| linear factors (x_i - c_i), ascending by axis.
FeedForwardNet build_term_net(std::size_t j, const MultiIndex& alpha, const CubeGrid& grid,
                              KappaTau schedule, const ProductParams& product);

/// psi_j(x) (x - c_j)^alpha.
double term_oracle(std::size_t j, const MultiIndex& alpha, const CubeGrid& grid,
                   std::span<const double> x);

/// Interior cube faces, [e - tau, e + tau] per axis.
std::vector<Band> cube_face_bands(const CubeGrid& grid, double tau);

enum class DerivScheme { exact, central };

/// D^alpha f(x).
using DerivCallback = std::function<double(std::span<const double>, const MultiIndex&)>;

/// Taylor data on the grid.  The central scheme nests second-order central
/// stencils per axis with step h_fd; a stencil that would leave the domain
/// is shifted inside and the cube is flagged.
TaylorData derivative_data_from_callback(const ScalarField& f, const CubeGrid& grid, int n,
                                         DerivScheme scheme, const DerivCallback& exact = {},
                                         double h_fd = 1e-3);

struct SobolevOptions {
  double a = 0.0;
  double beta = 0.27;
  /// Product depth; calibrated from eta when unset.
  std::optional<int> k;
  /// Target for measured_error; skipped when empty.
  ScalarField f;
  bool measure = true;
  std::size_t grid_per_dim = 0;
};

struct SobolevBuildReport {
  int M = 0;
  std::size_t cube_count = 0;
  int k = 0;
  double eta = 0.0;
  std::size_t net_size = 0;
  std::size_t net_depth = 0;
  double predicted_local_bound = 0.0;
  /// Banded sup |net - f| (NaN when no target was given).
  double measured_error = 0.0;
  /// Banded sup |net - sum_j psi_j T_j|.
  double network_gap = 0.0;
  std::size_t term_count = 0;
  KappaTau schedule;
  RateFit product_fit;
  /// Measured sup |M_k(u, v) - u v| on the calibration box at the chosen k.
  double product_error = 0.0;
  double product_box = 0.0;
};

std::string sobolev_report_csv_header();
std::string sobolev_report_csv_row(const SobolevBuildReport& r);

struct SobolevResult {
  FeedForwardNet net;
  SobolevBuildReport report;
  std::vector<Band> bands;
};

/// sum over every (j, alpha) of C_{j,alpha} G_{j,alpha}, summed by one
/// Identity layer.  Terms are built in parallel and merged in enumeration
/// order (cubes row-major, then alphas).
SobolevResult build_sobolev_net(const TaylorData& td, double eps, int d, int n, double B,
                                const SobolevOptions& opt = {});

}  // namespace silunet
