#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "silunet/network.hpp"

namespace silunet {

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t d, double B);
  static Box interval(double lo, double hi);
  std::size_t dim() const noexcept { return lo.size(); }
};

/// Closed slab {x : lo <= x[axis] <= hi} left out of the sup.
struct Band {
  std::size_t axis = 0;
  double lo = 0.0;
  double hi = 0.0;
};

struct ErrorReport {
  double sup_error = 0.0;
  std::vector<double> argmax_point;
  /// Tensor-grid points that were not excluded.  Refinement points are
  /// extra and not counted.
  std::size_t grid_points = 0;
  std::vector<Band> excluded_bands;
};

std::string error_report_csv_header();
std::string error_report_csv_row(const ErrorReport& r);

using ScalarField = std::function<double(std::span<const double>)>;

/// Output `output` of the net as a field.  The net is captured by
/// reference and must outlive the field.
ScalarField net_field(const FeedForwardNet& net, std::size_t output = 0);

/// 10001 for d = 1, 201 for d = 2, 41 otherwise.
std::size_t default_grid_per_dim(std::size_t d);

bool in_bands(std::span<const double> x, std::span<const Band> bands) noexcept;

/// max |approx - target| over the tensor grid on the box with the bands
/// removed, followed by three local refinement levels around the argmax
/// (21 points per axis, spacing divided by 10 at each level).
///
/// Grid points are split across OpenMP threads; ties go to the lowest grid
/// index so the result matches sup_error_serial bit for bit.  Exceptions
/// from the fields are rethrown (the one at the lowest index wins).
/// DomainError when every point is excluded or a difference is not finite.
ErrorReport sup_error(const ScalarField& approx, const ScalarField& target, const Box& box,
                      std::size_t grid_per_dim, std::span<const Band> bands = {});
ErrorReport sup_error(const FeedForwardNet& net, const ScalarField& target, const Box& box,
                      std::size_t grid_per_dim, std::span<const Band> bands = {});

/// Single-threaded reference for sup_error.
ErrorReport sup_error_serial(const ScalarField& approx, const ScalarField& target, const Box& box,
                             std::size_t grid_per_dim, std::span<const Band> bands = {});
ErrorReport sup_error_serial(const FeedForwardNet& net, const ScalarField& target, const Box& box,
                             std::size_t grid_per_dim, std::span<const Band> bands = {});

/// Sup-norm of f - g on the 1-D grid points xs (no refinement); OpenMP.
double max_abs_diff(const std::function<double(double)>& f, const std::function<double(double)>& g,
                    std::span<const double> xs);

/// n evenly spaced points from lo to hi inclusive; the last one is exactly hi.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace silunet
