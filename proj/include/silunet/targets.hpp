#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "silunet/kernels.hpp"
#include "silunet/sobolev.hpp"

namespace silunet {

/// A named test function for the command line and the figure generators.
struct Target {
  std::string spec;
  std::size_t dim = 1;
  ScalarField f;
  /// D^alpha f; empty when no closed form is wired up.
  DerivCallback deriv;
  /// Jump locations of discontinuous 1-D targets.
  std::vector<double> jumps;
  /// Global Lipschitz constant when known, NaN otherwise.
  double lipschitz = std::numeric_limits<double>::quiet_NaN();

  double operator()(double x) const;
  std::function<double(double)> scalar() const;
};

/// Accepted specs:
///   x^m, pow:m, poly:c0,c1,...   polynomials (coefficients lowest first)
///   sin, cos, sigmoid, const:c
///   logcos                        log(7 + x) cos(x^3)
///   indicator:lo,hi               1 on [lo, hi)
///   sampled:file.csv              x,y rows, linear interpolation
///   t4                            sin(pi x) cos(pi x) / (2 pi) on R^2
///   sinprod                       sin(x) sin(y)
///   xy                            x y
/// DomainError for anything else; IoError / ParseError for sampled files.
Target parse_target(const std::string& spec);

std::string target_help();

}  // namespace silunet
