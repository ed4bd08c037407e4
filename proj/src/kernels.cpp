#include "silunet/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>

#include "silunet/errors.hpp"

namespace silunet {

Box Box::cube(std::size_t d, double B) {
  if (!(B > 0.0)) throw DomainError("Box::cube: half-width must be positive");
  return {std::vector<double>(d, -B), std::vector<double>(d, B)};
}

Box Box::interval(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("Box::interval: need lo < hi");
  return {{lo}, {hi}};
}

std::string error_report_csv_header() { return "sup_error,argmax,grid_points,bands"; }

std::string error_report_csv_row(const ErrorReport& r) {
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "%.17g", r.sup_error);
  out += buf;
  out += ",";
  for (std::size_t i = 0; i < r.argmax_point.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", r.argmax_point[i]);
    if (i) out += ";";
    out += buf;
  }
  out += "," + std::to_string(r.grid_points) + ",";
  for (std::size_t i = 0; i < r.excluded_bands.size(); ++i) {
    const auto& b = r.excluded_bands[i];
    std::snprintf(buf, sizeof buf, "%zu:%.17g:%.17g", b.axis, b.lo, b.hi);
    if (i) out += ";";
    out += buf;
  }
  return out;
}

ScalarField net_field(const FeedForwardNet& net, std::size_t output) {
  if (output >= net.output_dim()) throw ContractError("net_field: output index out of range");
  return [&net, output](std::span<const double> x) { return net.evaluate(x)[output]; };
}

std::size_t default_grid_per_dim(std::size_t d) {
  return d == 1 ? 10001 : d == 2 ? 201 : 41;
}

bool in_bands(std::span<const double> x, std::span<const Band> bands) noexcept {
  for (const auto& b : bands)
    if (b.axis < x.size() && x[b.axis] >= b.lo && x[b.axis] <= b.hi) return true;
  return false;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw ContractError("linspace: need at least two points");
  std::vector<double> xs(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + step * static_cast<double>(i);
  xs.back() = hi;
  return xs;
}

namespace {

struct Best {
  double err = -1.0;
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();
};

struct Grid {
  std::vector<std::vector<double>> axes;
  std::uint64_t total = 1;

  Grid(const Box& box, std::size_t n) {
    if (box.dim() == 0 || box.hi.size() != box.dim())
      throw ContractError("sup_error: malformed box");
    if (n < 2) throw ContractError("sup_error: grid_per_dim must be >= 2");
    for (std::size_t a = 0; a < box.dim(); ++a) {
      if (!(box.lo[a] < box.hi[a])) throw DomainError("sup_error: empty box side");
      axes.push_back(linspace(box.lo[a], box.hi[a], n));
      if (total > (std::uint64_t{1} << 40) / n) throw CapacityError("sup_error: grid too large");
      total *= n;
    }
  }

  // Axis 0 varies slowest.
  void point(std::uint64_t idx, std::vector<double>& x) const {
    const std::size_t d = axes.size();
    x.resize(d);
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t n = axes[a].size();
      x[a] = axes[a][idx % n];
      idx /= n;
    }
  }
};

double point_error(const ScalarField& approx, const ScalarField& target,
                   std::span<const double> x) {
  const double e = std::abs(approx(x) - target(x));
  if (!std::isfinite(e)) throw DomainError("sup_error: non-finite difference");
  return e;
}

ErrorReport finish(const ScalarField& approx, const ScalarField& target, const Box& box,
                   const Grid& grid, Best best, std::size_t counted, std::span<const Band> bands) {
  if (counted == 0) throw DomainError("sup_error: every grid point lies in an excluded band");
  ErrorReport rep;
  rep.grid_points = counted;
  rep.excluded_bands.assign(bands.begin(), bands.end());
  std::vector<double> center;
  grid.point(best.index, center);
  rep.sup_error = best.err;
  rep.argmax_point = center;

  const std::size_t d = box.dim();
  std::vector<double> step(d);
  for (std::size_t a = 0; a < d; ++a) step[a] = (box.hi[a] - box.lo[a]) / static_cast<double>(grid.axes[a].size() - 1);
  std::vector<double> x(d);
  for (int level = 0; level < 3; ++level) {
    for (auto& s : step) s /= 10.0;
    const std::vector<double> c = rep.argmax_point;
    std::uint64_t count = 1;
    for (std::size_t a = 0; a < d; ++a) count *= 21;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      std::uint64_t t = idx;
      bool inside = true;
      for (std::size_t a = d; a-- > 0;) {
        const int off = static_cast<int>(t % 21) - 10;
        t /= 21;
        x[a] = c[a] + off * step[a];
        if (x[a] < box.lo[a] || x[a] > box.hi[a]) inside = false;
      }
      if (!inside || in_bands(x, bands)) continue;
      const double e = point_error(approx, target, x);
      if (e > rep.sup_error) {
        rep.sup_error = e;
        rep.argmax_point = x;
      }
    }
  }
  return rep;
}

}  // namespace

ErrorReport sup_error_serial(const ScalarField& approx, const ScalarField& target, const Box& box,
                             std::size_t grid_per_dim, std::span<const Band> bands) {
  const Grid grid(box, grid_per_dim);
  Best best;
  std::size_t counted = 0;
  std::vector<double> x;
  for (std::uint64_t i = 0; i < grid.total; ++i) {
    grid.point(i, x);
    if (in_bands(x, bands)) continue;
    ++counted;
    const double e = point_error(approx, target, x);
    if (e > best.err) best = {e, i};
  }
  return finish(approx, target, box, grid, best, counted, bands);
}

ErrorReport sup_error(const ScalarField& approx, const ScalarField& target, const Box& box,
                      std::size_t grid_per_dim, std::span<const Band> bands) {
  const Grid grid(box, grid_per_dim);
  Best best;
  std::size_t counted = 0;
  std::uint64_t fail_index = std::numeric_limits<std::uint64_t>::max();
  std::exception_ptr fail;
  const auto total = static_cast<std::int64_t>(grid.total);

#pragma omp parallel
  {
    Best local;
    std::size_t local_count = 0;
    std::vector<double> x;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < total; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      grid.point(idx, x);
      if (in_bands(x, bands)) continue;
      ++local_count;
      try {
        const double e = point_error(approx, target, x);
        if (e > local.err) local = {e, idx};
      } catch (...) {
#pragma omp critical(silunet_sup_error_fail)
        if (idx < fail_index) {
          fail_index = idx;
          fail = std::current_exception();
        }
      }
    }
#pragma omp critical(silunet_sup_error_merge)
    {
      counted += local_count;
      if (local.err > best.err || (local.err == best.err && local.index < best.index)) best = local;
    }
  }
  if (fail) std::rethrow_exception(fail);
  return finish(approx, target, box, grid, best, counted, bands);
}

ErrorReport sup_error(const FeedForwardNet& net, const ScalarField& target, const Box& box,
                      std::size_t grid_per_dim, std::span<const Band> bands) {
  return sup_error(net_field(net), target, box, grid_per_dim, bands);
}

ErrorReport sup_error_serial(const FeedForwardNet& net, const ScalarField& target, const Box& box,
                             std::size_t grid_per_dim, std::span<const Band> bands) {
  return sup_error_serial(net_field(net), target, box, grid_per_dim, bands);
}

double max_abs_diff(const std::function<double(double)>& f, const std::function<double(double)>& g,
                    std::span<const double> xs) {
  double m = 0.0;
  const auto n = static_cast<std::int64_t>(xs.size());
  std::exception_ptr fail;
#pragma omp parallel for reduction(max : m)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      const double x = xs[static_cast<std::size_t>(i)];
      const double e = std::abs(f(x) - g(x));
      if (!std::isfinite(e)) throw DomainError("max_abs_diff: non-finite difference");
      m = std::max(m, e);
    } catch (...) {
#pragma omp critical(silunet_max_abs_diff)
      if (!fail) fail = std::current_exception();
    }
  }
  if (fail) std::rethrow_exception(fail);
  return m;
}

}  // namespace silunet
