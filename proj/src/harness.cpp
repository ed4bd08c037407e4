#include "silunet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include <omp.h>

#include "silunet/errors.hpp"
#include "silunet/scalar_math.hpp"
#include "silunet/sobolev.hpp"
#include "silunet/stepfun.hpp"
#include "silunet/svg.hpp"
#include "silunet/targets.hpp"

namespace silunet {

Builder parse_builder(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  if (n == "square") return Builder::square;
  if (n == "product") return Builder::product;
  if (n == "monomial_deep") return Builder::monomial_deep;
  if (n == "monomial_shallow") return Builder::monomial_shallow;
  if (n == "polynomial") return Builder::polynomial;
  throw DomainError("unknown builder '" + name +
                    "' (square, product, monomial-deep, monomial-shallow, polynomial)");
}

const char* builder_name(Builder b) noexcept {
  switch (b) {
    case Builder::square: return "square";
    case Builder::product: return "product";
    case Builder::monomial_deep: return "monomial_deep";
    case Builder::monomial_shallow: return "monomial_shallow";
    case Builder::polynomial: return "polynomial";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (a_grid.empty() || beta_grid.empty() || k_grid.empty())
    throw DomainError("sweep: a, beta and k grids must be nonempty");
  if (!(B > 0.0) || !std::isfinite(B)) throw DomainError("sweep: B must be positive");
  if (m < 1 || m > max_poly_degree)
    throw DomainError("sweep: m must lie in [1, " + std::to_string(max_poly_degree) + "]");
  if (builder == Builder::polynomial && coeffs.empty())
    throw DomainError("sweep: polynomial builder needs coefficients");
}

FeedForwardNet build_cell(const SweepSpec& spec, double a, double beta, int k) {
  switch (spec.builder) {
    case Builder::square: return build_square({a, beta, k, spec.B});
    case Builder::product: return build_product(a, beta, k);
    case Builder::monomial_deep: return build_monomial_deep({spec.m, a, beta, k, spec.B});
    case Builder::monomial_shallow: return build_monomial_shallow({spec.m, a, beta, k, spec.B});
    case Builder::polynomial: return build_polynomial(spec.coeffs, a, beta, k, spec.variant);
  }
  throw ContractError("build_cell: bad builder");
}

ScalarField builder_target(const SweepSpec& spec) {
  switch (spec.builder) {
    case Builder::square: return [](std::span<const double> x) { return x[0] * x[0]; };
    case Builder::product: return [](std::span<const double> x) { return x[0] * x[1]; };
    case Builder::monomial_deep:
    case Builder::monomial_shallow: {
      const int m = spec.m;
      return [m](std::span<const double> x) { return std::pow(x[0], m); };
    }
    case Builder::polynomial: {
      const auto c = spec.coeffs;
      return [c](std::span<const double> x) { return poly_eval(c, x[0]); };
    }
  }
  throw ContractError("builder_target: bad builder");
}

Box builder_box(const SweepSpec& spec) {
  return spec.builder == Builder::product ? Box::cube(2, spec.B) : Box::interval(-spec.B, spec.B);
}

int builder_scale_power(const SweepSpec& spec) {
  if (spec.builder == Builder::monomial_shallow) return spec.m;
  if (spec.builder == Builder::polynomial && spec.variant == PolyVariant::shallow)
    return std::max(2, static_cast<int>(spec.coeffs.size()) - 1);
  return 2;
}

std::string csv_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <class T>
std::string join(const std::vector<T>& v, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_floating_point_v<T>)
      out += csv_real(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

std::string describe(const std::exception& e) {
  if (auto* err = dynamic_cast<const Error*>(&e))
    return std::string(error_kind_name(err->kind())) + ": " + e.what();
  return std::string("error: ") + e.what();
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
  spec.validate();
  const auto as = sorted_unique(spec.a_grid);
  const auto bs = sorted_unique(spec.beta_grid);
  const auto ks = sorted_unique(spec.k_grid);
  SweepResult res;
  for (double a : as)
    for (double b : bs)
      for (int k : ks) {
        SweepRow r;
        r.builder = spec.builder;
        r.a = a;
        r.beta = b;
        r.k = k;
        res.rows.push_back(r);
      }
  const Box box = builder_box(spec);
  const ScalarField target = builder_target(spec);
  const std::size_t g = spec.grid_per_dim ? spec.grid_per_dim : default_grid_per_dim(box.dim());
  const auto n = static_cast<long>(res.rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (long i = 0; i < n; ++i) {
    SweepRow& r = res.rows[static_cast<std::size_t>(i)];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      check_scale(builder_scale_power(spec), r.k, r.beta, builder_name(spec.builder));
      const FeedForwardNet net = build_cell(spec, r.a, r.beta, r.k);
      const ErrorReport rep = sup_error_serial(net, target, box, g);
      r.sup_error = rep.sup_error;
      r.argmax = rep.argmax_point;
    } catch (const std::exception& e) {
      r.sup_error = std::numeric_limits<double>::quiet_NaN();
      r.error = describe(e);
    }
    r.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return res;
}

std::string sweep_csv(const SweepSpec& spec, const SweepResult& result, bool timing) {
  std::ostringstream os;
  os << "# sweep builder=" << builder_name(spec.builder) << " B=" << csv_real(spec.B)
     << " grid_per_dim="
     << (spec.grid_per_dim ? spec.grid_per_dim : default_grid_per_dim(builder_box(spec).dim()));
  if (spec.builder == Builder::monomial_deep || spec.builder == Builder::monomial_shallow)
    os << " m=" << spec.m;
  if (spec.builder == Builder::polynomial)
    os << " coeffs=" << join(spec.coeffs, ";")
       << " variant=" << (spec.variant == PolyVariant::deep ? "deep" : "shallow");
  os << "\n# a_grid=" << join(sorted_unique(spec.a_grid))
     << "\n# beta_grid=" << join(sorted_unique(spec.beta_grid))
     << "\n# k_grid=" << join(sorted_unique(spec.k_grid)) << "\n";
  os << "builder,a,beta,k,sup_error,argmax,status" << (timing ? ",runtime_ms" : "") << "\n";
  for (const auto& r : result.rows) {
    os << builder_name(r.builder) << ',' << csv_real(r.a) << ',' << csv_real(r.beta) << ','
       << r.k << ',' << csv_real(r.sup_error) << ',' << join(r.argmax, ";") << ','
       << csv_field(r.error.empty() ? "ok" : r.error);
    if (timing) os << ',' << csv_real(r.runtime_ms);
    os << "\n";
  }
  return os.str();
}

std::string sweep_svg(const SweepSpec& spec, const SweepResult& result) {
  const auto as = sorted_unique(spec.a_grid);
  const auto bs = sorted_unique(spec.beta_grid);
  const auto ks = sorted_unique(spec.k_grid);
  std::map<std::tuple<double, double, int>, double> err;
  for (const auto& r : result.rows) err[{r.a, r.beta, r.k}] = r.sup_error;
  auto lookup = [&](double a, double b, int k) {
    auto it = err.find({a, b, k});
    return it == err.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
  };
  auto labels = [](const auto& v) {
    std::vector<std::string> out;
    for (auto x : v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", static_cast<double>(x));
      out.push_back(buf);
    }
    return out;
  };
  const std::string title = std::string("log10 sup error, ") + builder_name(spec.builder);
  svg::Heatmap hm;
  hm.title = title;
  if (bs.size() > 1 && ks.size() > 1) {
    hm.x_label = "beta";
    hm.y_label = "k";
    hm.col_labels = labels(bs);
    hm.row_labels = labels(ks);
    for (int k : ks) {
      hm.values.emplace_back();
      for (double b : bs) hm.values.back().push_back(lookup(as[0], b, k));
    }
    return svg::render(hm);
  }
  if (bs.size() > 1 && as.size() > 1) {
    hm.x_label = "beta";
    hm.y_label = "a";
    hm.col_labels = labels(bs);
    hm.row_labels = labels(as);
    for (double a : as) {
      hm.values.emplace_back();
      for (double b : bs) hm.values.back().push_back(lookup(a, b, ks[0]));
    }
    return svg::render(hm);
  }
  if (ks.size() > 1 && as.size() > 1) {
    hm.x_label = "a";
    hm.y_label = "k";
    hm.col_labels = labels(as);
    hm.row_labels = labels(ks);
    for (int k : ks) {
      hm.values.emplace_back();
      for (double a : as) hm.values.back().push_back(lookup(a, bs[0], k));
    }
    return svg::render(hm);
  }
  svg::LinePlot lp;
  lp.title = title;
  lp.log_y = true;
  lp.y_label = "sup error";
  svg::Series s;
  s.label = builder_name(spec.builder);
  if (ks.size() > 1) {
    lp.x_label = "k";
    for (int k : ks) s.x.push_back(k), s.y.push_back(lookup(as[0], bs[0], k));
  } else if (as.size() > 1) {
    lp.x_label = "a";
    for (double a : as) s.x.push_back(a), s.y.push_back(lookup(a, bs[0], ks[0]));
  } else {
    lp.x_label = "beta";
    for (double b : bs) s.x.push_back(b), s.y.push_back(lookup(as[0], b, ks[0]));
  }
  lp.series.push_back(s);
  return svg::render(lp);
}

CalibrateOutcome run_calibrate(const SweepSpec& spec, double a, double beta, std::vector<int> ks) {
  spec.validate();
  if (ks.size() < 3) throw ContractError("calibrate: need at least three k values");
  CalibrateOutcome out;
  out.fit = calibrate_rate([&](int k) { return build_cell(spec, a, beta, k); },
                           builder_target(spec), builder_box(spec), std::move(ks), beta,
                           builder_scale_power(spec), spec.grid_per_dim);
  if (spec.builder == Builder::square) {
    out.omega_checked = true;
    const double inv = 1.0 / beta;
    out.omega_ok = out.fit.omega_est >= inv / 1.25 && out.fit.omega_est <= inv * 1.25;
  }
  return out;
}

std::string calibrate_csv(const SweepSpec& spec, double a, const CalibrateOutcome& out) {
  std::ostringstream os;
  os << "# calibrate builder=" << builder_name(spec.builder) << " a=" << csv_real(a)
     << " beta=" << csv_real(out.fit.beta) << " B=" << csv_real(spec.B);
  if (spec.builder == Builder::monomial_deep || spec.builder == Builder::monomial_shallow)
    os << " m=" << spec.m;
  os << "\n# ks=" << join(out.fit.ks) << "\n# errors=" << join(out.fit.errors) << "\n";
  if (out.fit.truncated) os << "# truncated: errors stopped decreasing, prefix fitted\n";
  os << rate_fit_csv_header() << ",k_max,omega_check\n";
  os << rate_fit_csv_row(out.fit) << ',' << out.fit.k_max << ','
     << (out.omega_checked ? (out.omega_ok ? "pass" : "fail") : "n/a") << "\n";
  return os.str();
}

// Figures.

namespace {

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;

  void add(std::string name, std::vector<double> col) {
    names.push_back(std::move(name));
    cols.push_back(std::move(col));
  }
  std::string csv() const {
    std::ostringstream os;
    for (const auto& c : comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << csv_field(names[i]);
    os << "\n";
    const std::size_t rows = cols.empty() ? 0 : cols[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << csv_real(cols[i][r]);
      os << "\n";
    }
    return os.str();
  }
};

std::vector<double> eval_net(const FeedForwardNet& net, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = net.evaluate1(xs[i]);
  return out;
}

template <class F>
std::vector<double> eval_fn(F&& f, const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return out;
}

// Line plot of the given columns against column 0.
std::string plot_table(const Table& t, const std::string& title, const std::string& xl,
                       const std::string& yl, bool log_y = false, std::size_t first = 1) {
  svg::LinePlot lp;
  lp.title = title;
  lp.x_label = xl;
  lp.y_label = yl;
  lp.log_y = log_y;
  for (std::size_t i = first; i < t.cols.size(); ++i) lp.series.push_back({t.names[i], t.cols[0], t.cols[i]});
  return svg::render(lp);
}

std::string param_line(double a, double beta, int k) {
  return "a=" + csv_real(a) + " beta=" + csv_real(beta) + " k=" + std::to_string(k);
}

std::string sup_line(const std::string& what, double v) { return what + "=" + csv_real(v); }

struct FigureOut {
  std::string csv;
  std::string svg;
};

FigureOut fig3() {
  Table t;
  const auto xs = linspace(-1.0, 1.0, 401);
  t.comments = {"fig3: Q_k(x) vs x^2", "a=0 beta=0.27 B=1 k=1..5"};
  t.add("x", xs);
  t.add("x^2", eval_fn([](double x) { return x * x; }, xs));
  for (int k = 1; k <= 5; ++k) {
    const auto net = build_square({0.0, 0.27, k, 1.0});
    t.add("Q_" + std::to_string(k), eval_net(net, xs));
    t.comments.push_back(sup_line("sup_error_k" + std::to_string(k),
                                  sup_error(net, [](std::span<const double> x) { return x[0] * x[0]; },
                                            Box::interval(-1, 1), default_grid_per_dim(1))
                                      .sup_error));
  }
  return {t.csv(), plot_table(t, "Q_k vs x^2 (a=0, beta=0.27)", "x", "y")};
}

FigureOut fig5() {
  const int k = 3;
  const auto net = build_product(0.0, 0.27, k);
  auto u = [](double x) { return std::cos(x); };
  auto v = [](double x) { return x == 0.0 ? 0.0 : std::sin(x) * std::log(x * x); };
  const auto xs = linspace(-3.0, 3.0, 601);
  Table t;
  t.comments = {"fig5: M_k(cos x, sin x log x^2) vs the product", param_line(0.0, 0.27, k),
                "x in [-3,3]; sin(0) log(0) taken as its limit 0"};
  std::vector<double> exact, approx;
  double worst = 0.0;
  for (double x : xs) {
    const double in[2] = {u(x), v(x)};
    exact.push_back(in[0] * in[1]);
    approx.push_back(net.evaluate(in)[0]);
    worst = std::max(worst, std::abs(approx.back() - exact.back()));
  }
  t.comments.push_back(sup_line("grid_max_error", worst));
  t.add("x", xs);
  t.add("product", exact);
  t.add("M_k", approx);
  return {t.csv(), plot_table(t, "M_k(cos x, sin x log x^2)", "x", "y")};
}

FigureOut fig6() {
  const int m = 7;
  const double eps = 1e-3;
  const RateFit fit = calibrate_rate(
      [&](int k) { return build_monomial_deep({m, 0.0, 0.27, k, 1.0}); },
      [](std::span<const double> x) { return std::pow(x[0], 7); }, Box::interval(-1, 1),
      {1, 2, 3, 4}, 0.27, 2, 2001);
  const int k = std::max(1, choose_k(eps, fit));
  const auto net = build_monomial_deep({m, 0.0, 0.27, k, 1.0});
  const auto rep = sup_error(net, [](std::span<const double> x) { return std::pow(x[0], 7); },
                             Box::interval(-1, 1), default_grid_per_dim(1));
  const auto xs = linspace(-1.0, 1.0, 401);
  Table t;
  t.comments = {"fig6: deep P_{7,k} vs x^7", param_line(0.0, 0.27, k),
                "k from calibrate_rate on k=1..4 and choose_k at eps=1e-3",
                sup_line("sup_error", rep.sup_error)};
  t.add("x", xs);
  t.add("x^7", eval_fn([](double x) { return std::pow(x, 7); }, xs));
  t.add("P_7", eval_net(net, xs));
  return {t.csv(), plot_table(t, "Deep P_{7,k} vs x^7", "x", "y")};
}

FigureOut fig7() {
  const int m = 7, k = 3;
  const auto basis = rnn_basis(m, 0.0, 0.27, k);
  const auto xs = linspace(-1.0, 1.0, 401);
  Table t;
  t.comments = {"fig7: RNN outputs y_0..y_7", param_line(0.0, 0.27, k)};
  t.add("x", xs);
  for (int i = 0; i <= m; ++i) {
    const auto col = eval_net(basis[static_cast<std::size_t>(i)], xs);
    const auto rep = sup_error(basis[static_cast<std::size_t>(i)],
                               [i](std::span<const double> x) { return std::pow(x[0], i); },
                               Box::interval(-1, 1), default_grid_per_dim(1));
    t.comments.push_back(sup_line("sup_error_y" + std::to_string(i), rep.sup_error));
    t.add("y_" + std::to_string(i), col);
  }
  return {t.csv(), plot_table(t, "RNN intermediates y_i (a=0, beta=0.27, k=3)", "x", "y")};
}

FigureOut fig8() {
  const std::vector<double> c{1.0, 1.0, 1.0};
  const auto net = build_polynomial(c, 0.0, 0.27, 3);
  const auto target = [c](std::span<const double> x) { return poly_eval(c, x[0]); };
  const auto rep = sup_error(net, target, Box::interval(-1, 1), default_grid_per_dim(1));
  const auto xs = linspace(-1.0, 1.0, 401);
  Table t;
  t.comments = {"fig8: x^2 + x + 1", param_line(0.0, 0.27, 3), sup_line("sup_error", rep.sup_error)};
  t.add("x", xs);
  t.add("x^2+x+1", eval_fn([&](double x) { return poly_eval(c, x); }, xs));
  t.add("net", eval_net(net, xs));
  return {t.csv(), plot_table(t, "x^2 + x + 1", "x", "y")};
}

FigureOut fig9() {
  const double delta = 0.01;
  const KappaTau s = choose_kappa_tau(delta, 3.0);
  const auto net = build_bump({1.0, 4.0, s.tau, s.kappa});
  const auto xs = linspace(-1.0, 6.0, 701);
  const double edges[2] = {1.0, 4.0};
  const auto bands = transition_bands(edges, s.tau);
  const auto rep = sup_error(
      net, [](std::span<const double> x) { return x[0] >= 1.0 && x[0] < 4.0 ? 1.0 : 0.0; },
      Box::interval(-1, 6), default_grid_per_dim(1), bands);
  Table t;
  t.comments = {"fig9: bump vs indicator of [1,4)",
                "delta=0.01 kappa=" + csv_real(s.kappa) + " tau=" + csv_real(s.tau),
                sup_line("banded_sup_error", rep.sup_error)};
  t.add("x", xs);
  t.add("indicator", eval_fn([](double x) { return x >= 1.0 && x < 4.0 ? 1.0 : 0.0; }, xs));
  t.add("bump", eval_net(net, xs));
  return {t.csv(), plot_table(t, "Bump approximation of 1_[1,4)", "x", "y")};
}

FigureOut sweep_figure(const SweepSpec& spec, const std::string& what) {
  const auto res = run_sweep(spec, omp_get_max_threads());
  std::string csv = "# " + what + "\n" + sweep_csv(spec, res);
  return {csv, sweep_svg(spec, res)};
}

std::vector<double> beta_grid_fig() {
  std::vector<double> b;
  for (int i = 0; i < 10; ++i) b.push_back(0.01 + 0.05 * i);
  return b;
}

FigureOut fig10() {
  SweepSpec s;
  s.beta_grid = beta_grid_fig();
  s.k_grid = {1, 2, 3, 4, 5, 6};
  return sweep_figure(s, "fig10: square error over (beta, k), a=0, B=1");
}

FigureOut fig11() {
  SweepSpec s;
  s.beta_grid = beta_grid_fig();
  s.a_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  s.k_grid = {3};
  return sweep_figure(s, "fig11: square error over (beta, a), k=3, B=1");
}

FigureOut fig12() {
  SweepSpec s;
  s.beta_grid = {0.27};
  s.a_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  s.k_grid = {1, 2, 3, 4, 5, 6};
  return sweep_figure(s, "fig12: square error over (k, a), beta=0.27, B=1");
}

// Step route and Weierstrass route side by side on [lo, hi].
FigureOut two_routes(const std::string& id, const std::string& name,
                     const std::function<double(double)>& f, double lo, double hi,
                     const ModulusSpec& modulus, double eps_step, double B_poly, double eps_poly) {
  Table t;
  t.comments = {id + ": " + name};
  const auto xs = linspace(lo, hi, 1001);
  t.add("x", xs);
  t.add("f", eval_fn(f, xs));
  const ScalarField target = [&f](std::span<const double> x) { return f(x[0]); };

  const auto ca = build_continuous_approx(f, lo, hi, modulus, eps_step);
  const auto rep = sup_error(ca.step.net, target, Box::interval(lo, hi), default_grid_per_dim(1),
                             ca.step.bands);
  t.comments.push_back("step route on [" + csv_real(lo) + "," + csv_real(hi) +
                       "] eps=" + csv_real(eps_step) + " N=" + std::to_string(ca.N) +
                       " banded_sup_error=" + csv_real(rep.sup_error));
  t.add("step_net", eval_net(ca.step.net, xs));

  std::vector<double> pcol(xs.size(), std::numeric_limits<double>::quiet_NaN());
  try {
    const auto pa = build_continuous_via_poly(f, B_poly, eps_poly);
    const auto prep = sup_error(pa.net, target, Box::interval(-B_poly, B_poly),
                                default_grid_per_dim(1));
    t.comments.push_back("poly route on [-" + csv_real(B_poly) + "," + csv_real(B_poly) +
                         "] eps=" + csv_real(eps_poly) + " degree=" + std::to_string(pa.poly.degree) +
                         " k=" + std::to_string(pa.k) + " sup_error=" + csv_real(prep.sup_error));
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::abs(xs[i]) <= B_poly) pcol[i] = pa.net.evaluate1(xs[i]);
  } catch (const Error& e) {
    t.comments.push_back("poly route infeasible: " + std::string(e.what()));
  }
  t.add("poly_net", pcol);
  return {t.csv(), plot_table(t, name, "x", "y")};
}

FigureOut fig13() {
  auto f = [](double x) { return std::log(7.0 + x) * std::cos(x * x * x); };
  return two_routes("fig13", "log(7+x) cos(x^3)", f, -2.0, 2.0,
                    ModulusSpec::sampled(f, -2.0, 2.0), 0.1, 2.0, 0.1);
}

FigureOut fig14() {
  auto f = [](double x) { return sigmoid(x); };
  return two_routes("fig14", "sigmoid", f, -5.0, 5.0, ModulusSpec::lipschitz(0.25), 0.05, 3.0,
                    0.01);
}

FigureOut fig15() {
  const double pi = std::numbers::pi;
  const double eps = 0.05;
  const std::vector<std::pair<std::string, std::function<double(double)>>> comps{
      {"x", [](double x) { return x; }},
      {"sin", [](double x) { return std::sin(x); }},
      {"cos", [](double x) { return std::cos(x); }}};
  const auto xs = linspace(-pi, pi, 629);
  Table t;
  t.comments = {"fig15: (x, sin x, cos x) by the polynomial route on [-pi,pi]",
                "eps=0.05 a=0 beta=0.27"};
  t.add("x", xs);
  for (const auto& [name, f] : comps) {
    const auto pa = build_continuous_via_poly(f, pi, eps);
    const auto rep = sup_error(pa.net, [&f](std::span<const double> x) { return f(x[0]); },
                               Box::interval(-pi, pi), default_grid_per_dim(1));
    t.comments.push_back(name + ": degree=" + std::to_string(pa.poly.degree) +
                         " k=" + std::to_string(pa.k) + " sup_error=" + csv_real(rep.sup_error));
    t.add(name, eval_fn(f, xs));
    t.add(name + "_net", eval_net(pa.net, xs));
  }
  return {t.csv(), plot_table(t, "(x, sin x, cos x)", "x", "y")};
}

FigureOut fig16() {
  const int d = 2, n = 5;
  const double B = 1.0, eps = 1e-3;
  const Target tg = parse_target("t4");
  const int M = choose_M(eps, d, n, B);
  const CubeGrid grid = CubeGrid::make(B, d, M);
  const TaylorData td = derivative_data_from_callback(tg.f, grid, n, DerivScheme::exact, tg.deriv);
  SobolevOptions opt;
  opt.f = tg.f;
  opt.grid_per_dim = 61;
  const auto res = build_sobolev_net(td, eps, d, n, B, opt);
  const auto xs = linspace(-B, B, 41);
  std::vector<double> cx, cy, cf, cn;
  svg::Heatmap hm;
  hm.title = "Sobolev net, sin(pi x) cos(pi x) / (2 pi)";
  hm.x_label = "x";
  hm.y_label = "y";
  hm.log_scale = false;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    hm.values.emplace_back();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double p[2] = {xs[i], xs[j]};
      cx.push_back(p[0]);
      cy.push_back(p[1]);
      cf.push_back(tg.f(p));
      cn.push_back(res.net.evaluate(p)[0]);
      hm.values.back().push_back(cn.back());
    }
  }
  Table t;
  const auto& r = res.report;
  t.comments = {"fig16: d=2 n=5 B=1 eps=1e-3, target sin(pi x) cos(pi x) / (2 pi)",
                "M=" + std::to_string(r.M) + " k=" + std::to_string(r.k) + " eta=" + csv_real(r.eta) +
                    " terms=" + std::to_string(r.term_count) + " size=" + std::to_string(r.net_size),
                sup_line("banded_sup_error", r.measured_error),
                sup_line("network_gap", r.network_gap)};
  t.add("x", cx);
  t.add("y", cy);
  t.add("f", cf);
  t.add("net", cn);
  return {t.csv(), svg::render(hm)};
}

}  // namespace

std::vector<int> supported_figures() { return {3, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16}; }

std::vector<std::string> run_figure(int id, const std::string& out_dir) {
  FigureOut out;
  switch (id) {
    case 1:
    case 17:
    case 18:
      throw DomainError("figure " + std::to_string(id) +
                        " is a training comparison; training is out of scope");
    case 2:
    case 4:
      throw DomainError("figure " + std::to_string(id) +
                        " is an architecture diagram with no data to regenerate");
    case 3: out = fig3(); break;
    case 5: out = fig5(); break;
    case 6: out = fig6(); break;
    case 7: out = fig7(); break;
    case 8: out = fig8(); break;
    case 9: out = fig9(); break;
    case 10: out = fig10(); break;
    case 11: out = fig11(); break;
    case 12: out = fig12(); break;
    case 13: out = fig13(); break;
    case 14: out = fig14(); break;
    case 15: out = fig15(); break;
    case 16: out = fig16(); break;
    default:
      throw DomainError("no figure " + std::to_string(id) + "; supported: 3, 5-16");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());
  const std::string base = (std::filesystem::path(out_dir) / ("fig" + std::to_string(id))).string();
  svg::write_file(base + ".csv", out.csv);
  svg::write_file(base + ".svg", out.svg);
  return {base + ".csv", base + ".svg"};
}

}  // namespace silunet
