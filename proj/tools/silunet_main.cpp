// silunet: build, verify and sweep closed-form SiLU networks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "silunet/constructors.hpp"
#include "silunet/errors.hpp"
#include "silunet/harness.hpp"
#include "silunet/kernels.hpp"
#include "silunet/network.hpp"
#include "silunet/sobolev.hpp"
#include "silunet/stepfun.hpp"
#include "silunet/svg.hpp"
#include "silunet/targets.hpp"

using namespace silunet;

namespace {

// Comma separated reals; an item lo:hi:step expands to lo, lo+step, ... <= hi.
std::vector<double> parse_reals(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto c1 = item.find(':');
      if (c1 == std::string::npos) {
        out.push_back(parse_real(item));
        continue;
      }
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string::npos) throw DomainError(std::string(what) + ": range needs lo:hi:step");
      const double lo = parse_real(item.substr(0, c1));
      const double hi = parse_real(item.substr(c1 + 1, c2 - c1 - 1));
      const double step = parse_real(item.substr(c2 + 1));
      if (!(step > 0.0) || hi < lo) throw DomainError(std::string(what) + ": bad range " + item);
      const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
      if (count > 100000) throw DomainError(std::string(what) + ": range too long");
      for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    }
  } catch (const ParseError&) {
    throw DomainError(std::string(what) + ": cannot parse '" + text + "'");
  }
  if (out.empty()) throw DomainError(std::string(what) + ": empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_reals(text, what)) {
    if (v != std::floor(v)) throw DomainError(std::string(what) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

PolyVariant parse_variant(const std::string& s) {
  if (s == "deep") return PolyVariant::deep;
  if (s == "shallow") return PolyVariant::shallow;
  throw DomainError("variant must be deep or shallow");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  std::cout << text;
  if (!path.empty()) svg::write_file(path, text);
}

StepSpec load_step_spec(const std::string& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("step spec: ") + e.what(), e.byte);
  }
  StepSpec s;
  try {
    s.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    s.values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("step spec: ") + e.what(), 0);
  }
  return s;
}

ModulusSpec parse_modulus(const std::string& s, const Target& t, double lo, double hi) {
  if (s == "sampled") return ModulusSpec::sampled(t.scalar(), lo, hi);
  if (s == "lipschitz" && std::isfinite(t.lipschitz)) return ModulusSpec::lipschitz(t.lipschitz);
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (head == "lipschitz" && !arg.empty())
    return ModulusSpec::lipschitz(parse_reals(arg, "modulus").at(0));
  if (head == "hoelder") {
    const auto v = parse_reals(arg, "modulus");
    if (v.size() != 2) throw DomainError("modulus: expected hoelder:C,exponent");
    return ModulusSpec::hoelder(v[0], v[1]);
  }
  throw DomainError("modulus: expected lipschitz[:L], hoelder:C,exponent or sampled");
}

void print_net(const FeedForwardNet& net, const std::string& out) {
  save_net(net, out);
  std::cout << format_summary(summary(net)) << "\n";
}

// JSON config: keys mirror long flag names.  Keys given on the command line
// win; arrays become comma lists, true becomes a bare flag.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (path.empty()) return args;
  const std::string text = read_file(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object", 0);
  std::set<std::string> given;
  for (const auto& a : kept)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos
                                                             ? std::string::npos
                                                             : a.find('=') - 2));
  auto scalar = [](const nlohmann::ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_real(v.get<double>());
    throw ParseError("config: unsupported value " + v.dump(), 0);
  };
  for (const auto& [key, v] : j.items()) {
    if (given.count(key)) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) kept.push_back("--" + key);
      continue;
    }
    std::string value;
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) value += (i ? "," : "") + scalar(v[i]);
    } else {
      value = scalar(v);
    }
    kept.push_back("--" + key);
    kept.push_back(value);
  }
  return kept;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form SiLU network builder and verifier"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  // Shared parameters.
  double a = 0.0, beta = 0.27, B = 1.0, eps = 0.1, lo = 0.0, hi = 1.0, delta = 0.01;
  double tau = 0.0, kappa = 0.0;
  int k = 3, m = 2, d = 1, n = 2, jobs = omp_get_max_threads();
  std::optional<int> k_opt;
  std::optional<double> a_opt, eps_opt;
  std::string out = "net.json", coeffs = "1,1,1", variant = "deep", target_spec, modulus = "lipschitz";
  std::string spec_file, breakpoints, values, deriv = "exact", taylor_out;
  std::size_t grid = 0;

  auto* build = app.add_subcommand("build", "Build a network and write it as JSON");
  build->require_subcommand(1);
  auto add_out = [&](CLI::App* c) { c->add_option("-o,--out", out, "Network JSON path"); };
  auto add_ab = [&](CLI::App* c) {
    c->add_option("--a", a, "Shift a");
    c->add_option("--beta", beta, "Scale beta in (0, 1)");
  };

  auto* b_square = build->add_subcommand("square", "Q_k ~ x^2");
  add_ab(b_square);
  b_square->add_option("--k", k, "Depth parameter k");
  b_square->add_option("--B", B, "Domain half-width");
  add_out(b_square);

  auto* b_product = build->add_subcommand("product", "M_k ~ x y");
  add_ab(b_product);
  b_product->add_option("--k", k, "Depth parameter k");
  add_out(b_product);

  auto* b_deep = build->add_subcommand("monomial-deep", "P_{m,k} ~ x^m by repeated products");
  add_ab(b_deep);
  b_deep->add_option("--m", m, "Degree");
  b_deep->add_option("--k", k_opt, "Depth parameter k");
  b_deep->add_option("--eps", eps_opt, "Calibrate k for this sup error instead of --k");
  b_deep->add_option("--B", B, "Domain half-width");
  add_out(b_deep);

  auto* b_shallow = build->add_subcommand("monomial-shallow", "Q^m_k ~ x^m, one hidden layer");
  b_shallow->add_option("--a", a_opt, "Shift a (default 1 for odd m >= 3, else 0)");
  b_shallow->add_option("--beta", beta, "Scale beta in (0, 1)");
  b_shallow->add_option("--m", m, "Degree");
  b_shallow->add_option("--k", k, "Depth parameter k");
  b_shallow->add_option("--B", B, "Domain half-width");
  add_out(b_shallow);

  auto* b_poly = build->add_subcommand("polynomial", "sum c_i x^i");
  add_ab(b_poly);
  b_poly->add_option("--coeffs", coeffs, "Coefficients, lowest degree first");
  b_poly->add_option("--k", k, "Depth parameter k");
  b_poly->add_option("--variant", variant, "deep or shallow monomials");
  add_out(b_poly);

  auto* b_bump = build->add_subcommand("bump", "Smoothed indicator of [lo, hi)");
  b_bump->add_option("--lo", lo, "Left edge")->required();
  b_bump->add_option("--hi", hi, "Right edge")->required();
  b_bump->add_option("--tau", tau, "Transition width (with --kappa)");
  b_bump->add_option("--kappa", kappa, "Sharpness (with --tau)");
  b_bump->add_option("--delta", delta, "Pick kappa and tau for this plateau error");
  add_out(b_bump);

  auto* b_step = build->add_subcommand("step", "Piecewise-constant function");
  b_step->add_option("--spec", spec_file, "StepSpec JSON {breakpoints, values}");
  b_step->add_option("--breakpoints", breakpoints, "Comma list");
  b_step->add_option("--values", values, "Comma list");
  b_step->add_option("--delta", delta, "Plateau error");
  add_out(b_step);

  auto* b_cont = build->add_subcommand("continuous", "Continuous f on [lo, hi] via steps");
  b_cont->add_option("--target", target_spec, target_help())->required();
  b_cont->add_option("--lo", lo, "Left end");
  b_cont->add_option("--hi", hi, "Right end");
  b_cont->add_option("--eps", eps, "Target sup error");
  b_cont->add_option("--modulus", modulus, "lipschitz[:L] | hoelder:C,exponent | sampled");
  add_out(b_cont);

  auto* b_cpoly = build->add_subcommand("continuous-poly", "Continuous f on [-B, B] via a polynomial");
  add_ab(b_cpoly);
  b_cpoly->add_option("--target", target_spec, target_help())->required();
  b_cpoly->add_option("--B", B, "Domain half-width");
  b_cpoly->add_option("--eps", eps, "Target sup error");
  b_cpoly->add_option("--variant", variant, "deep or shallow monomials");
  add_out(b_cpoly);

  auto* b_sob = build->add_subcommand("sobolev", "Piecewise Taylor network on [-B, B]^d");
  add_ab(b_sob);
  b_sob->add_option("--d", d, "Input dimension");
  b_sob->add_option("--n", n, "Smoothness order");
  b_sob->add_option("--eps", eps, "Target sup error");
  b_sob->add_option("--target", target_spec, target_help())->required();
  b_sob->add_option("--B", B, "Domain half-width (<= 1)");
  b_sob->add_option("--k", k_opt, "Product depth (calibrated when omitted)");
  b_sob->add_option("--deriv", deriv, "exact or central");
  b_sob->add_option("--taylor-out", taylor_out, "Write the Taylor data as JSON");
  b_sob->add_option("--grid", grid, "Verification grid points per axis");
  bool no_measure = false;
  b_sob->add_flag("--no-measure", no_measure, "Skip the error measurements");
  add_out(b_sob);

  std::string net_path, csv_out, svg_out;
  std::vector<std::string> band_specs;
  double band_width = 0.0;
  std::optional<double> lo_opt, hi_opt;
  auto* verify = app.add_subcommand("verify", "Banded sup error of a network against a target");
  verify->add_option("net", net_path, "Network JSON")->required();
  verify->add_option("--target", target_spec, target_help())->required();
  verify->add_option("--B", B, "Cube half-width");
  verify->add_option("--lo", lo_opt, "Left end (1-D, overrides -B)");
  verify->add_option("--hi", hi_opt, "Right end (1-D, overrides B)");
  verify->add_option("--band", band_specs, "Excluded band axis:lo:hi (repeatable)");
  verify->add_option("--band-width", band_width, "Exclude [j - w, j + w] around target jumps");
  verify->add_option("--grid", grid, "Grid points per axis");
  verify->add_option("-o,--out", csv_out, "Also write the report CSV here");

  std::string builder = "square", a_list = "0", beta_list = "0.27", k_list = "3";
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Sup error over an (a, beta, k) grid");
  sweep->add_option("--builder", builder, "square|product|monomial-deep|monomial-shallow|polynomial");
  sweep->add_option("--a", a_list, "a values (list or lo:hi:step)");
  sweep->add_option("--beta", beta_list, "beta values");
  sweep->add_option("--k", k_list, "k values");
  sweep->add_option("--B", B, "Domain half-width");
  sweep->add_option("--m", m, "Degree for the monomial builders");
  sweep->add_option("--coeffs", coeffs, "Polynomial coefficients");
  sweep->add_option("--variant", variant, "Polynomial variant");
  sweep->add_option("--grid", grid, "Grid points per axis");
  sweep->add_option("--jobs", jobs, "Concurrent cells");
  sweep->add_option("-o,--out", csv_out, "CSV path");
  sweep->add_option("--svg", svg_out, "SVG path");
  sweep->add_flag("--timing", timing, "Add a runtime_ms column");

  auto* calibrate = app.add_subcommand("calibrate", "Fit err(k) ~ C omega^(-rate k)");
  calibrate->add_option("--builder", builder, "Builder name");
  calibrate->add_option("--a", a, "Shift a");
  calibrate->add_option("--beta", beta, "Scale beta");
  calibrate->add_option("--k", k_list, "k values (at least three)");
  calibrate->add_option("--B", B, "Domain half-width");
  calibrate->add_option("--m", m, "Degree for the monomial builders");
  calibrate->add_option("--coeffs", coeffs, "Polynomial coefficients");
  calibrate->add_option("--variant", variant, "Polynomial variant");
  calibrate->add_option("--grid", grid, "Grid points per axis");
  calibrate->add_option("-o,--out", csv_out, "CSV path");

  std::vector<int> figure_ids;
  std::string out_dir = "figures";
  bool all_figures = false;
  auto* figures = app.add_subcommand("figures", "Regenerate figure data (CSV + SVG)");
  figures->add_option("ids", figure_ids, "Figure numbers");
  figures->add_flag("--all", all_figures, "Every supported figure");
  figures->add_option("--out-dir", out_dir, "Output directory");

  std::string basis = "rnn";
  std::size_t points = 201;
  auto* fitpoly = app.add_subcommand("fit-poly", "Least-squares fit on a monomial-net basis");
  fitpoly->add_option("--target", target_spec, target_help())->required();
  fitpoly->add_option("--basis", basis, "rnn or deep");
  fitpoly->add_option("--m", m, "Highest degree");
  fitpoly->add_option("--a", a, "Shift a");
  fitpoly->add_option("--beta", beta, "Scale beta");
  fitpoly->add_option("--k", k, "Depth parameter k");
  fitpoly->add_option("--B", B, "Fit on [-B, B]");
  fitpoly->add_option("--points", points, "Sample count");
  fitpoly->add_option("-o,--out", csv_out, "CSV path");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = apply_config(args);
    // CLI11 consumes the vector from the back.
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "silunet: " << e.what() << "\n";
    return exit_code(e.kind());
  }

  try {
    if (*b_square) {
      print_net(build_square({a, beta, k, B}), out);
    } else if (*b_product) {
      print_net(build_product(a, beta, k), out);
    } else if (*b_deep) {
      int kk = k_opt.value_or(3);
      if (eps_opt) {
        if (k_opt) throw DomainError("give either --k or --eps, not both");
        const RateFit fit = calibrate_rate(
            [&](int kc) { return build_monomial_deep({m, a, beta, kc, B}); },
            [&](std::span<const double> x) { return std::pow(x[0], m); }, Box::interval(-B, B),
            {1, 2, 3, 4}, beta, 2, 2001);
        kk = std::max(1, choose_k(*eps_opt, fit));
        std::cout << "# calibrated k=" << kk << " omega_est=" << csv_real(fit.omega_est) << "\n";
      }
      print_net(build_monomial_deep({m, a, beta, kk, B}), out);
    } else if (*b_shallow) {
      const double aa = a_opt.value_or(m % 2 == 1 && m >= 3 ? 1.0 : 0.0);
      print_net(build_monomial_shallow({m, aa, beta, k, B}), out);
    } else if (*b_poly) {
      print_net(build_polynomial(parse_reals(coeffs, "coeffs"), a, beta, k, parse_variant(variant)),
                out);
    } else if (*b_bump) {
      BumpParams p{lo, hi, tau, kappa};
      const bool explicit_shape = b_bump->count("--tau") || b_bump->count("--kappa");
      if (explicit_shape && !(b_bump->count("--tau") && b_bump->count("--kappa")))
        throw DomainError("bump: give both --tau and --kappa, or --delta");
      if (!explicit_shape) {
        const KappaTau s = choose_kappa_tau(delta, hi - lo);
        p.tau = s.tau;
        p.kappa = s.kappa;
      }
      print_net(build_bump(p), out);
      std::cout << "# kappa=" << csv_real(p.kappa) << " tau=" << csv_real(p.tau) << "\n";
    } else if (*b_step) {
      StepSpec s;
      if (!spec_file.empty()) {
        s = load_step_spec(spec_file);
      } else {
        if (breakpoints.empty() || values.empty())
          throw DomainError("step: give --spec or both --breakpoints and --values");
        s.breakpoints = parse_reals(breakpoints, "breakpoints");
        s.values = parse_reals(values, "values");
      }
      const StepApprox sa = build_step_approx(s, delta);
      print_net(sa.net, out);
      std::cout << "# bumps=" << sa.bumps << " kappa=" << csv_real(sa.schedule.kappa)
                << " tau=" << csv_real(sa.schedule.tau) << "\n";
    } else if (*b_cont) {
      const Target t = parse_target(target_spec);
      const ContinuousApprox ca = build_continuous_approx(t.scalar(), lo, hi,
                                                          parse_modulus(modulus, t, lo, hi), eps);
      print_net(ca.step.net, out);
      std::cout << "# N=" << ca.N << " cell_width=" << csv_real(ca.cell_width)
                << " inverse_modulus=" << csv_real(ca.inverse_modulus) << "\n";
    } else if (*b_cpoly) {
      const Target t = parse_target(target_spec);
      const PolyNetApprox pa =
          build_continuous_via_poly(t.scalar(), B, eps, a, beta, parse_variant(variant));
      print_net(pa.net, out);
      std::cout << "# degree=" << pa.poly.degree << " k=" << pa.k
                << " poly_residual=" << csv_real(pa.poly.residual)
                << " network_error=" << csv_real(pa.network_error) << "\n";
    } else if (*b_sob) {
      const Target t = parse_target(target_spec);
      if (t.dim != static_cast<std::size_t>(d))
        throw DomainError("sobolev: target '" + target_spec + "' has dimension " +
                          std::to_string(t.dim) + ", not " + std::to_string(d));
      const int M = choose_M(eps, d, n, B);
      const CubeGrid cg = CubeGrid::make(B, d, M);
      DerivScheme scheme;
      if (deriv == "exact") scheme = DerivScheme::exact;
      else if (deriv == "central") scheme = DerivScheme::central;
      else throw DomainError("deriv must be exact or central");
      if (scheme == DerivScheme::exact && !t.deriv) {
        std::cerr << "silunet: no closed-form derivatives for '" << target_spec
                  << "', using central differences\n";
        scheme = DerivScheme::central;
      }
      const TaylorData td = derivative_data_from_callback(t.f, cg, n, scheme, t.deriv);
      if (td.exceeds_unit)
        std::cerr << "silunet: warning: some derivative exceeds 1, target is outside the unit ball\n";
      if (!taylor_out.empty()) svg::write_file(taylor_out, td.to_json());
      SobolevOptions opt;
      opt.a = a;
      opt.beta = beta;
      opt.k = k_opt;
      opt.f = t.f;
      opt.measure = !no_measure;
      opt.grid_per_dim = grid;
      const SobolevResult r = build_sobolev_net(td, eps, d, n, B, opt);
      print_net(r.net, out);
      std::cout << sobolev_report_csv_header() << "\n" << sobolev_report_csv_row(r.report) << "\n";
    } else if (*verify) {
      const FeedForwardNet net = load_net(net_path);
      const Target t = parse_target(target_spec);
      if (net.input_dim() != t.dim)
        throw ContractError("verify: net takes " + std::to_string(net.input_dim()) +
                            " inputs, target '" + target_spec + "' takes " + std::to_string(t.dim));
      Box box = Box::cube(t.dim, B);
      if (lo_opt || hi_opt) {
        if (t.dim != 1) throw DomainError("verify: --lo/--hi need a 1-D target");
        box = Box::interval(lo_opt.value_or(-B), hi_opt.value_or(B));
      }
      std::vector<Band> bands;
      for (const auto& s : band_specs) {
        std::stringstream ss(s);
        std::string p0, p1, p2;
        if (!std::getline(ss, p0, ':') || !std::getline(ss, p1, ':') || !std::getline(ss, p2))
          throw DomainError("band: expected axis:lo:hi, got '" + s + "'");
        try {
          bands.push_back({static_cast<std::size_t>(std::stoul(p0)), parse_real(p1), parse_real(p2)});
        } catch (const std::exception&) {
          throw DomainError("band: expected axis:lo:hi, got '" + s + "'");
        }
      }
      if (band_width > 0.0)
        for (double j : t.jumps) bands.push_back({0, j - band_width, j + band_width});
      const std::size_t g = grid ? grid : default_grid_per_dim(t.dim);
      const ErrorReport rep = sup_error(net, t.f, box, g, bands);
      emit(error_report_csv_header() + "\n" + error_report_csv_row(rep) + "\n", csv_out);
    } else if (*sweep) {
      SweepSpec s;
      s.builder = parse_builder(builder);
      s.a_grid = parse_reals(a_list, "a");
      s.beta_grid = parse_reals(beta_list, "beta");
      s.k_grid = parse_ints(k_list, "k");
      s.B = B;
      s.grid_per_dim = grid;
      s.m = m;
      s.coeffs = parse_reals(coeffs, "coeffs");
      s.variant = parse_variant(variant);
      const SweepResult res = run_sweep(s, jobs);
      emit(sweep_csv(s, res, timing), csv_out);
      if (!svg_out.empty()) svg::write_file(svg_out, sweep_svg(s, res));
    } else if (*calibrate) {
      SweepSpec s;
      s.builder = parse_builder(builder);
      s.B = B;
      s.grid_per_dim = grid;
      s.m = m;
      s.coeffs = parse_reals(coeffs, "coeffs");
      s.variant = parse_variant(variant);
      const CalibrateOutcome co = run_calibrate(s, a, beta, parse_ints(k_list, "k"));
      emit(calibrate_csv(s, a, co), csv_out);
      if (co.fit.truncated)
        std::cerr << "silunet: error sequence stopped decreasing; fitted "
                  << co.fit.fitted_points << " of " << co.fit.ks.size() << " points\n";
      if (!co.omega_ok)
        throw ContractError("omega_est " + csv_real(co.fit.omega_est) +
                            " is not within a factor 1.25 of 1/beta");
    } else if (*figures) {
      std::vector<int> ids = all_figures ? supported_figures() : figure_ids;
      if (ids.empty()) throw DomainError("figures: give figure numbers or --all");
      for (int id : ids)
        for (const auto& p : run_figure(id, out_dir)) std::cout << p << "\n";
    } else if (*fitpoly) {
      const Target t = parse_target(target_spec);
      std::vector<FeedForwardNet> nets;
      if (basis == "rnn") {
        nets = rnn_basis(m, a, beta, k);
      } else if (basis == "deep") {
        nets.push_back(constant_net(1, 1.0));
        nets.push_back(identity_net(1));
        for (int j = 2; j <= m; ++j) nets.push_back(build_monomial_deep({j, a, beta, k, B}));
      } else {
        throw DomainError("basis must be rnn or deep");
      }
      const auto xs = linspace(-B, B, points);
      std::vector<double> ys;
      for (double x : xs) ys.push_back(t(x));
      const PolyFit fit = fit_poly_coeffs(xs, ys, nets);
      if (fit.rank_deficient) std::cerr << "silunet: warning: " << fit.warning << "\n";
      std::string text = "# fit-poly target=" + target_spec + " basis=" + basis +
                         " m=" + std::to_string(m) + " rank=" + std::to_string(fit.rank) +
                         "\ndegree,coeff\n";
      for (std::size_t i = 0; i < fit.coeffs.size(); ++i)
        text += std::to_string(i) + "," + csv_real(fit.coeffs[i]) + "\n";
      emit(text, csv_out);
    }
  } catch (const Error& e) {
    std::cerr << "silunet: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "silunet: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
