#include <cmath>
#include <filesystem>

#include "cli_util.hpp"
#include "doctest.h"
#include "silunet/constructors.hpp"
#include "silunet/errors.hpp"
#include "silunet/harness.hpp"
#include "silunet/kernels.hpp"
#include "silunet/targets.hpp"

using namespace silunet;
namespace fs = std::filesystem;

TEST_SUITE("harness") {
  TEST_CASE("targets") {
    CHECK(parse_target("x^3")(2.0) == 8.0);
    CHECK(parse_target("poly:1,1,1")(2.0) == 7.0);
    CHECK(parse_target("sin")(0.5) == std::sin(0.5));
    CHECK(parse_target("logcos")(1.0) == doctest::Approx(std::log(8.0) * std::cos(1.0)));
    const auto ind = parse_target("indicator:1,4");
    CHECK(ind(1.0) == 1.0);
    CHECK(ind(4.0) == 0.0);
    CHECK(ind.jumps.size() == 2);
    CHECK(parse_target("t4").dim == 2);
    CHECK_THROWS_AS(parse_target("nonsense"), DomainError);
    CHECK_THROWS_AS(parse_target("sampled:/nonexistent.csv"), IoError);

    const auto dir = cli::scratch("targets");
    cli::spit(dir / "s.csv", "x,y\n0,0\n1,2\n2,0\n");
    const auto s = parse_target("sampled:" + (dir / "s.csv").string());
    CHECK(s(0.5) == 1.0);
    CHECK(s(1.5) == 1.0);
  }

  TEST_CASE("builder names") {
    CHECK(parse_builder("monomial-deep") == Builder::monomial_deep);
    CHECK(parse_builder("monomial_shallow") == Builder::monomial_shallow);
    CHECK(std::string(builder_name(Builder::product)) == "product");
    CHECK_THROWS_AS(parse_builder("cubic"), DomainError);
  }

  TEST_CASE("sweep rows are ordered and guard failures stay local") {
    SweepSpec s;
    s.beta_grid = {0.27, 0.01, 0.1};
    s.k_grid = {3, 1, 200};
    s.a_grid = {1.0, 0.0};
    s.grid_per_dim = 2001;
    const auto res = run_sweep(s, 4);
    REQUIRE(res.rows.size() == 18);
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
      const auto& p = res.rows[i - 1];
      const auto& q = res.rows[i];
      CHECK(std::tie(p.a, p.beta, p.k) < std::tie(q.a, q.beta, q.k));
    }
    for (const auto& r : res.rows) {
      if (r.k == 200 && r.beta < 0.1) {
        CHECK(std::isnan(r.sup_error));
        CHECK(r.error.rfind("overflow", 0) == 0);
      } else if (r.k != 200) {
        CHECK(r.error.empty());
        CHECK(std::isfinite(r.sup_error));
      }
    }
    CHECK(sweep_csv(s, res) == sweep_csv(s, run_sweep(s, 1)));
    const auto one = run_sweep(SweepSpec{}, 1);
    CHECK(one.rows.size() == 1);
  }

  TEST_CASE("sweep rows match direct measurement") {
    SweepSpec s;
    s.k_grid = {2};
    s.grid_per_dim = 1001;
    const auto res = run_sweep(s, 2);
    const auto direct = sup_error(build_square({0.0, 0.27, 2, 1.0}), builder_target(s), builder_box(s), 1001);
    CHECK(res.rows[0].sup_error == direct.sup_error);
  }

  TEST_CASE("calibrate") {
    SweepSpec s;
    const auto co = run_calibrate(s, 0.0, 0.27, {1, 2, 3, 4, 5});
    CHECK(co.omega_checked);
    CHECK(co.omega_ok);
    CHECK(co.fit.rate_exponent == 2);
    CHECK_THROWS_AS(run_calibrate(s, 0.0, 0.27, {1, 2}), ContractError);
    CHECK(calibrate_csv(s, 0.0, co).find("omega_check") != std::string::npos);
  }

  TEST_CASE("figures") {
    const auto dir = cli::scratch("figs");
    const auto paths = run_figure(3, dir.string());
    REQUIRE(paths.size() == 2);
    const auto csv = cli::slurp(paths[0]);
    CHECK(csv.rfind("#", 0) == 0);
    CHECK(csv.find("beta=0.27") != std::string::npos);
    CHECK(cli::slurp(paths[1]).find("<svg") != std::string::npos);
    const auto first = csv;
    run_figure(3, dir.string());
    CHECK(cli::slurp(paths[0]) == first);
    const auto p7 = run_figure(7, dir.string());
    CHECK(cli::slurp(p7[0]).find("y_7") != std::string::npos);
    for (int id : {1, 2, 4, 17, 18, 19}) CHECK_THROWS_AS(run_figure(id, dir.string()), DomainError);
    try {
      run_figure(17, dir.string());
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("training") != std::string::npos);
    }
  }

  TEST_CASE("csv helpers") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_real(0.1) == "0.10000000000000001");
  }
}

TEST_SUITE("cli") {
  TEST_CASE("build square writes a net and a summary") {
    const auto dir = cli::scratch("cli_square");
    const auto q = (dir / "q.json").string();
    const auto r = cli::run("build square --a 0 --beta 0.27 --k 3 -o " + q);
    CHECK(r.status == 0);
    CHECK(fs::exists(q));
    CHECK(r.out.find("depth=2") != std::string::npos);
    CHECK(load_net(q).bitwise_equal(build_square({0.0, 0.27, 3, 1.0})));
  }

  TEST_CASE("exit codes") {
    const auto dir = cli::scratch("cli_exit");
    const auto o = " -o " + (dir / "n.json").string();
    CHECK(cli::run("build square --nope").status == 2);
    CHECK(cli::run("").status == 2);
    CHECK(cli::run("build monomial-shallow --m 3 --a 0" + o).status == 5);
    CHECK(cli::run("build square --beta 1.5" + o).status == 3);
    CHECK(cli::run("build square --beta 0.01 --k 200" + o).status == 6);
    CHECK(cli::run("build polynomial --coeffs 1,1,1,1,1,1,1,1,1,1,1,1,1,1" + o).status == 4);
    CHECK(cli::run("verify /nonexistent.json --target x^2").status == 10);
    cli::spit(dir / "bad.json", "{\"version\": 1, \"layers\": [");
    CHECK(cli::run("verify " + (dir / "bad.json").string() + " --target x^2").status == 7);
    CHECK(cli::run("calibrate --builder square --k 1,2").status == 9);
    CHECK(cli::run("build continuous --target indicator:0,1 --lo -1 --hi 2 --modulus lipschitz" + o).status != 0);
    CHECK(cli::run("figures 17").status == 3);
  }

  TEST_CASE("verify matches the library bit for bit") {
    const auto dir = cli::scratch("cli_verify");
    const auto q = (dir / "q.json").string();
    REQUIRE(cli::run("build square --k 3 -o " + q).status == 0);
    const auto r = cli::run("verify " + q + " --target x^2 --B 1");
    REQUIRE(r.status == 0);
    const auto lib = sup_error(load_net(q), parse_target("x^2").f, Box::cube(1, 1.0), default_grid_per_dim(1));
    CHECK(r.out == error_report_csv_header() + "\n" + error_report_csv_row(lib) + "\n");
  }

  TEST_CASE("banded verify of a bump") {
    const auto dir = cli::scratch("cli_bump");
    const auto b = (dir / "b.json").string();
    REQUIRE(cli::run("build bump --lo 1 --hi 4 --delta 0.01 -o " + b).status == 0);
    const auto r = cli::run("verify " + b + " --target indicator:1,4 --lo -2 --hi 7 --band-width 0.375");
    REQUIRE(r.status == 0);
    const auto row = r.out.substr(r.out.find('\n') + 1);
    CHECK(std::stod(row) < 0.01);
    CHECK(row.find("0:0.625:1.375") != std::string::npos);
  }

  TEST_CASE("sobolev build reports M") {
    const auto dir = cli::scratch("cli_sob");
    const auto r = cli::run("build sobolev --d 1 --n 3 --eps 0.1 --target sin -o " + (dir / "s.json").string());
    REQUIRE(r.status == 0);
    const auto header = r.out.find("M,cube_count");
    REQUIRE(header != std::string::npos);
    const auto row = r.out.substr(r.out.find('\n', header) + 1);
    CHECK(std::stoi(row) == choose_M(0.1, 1, 3, 1.0));
  }

  TEST_CASE("repeated runs are byte identical") {
    const auto dir = cli::scratch("cli_det");
    const std::string sweep = "sweep --beta 0.01:0.5:0.05 --k 1:6:1 --a 0 --grid 1001";
    const auto r1 = cli::run(sweep + " --jobs 4");
    const auto r2 = cli::run(sweep + " --jobs 1");
    CHECK(r1.status == 0);
    CHECK(r1.out == r2.out);
    CHECK(cli::run("build step --breakpoints 0,1,2 --values 1,-1 -o " + (dir / "a.json").string()).status == 0);
    CHECK(cli::run("build step --breakpoints 0,1,2 --values 1,-1 -o " + (dir / "b.json").string()).status == 0);
    CHECK(cli::slurp(dir / "a.json") == cli::slurp(dir / "b.json"));
    CHECK(cli::run("figures 3 --out-dir " + (dir / "f1").string()).status == 0);
    CHECK(cli::run("figures 3 --out-dir " + (dir / "f2").string()).status == 0);
    CHECK(cli::slurp(dir / "f1" / "fig3.csv") == cli::slurp(dir / "f2" / "fig3.csv"));
    CHECK(cli::slurp(dir / "f1" / "fig3.svg") == cli::slurp(dir / "f2" / "fig3.svg"));
  }

  TEST_CASE("sweep guard cells and single cells") {
    const auto r = cli::run("sweep --beta 0.01,0.27 --k 3,200 --grid 501");
    REQUIRE(r.status == 0);
    int rows = 0, errors = 0;
    std::istringstream in(r.out);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("builder", 0) == 0) continue;
      ++rows;
      if (line.find("overflow") != std::string::npos) ++errors;
    }
    CHECK(rows == 4);
    CHECK(errors >= 1);
    const auto one = cli::run("sweep --beta 0.27 --k 3 --a 0");
    CHECK(std::count(one.out.begin(), one.out.end(), '\n') -
              std::count_if(one.out.begin(), one.out.end(), [](char c) { return c == '#'; }) ==
          2);
  }

  TEST_CASE("config file keys yield to flags") {
    const auto dir = cli::scratch("cli_cfg");
    cli::spit(dir / "c.json", "{\"k\": 2, \"beta\": 0.2}");
    const auto a = (dir / "a.json").string();
    const auto b = (dir / "b.json").string();
    REQUIRE(cli::run("build square --config " + (dir / "c.json").string() + " -o " + a).status == 0);
    CHECK(load_net(a).bitwise_equal(build_square({0.0, 0.2, 2, 1.0})));
    REQUIRE(cli::run("build square --config " + (dir / "c.json").string() + " --k 4 -o " + b).status == 0);
    CHECK(load_net(b).bitwise_equal(build_square({0.0, 0.2, 4, 1.0})));
    cli::spit(dir / "bad.json", "{\"k\": ");
    CHECK(cli::run("build square --config " + (dir / "bad.json").string()).status == 7);
  }

  TEST_CASE("calibrate prints a rate row") {
    const auto r = cli::run("calibrate --builder square --beta 0.27 --k 1,2,3,4,5");
    CHECK(r.status == 0);
    CHECK(r.out.find("omega_check") != std::string::npos);
  }
}
