#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "waveguide/cli.hpp"
#include "waveguide/one_turn.hpp"

using namespace wg;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path fresh_dir(const std::string& tag) {
    fs::path d = fs::temp_directory_path() / ("wgcli_" + tag);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Csv {
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Csv load_csv(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    Csv c;
    std::string line;
    REQUIRE(std::getline(f, line));
    REQUIRE(line.rfind("# ", 0) == 0);
    c.comment = line;
    REQUIRE(std::getline(f, line));
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) c.columns.push_back(cell);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        c.rows.push_back(row);
    }
    return c;
}

} // namespace

TEST_CASE("one-turn table: closed-form row, determinism, config comment") {
    fs::path d1 = fresh_dir("one_a"), d2 = fresh_dir("one_b");
    std::vector<std::string> args{"one-turn", "--beta", "1.0471975512",
                                  "--grid", "40", "--out", ""};
    args.back() = d1.string();
    CHECK(run_cli(args).code == 0);
    args.back() = d2.string();
    CHECK(run_cli(args).code == 0);

    Csv t = load_csv(d1 / "one_turn.csv");
    CHECK(t.columns == std::vector<std::string>{"nu", "f_closed",
                                                "f_matching", "T", "theta"});
    CHECK(t.comment.find("beta=1.0471975512") != std::string::npos);
    REQUIRE(t.rows.size() == 40);
    CHECK(t.rows[0][0] == 0.0);
    CHECK(t.rows[0][1] == doctest::Approx(0.19722457733622).epsilon(1e-9));
    CHECK(t.rows[0][2] == doctest::Approx(0.19722457733622).epsilon(1e-9));
    for (const auto& row : t.rows) {
        CHECK(row[1] == doctest::Approx(row[2]).epsilon(1e-8));
        CHECK(row[0] < 0.25);
    }

    CHECK(slurp(d1 / "one_turn.csv") == slurp(d2 / "one_turn.csv"));
    CHECK(slurp(d1 / "one_turn.json") == slurp(d2 / "one_turn.json"));

    njson mirror = njson::parse(slurp(d1 / "one_turn.json"));
    CHECK(mirror["columns"].size() == 5);
    CHECK(mirror["rows"].size() == 40);
    CHECK(mirror["config"]["command"] == "one-turn");
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("config file sets defaults, flags still override") {
    fs::path d = fresh_dir("conf");
    fs::path conf = d / "model.json";
    {
        std::ofstream f(conf);
        f << R"({"beta": 0.9, "alpha": 0.05})" << "\n";
    }
    CHECK(run_cli({"one-turn", "--config", conf.string(), "--grid", "10",
                   "--out", d.string()})
              .code == 0);
    Csv t = load_csv(d / "one_turn.csv");
    CHECK(t.rows[0][1] ==
          doctest::Approx(suppression_closed_form(0.9, 0.0)).epsilon(1e-12));

    // flag wins over the document
    CHECK(run_cli({"one-turn", "--config", conf.string(), "--beta",
                   "1.0471975512", "--grid", "10", "--out", d.string()})
              .code == 0);
    t = load_csv(d / "one_turn.csv");
    CHECK(t.rows[0][1] == doctest::Approx(0.19722457733622).epsilon(1e-9));

    // unknown fields and broken documents are configuration errors
    fs::path bad = d / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"gamma": 1.0})" << "\n";
    }
    CliRun r = run_cli({"one-turn", "--config", bad.string(), "--out",
                        d.string()});
    CHECK(r.code == 2);
    CHECK(njson::parse(r.err)["error"] == "ConfigError");
    fs::remove_all(d);
}

TEST_CASE("boundary emits the curve and the optima table") {
    fs::path d = fresh_dir("bnd");
    CHECK(run_cli({"boundary", "--grid", "60", "--out", d.string()}).code == 0);

    Csv b = load_csv(d / "boundary.csv");
    CHECK(b.columns ==
          std::vector<std::string>{"E", "N_cr", "branch", "N_global"});
    REQUIRE(b.rows.size() == 60);
    double pi = std::numbers::pi;
    double lo = std::cos(pi / 3 + pi / 30), hi = std::cos(pi / 3 - pi / 30);
    lo *= lo;
    hi *= hi;
    for (const auto& row : b.rows) {
        CHECK(row[1] <= row[3] + 1e-12);
        CHECK(row[1] / row[0] >= lo - 1e-9);
        CHECK(row[1] / row[0] <= hi + 1e-9);
    }

    Csv o = load_csv(d / "boundary_optima.csv");
    CHECK(o.columns == std::vector<std::string>{"n", "E_n", "E_n_cr"});
    REQUIRE(o.rows.size() >= 3);
    CHECK(o.rows[0][0] == 2.0);
    for (std::size_t i = 0; i < o.rows.size(); ++i) {
        CHECK(o.rows[i][0] == double(i + 2));
        CHECK(o.rows[i][1] > 0);
        CHECK(o.rows[i][2] > 0);
        if (i > 0) CHECK(o.rows[i][1] < o.rows[i - 1][1]);
    }
    fs::remove_all(d);
}

TEST_CASE("oracle rows agree with the analytic boundary") {
    fs::path d = fresh_dir("orc");
    CHECK(run_cli({"oracle", "--grid", "3", "--emin", "1e-3", "--emax", "1e-2",
                   "--phase-samples", "1024", "--out", d.string()})
              .code == 0);
    Csv t = load_csv(d / "oracle.csv");
    CHECK(t.columns == std::vector<std::string>{"E", "N_cr_oracle",
                                                "N_cr_analytic", "abs_diff"});
    REQUIRE(t.rows.size() == 3);
    for (const auto& row : t.rows) {
        CHECK(row[3] == doctest::Approx(std::abs(row[1] - row[2])).epsilon(1e-12));
        CHECK(row[3] <= 0.03 * row[0]);
    }
    fs::remove_all(d);
}

TEST_CASE("tunnel tables: branches, glued switch structure, units") {
    fs::path d = fresh_dir("tun");
    CHECK(run_cli({"tunnel", "--grid", "600", "--out", d.string()}).code == 0);

    Csv br = load_csv(d / "tunnel_branches.csv");
    CHECK(br.columns == std::vector<std::string>{"E", "tau", "delta_T", "F0",
                                                 "T", "branch"});
    CHECK(br.rows.size() > 3000);

    Csv gl = load_csv(d / "tunnel_glued.csv");
    CHECK(gl.columns ==
          std::vector<std::string>{"E", "F0", "branch", "is_switch"});
    REQUIRE(gl.rows.size() == 600);
    int switches = 0;
    double top_switch = 0, from = -1, to = -1;
    for (std::size_t i = 0; i + 1 < gl.rows.size(); ++i) {
        bool change = gl.rows[i][2] != gl.rows[i + 1][2];
        CHECK(gl.rows[i][3] == (change ? 1.0 : 0.0));
        CHECK(gl.rows[i][1] > 0);
        if (change) {
            ++switches;
            top_switch = gl.rows[i][0];
            from = gl.rows[i][2];
            to = gl.rows[i + 1][2];
        }
    }
    CHECK(switches >= 8);
    // topmost hand-off: local branch 4 below, global branch above
    CHECK(from == 4.0);
    CHECK(to == 0.0);
    CHECK(top_switch == doctest::Approx(1.2367e-3).epsilon(0.03));

    njson mirror = njson::parse(slurp(d / "tunnel_glued.json"));
    CHECK(mirror["n1"] == 4);
    REQUIRE(mirror["switch_energies"].size() == std::size_t(switches));
    CHECK(double(mirror["switch_energies"].back()) ==
          doctest::Approx(1.2367e-3).epsilon(0.03));

    // physical units scale E and F0 by L^2, leave times alone
    fs::path dp = fresh_dir("tun_phys");
    CHECK(run_cli({"tunnel", "--grid", "600", "--physical-units", "--L", "2",
                   "--out", dp.string()})
              .code == 0);
    Csv glp = load_csv(dp / "tunnel_glued.csv");
    REQUIRE(glp.rows.size() == gl.rows.size());
    for (std::size_t i = 0; i < gl.rows.size(); i += 37) {
        CHECK(glp.rows[i][0] == doctest::Approx(4.0 * gl.rows[i][0]).epsilon(1e-12));
        CHECK(glp.rows[i][1] == doctest::Approx(4.0 * gl.rows[i][1]).epsilon(1e-12));
    }
    Csv brp = load_csv(dp / "tunnel_branches.csv");
    REQUIRE(brp.rows.size() == br.rows.size());
    CHECK(brp.rows[7][1] == doctest::Approx(br.rows[7][1]).epsilon(1e-12));
    CHECK(brp.rows[7][2] == doctest::Approx(br.rows[7][2]).epsilon(1e-12));
    fs::remove_all(d);
    fs::remove_all(dp);
}

TEST_CASE("sphaleron report carries q, growth ratio and scaling") {
    fs::path d = fresh_dir("sph");
    CliRun r = run_cli({"sphaleron", "--b", "1e-3", "--out", d.string()});
    CHECK(r.code == 0);
    njson rep = njson::parse(slurp(d / "sphaleron.json"));
    CHECK(double(rep["q"]) == doctest::Approx(2134.1).epsilon(1e-3));
    CHECK(double(rep["growth_slope_ode_over_wkb"]) ==
          doctest::Approx(1.0).epsilon(0.05));
    CHECK(double(rep["scaling_exponent"]) > 0.8);
    CHECK(double(rep["scaling_exponent"]) < 1.2);
    CHECK(double(rep["min_xi"]) > 0);
    CHECK(double(rep["min_xi"]) < 5e-3);
    CHECK(njson::parse(r.out) == rep);
    fs::remove_all(d);
}

TEST_CASE("validate emits the gate summary and exits zero") {
    fs::path d = fresh_dir("val");
    CliRun r = run_cli({"validate", "--out", d.string()});
    CHECK(r.code == 0);
    njson rep = njson::parse(slurp(d / "validate.json"));
    REQUIRE(rep["criteria"].size() == 9);
    for (const auto& c : rep["criteria"]) CHECK(bool(c["pass"]));
    CHECK(bool(rep["all_pass"]));
    CHECK(r.out.find("PASS  1") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("exit codes: usage, configuration and solver failures") {
    CliRun bogus = run_cli({"bogus"});
    CHECK(bogus.code == 2);
    CHECK(njson::parse(bogus.err)["error"] == "Usage");

    CliRun badbeta = run_cli({"tunnel", "--beta", "2.0"});
    CHECK(badbeta.code == 2);
    CHECK(njson::parse(badbeta.err)["error"] == "InvalidParams");

    fs::path d = fresh_dir("solver_err");
    CliRun wide = run_cli({"sphaleron", "--b", "0.02", "--out", d.string()});
    CHECK(wide.code == 1);
    njson e = njson::parse(wide.err);
    CHECK(e["error"] == "InvalidParams");
    CHECK(e["message"].is_string());
    fs::remove_all(d);

    CliRun help = run_cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("one-turn") != std::string::npos);
}

TEST_CASE("environment variable supplies the default output directory") {
    fs::path d = fresh_dir("envdir");
    setenv("WAVEGUIDE_OUTPUT_DIR", d.string().c_str(), 1);
    CHECK(run_cli({"one-turn", "--grid", "5"}).code == 0);
    unsetenv("WAVEGUIDE_OUTPUT_DIR");
    CHECK(fs::exists(d / "one_turn.csv"));
    fs::remove_all(d);
}
