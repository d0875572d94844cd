#include "waveguide/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "waveguide/acceptance.hpp"
#include "waveguide/classical.hpp"
#include "waveguide/errors.hpp"
#include "waveguide/numerics.hpp"
#include "waveguide/one_turn.hpp"
#include "waveguide/sphaleron.hpp"
#include "waveguide/two_turn_boundary.hpp"
#include "waveguide/two_turn_tunneling.hpp"

namespace wg::cli {

namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// One emitted table: CSV (config comment + header + rows, 12 significant
// digits) and a JSON mirror carrying the same rows plus any extras.
void write_table(const fs::path& dir, const std::string& name,
                 const njson& config, const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows,
                 const njson& extra = njson::object()) {
    std::string comment = "config:";
    for (const auto& [k, v] : config.items())
        comment += " " + k + "=" +
                   (v.is_string() ? v.get<std::string>() : v.dump());

    std::ofstream csv(dir / (name + ".csv"));
    if (!csv) throw InvalidParams("cannot write into " + dir.string());
    csv << "# " << comment << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i)
        csv << (i ? "," : "") << cols[i];
    csv << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            csv << (i ? "," : "") << num(row[i]);
        csv << "\n";
    }

    njson j;
    j["config"] = config;
    j["columns"] = cols;
    j["rows"] = rows;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    std::ofstream js(dir / (name + ".json"));
    js << j.dump(2) << "\n";
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Defaults overridable by the --config JSON document, then by flags.
struct Defaults {
    double alpha = std::numbers::pi / 30;
    double beta = std::numbers::pi / 3;
    double L = 1.0;
    double b = 1e-3;
};

Defaults load_config(const std::vector<std::string>& args) {
    Defaults d;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty()) return d;
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not readable: " + path);
    njson doc;
    try {
        f >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    for (const auto& [k, v] : doc.items()) {
        if (!v.is_number())
            throw ConfigError("config field " + k + " is not a number");
        if (k == "alpha") d.alpha = v.get<double>();
        else if (k == "beta") d.beta = v.get<double>();
        else if (k == "L") d.L = v.get<double>();
        else if (k == "b") d.b = v.get<double>();
        else throw ConfigError("unknown config field " + k);
    }
    return d;
}

std::string default_out_dir() {
    if (const char* env = std::getenv("WAVEGUIDE_OUTPUT_DIR")) return env;
    return ".";
}

njson config_json(const RunConfig& cfg, const std::string& command,
                  std::initializer_list<std::pair<std::string, njson>> extra) {
    njson j;
    j["command"] = command;
    j["alpha"] = cfg.model.alpha;
    j["beta"] = cfg.model.beta;
    j["L"] = cfg.model.L;
    j["b"] = cfg.model.b;
    j["emin"] = cfg.emin;
    j["emax"] = cfg.emax;
    j["grid"] = cfg.grid_points;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    for (const auto& [k, v] : extra) j[k] = v;
    return j;
}

void cmd_one_turn(const RunConfig& cfg) {
    njson conf = config_json(cfg, "one-turn", {});
    double nucr = nu_critical(cfg.model.beta);
    std::size_t n = cfg.grid_points;
    std::vector<std::vector<double>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        double nu = nucr * double(i) / double(n);
        OneTurnSolution sol = solve_matching(cfg.model.beta, nu);
        rows[i] = {nu, suppression_closed_form(cfg.model.beta, nu), sol.f,
                   sol.T, sol.theta};
    }, cfg.workers);
    write_table(cfg.out_dir, "one_turn", conf,
                {"nu", "f_closed", "f_matching", "T", "theta"}, rows);
}

void cmd_boundary(const RunConfig& cfg) {
    njson conf = config_json(cfg, "boundary", {});
    auto Es = log_grid(cfg.emin, cfg.emax, cfg.grid_points);
    std::vector<std::vector<double>> rows(Es.size());
    parallel_for(Es.size(), [&](std::size_t i) {
        CriticalPoint cp = critical_boundary(cfg.model, Es[i]);
        rows[i] = {Es[i], cp.N, double(cp.branch),
                   ncr_global(cfg.model, Es[i])};
    }, cfg.workers);
    write_table(cfg.out_dir, "boundary", conf,
                {"E", "N_cr", "branch", "N_global"}, rows);

    std::vector<std::vector<double>> opt_rows;
    for (const ClassicalOptimum& o : classical_optima(cfg.model))
        opt_rows.push_back({double(o.n), o.E_min, o.E_touch});
    write_table(cfg.out_dir, "boundary_optima", conf, {"n", "E_n", "E_n_cr"},
                opt_rows);
}

void cmd_oracle(const RunConfig& cfg, std::size_t phase_samples) {
    njson conf = config_json(cfg, "oracle",
                             {{"phase_samples", phase_samples}});
    auto Es = log_grid(cfg.emin, cfg.emax, cfg.grid_points);
    std::vector<std::vector<double>> rows(Es.size());
    parallel_for(Es.size(), [&](std::size_t i) {
        double E = Es[i];
        double tol = cfg.model.alpha * cfg.model.alpha * E;
        double orc = oracle_boundary(cfg.model, E, int(phase_samples), tol);
        double ana = critical_boundary(cfg.model, E).N;
        rows[i] = {E, orc, ana, std::abs(orc - ana)};
    }, cfg.workers);
    write_table(cfg.out_dir, "oracle", conf,
                {"E", "N_cr_oracle", "N_cr_analytic", "abs_diff"}, rows);
}

void cmd_tunnel(const RunConfig& cfg, bool exact, bool physical) {
    njson conf = config_json(cfg, "tunnel",
                             {{"exact", exact}, {"physical_units", physical}});
    double scale = physical ? cfg.model.L * cfg.model.L : 1.0;
    BandSet bands = enumerate_bands(cfg.model);
    auto grid = log_grid(cfg.emin, cfg.emax, cfg.grid_points);
    std::vector<int> kinds{0};
    for (int k = bands.n1; k <= 12; ++k) kinds.push_back(k);
    BranchOptions opts;
    opts.exact_refine = exact;
    std::vector<TunnelBranch> branches(kinds.size());
    parallel_for(kinds.size(), [&](std::size_t i) {
        branches[i] = solve_branch(cfg.model, kinds[i], grid, opts);
    }, cfg.workers);

    std::vector<std::vector<double>> rows;
    for (const TunnelBranch& b : branches)
        for (const TunnelSample& s : b.samples)
            rows.push_back({s.E * scale, s.tau, s.delta_T, s.F0 * scale, s.T,
                            double(b.kind)});
    write_table(cfg.out_dir, "tunnel_branches", conf,
                {"E", "tau", "delta_T", "F0", "T", "branch"}, rows,
                {{"n1", bands.n1}});

    SuppressionCurve curve = glue_branches(cfg.model, branches);
    std::vector<std::vector<double>> glued(curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const SuppressionPoint& pt = curve.points[i];
        bool sw = i + 1 < curve.points.size() &&
                  curve.points[i + 1].kind != pt.kind;
        glued[i] = {pt.E * scale, pt.F0 * scale, double(pt.kind),
                    sw ? 1.0 : 0.0};
    }
    njson extra;
    extra["n1"] = bands.n1;
    std::vector<double> switches;
    for (double s : curve.switch_energies) switches.push_back(s * scale);
    extra["switch_energies"] = switches;
    write_table(cfg.out_dir, "tunnel_glued", conf,
                {"E", "F0", "branch", "is_switch"}, glued, extra);
}

void cmd_sphaleron(const RunConfig& cfg, double s1, std::ostream& out) {
    njson conf = config_json(cfg, "sphaleron", {{"s1", s1}});
    SphaleronOrbit orbit = build_sphaleron(cfg.model);
    LinearMode mode = linear_mode(orbit, s1);
    ReflectedOrbit refl = reflected_orbit(cfg.model, s1);
    std::vector<double> widths =
        4.0 * cfg.model.b <= 1e-2
            ? std::vector<double>{cfg.model.b, 4.0 * cfg.model.b}
            : std::vector<double>{cfg.model.b / 4.0, cfg.model.b};
    double expo = min_xi_scaling_exponent(cfg.model, s1, widths);

    njson rep;
    rep["config"] = conf;
    rep["q"] = mode.mathieu_q;
    rep["growth_slope_ode_over_wkb"] = growth_slope_ratio(mode);
    rep["min_xi"] = refl.min_xi;
    rep["scaling_exponent"] = expo;
    rep["scaling_widths"] = widths;
    rep["orbit_residual"] = orbit.residual;
    rep["incoming"] = {{"E", refl.incoming.E},
                       {"N", refl.incoming.N},
                       {"phi", refl.incoming.phi}};
    std::ofstream js(fs::path(cfg.out_dir) / "sphaleron.json");
    if (!js) throw InvalidParams("cannot write into " + cfg.out_dir);
    js << rep.dump(2) << "\n";
    out << rep.dump(2) << "\n";
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    auto results = run_acceptance();
    njson rep;
    rep["criteria"] = njson::array();
    for (const CriterionResult& r : results) {
        out << (r.pass ? "PASS" : "FAIL") << "  " << r.index << "  " << r.name
            << "  (" << num(r.seconds) << " s)  " << r.detail << "\n";
        njson c;
        c["index"] = r.index;
        c["name"] = r.name;
        c["pass"] = r.pass;
        c["seconds"] = r.seconds;
        c["detail"] = r.detail;
        rep["criteria"].push_back(c);
    }
    bool ok = all_pass(results);
    rep["all_pass"] = ok;
    std::ofstream js(fs::path(cfg.out_dir) / "validate.json");
    if (!js) throw InvalidParams("cannot write into " + cfg.out_dir);
    js << rep.dump(2) << "\n";
    out << rep.dump(2) << "\n";
    return ok ? 0 : 1;
}

void emit_error(std::ostream& err, const std::string& kind,
                const std::string& message) {
    njson e;
    e["error"] = kind;
    e["message"] = message;
    err << e.dump() << "\n";
}

} // namespace

void RunConfig::validate() const {
    model.validate();
    if (!(emin > 0) || !(emax > emin))
        throw InvalidParams("energy window must satisfy 0 < emin < emax");
    if (grid_points < 1) throw InvalidParams("grid needs at least one point");
    if (workers < 1) throw InvalidParams("worker count must be >= 1");
    if (out_dir.empty()) throw InvalidParams("output directory is empty");
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"sharp-turn waveguide reflection toolkit"};
    app.fallthrough();

    Defaults def;
    try {
        def = load_config(args);
    } catch (const ConfigError& e) {
        emit_error(err, "ConfigError", e.what());
        return 2;
    }

    RunConfig cfg;
    cfg.model.alpha = def.alpha;
    cfg.model.beta = def.beta;
    cfg.model.L = def.L;
    cfg.model.b = def.b;
    cfg.out_dir = default_out_dir();
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON document with fields alpha, beta, L, b");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--seed", cfg.seed, "recorded in emitted config");
    app.add_option("--workers", cfg.workers, "worker pool size");

    auto* one = app.add_subcommand("one-turn", "single-turn exponent table");
    one->add_option("--beta", cfg.model.beta, "turn angle, radians");
    std::size_t nu_points = 120;
    one->add_option("--grid", nu_points, "number of nu samples");

    auto* bnd = app.add_subcommand("boundary", "classically allowed boundary");
    bnd->add_option("--alpha", cfg.model.alpha);
    bnd->add_option("--beta", cfg.model.beta);
    bnd->add_option("--emin", cfg.emin);
    bnd->add_option("--emax", cfg.emax);
    std::size_t bnd_grid = 400;
    bnd->add_option("--grid", bnd_grid);

    auto* orc = app.add_subcommand("oracle", "brute-force boundary cross-check");
    orc->add_option("--alpha", cfg.model.alpha);
    orc->add_option("--beta", cfg.model.beta);
    double orc_emin = 5e-4, orc_emax = 0.1;
    std::size_t orc_grid = 20, phase_samples = 2048;
    orc->add_option("--emin", orc_emin);
    orc->add_option("--emax", orc_emax);
    orc->add_option("--grid", orc_grid);
    orc->add_option("--phase-samples", phase_samples);

    auto* tun = app.add_subcommand("tunnel", "two-turn suppression branches");
    tun->add_option("--alpha", cfg.model.alpha);
    tun->add_option("--beta", cfg.model.beta);
    tun->add_option("--emin", cfg.emin);
    tun->add_option("--emax", cfg.emax);
    std::size_t tun_grid = 2000;
    tun->add_option("--grid", tun_grid);
    bool exact = false, physical = false;
    tun->add_flag("--exact", exact, "refine samples through the exact system");
    tun->add_flag("--physical-units", physical, "scale E and F0 by L^2");
    tun->add_option("--L", cfg.model.L, "guide width for physical units");

    auto* sph = app.add_subcommand("sphaleron", "smoothened-turn dynamics");
    sph->add_option("--beta", cfg.model.beta);
    sph->add_option("--b", cfg.model.b, "smoothening width");
    double s1 = -0.5;
    sph->add_option("--s1", s1, "escape half-phase, in (-pi/2, 0)");

    auto* val = app.add_subcommand("validate", "run the acceptance gates");

    app.require_subcommand(1);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "Usage", e.what());
        return 2;
    }

    try {
        if (one->parsed()) cfg.grid_points = nu_points;
        if (bnd->parsed()) cfg.grid_points = bnd_grid;
        if (orc->parsed()) {
            cfg.grid_points = orc_grid;
            cfg.emin = orc_emin;
            cfg.emax = orc_emax;
        }
        if (tun->parsed()) cfg.grid_points = tun_grid;
        // the smoothening width only enters the sphaleron dynamics; every
        // other subcommand works in the sharp-turn model
        if (sph->parsed()) cfg.model.alpha = 0.0;
        else cfg.model.b = 0.0;
        cfg.validate();
        fs::create_directories(cfg.out_dir);
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error(err, "ConfigError", e.what());
        return 2;
    }

    try {
        if (one->parsed()) cmd_one_turn(cfg);
        else if (bnd->parsed()) cmd_boundary(cfg);
        else if (orc->parsed()) cmd_oracle(cfg, phase_samples);
        else if (tun->parsed()) cmd_tunnel(cfg, exact, physical);
        else if (sph->parsed()) cmd_sphaleron(cfg, s1, out);
        else if (val->parsed()) return cmd_validate(cfg, out);
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "Unknown", e.what());
        return 1;
    }
    return 0;
}

int run(const std::vector<std::string>& args) {
    return run(args, std::cout, std::cerr);
}

} // namespace wg::cli
