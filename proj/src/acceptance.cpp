#include "waveguide/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "waveguide/classical.hpp"
#include "waveguide/numerics.hpp"
#include "waveguide/one_turn.hpp"
#include "waveguide/sphaleron.hpp"
#include "waveguide/two_turn_boundary.hpp"
#include "waveguide/two_turn_tunneling.hpp"

namespace wg {

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams reference_params(double alpha = kPi / 30) {
    ModelParams p;
    p.beta = kPi / 3;
    p.alpha = alpha;
    return p;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Canonical glued suppression curve shared by the branch-topology, optimal
// energy and envelope gates.
struct GluedPipeline {
    BandSet bands;
    std::vector<TunnelBranch> branches;
    SuppressionCurve curve;
};

GluedPipeline build_glued(const ModelParams& p) {
    GluedPipeline out;
    out.bands = enumerate_bands(p);
    auto grid = log_grid(1e-4, 5e-2, 2000);
    std::vector<int> kinds{0};
    for (int n = out.bands.n1; n <= 12; ++n) kinds.push_back(n);
    out.branches.resize(kinds.size());
    parallel_for(kinds.size(), [&](std::size_t i) {
        out.branches[i] = solve_branch(p, kinds[i], grid);
    });
    out.curve = glue_branches(p, out.branches);
    return out;
}

} // namespace

std::vector<CriterionResult> run_acceptance() {
    std::vector<CriterionResult> out;
    GluedPipeline glued;
    bool glued_ready = false;

    auto gate = [&](const std::string& name, double limit, auto&& body) {
        CriterionResult r;
        r.index = int(out.size()) + 1;
        r.name = name;
        r.limit_seconds = limit;
        auto start = std::chrono::steady_clock::now();
        try {
            body(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        if (limit > 0 && r.seconds >= limit) {
            r.pass = false;
            r.detail += " [over budget]";
        }
        out.push_back(r);
    };

    const ModelParams ref = reference_params();
    const double f0 = 2.0 * std::log(3.0) - 2.0;

    gate("one-turn exponent and critical fraction", 1.0,
         [&](CriterionResult& r) {
        double closed = suppression_closed_form(ref.beta, 0.0);
        double matched = solve_matching(ref.beta, 0.0).f;
        double nucr = nu_critical(ref.beta);
        r.pass = std::abs(closed - f0) <= 1e-9 &&
                 std::abs(matched - f0) <= 1e-9 &&
                 std::abs(nucr - 0.25) <= 1e-15;
        r.detail = "closed " + fmt(closed) + ", matched " + fmt(matched) +
                   ", nu_cr " + fmt(nucr);
    });

    gate("conjugate pairs (T, theta) against finite differences", 10.0,
         [&](CriterionResult& r) {
        double nucr = nu_critical(ref.beta);
        auto F = [&](double E, double N) {
            return E * suppression_closed_form(ref.beta, N / E);
        };
        double h = 1e-6, worst = 0.0;
        for (int i = 1; i <= 50; ++i) {
            double nu = nucr * double(i) / 51.0;
            OneTurnSolution sol = solve_matching(ref.beta, nu);
            double FE = (F(1.0 + h, nu) - F(1.0 - h, nu)) / (2.0 * h);
            double FN = (F(1.0, nu + h) - F(1.0, nu - h)) / (2.0 * h);
            worst = std::max(worst, std::abs(FE + sol.T) / std::abs(sol.T));
            worst = std::max(worst,
                             std::abs(FN + sol.theta) / std::abs(sol.theta));
        }
        r.pass = worst <= 1e-6;
        r.detail = "worst relative mismatch " + fmt(worst) + " on 50 points";
    });

    gate("brute-force boundary agrees with the analytic one", 300.0,
         [&](CriterionResult& r) {
        auto Es = log_grid(5e-4, 0.1, 20);
        double lo = std::cos(ref.beta + ref.alpha);
        double hi = std::cos(ref.beta - ref.alpha);
        lo *= lo;
        hi *= hi;
        std::vector<double> diffs(Es.size()), bounds(Es.size());
        std::vector<int> env_ok(Es.size());
        parallel_for(Es.size(), [&](std::size_t i) {
            double E = Es[i];
            double ana = critical_boundary(ref, E).N;
            double tol = ref.alpha * ref.alpha * E;
            double orc = oracle_boundary(ref, E, 2048, tol);
            diffs[i] = std::abs(ana - orc);
            bounds[i] = std::max(1e-3 * E, 2.0 * tol);
            double ratio = ana / E;
            env_ok[i] = ratio >= lo - 1e-12 && ratio <= hi + 1e-12;
        });
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < Es.size(); ++i) {
            worst = std::max(worst, diffs[i] / bounds[i]);
            ok = ok && diffs[i] <= bounds[i] && env_ok[i];
        }
        r.pass = ok;
        r.detail = "worst |analytic - oracle| at " + fmt(worst) +
                   " of budget, envelope " + (ok ? "held" : "broken");
    });

    gate("band count and topmost gluing switch", 60.0,
         [&](CriterionResult& r) {
        glued = build_glued(ref);
        glued_ready = true;
        const SuppressionCurve& c = glued.curve;
        if (c.switch_energies.empty()) {
            r.pass = false;
            r.detail = "no switches on the glued curve";
            return;
        }
        double top = c.switch_energies.back();
        int above = -1, below = -1;
        for (const auto& pt : c.points) {
            if (pt.E < top) below = pt.kind;
            if (pt.E > top && above < 0) above = pt.kind;
        }
        r.pass = glued.bands.n1 == 4 && above == 0 && below == 4;
        r.detail = "n1 " + std::to_string(glued.bands.n1) + ", switch " +
                   std::to_string(above) + " -> " + std::to_string(below) +
                   " at E " + fmt(top);
    });

    gate("suppression minima sit at the predicted energies", 120.0,
         [&](CriterionResult& r) {
        if (!glued_ready) {
            glued = build_glued(ref);
            glued_ready = true;
        }
        const auto& pts = glued.curve.points;
        std::map<int, double> min_at; // kind -> E of its deepest F0/E minimum
        std::map<int, double> min_val;
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            if (pts[i - 1].kind != pts[i].kind ||
                pts[i + 1].kind != pts[i].kind)
                continue;
            double a = pts[i - 1].F0 / pts[i - 1].E;
            double m = pts[i].F0 / pts[i].E;
            double b = pts[i + 1].F0 / pts[i + 1].E;
            if (!(m < a && m <= b)) continue;
            auto it = min_val.find(pts[i].kind);
            if (it == min_val.end() || m < it->second) {
                min_val[pts[i].kind] = m;
                min_at[pts[i].kind] = pts[i].E;
            }
        }
        TunnelOptima opt = tunneling_optima(ref, 12);
        int checked = 0;
        double worst = 0.0;
        bool ok = true;
        std::string where;
        for (auto [n, En] : opt.energies) {
            if (checked == 3) break;
            auto it = min_at.find(n);
            if (it == min_at.end()) continue;
            double rel = std::abs(it->second / En - 1.0);
            worst = std::max(worst, rel);
            ok = ok && rel <= 0.02;
            where += (where.empty() ? "n " : ", ") + std::to_string(n);
            ++checked;
        }
        r.pass = ok && checked == 3;
        r.detail = where + "; worst relative offset " + fmt(worst);
    });

    gate("glued curve stays inside the oscillation envelope", 0.0,
         [&](CriterionResult& r) {
        if (!glued_ready) {
            glued = build_glued(ref);
            glued_ready = true;
        }
        double w = 4.0 * ref.alpha / (std::tan(ref.beta) * std::exp(1.0));
        double slack = 3.0 * ref.alpha * ref.alpha;
        double worst = 0.0;
        bool positive = true;
        for (const auto& pt : glued.curve.points) {
            positive = positive && pt.F0 > 0;
            worst = std::max(worst, std::abs(pt.F0 / pt.E - f0));
        }
        r.pass = positive && worst <= w + slack;
        r.detail = "max |F0/E - f0| " + fmt(worst) + " vs " + fmt(w + slack);
    });

    gate("reduced-to-exact distance halves with the first angle", 0.0,
         [&](CriterionResult& r) {
        bool ok = true;
        std::string rs;
        for (double E : {5e-3, 1e-2, 2e-2}) {
            double d[2];
            int k = 0;
            for (double alpha : {kPi / 30, kPi / 60}) {
                ModelParams p = reference_params(alpha);
                auto [tau, dT] =
                    solve_reduced(p, E, 1.0 / std::sqrt(2.0 * E), -1.0);
                auto [t0s, t1s] = exact_seed(p, E, tau, dT);
                MatchingSolution s = solve_exact(p, E, 0.0, t0s, t1s);
                d[k++] = std::abs(s.tau - tau);
            }
            double ratio = d[0] / d[1];
            ok = ok && ratio >= 1.0 && ratio <= 3.0;
            rs += (rs.empty() ? "" : ", ") + fmt(ratio);
        }
        r.pass = ok;
        r.detail = "mismatch ratios " + rs + " (want 2 +- 50%)";
    });

    gate("smoothened-turn dynamics", 120.0, [&](CriterionResult& r) {
        LinearMode big;
        big.mathieu_q = 1e3;
        big.s1 = -0.5;
        double slope = growth_slope_ratio(big);

        ModelParams sp;
        sp.beta = kPi / 3;
        sp.alpha = 0.0;
        sp.b = 1e-3;
        SphaleronOrbit orb = build_sphaleron(sp);
        double expo = min_xi_scaling_exponent(sp);
        InstabilityReport rep = instability_check(sp, orb.A_eta, sp.b);

        r.pass = std::abs(slope - 1.0) <= 0.02 && expo >= 0.8 &&
                 expo <= 1.2 && orb.residual <= 1e-8 &&
                 rep.plus.direction == 1 && rep.minus.direction == -1;
        r.detail = "growth slope " + fmt(slope) + ", scaling exponent " +
                   fmt(expo) + ", residual " + fmt(orb.residual) +
                   ", escapes " + std::to_string(rep.plus.direction) + "/" +
                   std::to_string(rep.minus.direction);
    });

    gate("two-turn exponent degenerates to one turn as the angle closes",
         0.0, [&](CriterionResult& r) {
        ModelParams p = reference_params(1e-4);
        double worst = 0.0;
        for (double E : {5e-3, 2e-2}) {
            auto [tau, dT] =
                solve_reduced(p, E, 1.0 / std::sqrt(2.0 * E), -1.0);
            auto [t0s, t1s] = exact_seed(p, E, tau, dT);
            MatchingSolution s = solve_exact(p, E, 0.0, t0s, t1s);
            double F = suppression_from_solution(p, E, 0.0, s).first;
            worst = std::max(worst, std::abs(F / (E * f0) - 1.0));
        }
        r.pass = worst <= 1e-3;
        r.detail = "worst relative offset from E*f0: " + fmt(worst);
    });

    return out;
}

bool all_pass(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.pass; });
}

} // namespace wg
