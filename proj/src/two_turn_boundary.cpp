#include "waveguide/two_turn_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "waveguide/errors.hpp"
#include "waveguide/numerics.hpp"

namespace wg {

namespace {

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// sigma(E) = sqrt(2E) sin^2(beta) / (alpha cos(beta)); the local maxima exist
// while sigma <= 1
double sigma_of(const ModelParams& params, double E) {
    double sb = std::sin(params.beta);
    return std::sqrt(2.0 * E) * sb * sb / (params.alpha * std::cos(params.beta));
}

// bracket common to delta_gamma_n and p0_n
double phase_count(const ModelParams& params, double E, int n) {
    return 2.0 * M_PI * n - M_PI - std::asin(clamp_unit(sigma_of(params, E)));
}

double delta_gamma_n(const ModelParams& params, double E, int n) {
    double sb = std::sin(params.beta);
    double cb = std::cos(params.beta);
    return -std::tan(params.beta)
         + std::sqrt(2.0 * E) * sb * sb / cb * phase_count(params, E, n);
}

void check_local_regime(const ModelParams& params) {
    if (!(params.alpha > 0.0) || !(params.alpha < 0.2))
        throw InvalidParams("local branches need 0 < alpha < 0.2");
}

} // namespace

double ncr_global(const ModelParams& params, double E) {
    params.validate();
    if (!(E > 0.0)) throw InvalidParams("need E > 0");
    double sa = std::sin(params.alpha);
    double ca = std::cos(params.alpha);
    double sb = std::sin(params.beta);
    double cb = std::cos(params.beta);
    double drift = ca * params.L / (std::sqrt(2.0 * E) * sb);
    double proj = sb * ca - cb * sa * std::cos(drift);
    return E - E * proj * proj;
}

GammaSolution gamma_solution(const ModelParams& params, double E, double gamma) {
    params.validate();
    if (!(E > 0.0)) throw InvalidParams("need E > 0");
    if (!(gamma >= 1e-6) || !(gamma <= params.beta))
        throw OutOfDomain("gamma outside [1e-6, beta]");

    double sa = std::sin(params.alpha);
    double ca = std::cos(params.alpha);
    double tb = std::tan(params.beta);
    double tg = std::tan(gamma);
    double p = std::sqrt(2.0 * E);

    // free slide between the touch at t = 0 and the tangent point, length set
    // by the inclination mismatch
    double slide = std::sqrt(std::max(0.0, tb * tb / (tg * tg) - 1.0));
    double chi = -std::acos(clamp_unit(tg / tb));

    GammaSolution sol;
    sol.gamma = gamma;
    sol.t0 = -params.L / (p * std::sin(gamma)) + slide / ca;
    sol.phi_prime = -ca * params.L / (p * std::sin(gamma)) + slide + chi;
    sol.p0 = p * (ca * std::sin(gamma) - sa * std::cos(gamma) * std::cos(sol.phi_prime));
    sol.N = E - sol.p0 * sol.p0 / 2.0;
    return sol;
}

double local_branch_cutoff(const ModelParams& params) {
    params.validate();
    double sb = std::sin(params.beta);
    double cb = std::cos(params.beta);
    double ac = params.alpha * cb;
    return ac * ac / (2.0 * sb * sb * sb * sb);
}

std::vector<LocalBranchPoint> local_branches(const ModelParams& params, double E) {
    params.validate();
    check_local_regime(params);
    if (!(E > 0.0)) throw InvalidParams("need E > 0");

    std::vector<LocalBranchPoint> out;
    if (E > local_branch_cutoff(params)) return out;

    double sb = std::sin(params.beta);
    double cb = std::cos(params.beta);
    double p = std::sqrt(2.0 * E);
    double sigma = clamp_unit(sigma_of(params, E));

    for (int n = 1;; ++n) {
        double dg = delta_gamma_n(params, E, n);
        if (dg >= params.beta) break; // inclination would leave (0, beta]
        if (dg <= 0.0) continue;
        LocalBranchPoint pt;
        pt.n = n;
        pt.delta_gamma = dg;
        pt.p0 = 2.0 * p * sb - 2.0 * E * sb * sb * phase_count(params, E, n)
              + params.alpha * p * cb * std::sqrt(std::max(0.0, 1.0 - sigma * sigma));
        pt.N = E - pt.p0 * pt.p0 / 2.0;
        out.push_back(pt);
    }
    return out;
}

double branch_birth_energy(const ModelParams& params, int n) {
    params.validate();
    check_local_regime(params);
    if (n < 1) throw InvalidParams("need n >= 1");

    double cap = local_branch_cutoff(params);
    auto dg = [&](double E) { return delta_gamma_n(params, E, n); };
    if (!(dg(cap) > 0.0))
        throw NoSignChange("branch never detaches below the cutoff");
    return bracket_root(dg, 1e-12 * cap, cap);
}

CriticalPoint critical_boundary(const ModelParams& params, double E) {
    params.validate();
    if (!(E > 0.0)) throw InvalidParams("need E > 0");

    CriticalPoint best;
    best.N = ncr_global(params, E);
    best.branch = 0;
    if (params.alpha > 0.0 && params.alpha < 0.2) {
        for (const auto& pt : local_branches(params, E)) {
            if (pt.N < best.N) {
                best.N = pt.N;
                best.branch = pt.n;
            }
        }
    }
    return best;
}

std::vector<ClassicalOptimum> classical_optima(const ModelParams& params, int n_max) {
    params.validate();
    check_local_regime(params);

    double sb = std::sin(params.beta);
    double cotb = std::cos(params.beta) / sb;
    double two_pi_a = 2.0 * M_PI * params.alpha;
    int n0 = static_cast<int>(std::floor(cotb / two_pi_a + 0.5)) + 1;

    std::vector<ClassicalOptimum> out;
    for (int n = n0; n <= n_max; ++n) {
        double half = n - 0.5;
        ClassicalOptimum opt;
        opt.n = n;
        opt.E_touch = 1.0 / (8.0 * M_PI * M_PI * half * half * sb * sb);
        opt.E_min = opt.E_touch
                  * (1.0 - std::asin(clamp_unit(cotb / (two_pi_a * half))) / (M_PI * half));
        out.push_back(opt);
    }
    return out;
}

std::vector<BoundaryBranch> boundary_branches(const ModelParams& params,
                                              double E_lo, double E_hi,
                                              int n_samples) {
    params.validate();
    if (!(E_lo > 0.0) || !(E_hi > E_lo)) throw InvalidParams("need 0 < E_lo < E_hi");
    if (n_samples < 2) throw InvalidParams("need n_samples >= 2");

    auto grid = log_grid(E_lo, E_hi, static_cast<std::size_t>(n_samples));
    std::vector<CriticalPoint> pts(grid.size());
    parallel_for(grid.size(),
                 [&](std::size_t i) { pts[i] = critical_boundary(params, grid[i]); });

    // split the winning-family difference at a switch down to relative 1e-12
    auto refine_switch = [&](double a, double b, int branch_a) {
        for (int it = 0; it < 80 && (b - a) > 1e-12 * b; ++it) {
            double mid = std::sqrt(a * b);
            if (critical_boundary(params, mid).branch == branch_a)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    };

    std::vector<BoundaryBranch> out;
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= grid.size(); ++i) {
        if (i < grid.size() && pts[i].branch == pts[run_start].branch) continue;
        BoundaryBranch br;
        br.branch = pts[run_start].branch;
        br.E_lo = run_start == 0
                      ? grid.front()
                      : refine_switch(grid[run_start - 1], grid[run_start],
                                      pts[run_start - 1].branch);
        if (i == grid.size())
            br.E_hi = br.branch == 0 ? std::numeric_limits<double>::infinity()
                                     : grid.back();
        else
            br.E_hi = refine_switch(grid[i - 1], grid[i], br.branch);
        for (std::size_t j = run_start; j < i; ++j)
            br.samples.emplace_back(grid[j], pts[j].N);
        out.push_back(std::move(br));
        run_start = i;
    }
    return out;
}

} // namespace wg
