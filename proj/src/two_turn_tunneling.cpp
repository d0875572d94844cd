#include "waveguide/two_turn_tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "waveguide/errors.hpp"
#include "waveguide/one_turn.hpp"

namespace wg {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Trig {
    double sa, ca, sb, cb, tb, cotb;
};

Trig trig(const ModelParams& p) {
    return {std::sin(p.alpha), std::cos(p.alpha), std::sin(p.beta),
            std::cos(p.beta), std::tan(p.beta), 1.0 / std::tan(p.beta)};
}

void check_energy(double E, double nu) {
    if (!(E > 0) || !(nu >= 0) || !(nu < 1))
        throw InvalidParams("need E > 0 and 0 <= nu < 1");
}

using RPair = std::pair<double, double>;

// Incoming-arm matching depth underlying a reduced sample,
// cosh(T1 cos(beta)) = (1 + alpha cot(beta) cos(tau) e^{delta_T}) / sin(beta).
// Returns NaN when no real T1 < 0 exists.
double reduced_T1(const ModelParams& p, const Trig& g, double tau, double dT) {
    double c = (1.0 + p.alpha * g.cotb * std::cos(tau) * std::exp(dT)) / g.sb;
    if (!(c >= 1.0)) return kNaN;
    return -std::acosh(c) / g.cb;
}

double reduced_T(const ModelParams& p, const Trig& g, double tau, double dT) {
    double T1 = reduced_T1(p, g, tau, dT);
    return 2.0 * (T1 - dT) -
           2.0 * g.sa * g.cotb * std::cos(tau) * std::exp(dT);
}

TunnelSample make_sample(const ModelParams& p, const Trig& g, double f0,
                         double E, const RPair& s) {
    TunnelSample out;
    out.E = E;
    out.tau = s.first;
    out.delta_T = s.second;
    out.F0 = E * (f0 - 4.0 * p.alpha * g.cotb * std::cos(s.first) * s.second *
                           std::exp(s.second));
    out.T = reduced_T(p, g, s.first, s.second);
    return out;
}

} // namespace

std::array<Complex, 2> exact_residual(const ModelParams& params, double E,
                                      double nu, Complex t0, Complex t1) {
    params.validate();
    check_energy(E, nu);
    const Trig g = trig(params);
    const double k = std::sqrt(2.0 * E);
    const Complex phi1 = t1 * (g.ca * g.cb);
    const Complex dphi = (t1 - t0) * g.ca;
    const Complex r1 =
        g.ca / (k * g.sb) + std::sin(phi1) / g.cb - std::cos(phi1) * dphi;
    // Transverse momentum matching in the incoming arm; the principal square
    // root selects the decaying oscillator branch there.
    const Complex r2 =
        g.ca * g.sb * std::cos(phi1) -
        g.sa * (std::sin(phi1) * std::sin(dphi) +
                g.cb * std::cos(phi1) * std::cos(dphi)) -
        std::sqrt(1.0 - nu);
    return {r1, r2};
}

MatchingSolution solve_exact(const ModelParams& params, double E, double nu,
                             Complex t0_seed, Complex t1_seed) {
    params.validate();
    check_energy(E, nu);
    const Trig g = trig(params);

    RootConfig cfg;
    cfg.residual_tolerance = 1e-13;
    auto fn = [&](const CVec& z) -> CVec {
        auto r = exact_residual(params, E, nu, z[0], z[1]);
        return {r[0], r[1]};
    };
    CVec root = complex_newton(fn, {t0_seed, t1_seed}, cfg);

    MatchingSolution s;
    s.t0 = root[0];
    s.t1 = root[1];
    s.tau = (s.t1 - s.t0).real();
    s.delta_T = (s.t1 - s.t0).imag();
    s.tau1 = s.t1.real();
    s.T1 = s.t1.imag();
    if (!(s.tau > 0) || !(s.T1 < 0))
        throw BranchViolation(
            "converged to a non-reflected family (need tau > 0, Im t1 < 0)");

    const double k = std::sqrt(2.0 * E);
    const Complex phi1 = s.t1 * (g.ca * g.cb);
    const Complex dphi = (s.t1 - s.t0) * g.ca;
    s.phi1 = phi1;
    s.p0_prime = k * g.sb * std::cos(phi1);
    s.x0_prime =
        1.0 + k * (g.tb / g.ca) * (std::sin(phi1) - phi1 * std::cos(phi1));
    const Complex amp = std::sqrt(E / 2.0) / g.ca;
    s.a_prime = amp * std::exp(kI * phi1 / g.cb) *
                (std::sin(phi1) + kI * g.cb * std::cos(phi1));
    s.abar_prime = amp * std::exp(-kI * phi1 / g.cb) *
                   (std::sin(phi1) - kI * g.cb * std::cos(phi1));

    // Transverse position and velocity carried back to the first corner.
    const Complex yp0 = (k / g.ca) * (std::sin(phi1) * std::cos(dphi) -
                                      g.cb * std::cos(phi1) * std::sin(dphi));
    const Complex dyp0 = k * (std::sin(phi1) * std::sin(dphi) +
                              g.cb * std::cos(phi1) * std::cos(dphi));
    const double p0 = std::sqrt(2.0 * E * (1.0 - nu));
    s.T = 2.0 * s.t0.imag() + (2.0 * g.sa / p0) * yp0.imag();
    if (nu > 0) {
        const Complex y0 = yp0 * g.ca;
        const Complex dy0 = s.p0_prime * g.sa + dyp0 * g.ca;
        const Complex a_in = std::exp(kI * s.t0) * (y0 + kI * dy0) * 0.5;
        const Complex abar_in = std::exp(-kI * s.t0) * (y0 - kI * dy0) * 0.5;
        s.theta = std::log(abar_in / std::conj(a_in)).real() - s.T;
    } else {
        s.theta = kInf;
    }
    return s;
}

std::pair<Complex, Complex> exact_seed(const ModelParams& params, double E,
                                       double tau, double delta_T) {
    params.validate();
    if (!(E > 0) || !(tau > 0))
        throw InvalidParams("need E > 0 and tau > 0");
    const Trig g = trig(params);
    const double T1 = reduced_T1(params, g, tau, delta_T);
    if (!std::isfinite(T1) || T1 == 0.0)
        throw OutOfDomain("no incoming-arm matching at this (tau, delta_T)");
    const double tau1 = -(1.0 / (tau * g.cb)) *
                        (1.0 / g.cb - delta_T / std::tanh(T1 * g.cb));
    const Complex t1{tau1, T1};
    return {t1 - Complex{tau, delta_T}, t1};
}

std::array<double, 2> reduced_residual(const ModelParams& params, double E,
                                       double tau, double delta_T) {
    params.validate();
    if (!(E > 0)) throw InvalidParams("need E > 0");
    const Trig g = trig(params);
    const double w = params.alpha * g.cotb;
    const double r1 =
        1.0 - tau * std::sqrt(2.0 * E) - w * std::cos(tau) * std::exp(delta_T);
    const double r2 =
        (1.0 + delta_T) * std::exp(-delta_T) - w * tau * std::sin(tau);
    return {r1, r2};
}

std::pair<double, double> solve_reduced(const ModelParams& params, double E,
                                        double tau_seed, double delta_T_seed) {
    params.validate();
    if (!(E > 0)) throw InvalidParams("need E > 0");
    const double tol = 1e-13;
    const double h = 1e-7;
    double tau = tau_seed, dT = delta_T_seed;
    for (int it = 0; it < 60; ++it) {
        auto r = reduced_residual(params, E, tau, dT);
        if (std::max(std::abs(r[0]), std::abs(r[1])) < tol) return {tau, dT};
        auto ra = reduced_residual(params, E, tau + h, dT);
        auto rb = reduced_residual(params, E, tau, dT + h);
        const double j00 = (ra[0] - r[0]) / h, j01 = (rb[0] - r[0]) / h;
        const double j10 = (ra[1] - r[1]) / h, j11 = (rb[1] - r[1]) / h;
        const double det = j00 * j11 - j01 * j10;
        if (det == 0 || !std::isfinite(det))
            throw NonConvergence("singular reduced-system Jacobian");
        tau += (-r[0] * j11 + r[1] * j01) / det;
        dT += (-r[1] * j00 + r[0] * j10) / det;
        if (!std::isfinite(tau) || !std::isfinite(dT) || std::abs(dT) > 60 ||
            tau < -10 || tau > 1e3)
            throw NonConvergence("reduced iteration left the trust region");
    }
    throw NonConvergence("reduced system: no root within 60 iterations");
}

BandSet enumerate_bands(const ModelParams& params, int n_max) {
    params.validate();
    if (!(params.alpha > 0))
        throw InvalidParams("band structure needs alpha > 0");
    const Trig g = trig(params);
    const double ratio = g.tb / (2.0 * M_PI * params.alpha);
    BandSet out;
    out.n1 = static_cast<int>(std::floor(ratio + 0.5)) + 1;
    n_max = std::max(n_max, out.n1);
    for (int n = out.n1; n <= n_max; ++n)
        out.delta_tau.emplace_back(n, std::asin(ratio / (n - 0.5)));
    out.first_band = {0.0,
                      2.0 * M_PI * (out.n1 - 1) + out.delta_tau.front().second};
    return out;
}

TunnelBranch solve_branch(const ModelParams& params, int kind,
                          const std::vector<double>& E_grid,
                          const BranchOptions& opts) {
    params.validate();
    if (!(params.alpha > 0) || !(params.alpha < 0.2))
        throw InvalidParams("branch tracing needs 0 < alpha < 0.2");
    if (E_grid.size() < 2)
        throw InvalidParams("E_grid needs at least two points");
    for (std::size_t i = 0; i < E_grid.size(); ++i)
        if (!(E_grid[i] > 0) || (i > 0 && !(E_grid[i] > E_grid[i - 1])))
            throw InvalidParams("E_grid must be positive, strictly ascending");

    const Trig g = trig(params);
    const double f0 = suppression_closed_form(params.beta, 0.0);
    const BandSet bands = enumerate_bands(params, std::max(16, kind));

    TunnelBranch out;
    out.kind = kind;
    if (kind == 0) {
        out.band = bands.first_band;
    } else if (kind >= bands.n1) {
        double dt = 0;
        for (const auto& [n, d] : bands.delta_tau)
            if (n == kind) dt = d;
        out.band = {2.0 * M_PI * kind - M_PI - dt, 2.0 * M_PI * kind + dt};
    } else {
        throw InvalidParams("kind must be 0 or >= the first band index");
    }

    // Band edges are accurate to O(alpha) only, so enforce with a margin.
    const double margin = 3.0 * params.alpha;
    const double lo = kind == 0 ? 0.0 : out.band.first - margin;
    const double hi = out.band.second + margin;
    auto solver = [&](double E, const RPair& seed) -> RPair {
        RPair s = solve_reduced(params, E, seed.first, seed.second);
        if (!(s.first > lo) || !(s.first < hi))
            throw BranchViolation("sample left the branch band");
        if (!(params.alpha * g.cotb * s.first * std::sin(s.first) <
              1.0 + 1e-12))
            throw BranchViolation("sample violates transverse confinement");
        return s;
    };

    std::vector<TunnelSample> samples;
    if (kind == 0) {
        // Trace downward from the high-energy asymptote.
        std::vector<double> desc(E_grid.rbegin(), E_grid.rend());
        const RPair seed{1.0 / std::sqrt(2.0 * desc.front()), -1.0};
        auto scan =
            continuation_scan<RPair>(solver, desc, seed, opts.max_refinements);
        for (auto it = scan.points.rbegin(); it != scan.points.rend(); ++it)
            samples.push_back(make_sample(params, g, f0, it->first, it->second));
        // The reduced expansion degrades once e^{delta_T} is large; drop the
        // low-energy tail past the first cutoff crossing.
        std::size_t cut = 0;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].delta_T > opts.global_delta_T_cutoff) cut = i + 1;
        samples.erase(samples.begin(), samples.begin() + cut);
    } else {
        // Seed at low energy where the branch sits near tau = 2 pi n,
        // delta_T = ln(tan(beta)/alpha), then trace upward.
        double E_seed = std::min(
            0.5 * std::pow(0.3 / (2.0 * M_PI * kind), 2), E_grid.front());
        const RPair guess{2.0 * M_PI * kind, std::log(g.tb / params.alpha)};
        RPair at_seed;
        bool seeded = false;
        for (int tries = 0; tries < 8 && !seeded; ++tries) {
            try {
                at_seed = solver(E_seed, guess);
                seeded = true;
            } catch (const Error&) {
                E_seed *= 0.5;
            }
        }
        if (!seeded) return out;
        std::vector<double> grid;
        const bool prepended = E_seed < E_grid.front();
        if (prepended) grid.push_back(E_seed);
        grid.insert(grid.end(), E_grid.begin(), E_grid.end());
        auto scan =
            continuation_scan<RPair>(solver, grid, at_seed, opts.max_refinements);
        for (const auto& [E, s] : scan.points)
            samples.push_back(make_sample(params, g, f0, E, s));
        if (prepended && !samples.empty()) samples.erase(samples.begin());
    }

    if (opts.exact_refine) {
        parallel_for(samples.size(), [&](std::size_t i) {
            TunnelSample& s = samples[i];
            if (!(s.delta_T <= opts.exact_refine_ceiling)) return;
            try {
                auto [t0s, t1s] = exact_seed(params, s.E, s.tau, s.delta_T);
                MatchingSolution ms = solve_exact(params, s.E, 0.0, t0s, t1s);
                // A capture of a neighbouring root is worse than no
                // refinement; keep the reduced values then.
                if (std::abs(ms.tau - s.tau) > 5.0 * params.alpha ||
                    std::abs(ms.delta_T - s.delta_T) > 5.0 * params.alpha)
                    return;
                s.F0 = suppression_from_solution(params, s.E, 0.0, ms).first;
                s.T = ms.T;
            } catch (const Error&) {
            }
        });
    }

    out.samples = std::move(samples);
    return out;
}

std::pair<double, double> suppression_from_solution(const ModelParams& params,
                                                    double E, double tau,
                                                    double delta_T) {
    auto r = reduced_residual(params, E, tau, delta_T);
    if (!(std::max(std::abs(r[0]), std::abs(r[1])) <= 1e-10))
        throw InvalidSample("not a reduced-system solution at this energy");
    const Trig g = trig(params);
    const double f0 = suppression_closed_form(params.beta, 0.0);
    const double F0 = E * (f0 - 4.0 * params.alpha * g.cotb * std::cos(tau) *
                                    delta_T * std::exp(delta_T));
    return {F0, f0 + 2.0 * (delta_T + 1.0)};
}

std::pair<double, double> suppression_from_solution(const ModelParams& params,
                                                    double E, double nu,
                                                    const MatchingSolution& sol) {
    auto r = exact_residual(params, E, nu, sol.t0, sol.t1);
    if (!(std::max(std::abs(r[0]), std::abs(r[1])) <= 1e-10))
        throw InvalidSample("not an exact-system solution at this energy");
    double F = sol.p0_prime.imag() - E * sol.T;
    if (nu > 0) F -= nu * E * sol.theta;
    return {F, -sol.T};
}

TunnelOptima tunneling_optima(const ModelParams& params, int n_max,
                              const std::vector<TunnelBranch>& solved) {
    const BandSet bands = enumerate_bands(params, n_max);
    const Trig g = trig(params);
    const double f0 = suppression_closed_form(params.beta, 0.0);

    TunnelOptima out;
    const double corr = 1.0 + 2.0 * params.alpha * g.cotb / std::exp(1.0);
    for (int n = bands.n1; n <= std::max(n_max, bands.n1); ++n)
        out.energies.emplace_back(
            n, corr / (8.0 * M_PI * M_PI * (n - 0.5) * (n - 0.5)));
    out.n0_formula =
        static_cast<int>(std::floor(g.tb / (4.0 * M_PI * params.alpha) * f0 *
                                        std::exp(1.0 + 0.5 * f0) +
                                    0.5)) +
        1;

    // A branch produces an F0 minimum only if it reaches the stationarity
    // depth delta_T = -1 - f0/2. On the global branch the dips near
    // tau = 2 pi (k - 1/2) stand in for the unformed local branches k < n1.
    const double threshold = -1.0 - 0.5 * f0;
    int best = -1;
    auto offer = [&](int n, double dip) {
        if (dip <= threshold && (best < 0 || n < best)) best = n;
    };
    for (const auto& br : solved) {
        if (br.samples.empty()) continue;
        if (br.kind == 0) {
            for (int k = 1; k < bands.n1; ++k) {
                double dip = kInf;
                for (const auto& s : br.samples)
                    if (std::abs(s.tau - 2.0 * M_PI * (k - 0.5)) < 0.5 * M_PI)
                        dip = std::min(dip, s.delta_T);
                if (std::isfinite(dip)) offer(k, dip);
            }
        } else {
            double dip = kInf;
            for (const auto& s : br.samples) dip = std::min(dip, s.delta_T);
            offer(br.kind, dip);
        }
    }
    out.n0_observed = best;
    return out;
}

SuppressionCurve glue_branches(const ModelParams& params,
                               const std::vector<TunnelBranch>& branches) {
    params.validate();
    std::vector<const TunnelBranch*> order;
    for (const auto& b : branches)
        if (!b.samples.empty()) order.push_back(&b);
    if (order.empty()) throw CoverageGap("no branch samples supplied");
    std::sort(order.begin(), order.end(),
              [](const TunnelBranch* a, const TunnelBranch* b) {
                  if ((a->kind == 0) != (b->kind == 0)) return a->kind == 0;
                  return a->kind < b->kind;
              });

    std::vector<double> energies;
    for (const auto* b : order)
        for (const auto& s : b->samples) energies.push_back(s.E);
    std::sort(energies.begin(), energies.end());
    energies.erase(std::unique(energies.begin(), energies.end()),
                   energies.end());

    auto sample_at = [](const TunnelBranch* b, double E) -> const TunnelSample* {
        auto it = std::lower_bound(
            b->samples.begin(), b->samples.end(), E,
            [](const TunnelSample& s, double v) { return s.E < v; });
        if (it == b->samples.end() || it->E != E) return nullptr;
        return &*it;
    };

    // Descend in energy, switching branch at the first crossing against the
    // next branch in the order and never switching back.
    SuppressionCurve out;
    std::size_t cur = 0;
    for (auto it = energies.rbegin(); it != energies.rend(); ++it) {
        const double E = *it;
        const TunnelSample* sc = sample_at(order[cur], E);
        const TunnelSample* sn =
            cur + 1 < order.size() ? sample_at(order[cur + 1], E) : nullptr;
        if (sc && sn && sn->F0 < sc->F0) {
            ++cur;
            sc = sn;
            out.switch_energies.push_back(E);
        } else if (!sc) {
            if (!sn)
                throw CoverageGap("no branch covers E = " + std::to_string(E));
            ++cur;
            sc = sn;
            out.switch_energies.push_back(E);
        }
        if (!(sc->F0 > 0))
            throw UnitarityViolation(
                "non-positive suppression exponent at E = " + std::to_string(E));
        out.points.push_back({E, sc->F0, order[cur]->kind});
    }
    std::reverse(out.points.begin(), out.points.end());
    std::reverse(out.switch_energies.begin(), out.switch_energies.end());
    return out;
}

} // namespace wg
