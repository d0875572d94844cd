#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "waveguide/errors.hpp"

namespace wg {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using RVec = std::vector<double>;

struct RootConfig {
    double residual_tolerance = 1e-12;
    int max_iterations = 100;
    double jacobian_step = 1e-7;
};

struct OdeConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double event_tolerance = 1e-10;
};

// Newton iteration with a finite-difference Jacobian. Throws
// NonConvergence / SingularJacobian.
CVec complex_newton(const std::function<CVec(const CVec&)>& residual,
                    CVec seed, const RootConfig& cfg = {});

// Bisection with secant acceleration on [lo, hi]; requires a sign change.
double bracket_root(const std::function<double(double)>& f,
                    double lo, double hi, const RootConfig& cfg = {});

struct OdeSample {
    double t;
    RVec state;
};

struct EventRecord {
    int event_index;
    double t;
    RVec state;
};

struct OdeResult {
    std::vector<OdeSample> samples;   // one per accepted step, endpoints included
    std::vector<EventRecord> events;  // sign changes, localized on the dense output
    bool terminated_by_event = false;
};

using OdeField = std::function<void(const RVec& state, RVec& derivative, double t)>;
using EventFn = std::function<double(const RVec& state, double t)>;

// Adaptive embedded Runge-Kutta (Dormand-Prince 5) with dense output. Event
// sign changes are bisected to cfg.event_tolerance in t. If terminal_event is
// a valid event index, integration stops at the first firing of that event;
// terminal_event == -2 stops at the first firing of any event.
OdeResult integrate_ode(const OdeField& field, RVec initial,
                        double t0, double t1,
                        const std::vector<EventFn>& events = {},
                        const OdeConfig& cfg = {},
                        int terminal_event = -1);

template <typename Sol>
struct ScanResult {
    std::vector<std::pair<double, Sol>> points;
    // Set when the branch terminated before covering the grid; holds the
    // first grid value that could not be reached (the BranchLost parameter).
    std::optional<double> branch_lost_at;
};

// Pseudo-arclength-free continuation: each converged solution seeds the next
// grid value. On failure the parameter step is refined by up to
// max_refinements recursive geometric bisections before the branch is
// declared lost. The solver callback must throw on non-convergence.
template <typename Sol>
ScanResult<Sol> continuation_scan(
    const std::function<Sol(double parameter, const Sol& seed)>& solver,
    const std::vector<double>& grid, const Sol& initial_seed,
    int max_refinements = 1) {
    ScanResult<Sol> out;
    if (grid.empty()) return out;

    // Reach `target` from a converged solution at `from`, subdividing the
    // step geometrically when the solver loses the branch.
    std::function<std::optional<Sol>(double, double, const Sol&, int)> step =
        [&](double from, double target, const Sol& seed, int depth) -> std::optional<Sol> {
        try {
            return solver(target, seed);
        } catch (const Error&) {
            if (depth >= max_refinements) return std::nullopt;
            double mid = (from > 0 && target > 0) ? std::sqrt(from * target)
                                                  : 0.5 * (from + target);
            auto at_mid = step(from, mid, seed, depth + 1);
            if (!at_mid) return std::nullopt;
            return step(mid, target, *at_mid, depth + 1);
        }
    };

    Sol current = solver(grid[0], initial_seed); // must converge per contract
    out.points.emplace_back(grid[0], current);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        auto next = step(grid[i - 1], grid[i], current, 0);
        if (!next) {
            out.branch_lost_at = grid[i];
            return out;
        }
        current = *next;
        out.points.emplace_back(grid[i], current);
    }
    return out;
}

// Deterministic static-partition parallel map over [0, n). Results are
// written by index, so output order is independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

} // namespace wg
