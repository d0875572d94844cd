#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "waveguide/geometry.hpp"
#include "waveguide/numerics.hpp"

namespace wg {

// Complex corner-crossing times of the reflected trajectory in the two-turn
// guide, plus the quantities derived from them. The first crossing t0 has
// x'(t0) = 0; the second lies on the far corner line, x'(t1) = 1 + tan(beta)
// y'(t1). Everything is expressed in arm-rescaled units (unit distance
// between the turns); params.L is not consulted.
struct MatchingSolution {
    Complex t0;
    Complex t1;
    Complex phi1;     // t1 cos(alpha) cos(beta)
    double tau = 0;   // Re(t1 - t0), > 0
    double delta_T = 0; // Im(t1 - t0)
    double tau1 = 0;  // Re t1
    double T1 = 0;    // Im t1, < 0 on the reflected branch
    Complex p0_prime;   // drift momentum along the intermediate arm
    Complex x0_prime;   // drift intercept, x'(t) = p0_prime t + x0_prime
    Complex a_prime;    // transverse amplitudes in the intermediate arm
    Complex abar_prime;
    double T = 0;     // conjugate to E: dF/dE = -T
    double theta = 0; // conjugate to N: dF/dN = -theta; +inf at nu = 0
};

// One energy sample of a tunneling branch. tau and delta_T always come from
// the small-alpha reduced system; F0 and T are replaced by exact-system
// values when the branch was solved with exact refinement. T is NaN where
// the incoming-arm matching has no solution (far outside the physical
// window, at e^{delta_T} cos(tau) large and negative).
struct TunnelSample {
    double E = 0;
    double tau = 0;
    double delta_T = 0;
    double F0 = 0;
    double T = 0;
};

// kind 0 labels the branch sweeping the first allowed tau band; kind n >= n1
// labels the branch with n transverse half-periods hugging the n-th band.
struct TunnelBranch {
    int kind = 0;
    std::pair<double, double> band{0, 0}; // allowed tau interval, O(alpha) edges
    std::vector<TunnelSample> samples;    // ascending in E
};

struct SuppressionPoint {
    double E = 0;
    double F0 = 0;
    int kind = 0;
};

// Minimal-suppression envelope over a set of branches.
struct SuppressionCurve {
    std::vector<SuppressionPoint> points; // ascending in E
    std::vector<double> switch_energies;  // ascending
};

// Allowed tau bands of the confinement condition alpha tau sin(tau) <
// tan(beta). n1 is the lowest index with an isolated band; below the first
// band top the condition holds on all of [0, 2 pi (n1 - 1) + dtau_{n1}].
// Band edges carry O(alpha) corrections, so membership checks need an
// O(alpha) margin.
struct BandSet {
    int n1 = 0;
    std::pair<double, double> first_band{0, 0};
    std::vector<std::pair<int, double>> delta_tau; // (n, dtau_n), n = n1..n_max
};

// Energies minimising F0/E branch by branch, E'_n = (1 + 2 alpha cot(beta) /
// e) / (8 pi^2 (n - 1/2)^2), with the two determinations of the lowest index
// n0' whose branch produces a genuine F0 minimum: the closed-form estimate
// and the one observed from solved branches (-1 when none were supplied or
// no branch dips below the threshold delta_T = -1 - f_beta(0)/2).
struct TunnelOptima {
    std::vector<std::pair<int, double>> energies; // (n, E'_n), n = n1..n_max
    int n0_formula = 0;
    int n0_observed = -1;
};

struct BranchOptions {
    // The global branch is dropped below the energy where delta_T first
    // exceeds this (the reduced expansion degrades as e^{delta_T} grows).
    double global_delta_T_cutoff = 1.5;
    // Re-solve each sample through the exact system and store its F0 and T.
    // Samples with delta_T above the ceiling, or whose exact solution lands
    // farther than 5 alpha from the reduced one (a neighbouring-root capture),
    // keep the reduced values.
    bool exact_refine = false;
    double exact_refine_ceiling = 1.5;
    int max_refinements = 26;
};

// Residuals of the two matching conditions at (t0, t1) for transverse
// excitation fraction nu = N/E of the outgoing wave.
std::array<Complex, 2> exact_residual(const ModelParams& params, double E,
                                      double nu, Complex t0, Complex t1);

// Newton solve of the exact system. Throws NonConvergence / SingularJacobian
// from the iteration, BranchViolation when the converged root has T1 >= 0 or
// tau <= 0 (the time-reversed or transmitted family, not the reflected one).
MatchingSolution solve_exact(const ModelParams& params, double E, double nu,
                             Complex t0_seed, Complex t1_seed);

// Seed (t0, t1) for solve_exact built from a reduced solution. Throws
// OutOfDomain where the incoming-arm matching underlying the seed does not
// exist.
std::pair<Complex, Complex> exact_seed(const ModelParams& params, double E,
                                       double tau, double delta_T);

// Residuals of the nu = 0 small-alpha system in (tau, delta_T).
std::array<double, 2> reduced_residual(const ModelParams& params, double E,
                                       double tau, double delta_T);

// Newton solve of the reduced system with divergence guards. Throws
// NonConvergence.
std::pair<double, double> solve_reduced(const ModelParams& params, double E,
                                        double tau_seed, double delta_T_seed);

// Throws InvalidParams unless alpha > 0 (a straight first turn has no bands).
// The O(alpha) edge accuracy degrades as alpha grows.
BandSet enumerate_bands(const ModelParams& params, int n_max = 16);

// Continuation of branch `kind` over the ascending energy grid. The global
// branch is traced downward from the high-energy asymptote (tau = 1/sqrt(2E),
// delta_T = -1); local branches are traced upward from the low-energy one
// (tau = 2 pi n, delta_T = ln(tan(beta)/alpha)). A lost branch truncates the
// domain; samples outside the branch band (with 3 alpha margin) or violating
// confinement are treated as lost.
TunnelBranch solve_branch(const ModelParams& params, int kind,
                          const std::vector<double>& E_grid,
                          const BranchOptions& opts = {});

// (F0, dF0/dE) of a reduced sample. Throws InvalidSample unless (tau,
// delta_T) solves the reduced system at E to 1e-10.
std::pair<double, double> suppression_from_solution(const ModelParams& params,
                                                    double E, double tau,
                                                    double delta_T);

// (F, dF/dE = -T) of an exact solution through the action route. Throws
// InvalidSample unless the solution satisfies the exact system to 1e-10.
std::pair<double, double> suppression_from_solution(const ModelParams& params,
                                                    double E, double nu,
                                                    const MatchingSolution& sol);

TunnelOptima tunneling_optima(const ModelParams& params, int n_max = 12,
                              const std::vector<TunnelBranch>& solved = {});

// Pointwise minimum of F0 over the branches, switching branch at the first
// crossing while descending in energy and never switching back. Throws
// UnitarityViolation when the winning F0 is not positive, CoverageGap when
// no branch covers some grid energy.
SuppressionCurve glue_branches(const ModelParams& params,
                               const std::vector<TunnelBranch>& branches);

} // namespace wg
