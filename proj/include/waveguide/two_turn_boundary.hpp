#pragma once

#include <utility>
#include <vector>

#include "waveguide/geometry.hpp"

namespace wg {

// Classical trajectory grazing the second turn line, labelled by the
// inclination gamma of the straight motion in the intermediate arm. The touch
// happens at t = 0; N is the transverse excitation carried in from the
// incoming arm.
struct GammaSolution {
    double gamma = 0.0;
    double t0 = 0.0;        // first-turn crossing time
    double phi_prime = 0.0; // transverse phase in the intermediate arm
    double p0 = 0.0;        // longitudinal momentum in the incoming arm
    double N = 0.0;         // E - p0^2 / 2
};

// One local maximum of p0 over gamma at fixed E (small-alpha expansion).
// Present only for 0 < delta_gamma < beta.
struct LocalBranchPoint {
    int n = 0;
    double delta_gamma = 0.0; // beta - gamma at the maximum
    double p0 = 0.0;
    double N = 0.0;
};

// Boundary value and the family achieving it; branch 0 is the grazing family
// at gamma = beta, n >= 1 the n-th local maximum.
struct CriticalPoint {
    double N = 0.0;
    int branch = 0;
};

// Maximal energy run where a single family stays critical. E_hi is +inf for
// the last global run; samples are grid evaluations sorted by E.
struct BoundaryBranch {
    int branch = 0;
    double E_lo = 0.0;
    double E_hi = 0.0;
    std::vector<std::pair<double, double>> samples;
};

struct ClassicalOptimum {
    int n = 0;
    double E_touch = 0.0; // boundary meets its lower envelope here
    double E_min = 0.0;   // nearby local minimum of the boundary
};

// Boundary from the gamma = beta grazing family. Exact above
// local_branch_cutoff; below it the local branches may undercut this value.
// N/E stays between cos^2(beta + alpha) and cos^2(beta - alpha).
double ncr_global(const ModelParams& params, double E);

// Throws OutOfDomain for gamma outside [1e-6, beta].
GammaSolution gamma_solution(const ModelParams& params, double E, double gamma);

// Energy below which p0(gamma) develops local maxima.
double local_branch_cutoff(const ModelParams& params);

// All local maxima present at this energy; empty above local_branch_cutoff.
// Requires alpha < 0.2 (expansion in the first-turn angle).
std::vector<LocalBranchPoint> local_branches(const ModelParams& params, double E);

// Energy where the n-th local branch detaches from the global family
// (delta_gamma_n = 0). Throws NoSignChange when the branch never forms.
double branch_birth_energy(const ModelParams& params, int n);

// Minimum over the global family and the local branches.
CriticalPoint critical_boundary(const ModelParams& params, double E);

// Envelope-touch energies E_touch and boundary minima E_min for
// n = n_lowest .. n_max, where n_lowest is the smallest n whose minimum
// exists. alpha in (0, 0.2) required.
std::vector<ClassicalOptimum> classical_optima(const ModelParams& params,
                                               int n_max = 12);

// Runs of constant critical family over [E_lo, E_hi], switch energies
// refined by bisection. Samples are taken on a log grid of n_samples points.
std::vector<BoundaryBranch> boundary_branches(const ModelParams& params,
                                              double E_lo, double E_hi,
                                              int n_samples = 400);

} // namespace wg
