#pragma once

#include <complex>

#include "waveguide/geometry.hpp"

namespace wg {

// Complex-trajectory data for reflection in the single-turn guide, computed at
// unit energy. nu = N/E is the transverse excitation fraction; the rescaling
// symmetry restores general energy, F(E, N) = E * f at nu = N/E, so dF/dE = -T
// and dF/dN = -theta with the T, theta stored here.
struct OneTurnSolution {
    double nu = 0.0;
    double T1 = 0.0;        // matching time t1 = i*T1, always <= 0
    double T = 0.0;
    double theta = 0.0;     // +inf at nu = 0 (theta*nu -> 0 there)
    double p0 = 0.0;        // incoming momentum sqrt(2(1 - nu))
    std::complex<double> a; // incoming oscillator amplitude
    double f = 0.0;         // suppression exponent per unit energy
};

// Boundary of classically allowed transmission: nu < cos^2(beta) reflects only
// with exponential suppression, nu above it passes classically.
double nu_critical(double beta);

// f as an explicit function of nu on [0, nu_critical]; vanishes at the upper
// endpoint. Throws OutOfDomain outside the interval.
double suppression_closed_form(double beta, double nu);

// Same exponent via the matching route: T1 from inverting the transverse
// energy at the turn line (branch with T1 < 0), then T, theta from the two
// junction relations. Cross-checked against suppression_closed_form to 1e-10.
// Throws OutOfDomain, BranchViolation.
OneTurnSolution solve_matching(double beta, double nu);

// Tangent trajectory of unit energy grazing the corner at t = 0.
Vec2 critical_trajectory(double beta, double t);

} // namespace wg
