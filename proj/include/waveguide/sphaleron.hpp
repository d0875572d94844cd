#pragma once

#include <utility>
#include <vector>

#include "waveguide/classical.hpp"
#include "waveguide/geometry.hpp"
#include "waveguide/numerics.hpp"

namespace wg {

// Unstable periodic orbit of the smoothened one-turn guide: it sits on the
// crest of the corner profile, xi = b psi0, while eta oscillates freely with
// frequency cos(beta). All sphaleron routines require alpha = 0 and b > 0.
struct SphaleronOrbit {
    double A_eta = 0.0;   // transverse amplitude
    double phi_eta = 0.0; // transverse phase, radians
    double psi0 = 0.0;    // profile crest in units of b
    double b = 0.0;       // smoothening width
    double omega = 0.0;   // transverse frequency cos(beta)
    double eta_offset = 0.0; // b v(psi0)
    double residual = 0.0;   // worst equations-of-motion defect over a period

    double xi() const { return b * psi0; }
    double eta(double t) const;
    RVec state(double t) const; // (xi, eta, dxi/dt, deta/dt)
};

// Linearization of the longitudinal motion about the orbit. In the half-phase
// s = (omega t + phi_eta)/2 the deviation obeys a Mathieu equation with
// parameter q; sin(2s) < 0 gives exponential growth.
struct LinearMode {
    double A = 0.0;        // deviation amplitude at the orbit, |A| << 1
    double mathieu_q = 0.0;
    double s1 = 0.0;       // half-phase where the deviation reaches order one
    std::vector<std::pair<double, double>> W; // sampled growth exponent (s, W)
};

// Trajectory that comes in from xi -> -infinity, lingers on the orbit for a
// finite stretch and leaves the way it came, symmetric about mirror_time.
// Samples hold (xi, eta, dxi/dt, deta/dt) in the outgoing-arm frame.
struct ReflectedOrbit {
    std::vector<OdeSample> samples;
    LaunchSpec incoming;     // asymptotic sinusoid, start_x = -10 clock
    double q = 0.0;
    double s1 = 0.0;
    double mirror_time = 0.0;
    double min_xi = 0.0;  // turn-line distance of the incoming touching crest
    double max_rho = 0.0; // max |eta - orbit eta| / b within |psi - psi0| <= 2
};

struct EscapeReport {
    double time = 0.0; // from the perturbation instant to |psi - psi0| = 6
    int periods = 0;   // whole transverse periods elapsed before escape
    int direction = 0; // +1 toward xi -> +infinity, -1 toward xi -> -infinity
};

struct InstabilityReport {
    double q = 0.0;
    EscapeReport plus;  // delta psi = +1e-6
    EscapeReport minus; // delta psi = -1e-6
};

// A_eta <= 0 selects the unit-energy amplitude sqrt(2)/cos(beta). Verifies
// the constructed orbit against the full field equations over one period;
// throws ResidualTooLarge above 1e-8.
SphaleronOrbit build_sphaleron(const ModelParams& params, double A_eta = 0.0,
                               double phi_eta = 0.0);

// Right-hand side of the corner equations of motion in the outgoing-arm
// frame, state (xi, eta, dxi/dt, deta/dt). Identical to the full waveguide
// field at alpha = 0.
OdeField corner_field(const ModelParams& params);

LinearMode linear_mode(const SphaleronOrbit& orbit, double s1);

// Growth exponent of the Mathieu deviation. For s in [0, pi/2] returns
// sqrt(2q) times the integral of sqrt(sin 2s') from pi/4; for s in [-pi/2, 0)
// returns the continuation magnitude |W(s) - W(0)| that sets the exponential
// growth toward negative s. Throws SmallQ at q <= 25, OutOfDomain beyond
// |s| > pi/2.
double wkb_exponent(const LinearMode& mode, double s);

// Slope of the linearized-equation log-growth against the WKB exponent,
// measured between s_a and s_b after stripping the 1/sqrt(W') prefactor.
// Equals 1 in the WKB limit.
double growth_slope_ratio(const LinearMode& mode, double s_a = -0.55,
                          double s_b = -0.25);

// Signed value of the parabola-refined local maximum of xi(t) closest to
// zero among crests below `cut`; the capture plateau sits above the cut.
// Successive free crests advance by ~ cos(beta)*vx*2*pi, so only the grazing
// one lands near the line. Throws InvalidSample when no crest qualifies.
double crest_gap(const std::vector<double>& t, const std::vector<double>& xi,
                 double cut);

// Builds the reflected trajectory by integrating the full corner equations
// backward from a deviation seeded to reach order one at half-phase s1 < 0,
// then mirroring about the symmetry instant. Requires b <= 1e-2. Throws
// NoEscape when the deviation never reaches the free region.
ReflectedOrbit reflected_orbit(const ModelParams& params, double s1 = -0.5,
                               double A_eta = 0.0);

// Log-log slope of the touching-crest distance against b, each run relaunched
// through the smooth integrator from the extracted asymptotic state.
double min_xi_scaling_exponent(const ModelParams& params, double s1 = -0.5,
                               const std::vector<double>& bs = {1e-3, 4e-3});

// Kicks the orbit by delta psi = +-1e-6 at the start of an unstable
// half-phase lobe and follows the full equations until |psi - psi0| = 6.
// Throws NoGrowth if either sign stays bounded for 20 transverse periods.
InstabilityReport instability_check(const ModelParams& params, double A_eta,
                                    double b);

} // namespace wg
