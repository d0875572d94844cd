#pragma once

#include <vector>

#include "waveguide/geometry.hpp"
#include "waveguide/numerics.hpp"

namespace wg {

enum class Region { Initial, Intermediate, Final };

struct ClassicalState {
    Region region = Region::Initial;
    Vec2 position; // lab frame
    Vec2 velocity; // lab frame
    double time = 0.0;
};

enum class OutcomeKind { Reflected, Transmitted, Undecided };

struct TouchEvent {
    double time = 0.0;
    Vec2 position; // lab frame
};

struct TrajectoryOutcome {
    OutcomeKind kind = OutcomeKind::Undecided;
    // Closest approaches to the turn lines (local maxima of the crossing
    // coordinate within 0.05 of the line), plus genuine tangent touches.
    std::vector<TouchEvent> touch_events;
    ClassicalState final_state;
};

// Incoming asymptotic state: x(0) = start_x, ballistic momentum
// sqrt(2(E-N)), transverse oscillator y = sqrt(2N) sin(t + phi).
struct LaunchSpec {
    double E = 1.0;
    double N = 0.0;
    double phi = 0.0;
    double start_x = -10.0;

    void validate() const; // throws InvalidParams
};

// Piecewise-exact propagation through a sharp guide (b = 0). Segments are
// ballistic + sinusoid in each arm's frame (transverse frequencies 1, cos a,
// cos a cos b); region crossings are located on the analytic crossing
// coordinate. A crossing with normal speed below 1e-6 sqrt(2E), or a local
// maximum of the crossing coordinate within 1e-10 below the line, counts as a
// tangent touch and classifies the trajectory Reflected. Crossing the last
// turn line transversally classifies it Transmitted.
TrajectoryOutcome propagate_sharp(const ModelParams& params,
                                  const LaunchSpec& launch,
                                  double max_time = 1e4);

// Largest value over the incoming trajectory's approach maxima of the final
// turn-line coordinate before its first crossing (0 = exact tangency,
// -infinity when the line is crossed on the first swing). Continuous in phi;
// the ingredient of the reflection classifier below.
double gap_of_phase(const ModelParams& params, double E, double N, double phi);

// True when some oscillator phase yields a trajectory tangent to the final
// turn line: the phase grid is scanned and the best peaks are refined by
// golden-section search; tangency is declared at gap >= -1e-10.
bool reflection_exists(const ModelParams& params, double E, double N,
                       int phase_samples = 1024);

// Brute-force critical excitation: bisects N between a reflecting and a
// non-reflecting value until the bracket is narrower than n_tolerance.
// Returns a sentinel 1.01*E when no reflection is found even at N = E
// (the NoReflectionFound condition).
double oracle_boundary(const ModelParams& params, double E, int phase_samples,
                       double n_tolerance);

struct SmoothTrajectory {
    TrajectoryOutcome outcome;
    std::vector<OdeSample> samples; // state (x, y, vx, vy) per accepted step
};

// Integrates x'' = -w w_x, y'' = -w w_y at finite smoothening. Classified
// Reflected when the trajectory returns past start_x moving left, Transmitted
// when the outgoing-arm coordinate exceeds |start_x|. The touch event records
// the corner pass: the point of minimal |d(xi)/dt| inside |xi| < 0.5.
SmoothTrajectory propagate_smooth(const ModelParams& params,
                                  const LaunchSpec& launch,
                                  double max_time = 1e4,
                                  const OdeConfig& cfg = OdeConfig{1e-10, 1e-12, 0.02, 1e-10});

// Signed xi at the corner pass of a smooth trajectory (see propagate_smooth);
// quadratically interpolated between samples. Throws InvalidSample when the
// trajectory never enters |xi| < 0.5.
double corner_approach_xi(const ModelParams& params,
                          const std::vector<OdeSample>& samples);

} // namespace wg
