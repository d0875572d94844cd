#pragma once

#include <string>

#include "waveguide/errors.hpp"

namespace wg {

// Waveguide with one or two sharp or smoothened turns. alpha == 0 selects the
// single-turn model: one corner of angle beta at the origin. For alpha > 0 the
// guide bends by alpha at the origin and by beta at distance L along the
// intermediate axis. All lengths are in rescaled units (transverse frequency 1
// in the incoming arm).
struct ModelParams {
    double alpha = 0.0; // first-turn angle, radians
    double beta = 0.0;  // second-turn angle, radians
    double L = 1.0;     // distance between turns
    double b = 0.0;     // smoothening width, 0 = sharp corners

    bool one_turn() const { return alpha == 0.0; }
    void validate() const; // throws InvalidParams
};

ModelParams load_model_params(const std::string& json_path);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Coordinate frames: Initial (x,y) aligned with the incoming arm, Intermediate
// (x',y') aligned with the middle arm, Final (xi,eta) aligned with the
// outgoing arm. The one-turn model has no Intermediate frame; its Final frame
// is the beta-rotation about the origin.
enum class Frame { Initial, Intermediate, Final };

struct PhasePoint {
    Vec2 position;
    Vec2 velocity;
};

PhasePoint transform_frame(const ModelParams& params, const PhasePoint& point,
                           Frame from, Frame to);

// Transverse displacement w(x,y); the potential is w^2/2. Piecewise linear
// map glued continuously along the turn lines; for b > 0 the step functions
// are replaced by logistic profiles of width b.
double waveguide_value(const ModelParams& params, double x, double y);

struct WaveguideEval {
    double w;
    double wx; // dw/dx
    double wy; // dw/dy
};

// Value and lab-frame partial derivatives. At b = 0 the gradient is the
// one-sided limit of the active piece; it jumps across the turn lines.
WaveguideEval waveguide_eval(const ModelParams& params, double x, double y);

// Profile of the smoothened corner, v(psi) = psi tan(beta) / (1 + e^psi).
// psi0 is the location of the maximum. Derivative forms are arranged around
// the logistic s = 1/(1+e^-psi) so they stay finite for large |psi|.
struct SmoothProfile {
    double tan_beta = 0.0;
    double psi0 = 0.0;

    double v(double psi) const;
    double dv(double psi) const;
    double d2v(double psi) const;
};

SmoothProfile smooth_profile(const ModelParams& params); // throws SharpModel at b=0

} // namespace wg
