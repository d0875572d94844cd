#include "waveguide/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "waveguide/numerics.hpp"

namespace wg {

void ModelParams::validate() const {
    if (!(beta > 0.0) || !(beta < std::numbers::pi / 2))
        throw InvalidParams("beta must lie in (0, pi/2)");
    if (!(alpha >= 0.0) || !(alpha < beta))
        throw InvalidParams("alpha must lie in [0, beta)");
    if (!(L > 0.0)) throw InvalidParams("L must be positive");
    if (!(b >= 0.0)) throw InvalidParams("b must be non-negative");
}

ModelParams load_model_params(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw InvalidParams("cannot open config file: " + json_path);
    nlohmann::json doc;
    in >> doc;
    ModelParams p;
    p.beta = doc.at("beta").get<double>();
    p.alpha = doc.value("alpha", 0.0);
    p.L = doc.value("L", 1.0);
    p.b = doc.value("b", 0.0);
    p.validate();
    return p;
}

namespace {

Vec2 rotate(const Vec2& u, double c, double s) {
    // coordinates of u in axes rotated counterclockwise by the angle with
    // cosine c and sine s
    return {c * u.x + s * u.y, -s * u.x + c * u.y};
}

PhasePoint to_intermediate(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.alpha), s = std::sin(p.alpha);
    return {rotate(pt.position, c, s), rotate(pt.velocity, c, s)};
}

PhasePoint from_intermediate(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.alpha), s = std::sin(p.alpha);
    return {rotate(pt.position, c, -s), rotate(pt.velocity, c, -s)};
}

PhasePoint intermediate_to_final(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.beta), s = std::sin(p.beta);
    Vec2 shifted{pt.position.x - p.L, pt.position.y};
    // xi = (x'-L) cos b - y' sin b, eta = (x'-L) sin b + y' cos b
    return {{c * shifted.x - s * shifted.y, s * shifted.x + c * shifted.y},
            {c * pt.velocity.x - s * pt.velocity.y,
             s * pt.velocity.x + c * pt.velocity.y}};
}

PhasePoint final_to_intermediate(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.beta), s = std::sin(p.beta);
    Vec2 unrot{c * pt.position.x + s * pt.position.y,
               -s * pt.position.x + c * pt.position.y};
    return {{unrot.x + p.L, unrot.y},
            {c * pt.velocity.x + s * pt.velocity.y,
             -s * pt.velocity.x + c * pt.velocity.y}};
}

// One-turn corner sits at the origin.
PhasePoint one_turn_to_final(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.beta), s = std::sin(p.beta);
    return {{c * pt.position.x - s * pt.position.y,
             s * pt.position.x + c * pt.position.y},
            {c * pt.velocity.x - s * pt.velocity.y,
             s * pt.velocity.x + c * pt.velocity.y}};
}

PhasePoint one_turn_from_final(const ModelParams& p, const PhasePoint& pt) {
    double c = std::cos(p.beta), s = std::sin(p.beta);
    return {{c * pt.position.x + s * pt.position.y,
             -s * pt.position.x + c * pt.position.y},
            {c * pt.velocity.x + s * pt.velocity.y,
             -s * pt.velocity.x + c * pt.velocity.y}};
}

// logistic and the linear-times-logistic step kernel p(u) = u / (1 + e^u)
double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

double step_kernel(double u) { return u * logistic(-u); }

double step_kernel_d(double u) {
    double s = logistic(u);
    return (1.0 - s) * (1.0 - u * s);
}

} // namespace

PhasePoint transform_frame(const ModelParams& params, const PhasePoint& point,
                           Frame from, Frame to) {
    params.validate();
    if (params.one_turn() &&
        (from == Frame::Intermediate || to == Frame::Intermediate))
        throw InvalidFrame("one-turn model has no intermediate frame");
    if (from == to) return point;

    if (params.one_turn()) {
        return from == Frame::Initial ? one_turn_to_final(params, point)
                                      : one_turn_from_final(params, point);
    }

    PhasePoint cur = point;
    // route through the intermediate frame
    if (from == Frame::Initial) cur = to_intermediate(params, cur);
    if (from == Frame::Final) cur = final_to_intermediate(params, cur);
    if (to == Frame::Initial) cur = from_intermediate(params, cur);
    if (to == Frame::Final) cur = intermediate_to_final(params, cur);
    return cur;
}

// w = C1 eta - C2 xi th(-xi) + C3 x' th(-x') with C1 = cos a cos b,
// C2 = cos a sin b, C3 = sin a. Equals y on the incoming piece, cos(a) y' on
// the middle piece, cos(a) cos(b) eta on the outgoing piece, and is continuous
// everywhere. Smoothening replaces u th(-u) by u sigma(-u/b).
WaveguideEval waveguide_eval(const ModelParams& params, double x, double y) {
    double ca = std::cos(params.alpha), sa = std::sin(params.alpha);
    double cb = std::cos(params.beta), sb = std::sin(params.beta);

    double xp, yp, xi, eta;
    Vec2 grad_xi, grad_eta, grad_xp;
    if (params.one_turn()) {
        xp = 0.0;
        yp = 0.0;
        xi = cb * x - sb * y;
        eta = sb * x + cb * y;
        grad_xi = {cb, -sb};
        grad_eta = {sb, cb};
        grad_xp = {0.0, 0.0};
    } else {
        xp = ca * x + sa * y;
        yp = -sa * x + ca * y;
        xi = cb * (xp - params.L) - sb * yp;
        eta = sb * (xp - params.L) + cb * yp;
        grad_xp = {ca, sa};
        Vec2 grad_yp{-sa, ca};
        grad_xi = {cb * grad_xp.x - sb * grad_yp.x, cb * grad_xp.y - sb * grad_yp.y};
        grad_eta = {sb * grad_xp.x + cb * grad_yp.x, sb * grad_xp.y + cb * grad_yp.y};
    }

    double c1 = params.one_turn() ? cb : ca * cb;
    double c2 = params.one_turn() ? sb : ca * sb;
    double c3 = params.one_turn() ? 0.0 : sa;

    double w, dw_dxi, dw_dxp;
    if (params.b == 0.0) {
        w = c1 * eta - c2 * xi * (xi < 0 ? 1.0 : 0.0) + c3 * xp * (xp < 0 ? 1.0 : 0.0);
        dw_dxi = -c2 * (xi < 0 ? 1.0 : 0.0);
        dw_dxp = c3 * (xp < 0 ? 1.0 : 0.0);
    } else {
        double b = params.b;
        w = c1 * eta - c2 * b * step_kernel(xi / b) + c3 * b * step_kernel(xp / b);
        dw_dxi = -c2 * step_kernel_d(xi / b);
        dw_dxp = c3 * step_kernel_d(xp / b);
    }

    return {w, dw_dxi * grad_xi.x + c1 * grad_eta.x + dw_dxp * grad_xp.x,
            dw_dxi * grad_xi.y + c1 * grad_eta.y + dw_dxp * grad_xp.y};
}

double waveguide_value(const ModelParams& params, double x, double y) {
    return waveguide_eval(params, x, y).w;
}

double SmoothProfile::v(double psi) const {
    return tan_beta * step_kernel(psi);
}

double SmoothProfile::dv(double psi) const {
    return tan_beta * step_kernel_d(psi);
}

double SmoothProfile::d2v(double psi) const {
    double s = logistic(psi);
    return -tan_beta * s * (1.0 - s) * (2.0 + psi * (1.0 - 2.0 * s));
}

SmoothProfile smooth_profile(const ModelParams& params) {
    params.validate();
    if (params.b == 0.0)
        throw SharpModel("smooth profile undefined for a sharp corner");
    SmoothProfile prof;
    prof.tan_beta = std::tan(params.beta);
    prof.psi0 = bracket_root([&prof](double psi) { return prof.dv(psi); }, 0.5, 2.0);
    return prof;
}

} // namespace wg
