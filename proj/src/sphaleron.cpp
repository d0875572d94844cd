#include "waveguide/sphaleron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace wg {

namespace {

constexpr double kPi = std::numbers::pi;

struct CornerDynamics {
    SmoothProfile prof;
    double cb;
    double b;
};

CornerDynamics corner_dynamics(const ModelParams& params) {
    params.validate();
    if (!params.one_turn())
        throw InvalidParams("smoothened-turn dynamics require alpha = 0");
    return {smooth_profile(params), std::cos(params.beta), params.b};
}

double sqrt_pos(double x) { return std::sqrt(std::max(0.0, x)); }

} // namespace

double SphaleronOrbit::eta(double t) const {
    return A_eta * std::sin(omega * t + phi_eta) + eta_offset;
}

RVec SphaleronOrbit::state(double t) const {
    double ph = omega * t + phi_eta;
    return {b * psi0, A_eta * std::sin(ph) + eta_offset, 0.0,
            A_eta * omega * std::cos(ph)};
}

OdeField corner_field(const ModelParams& params) {
    auto dyn = corner_dynamics(params);
    return [dyn](const RVec& s, RVec& d, double) {
        double psi = s[0] / dyn.b;
        double w = dyn.cb * (s[1] - dyn.b * dyn.prof.v(psi));
        d[0] = s[2];
        d[1] = s[3];
        d[2] = w * dyn.cb * dyn.prof.dv(psi);
        d[3] = -w * dyn.cb;
    };
}

SphaleronOrbit build_sphaleron(const ModelParams& params, double A_eta,
                               double phi_eta) {
    auto dyn = corner_dynamics(params);
    if (A_eta < 0.0)
        throw InvalidParams("transverse amplitude must be non-negative");

    SphaleronOrbit orb;
    orb.A_eta = A_eta > 0.0 ? A_eta : std::sqrt(2.0) / dyn.cb; // unit energy
    orb.phi_eta = phi_eta;
    orb.psi0 = dyn.prof.psi0;
    orb.b = params.b;
    orb.omega = dyn.cb;
    orb.eta_offset = params.b * dyn.prof.v(dyn.prof.psi0);

    // The eta equation is solved exactly; the xi equation is sourced only by
    // the leftover slope of the profile at the numerical crest, so the defect
    // is algebraic and needs no integration to expose.
    auto field = corner_field(params);
    RVec deriv(4);
    double worst = 0.0;
    const double period = 2.0 * kPi / orb.omega;
    for (int k = 0; k < 64; ++k) {
        double t = period * k / 64.0;
        field(orb.state(t), deriv, t);
        double target = -orb.omega * orb.omega * orb.A_eta *
                        std::sin(orb.omega * t + orb.phi_eta);
        worst = std::max(worst, std::hypot(deriv[2], deriv[3] - target));
    }
    orb.residual = worst;
    if (!(worst <= 1e-8))
        throw ResidualTooLarge("orbit defect " + std::to_string(worst) +
                               " against the field equations");
    return orb;
}

LinearMode linear_mode(const SphaleronOrbit& orbit, double s1) {
    SmoothProfile prof;
    prof.tan_beta = sqrt_pos(1.0 - orbit.omega * orbit.omega) / orbit.omega;
    prof.psi0 = orbit.psi0;

    LinearMode mode;
    mode.mathieu_q = -2.0 * prof.d2v(orbit.psi0) * orbit.A_eta / orbit.b;
    mode.s1 = s1;
    if (mode.mathieu_q > 25.0) {
        mode.A = std::exp(-wkb_exponent(mode, std::max(s1, -kPi / 2)));
        const int n = 129;
        for (int i = 0; i < n; ++i) {
            double s = s1 + (kPi / 2 - s1) * i / (n - 1);
            mode.W.emplace_back(s, wkb_exponent(mode, s));
        }
    }
    return mode;
}

double wkb_exponent(const LinearMode& mode, double s) {
    if (!(mode.mathieu_q > 25.0))
        throw SmallQ("WKB regime needs q > 25, got " +
                     std::to_string(mode.mathieu_q));
    if (!(s >= -kPi / 2 && s <= kPi / 2))
        throw OutOfDomain("half-phase outside [-pi/2, pi/2]");

    boost::math::quadrature::tanh_sinh<double> quad;
    double root = std::sqrt(2.0 * mode.mathieu_q);
    if (s >= 0.0) {
        if (std::abs(s - kPi / 4) < 1e-15) return 0.0;
        double lo = std::min(s, kPi / 4), hi = std::max(s, kPi / 4);
        double val = quad.integrate(
            [](double u) { return sqrt_pos(std::sin(2.0 * u)); }, lo, hi);
        return s >= kPi / 4 ? root * val : -root * val;
    }
    double val = quad.integrate(
        [](double u) { return sqrt_pos(-std::sin(2.0 * u)); }, s, 0.0);
    return root * val;
}

double growth_slope_ratio(const LinearMode& mode, double s_a, double s_b) {
    if (!(s_a < s_b) || !(s_b < 0.0))
        throw InvalidParams("growth window must satisfy s_a < s_b < 0");
    double ga = wkb_exponent(mode, s_a);
    double gb = wkb_exponent(mode, s_b);

    const double q = mode.mathieu_q;
    OdeField field = [q](const RVec& y, RVec& d, double s) {
        d[0] = y[1];
        d[1] = -2.0 * q * std::sin(2.0 * s) * y[0];
    };
    OdeConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    cfg.max_step = 0.01;
    // Backward from the turning point one growing mode dominates; strip the
    // 1/sqrt(W') WKB prefactor before comparing slopes.
    auto log_amp = [&](double s) {
        RVec end = integrate_ode(field, {1.0, 0.0}, 0.0, s, {}, cfg)
                       .samples.back()
                       .state;
        double wprime = std::sqrt(2.0 * q) * sqrt_pos(-std::sin(2.0 * s));
        return std::log(std::abs(end[0]) * std::sqrt(wprime));
    };
    return (log_amp(s_a) - log_amp(s_b)) / (ga - gb);
}

double crest_gap(const std::vector<double>& t, const std::vector<double>& xi,
                 double cut) {
    if (t.size() != xi.size())
        throw InvalidParams("mismatched crest series lengths");
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 1; i + 1 < xi.size(); ++i) {
        if (!(xi[i] >= xi[i - 1] && xi[i] >= xi[i + 1])) continue;
        if (!(xi[i] < cut)) continue;
        double u0 = t[i - 1] - t[i], u2 = t[i + 1] - t[i];
        double y0 = xi[i - 1] - xi[i], y2 = xi[i + 1] - xi[i];
        double denom = u0 * u2 * (u0 - u2);
        double value = xi[i];
        if (std::abs(denom) > 0.0) {
            double a = (y0 * u2 - y2 * u0) / denom;
            double c = (y2 * u0 * u0 - y0 * u2 * u2) / denom;
            if (a < 0.0) value = xi[i] - c * c / (4.0 * a);
        }
        if (std::abs(value) < std::abs(best)) best = value;
        found = true;
    }
    if (!found) throw InvalidSample("no crest below the plateau cut");
    return best;
}

ReflectedOrbit reflected_orbit(const ModelParams& params, double s1,
                               double A_eta) {
    auto dyn = corner_dynamics(params);
    if (!(params.b <= 1e-2))
        throw InvalidParams("reflected orbit construction needs b <= 1e-2");
    if (!(s1 < 0.0) || !(s1 > -1.5))
        throw InvalidParams("escape half-phase must lie in (-1.5, 0)");

    SphaleronOrbit orb = build_sphaleron(params, A_eta, 0.0);
    const double q =
        -2.0 * dyn.prof.d2v(orb.psi0) * orb.A_eta / orb.b;
    const double cb = orb.omega, b = orb.b;
    const double period = 2.0 * kPi / cb;

    // Deviation that reaches order one at s1, seeded a tenth of a half-phase
    // unit later where it is still small; sign picks the incoming side.
    double kappa = std::sqrt(2.0 * q * std::max(0.0, -std::sin(2.0 * s1)));
    if (!(kappa > 0.0))
        throw InvalidParams("s1 must sit inside an unstable lobe");
    double s_seed = s1 + 0.1;
    double dpsi = -std::exp(-kappa * 0.1);
    double dpsi_ds = -kappa * dpsi;
    double t_seed = 2.0 * s_seed / cb;
    double psi_seed = orb.psi0 + dpsi;
    double vxi_seed = b * (cb / 2.0) * dpsi_ds;
    RVec y0 = {b * psi_seed,
               orb.A_eta * std::sin(cb * t_seed) + b * dyn.prof.v(psi_seed),
               vxi_seed,
               orb.A_eta * cb * std::cos(cb * t_seed) +
                   dyn.prof.dv(psi_seed) * vxi_seed};

    auto field = corner_field(params);
    OdeConfig cfg;
    cfg.max_step = 0.005;
    std::vector<EventFn> exit_line{
        [](const RVec& s, double) { return s[0] + 0.45; }};
    auto back = integrate_ode(field, y0, t_seed, t_seed - 20.0 * period,
                              exit_line, cfg, 0);
    if (!back.terminated_by_event || back.events.empty()) {
        double dev = 0.0;
        for (const auto& s : back.samples)
            dev = std::max(dev, std::abs(s.state[0] / b - orb.psi0));
        throw NoEscape("deviation reached only " + std::to_string(dev) +
                       " of psi0 without leaving the corner");
    }

    ReflectedOrbit out;
    out.q = q;
    out.s1 = s1;
    out.mirror_time = kPi / (2.0 * cb);

    for (auto it = back.samples.rbegin(); it != back.samples.rend(); ++it)
        out.samples.push_back(*it);
    auto fwd = integrate_ode(field, y0, t_seed, out.mirror_time, {}, cfg);
    for (std::size_t i = 1; i < fwd.samples.size(); ++i)
        out.samples.push_back(fwd.samples[i]);
    // The deviation has decayed below machine precision at the symmetry
    // instant, so the mirrored half glues on as an exact solution.
    for (std::size_t i = out.samples.size(); i-- > 0;) {
        const auto& s = out.samples[i];
        if (s.t >= out.mirror_time - 1e-12) continue;
        out.samples.push_back({2.0 * out.mirror_time - s.t,
                               {s.state[0], s.state[1], -s.state[2],
                                -s.state[3]}});
    }

    const auto& ev = back.events.front();
    PhasePoint fin{{ev.state[0], ev.state[1]}, {ev.state[2], ev.state[3]}};
    PhasePoint ini = transform_frame(params, fin, Frame::Final, Frame::Initial);
    double y = ini.position.y, vy = ini.velocity.y;
    double x = ini.position.x, vx = ini.velocity.x;
    if (!(vx > 0.0))
        throw NoEscape("free-region exit is not moving along the incoming arm");
    double N = 0.5 * (vy * vy + y * y);
    double E = N + 0.5 * vx * vx;
    double tau0 = ev.t + (-10.0 - x) / vx;
    double phi_abs = std::atan2(y, vy) - ev.t;
    out.incoming.E = E;
    out.incoming.N = N;
    out.incoming.phi = std::remainder(phi_abs + tau0, 2.0 * kPi);
    out.incoming.start_x = -10.0;
    out.incoming.validate();

    // The touching crest sits between the exit event and capture, so it is
    // read off the free sinusoid, extended one swing past the event.
    double amp = std::sqrt(2.0 * N);
    double sbeta = std::sin(params.beta);
    const int n_free = 4200;
    std::vector<double> ts(n_free), xs(n_free);
    for (int i = 0; i < n_free; ++i) {
        double frac = double(i) / (n_free - 1);
        double t = ev.t - 6.0 * kPi + 8.4 * kPi * frac;
        ts[i] = t;
        xs[i] = dyn.cb * (x + vx * (t - ev.t)) -
                sbeta * amp * std::sin(t + phi_abs);
    }
    out.min_xi = std::abs(
        crest_gap(ts, xs, std::numeric_limits<double>::infinity()));

    double worst = 0.0;
    for (const auto& s : out.samples) {
        if (std::abs(s.state[0] / b - orb.psi0) > 2.0) continue;
        worst = std::max(worst, std::abs(s.state[1] - orb.eta(s.t)) / b);
    }
    out.max_rho = worst;
    if (!(worst <= 20.0 * std::sqrt(b)))
        throw ResidualTooLarge("transverse correction " +
                               std::to_string(worst) +
                               " is not O(sqrt(b)) small");
    return out;
}

double min_xi_scaling_exponent(const ModelParams& params, double s1,
                               const std::vector<double>& bs) {
    if (bs.size() < 2)
        throw InvalidParams("scaling fit needs at least two widths");
    std::vector<double> lx(bs.size());
    parallel_for(bs.size(), [&](std::size_t i) {
        ModelParams p = params;
        p.b = bs[i];
        ReflectedOrbit orb = reflected_orbit(p, s1);
        auto run = propagate_smooth(p, orb.incoming, 2000.0);
        double cb = std::cos(p.beta), sb = std::sin(p.beta);
        // A positive grazing gap captures without leaving a crest in the
        // samples, so the gap is read from the sinusoid extrapolated off the
        // last sample before corner contact (the force there is e^{xi/b}
        // suppressed, far below double precision).
        std::size_t last_free = run.samples.size();
        for (std::size_t k = 0; k < run.samples.size(); ++k) {
            double xi = cb * run.samples[k].state[0] -
                        sb * run.samples[k].state[1];
            if (xi >= -0.45) break;
            last_free = k;
        }
        if (last_free >= run.samples.size())
            throw InvalidSample("relaunched trajectory never reaches the turn");
        const auto& fs = run.samples[last_free];
        double amp = std::hypot(fs.state[1], fs.state[3]);
        double phi = std::atan2(fs.state[1], fs.state[3]) - fs.t;
        const int n_free = 4200;
        std::vector<double> ts(n_free), xs(n_free);
        for (int k = 0; k < n_free; ++k) {
            double t = fs.t - 2.0 * kPi + 8.0 * kPi * double(k) / (n_free - 1);
            ts[k] = t;
            xs[k] = cb * (fs.state[0] + fs.state[2] * (t - fs.t)) -
                    sb * amp * std::sin(t + phi);
        }
        lx[i] = std::log(std::abs(
            crest_gap(ts, xs, std::numeric_limits<double>::infinity())));
    });

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        mx += std::log(bs[i]);
        my += lx[i];
    }
    mx /= double(bs.size());
    my /= double(bs.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        double dx = std::log(bs[i]) - mx;
        num += dx * (lx[i] - my);
        den += dx * dx;
    }
    return num / den;
}

InstabilityReport instability_check(const ModelParams& params, double A_eta,
                                    double b) {
    ModelParams p = params;
    p.b = b;
    SphaleronOrbit orb = build_sphaleron(p, A_eta, 0.0);

    InstabilityReport rep;
    rep.q = linear_mode(orb, -0.5).mathieu_q;

    auto field = corner_field(p);
    const double period = 2.0 * kPi / orb.omega;
    const double t_start = (kPi + 0.04) / orb.omega; // unstable lobe onset

    auto run_sign = [&](double dpsi) {
        RVec y0 = orb.state(t_start);
        y0[0] += b * dpsi;
        std::vector<EventFn> escape{[&orb, b](const RVec& s, double) {
            return std::abs(s[0] / b - orb.psi0) - 6.0;
        }};
        auto res = integrate_ode(field, y0, t_start,
                                 t_start + 20.0 * period, escape, {}, 0);
        if (!res.terminated_by_event || res.events.empty())
            throw NoGrowth("perturbation " + std::to_string(dpsi) +
                           " stayed bounded for 20 transverse periods");
        EscapeReport r;
        r.time = res.events.front().t - t_start;
        r.periods = static_cast<int>(std::floor(r.time / period));
        r.direction = res.events.front().state[0] / b > orb.psi0 ? 1 : -1;
        return r;
    };
    rep.plus = run_sign(1e-6);
    rep.minus = run_sign(-1e-6);
    return rep;
}

} // namespace wg
