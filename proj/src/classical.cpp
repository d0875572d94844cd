#include "waveguide/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wg {

namespace {

constexpr double kTangencyWindow = 1e-10; // graze-from-below window on the line coordinate
constexpr double kNearLineWindow = 0.05;  // approach maxima recorded within this distance
const double kInf = std::numeric_limits<double>::infinity();

// Boundary-line coordinate along an analytic segment: u(t) = c0 + c1 t +
// R sin(Om t + ph). Ballistic drift plus transverse oscillation, in absolute
// time.
struct CrossingFn {
    double c0, c1, R, Om, ph;
};

double cf_val(const CrossingFn& f, double t) {
    return f.c0 + f.c1 * t + f.R * std::sin(f.Om * t + f.ph);
}

double cf_dot(const CrossingFn& f, double t) {
    return f.c1 + f.R * f.Om * std::cos(f.Om * t + f.ph);
}

enum class SegmentEnd { Root, Tangency, NoRoot, Horizon };

struct SegmentScan {
    SegmentEnd end = SegmentEnd::NoRoot;
    double t = 0.0;    // root / tangency / horizon time
    double gap = -kInf; // largest negative local maximum seen
    std::vector<std::pair<double, double>> approaches; // (t, u) near the line
};

// Walks the closed-form critical points of u, in time order, until the first
// root or a proof that none exists. Maxima form an arithmetic sequence
// (successive maxima differ by exactly c1 * period), which allows skipping
// deeply submerged cycles, so slow drifts cost O(1) instead of O(t_root).
SegmentScan scan_segment(const CrossingFn& f, double t_start, double t_horizon,
                         double tangency_speed) {
    SegmentScan out;
    if (cf_val(f, t_start) >= 0.0) { // degenerate launch on the far side
        out.end = SegmentEnd::Root;
        out.t = t_start;
        return out;
    }

    auto bisect = [&f](double a, double b) { // u(a) < 0 <= u(b), u monotone
        for (int i = 0; i < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++i) {
            double m = 0.5 * (a + b);
            (cf_val(f, m) < 0.0 ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    auto finish_root = [&](double a, double b) {
        out.t = bisect(a, b);
        out.end = std::abs(cf_dot(f, out.t)) < tangency_speed
                      ? SegmentEnd::Tangency
                      : SegmentEnd::Root;
    };

    const double rw = f.R * f.Om;
    if (f.R == 0.0 || std::abs(rw) <= std::abs(f.c1)) {
        // u' never changes sign
        if (f.c1 <= 0.0) return out; // NoRoot: u stays below its start value + |R| drift... it is monotone non-increasing
        double t_up = (std::abs(f.R) + 1.0 - f.c0) / f.c1; // u(t_up) >= 1
        if (t_up <= t_horizon) {
            finish_root(t_start, std::max(t_up, t_start));
        } else if (cf_val(f, t_horizon) >= 0.0) {
            finish_root(t_start, t_horizon);
        } else {
            out.end = SegmentEnd::Horizon;
            out.t = t_horizon;
        }
        return out;
    }

    const double two_pi = 2.0 * std::numbers::pi;
    double dth = std::acos(std::clamp(-f.c1 / rw, -1.0, 1.0)); // in [0, pi]
    double delta = f.c1 * two_pi / f.Om; // increment between successive maxima
    double window =
        std::clamp(50.0 * std::abs(delta), kTangencyWindow, kNearLineWindow);

    // Critical angles are 2 pi k +- dth; index them so that even j are the
    // -dth members. Maxima sit where R sin(theta) > 0.
    long long base_k =
        static_cast<long long>(std::floor((f.Om * t_start + f.ph) / two_pi)) - 2;
    auto theta_of = [&](long long j) {
        return two_pi * static_cast<double>(base_k + (j / 2)) +
               ((j % 2 != 0) ? dth : -dth);
    };
    long long j = 0;
    while ((theta_of(j) - f.ph) / f.Om <= t_start) ++j;

    double t_prev = t_start;
    while (true) {
        double t_c = (theta_of(j) - f.ph) / f.Om;
        bool clipped = t_c > t_horizon;
        if (clipped) t_c = t_horizon;
        double u_c = cf_val(f, t_c);
        if (u_c >= 0.0) {
            finish_root(t_prev, t_c);
            return out;
        }
        if (clipped) {
            out.end = SegmentEnd::Horizon;
            out.t = t_horizon;
            return out;
        }
        bool is_max = (f.R > 0.0) == (j % 2 != 0);
        if (is_max) {
            out.gap = std::max(out.gap, u_c);
            if (u_c >= -kTangencyWindow) {
                out.end = SegmentEnd::Tangency;
                out.t = t_c;
                return out;
            }
            if (u_c >= -window) out.approaches.emplace_back(t_c, u_c);
            if (f.c1 <= 0.0) return out; // NoRoot: later maxima only sink
            if (u_c < -(window + 3.0 * delta)) {
                auto skip = static_cast<long long>(
                    std::floor((-u_c - window - 2.0 * delta) / delta));
                if (skip > 0) {
                    t_prev = t_c;
                    j += 2 * skip;
                    continue;
                }
            }
        }
        t_prev = t_c;
        ++j;
    }
}

struct Rot {
    double ca, sa, cb, sb;
};

Rot rot_of(const ModelParams& p) {
    return {std::cos(p.alpha), std::sin(p.alpha), std::cos(p.beta),
            std::sin(p.beta)};
}

// Analytic state of the incoming-arm segment at absolute time t.
PhasePoint initial_state(const LaunchSpec& l, double p0, double A, double t) {
    return {{l.start_x + p0 * t, A * std::sin(t + l.phi)},
            {p0, A * std::cos(t + l.phi)}};
}

} // namespace

void LaunchSpec::validate() const {
    if (!(E > 0.0)) throw InvalidParams("launch energy must be positive");
    if (!(N >= 0.0) || !(N <= E))
        throw InvalidParams("transverse excitation must lie in [0, E]");
    if (!(start_x <= -5.0))
        throw InvalidParams("launch must start at x <= -5");
}

TrajectoryOutcome propagate_sharp(const ModelParams& params,
                                  const LaunchSpec& launch, double max_time) {
    params.validate();
    launch.validate();
    if (params.b != 0.0)
        throw NonSharp("piecewise-exact propagation requires b = 0");

    const Rot r = rot_of(params);
    const double p0 = std::sqrt(2.0 * (launch.E - launch.N));
    const double A = std::sqrt(2.0 * launch.N);
    const double tangency_speed = 1e-6 * std::sqrt(2.0 * launch.E);

    TrajectoryOutcome out;
    auto record = [&out](const std::vector<std::pair<double, double>>& hits,
                         auto&& state_of) {
        for (const auto& [t, u] : hits)
            out.touch_events.push_back({t, state_of(t).position});
    };

    auto state1 = [&](double t) { return initial_state(launch, p0, A, t); };

    // Incoming arm. One-turn guides cross straight into the outgoing arm; the
    // two-turn crossing coordinate is x'.
    CrossingFn f1 = params.one_turn()
                        ? CrossingFn{r.cb * launch.start_x, r.cb * p0,
                                     -r.sb * A, 1.0, launch.phi}
                        : CrossingFn{r.ca * launch.start_x, r.ca * p0,
                                     r.sa * A, 1.0, launch.phi};
    auto s1 = scan_segment(f1, 0.0, max_time, tangency_speed);

    if (!params.one_turn()) {
        // The exit line xi = 0 cuts into the incoming arm near the inner
        // corner; at large swing it can be reached before x' = 0. Scan it up
        // to whichever event the x' coordinate produced.
        double cut = (s1.end == SegmentEnd::NoRoot) ? max_time : s1.t;
        double cbma = std::cos(params.beta - params.alpha);
        double sbma = std::sin(params.beta - params.alpha);
        CrossingFn f1x{cbma * launch.start_x - r.cb * params.L, cbma * p0,
                       -sbma * A, 1.0, launch.phi};
        auto s1x = scan_segment(f1x, 0.0, cut, tangency_speed);
        record(s1.approaches, state1);
        record(s1x.approaches, state1);
        if (s1x.end == SegmentEnd::Tangency) {
            auto st = state1(s1x.t);
            out.touch_events.push_back({s1x.t, st.position});
            out.kind = OutcomeKind::Reflected;
            out.final_state = {Region::Initial, st.position, st.velocity, s1x.t};
            return out;
        }
        if (s1x.end == SegmentEnd::Root) {
            auto st = state1(s1x.t);
            out.kind = OutcomeKind::Transmitted;
            out.final_state = {Region::Final, st.position, st.velocity, s1x.t};
            return out;
        }
    } else {
        record(s1.approaches, state1);
    }

    if (s1.end == SegmentEnd::Tangency) {
        auto st = state1(s1.t);
        out.touch_events.push_back({s1.t, st.position});
        out.kind = OutcomeKind::Reflected;
        out.final_state = {Region::Initial, st.position, st.velocity, s1.t};
        return out;
    }
    if (s1.end != SegmentEnd::Root) {
        auto st = state1(max_time);
        out.kind = OutcomeKind::Undecided;
        out.final_state = {Region::Initial, st.position, st.velocity, max_time};
        return out;
    }

    if (params.one_turn()) {
        auto st = state1(s1.t);
        out.kind = OutcomeKind::Transmitted;
        out.final_state = {Region::Final, st.position, st.velocity, s1.t};
        return out;
    }

    // Middle arm: x' is ballistic (the potential depends on y' only), the
    // transverse frequency is cos(alpha). The crossing coordinate is xi.
    const double t1 = s1.t;
    PhasePoint im = transform_frame(params, state1(t1), Frame::Initial,
                                    Frame::Intermediate);
    const double pprim = im.velocity.x; // >= 0 at a first crossing from x' < 0
    const double om2 = r.ca;
    const double B = std::hypot(im.position.y, im.velocity.y / om2);
    const double chi = std::atan2(im.position.y, im.velocity.y / om2) - om2 * t1;

    auto state2 = [&](double t) {
        PhasePoint mid{{pprim * (t - t1), B * std::sin(om2 * t + chi)},
                       {pprim, B * om2 * std::cos(om2 * t + chi)}};
        return transform_frame(params, mid, Frame::Intermediate, Frame::Initial);
    };

    CrossingFn f2{r.cb * (-pprim * t1 - params.L), r.cb * pprim, -r.sb * B, om2,
                  chi};
    auto s2 = scan_segment(f2, t1, max_time, tangency_speed);
    record(s2.approaches, state2);

    if (s2.end == SegmentEnd::Tangency) {
        auto st = state2(s2.t);
        out.touch_events.push_back({s2.t, st.position});
        out.kind = OutcomeKind::Reflected;
        out.final_state = {Region::Intermediate, st.position, st.velocity, s2.t};
        return out;
    }
    if (s2.end != SegmentEnd::Root) {
        auto st = state2(max_time);
        out.kind = OutcomeKind::Undecided;
        out.final_state = {Region::Intermediate, st.position, st.velocity,
                           max_time};
        return out;
    }
    auto st = state2(s2.t);
    out.kind = OutcomeKind::Transmitted;
    out.final_state = {Region::Final, st.position, st.velocity, s2.t};
    return out;
}

double gap_of_phase(const ModelParams& params, double E, double N, double phi) {
    params.validate();
    if (params.b != 0.0) throw NonSharp("tangency gap is a sharp-guide notion");
    if (!(E > 0.0) || !(N >= 0.0) || !(N <= E))
        throw InvalidParams("need E > 0 and N in [0, E]");

    const Rot r = rot_of(params);
    const double p0 = std::sqrt(2.0 * (E - N));
    const double A = std::sqrt(2.0 * N);
    const double x0 = -10.0; // maxima values do not depend on the offset
    const double tangency_speed = 1e-6 * std::sqrt(2.0 * E);
    const double horizon = 1e8;

    if (params.one_turn()) {
        CrossingFn f{r.cb * x0, r.cb * p0, -r.sb * A, 1.0, phi};
        auto s = scan_segment(f, 0.0, horizon, tangency_speed);
        return s.end == SegmentEnd::Tangency ? std::max(s.gap, cf_val(f, s.t))
                                             : s.gap;
    }

    CrossingFn f1{r.ca * x0, r.ca * p0, r.sa * A, 1.0, phi};
    auto s1 = scan_segment(f1, 0.0, horizon, tangency_speed);

    // xi = 0 can be approached (or crossed) from the incoming arm near the
    // inner corner before x' = 0 is reached; fold those maxima into the gap.
    double gap_in = -kInf;
    {
        double cut = (s1.end == SegmentEnd::NoRoot) ? horizon : s1.t;
        double cbma = std::cos(params.beta - params.alpha);
        double sbma = std::sin(params.beta - params.alpha);
        CrossingFn f1x{cbma * x0 - r.cb * params.L, cbma * p0, -sbma * A, 1.0,
                       phi};
        auto s1x = scan_segment(f1x, 0.0, cut, tangency_speed);
        if (s1x.end == SegmentEnd::Tangency)
            return std::max(s1x.gap, cf_val(f1x, s1x.t));
        if (s1x.end == SegmentEnd::Root) return s1x.gap;
        gap_in = s1x.gap;
    }

    if (s1.end == SegmentEnd::Tangency) return 0.0; // grazes the first line
    if (s1.end != SegmentEnd::Root) return gap_in;

    const double t1 = s1.t;
    LaunchSpec launch;
    launch.E = E;
    launch.N = N;
    launch.phi = phi;
    launch.start_x = x0;
    PhasePoint im = transform_frame(params, initial_state(launch, p0, A, t1),
                                    Frame::Initial, Frame::Intermediate);
    const double om2 = r.ca;
    const double B = std::hypot(im.position.y, im.velocity.y / om2);
    const double chi = std::atan2(im.position.y, im.velocity.y / om2) - om2 * t1;
    CrossingFn f2{r.cb * (-im.velocity.x * t1 - params.L), r.cb * im.velocity.x,
                  -r.sb * B, om2, chi};
    auto s2 = scan_segment(f2, t1, horizon, tangency_speed);
    double gap_mid = s2.end == SegmentEnd::Tangency
                         ? std::max(s2.gap, cf_val(f2, s2.t))
                         : s2.gap;
    return std::max(gap_in, gap_mid);
}

bool reflection_exists(const ModelParams& params, double E, double N,
                       int phase_samples) {
    if (phase_samples < 8)
        throw InvalidParams("phase scan needs a usable grid");
    const double two_pi = 2.0 * std::numbers::pi;
    const int K = phase_samples;

    std::vector<double> gaps(K);
    parallel_for(K, [&](std::size_t i) {
        gaps[i] = gap_of_phase(params, E, N, two_pi * double(i) / K);
    });

    double best = -kInf;
    std::vector<std::pair<double, int>> peaks;
    for (int i = 0; i < K; ++i) {
        best = std::max(best, gaps[i]);
        if (gaps[i] > -kInf && gaps[i] >= gaps[(i + 1) % K] &&
            gaps[i] >= gaps[(i + K - 1) % K])
            peaks.emplace_back(gaps[i], i);
    }
    if (best >= -kTangencyWindow) return true;

    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (peaks.size() > 8) peaks.resize(8);

    auto g = [&](double phi) { return gap_of_phase(params, E, N, phi); };
    const double gr = 0.6180339887498949;
    for (const auto& [val, idx] : peaks) {
        double a = two_pi * (double(idx) - 1.0) / K;
        double b = two_pi * (double(idx) + 1.0) / K;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double g1 = g(x1), g2 = g(x2);
        for (int it = 0; it < 60; ++it) {
            if (g1 < g2) {
                a = x1;
                x1 = x2;
                g1 = g2;
                x2 = a + gr * (b - a);
                g2 = g(x2);
            } else {
                b = x2;
                x2 = x1;
                g2 = g1;
                x1 = b - gr * (b - a);
                g1 = g(x1);
            }
            best = std::max(best, std::max(g1, g2));
            if (best >= -kTangencyWindow) return true;
        }
    }
    return best >= -kTangencyWindow;
}

double oracle_boundary(const ModelParams& params, double E, int phase_samples,
                       double n_tolerance) {
    params.validate();
    if (!(E > 0.0) || !(n_tolerance > 0.0))
        throw InvalidParams("need E > 0 and a positive tolerance");
    if (phase_samples < 1000)
        throw InvalidParams("oracle_boundary needs phase_samples >= 1000");

    auto reflects = [&](double N) {
        return reflection_exists(params, E, N, phase_samples);
    };

    // The tangent trajectories of interest sit well below E; the higher
    // fractions are fallbacks, and reflection absent even at N = E yields the
    // sentinel (NoReflectionFound).
    double hi = -1.0;
    for (double frac : {0.4, 0.7, 0.9, 1.0}) {
        if (reflects(frac * E)) {
            hi = frac * E;
            break;
        }
    }
    if (hi < 0.0) return 1.01 * E;

    double lo = 0.5 * hi;
    while (reflects(lo)) {
        hi = lo;
        lo *= 0.5;
        if (lo < 0.5 * n_tolerance) return lo;
    }
    while (hi - lo > n_tolerance) {
        double mid = 0.5 * (hi + lo);
        (reflects(mid) ? hi : lo) = mid;
    }
    return 0.5 * (hi + lo);
}

SmoothTrajectory propagate_smooth(const ModelParams& params,
                                  const LaunchSpec& launch, double max_time,
                                  const OdeConfig& cfg) {
    params.validate();
    launch.validate();
    if (!(params.b > 0.0))
        throw InvalidParams("smooth propagation requires b > 0");

    const double p0 = std::sqrt(2.0 * (launch.E - launch.N));
    const double A = std::sqrt(2.0 * launch.N);
    const Rot r = rot_of(params);

    OdeField field = [&params](const RVec& s, RVec& d, double) {
        auto e = waveguide_eval(params, s[0], s[1]);
        d[0] = s[2];
        d[1] = s[3];
        d[2] = -e.w * e.wx;
        d[3] = -e.w * e.wy;
    };

    auto xi_of = [&](double x, double y) {
        if (params.one_turn()) return r.cb * x - r.sb * y;
        double xp = r.ca * x + r.sa * y, yp = -r.sa * x + r.ca * y;
        return r.cb * (xp - params.L) - r.sb * yp;
    };

    const double far = std::abs(launch.start_x);
    std::vector<EventFn> events = {
        [&launch](const RVec& s, double) {
            return s[0] - (launch.start_x - 1e-9);
        },
        [&](const RVec& s, double) { return xi_of(s[0], s[1]) - far; }};

    RVec y0 = {launch.start_x, A * std::sin(launch.phi), p0,
               A * std::cos(launch.phi)};
    auto res = integrate_ode(field, y0, 0.0, max_time, events, cfg, -2);

    SmoothTrajectory out;
    out.samples = std::move(res.samples);

    const auto& last = out.samples.back();
    double xi_last = xi_of(last.state[0], last.state[1]);
    double xp_last = r.ca * last.state[0] + r.sa * last.state[1];
    Region region = xi_last > 0
                        ? Region::Final
                        : (!params.one_turn() && xp_last > 0 ? Region::Intermediate
                                                             : Region::Initial);
    out.outcome.final_state = {region,
                               {last.state[0], last.state[1]},
                               {last.state[2], last.state[3]},
                               last.t};
    if (res.terminated_by_event && !res.events.empty()) {
        out.outcome.kind = res.events.back().event_index == 1
                               ? OutcomeKind::Transmitted
                               : OutcomeKind::Reflected;
    } else {
        out.outcome.kind = OutcomeKind::Undecided;
    }

    // corner-pass record: sample of minimal |dxi/dt| inside the window
    Vec2 gxi = params.one_turn()
                   ? Vec2{r.cb, -r.sb}
                   : Vec2{r.cb * r.ca + r.sb * r.sa, r.cb * r.sa - r.sb * r.ca};
    std::size_t best = out.samples.size();
    double best_speed = kInf;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const auto& s = out.samples[i].state;
        if (std::abs(xi_of(s[0], s[1])) >= 0.5) continue;
        double sp = std::abs(gxi.x * s[2] + gxi.y * s[3]);
        if (sp < best_speed) {
            best_speed = sp;
            best = i;
        }
    }
    if (best < out.samples.size()) {
        const auto& s = out.samples[best];
        out.outcome.touch_events.push_back({s.t, {s.state[0], s.state[1]}});
    }
    return out;
}

double corner_approach_xi(const ModelParams& params,
                          const std::vector<OdeSample>& samples) {
    params.validate();
    const Rot r = rot_of(params);
    Vec2 gxi; // lab gradient of xi (unit vector)
    if (params.one_turn()) {
        gxi = {r.cb, -r.sb};
    } else {
        gxi = {r.cb * r.ca + r.sb * r.sa, r.cb * r.sa - r.sb * r.ca};
    }
    auto xi_of = [&](const RVec& s) {
        if (params.one_turn()) return r.cb * s[0] - r.sb * s[1];
        double xp = r.ca * s[0] + r.sa * s[1], yp = -r.sa * s[0] + r.ca * s[1];
        return r.cb * (xp - params.L) - r.sb * yp;
    };
    auto xidot_of = [&](const RVec& s) { return gxi.x * s[2] + gxi.y * s[3]; };

    auto in_window = [&](std::size_t i) {
        return std::abs(xi_of(samples[i].state)) < 0.5;
    };

    // interpolated xi at the zero of dxi/dt between samples i and i+1
    auto stall_xi = [&](std::size_t i) {
        double ta = samples[i].t, tb = samples[i + 1].t;
        double da = xidot_of(samples[i].state), db = xidot_of(samples[i + 1].state);
        double ts = ta + (tb - ta) * (da / (da - db));
        double xa = xi_of(samples[i].state), xb = xi_of(samples[i + 1].state);
        // Hermite interpolation of xi using its sampled derivative
        double h = tb - ta, u = (ts - ta) / h;
        double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * xa + h10 * h * da + h01 * xb + h11 * h * db;
    };

    // Stationary points of xi inside the window: return the one closest to the
    // line from above (largest xi), the penetration apex of a reflected pass.
    double best_stall = -kInf;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        if (!in_window(i) && !in_window(i + 1)) continue;
        double da = xidot_of(samples[i].state), db = xidot_of(samples[i + 1].state);
        if (da == 0.0) best_stall = std::max(best_stall, xi_of(samples[i].state));
        else if ((da < 0) != (db < 0))
            best_stall = std::max(best_stall, stall_xi(i));
    }
    if (best_stall > -kInf) return best_stall;

    // No sign change (a transmitted graze): quadratic vertex of the squared
    // normal speed around its sampled minimum, then Hermite xi there.
    std::size_t best = samples.size();
    double best_speed = kInf;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!in_window(i)) continue;
        double sp = std::abs(xidot_of(samples[i].state));
        if (sp < best_speed) {
            best_speed = sp;
            best = i;
        }
    }
    if (best == samples.size())
        throw InvalidSample("trajectory never approaches the corner");
    if (best == 0 || best + 1 == samples.size()) return xi_of(samples[best].state);

    double t0 = samples[best - 1].t, t1 = samples[best].t, t2 = samples[best + 1].t;
    double q0 = std::pow(xidot_of(samples[best - 1].state), 2),
           q1 = std::pow(xidot_of(samples[best].state), 2),
           q2 = std::pow(xidot_of(samples[best + 1].state), 2);
    double denom = (t1 - t0) * (q1 - q2) - (t1 - t2) * (q1 - q0);
    double ts = t1;
    if (std::abs(denom) > 0) {
        ts = t1 - 0.5 *
                      ((t1 - t0) * (t1 - t0) * (q1 - q2) -
                       (t1 - t2) * (t1 - t2) * (q1 - q0)) /
                      denom;
        ts = std::clamp(ts, t0, t2);
    }
    std::size_t seg = ts <= t1 ? best - 1 : best;
    double ta = samples[seg].t, tb = samples[seg + 1].t;
    double xa = xi_of(samples[seg].state), xb = xi_of(samples[seg + 1].state);
    double da = xidot_of(samples[seg].state), db = xidot_of(samples[seg + 1].state);
    double h = tb - ta, u = (ts - ta) / h;
    double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * xa + h10 * h * da + h01 * xb + h11 * h * db;
}

} // namespace wg
