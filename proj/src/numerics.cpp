#include "waveguide/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

namespace wg {

CVec complex_newton(const std::function<CVec(const CVec&)>& residual,
                    CVec seed, const RootConfig& cfg) {
    const std::size_t n = seed.size();
    const double h = cfg.jacobian_step;

    auto norm_inf = [](const CVec& r) {
        double m = 0;
        for (const auto& c : r) m = std::max(m, std::abs(c));
        return m;
    };

    CVec z = std::move(seed);
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        CVec r = residual(z);
        if (r.size() != n)
            throw InvalidParams("residual dimension differs from seed dimension");
        if (norm_inf(r) <= cfg.residual_tolerance) return z;

        Eigen::MatrixXcd J(n, n);
        Eigen::VectorXcd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = -r[i];
        for (std::size_t j = 0; j < n; ++j) {
            CVec zp = z;
            zp[j] += h;
            CVec rp = residual(zp);
            for (std::size_t i = 0; i < n; ++i) J(i, j) = (rp[i] - r[i]) / h;
        }

        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
            J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv(0) == 0.0 || sv(sv.size() - 1) == 0.0 ||
            sv(0) / sv(sv.size() - 1) > 1e12)
            throw SingularJacobian("finite-difference Jacobian is rank-deficient");

        Eigen::VectorXcd dz = svd.solve(rhs);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] += dz(i);
            finite = finite && std::isfinite(z[i].real()) && std::isfinite(z[i].imag());
        }
        if (!finite) throw NonConvergence("iterate left the finite domain");
    }
    throw NonConvergence("no root within max_iterations");
}

double bracket_root(const std::function<double(double)>& f,
                    double lo, double hi, const RootConfig& cfg) {
    double fa = f(lo), fb = f(hi);
    if (fa == 0) return lo;
    if (fb == 0) return hi;
    if ((fa > 0) == (fb > 0))
        throw NoSignChange("f(lo) and f(hi) have the same sign");

    double a = lo, b = hi;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        // Secant candidate, fall back to the midpoint when it leaves the
        // bracket or stalls.
        double x = b - fb * (b - a) / (fb - fa);
        double width = b - a;
        if (!(x > a + 0.01 * std::abs(width) * 1e-3 && x < b - 0.01 * std::abs(width) * 1e-3))
            x = 0.5 * (a + b);
        double fx = f(x);
        if (std::abs(fx) <= cfg.residual_tolerance || std::abs(b - a) <= cfg.residual_tolerance)
            return x;
        if ((fx > 0) == (fa > 0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    return 0.5 * (a + b);
}

namespace {

namespace odeint = boost::numeric::odeint;
using DenseStepper = odeint::result_of::make_dense_output<
    odeint::runge_kutta_dopri5<RVec>>::type;

} // namespace

OdeResult integrate_ode(const OdeField& field, RVec initial,
                        double t0, double t1,
                        const std::vector<EventFn>& events,
                        const OdeConfig& cfg, int terminal_event) {
    if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || !(cfg.event_tolerance > 0))
        throw InvalidParams("ode tolerances must be positive");

    OdeResult out;
    const double span = t1 - t0;
    if (span == 0) {
        out.samples.push_back({t0, initial});
        return out;
    }
    const double dir = span > 0 ? 1.0 : -1.0;

    auto system = [&field](const RVec& x, RVec& dxdt, double t) {
        dxdt.assign(x.size(), 0.0);
        field(x, dxdt, t);
    };

    // The max-step bound must carry the integration direction, otherwise the
    // step-size clamp flips the sign of dt on backward runs.
    DenseStepper stepper = odeint::make_dense_output(
        cfg.abs_tol, cfg.rel_tol, dir * cfg.max_step,
        odeint::runge_kutta_dopri5<RVec>());

    double dt0 = dir * std::min(cfg.max_step, std::abs(span) / 100.0);
    stepper.initialize(initial, t0, dt0);
    out.samples.push_back({t0, initial});

    std::vector<double> prev_ev(events.size());
    RVec scratch(initial.size());
    for (std::size_t k = 0; k < events.size(); ++k)
        prev_ev[k] = events[k](initial, t0);

    auto state_at = [&](double t, RVec& x) { stepper.calc_state(t, x); };

    const double end_tol = 1e-12 * std::abs(span);
    while (dir * (t1 - stepper.current_time()) > end_tol) {
        double t_prev = stepper.current_time();
        if (dir * (t_prev + stepper.current_time_step() - t1) > 0)
            stepper.initialize(stepper.current_state(), t_prev, t1 - t_prev);
        auto interval = stepper.do_step(system);
        double ta = interval.first, tb = interval.second;
        if (std::abs(tb - ta) < 1e-14 * std::abs(span) &&
            dir * (t1 - tb) > 1e-9 * std::abs(span))
            throw StepUnderflow("integration step collapsed");

        bool stop = false;
        double t_cut = tb;
        for (std::size_t k = 0; k < events.size(); ++k) {
            state_at(tb, scratch);
            double cur = events[k](scratch, tb);
            if (prev_ev[k] == 0.0 || (prev_ev[k] > 0) == (cur > 0) || !std::isfinite(cur)) {
                prev_ev[k] = cur;
                continue;
            }
            // Bisect the sign change on the dense interpolant.
            double a = ta, b = tb, fa = prev_ev[k];
            while (std::abs(b - a) > cfg.event_tolerance) {
                double m = 0.5 * (a + b);
                state_at(m, scratch);
                double fm = events[k](scratch, m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fm > 0) == (fa > 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            double t_hit = 0.5 * (a + b);
            state_at(t_hit, scratch);
            out.events.push_back({static_cast<int>(k), t_hit, scratch});
            if (out.events.size() > 1000000)
                throw EventStorm("more than 1e6 event firings");
            if (terminal_event == -2 || terminal_event == static_cast<int>(k)) {
                stop = true;
                t_cut = dir > 0 ? std::min(t_cut, t_hit) : std::max(t_cut, t_hit);
            }
            state_at(tb, scratch);
            prev_ev[k] = events[k](scratch, tb);
        }

        if (stop) {
            std::sort(out.events.begin(), out.events.end(),
                      [dir](const EventRecord& u, const EventRecord& w) {
                          return dir * u.t < dir * w.t;
                      });
            state_at(t_cut, scratch);
            out.samples.push_back({t_cut, scratch});
            out.terminated_by_event = true;
            return out;
        }
        out.samples.push_back({tb, stepper.current_state()});
    }
    if (out.samples.back().t != t1) {
        state_at(t1, scratch);
        out.samples.push_back({t1, scratch});
    }
    return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned workers) {
    if (n == 0) return;
    unsigned hw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    hw = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (hw <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(hw);
    std::size_t chunk = (n + hw - 1) / hw;
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned w = 0; w < hw; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0) || !(hi > 0) || count < 2)
        throw InvalidParams("log grid needs positive bounds and >= 2 points");
    std::vector<double> g(count);
    double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = std::exp(llo + (lhi - llo) * double(i) / double(count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count < 2) throw InvalidParams("grid needs >= 2 points");
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo + (hi - lo) * double(i) / double(count - 1);
    g.back() = hi;
    return g;
}

} // namespace wg
