#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "waveguide/numerics.hpp"

using namespace wg;
using std::numbers::pi;

namespace {
const Complex I(0, 1);
}

TEST_CASE("complex_newton: scalar transcendental root") {
    auto resid = [](const CVec& z) -> CVec {
        return {std::sin(z[0] * std::cos(pi / 3)) + I * 0.57735};
    };
    CVec z = complex_newton(resid, {-I});
    Complex expected = -2.0 * std::asinh(0.57735) * I;
    CHECK(std::abs(z[0] - expected) < 1e-9);
    CHECK(std::abs(z[0] - Complex(0, -1.0986123)) < 1e-6);
}

TEST_CASE("complex_newton: quadratic convergence on z^2 + 1") {
    std::vector<Complex> calls;
    auto resid = [&calls](const CVec& z) -> CVec {
        calls.push_back(z[0]);
        return {z[0] * z[0] + 1.0};
    };
    CVec z = complex_newton(resid, {Complex(0.2, 1.3)});
    CHECK(std::abs(z[0] - I) < 1e-10);

    // One residual call plus one Jacobian call per iteration, so the
    // even-indexed calls are the Newton iterates.
    std::vector<double> err;
    for (std::size_t k = 0; k < calls.size(); k += 2)
        err.push_back(std::abs(calls[k] - I));
    int checked = 0;
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        if (err[k] > 0.5 || err[k] < 1e-5) continue;
        CHECK(err[k + 1] <= 10.0 * err[k] * err[k]);
        ++checked;
    }
    CHECK(checked >= 2);
}

TEST_CASE("complex_newton: error reporting") {
    auto flat = [](const CVec& z) -> CVec { return {Complex(1.0) + 0.0 * z[0]}; };
    CHECK_THROWS_AS(complex_newton(flat, {Complex(0.0)}), SingularJacobian);

    auto circle = [](const CVec& z) -> CVec { return {z[0] * z[0] + 1.0}; };
    RootConfig few;
    few.max_iterations = 2;
    CHECK_THROWS_AS(complex_newton(circle, {Complex(50.0, 0.1)}, few), NonConvergence);
}

TEST_CASE("bracket_root: reference roots") {
    auto sq = [](double x) { return x * x - 2.0; };
    CHECK(bracket_root(sq, 1.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

    CHECK(bracket_root([](double x) { return std::cos(x); }, 1.0, 2.0) ==
          doctest::Approx(pi / 2).epsilon(1e-10));

    auto decay = [](double x) { return (1.0 + x) * std::exp(-x) - 0.5; };
    double r = bracket_root(decay, 0.0, 10.0);
    CHECK(r == doctest::Approx(1.67835).epsilon(1e-4));
    CHECK(std::abs(decay(r)) < 1e-10);

    CHECK_THROWS_AS(bracket_root([](double x) { return x * x + 1.0; }, 0.0, 1.0),
                    NoSignChange);
}

TEST_CASE("integrate_ode: oscillator energy drift over 100 periods") {
    OdeField ho = [](const RVec& s, RVec& d, double) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    OdeConfig tight;
    tight.rel_tol = 1e-12;
    tight.abs_tol = 1e-14;
    tight.max_step = 0.01;
    auto res = integrate_ode(ho, {1.0, 0.0}, 0.0, 200.0 * pi, {}, tight);
    CHECK(res.samples.front().t == 0.0);
    CHECK(res.samples.back().t == doctest::Approx(200.0 * pi).epsilon(1e-14));
    double drift = 0.0;
    for (const auto& smp : res.samples) {
        double e = 0.5 * (smp.state[0] * smp.state[0] + smp.state[1] * smp.state[1]);
        drift = std::max(drift, std::abs(e - 0.5));
    }
    CHECK(drift <= 1e-9);
}

TEST_CASE("integrate_ode: event localization and terminal stop") {
    OdeField ho = [](const RVec& s, RVec& d, double) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    std::vector<EventFn> ev = {[](const RVec& s, double) { return s[0]; }};
    auto res = integrate_ode(ho, {1.0, 0.0}, 0.0, 10.0, ev, {}, 0);
    REQUIRE(res.terminated_by_event);
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].event_index == 0);
    CHECK(res.events[0].t == doctest::Approx(pi / 2).epsilon(1e-8));
    CHECK(std::abs(res.events[0].state[1] + 1.0) < 1e-7);
    CHECK(res.samples.back().t == doctest::Approx(res.events[0].t));

    // Non-terminal run records every crossing.
    auto all = integrate_ode(ho, {1.0, 0.0}, 0.0, 10.0, ev);
    CHECK(all.events.size() == 3);
    CHECK_FALSE(all.terminated_by_event);
    CHECK(all.samples.back().t == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("integrate_ode: free particle event") {
    OdeField free = [](const RVec& s, RVec& d, double) {
        d[0] = s[1];
        d[1] = 0.0;
    };
    std::vector<EventFn> ev = {[](const RVec& s, double) { return s[0] - 1.0; }};
    auto res = integrate_ode(free, {0.0, 1.0}, 0.0, 5.0, ev, {}, 0);
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].t == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate_ode: backward integration") {
    OdeField ho = [](const RVec& s, RVec& d, double) {
        d[0] = s[1];
        d[1] = -s[0];
    };
    auto res = integrate_ode(ho, {1.0, 0.0}, 0.0, -2.0 * pi);
    CHECK(res.samples.back().t == doctest::Approx(-2.0 * pi).epsilon(1e-14));
    CHECK(res.samples.back().state[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(res.samples.back().state[1]) < 1e-8);
}

TEST_CASE("integrate_ode: step underflow at a singular time") {
    OdeField blow = [](const RVec&, RVec& d, double t) { d[0] = 1.0 / (1.0 - t); };
    CHECK_THROWS_AS(integrate_ode(blow, {0.0}, 0.0, 2.0), StepUnderflow);
}

TEST_CASE("integrate_ode: deterministic replay") {
    OdeField pend = [](const RVec& s, RVec& d, double) {
        d[0] = s[1];
        d[1] = -std::sin(s[0]);
    };
    auto a = integrate_ode(pend, {1.2, 0.3}, 0.0, 50.0);
    auto b = integrate_ode(pend, {1.2, 0.3}, 0.0, 50.0);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(a.samples.back().state[0] == b.samples.back().state[0]);
    CHECK(a.samples.back().state[1] == b.samples.back().state[1]);
}

TEST_CASE("continuation_scan: square roots along a parameter grid") {
    std::function<double(double, const double&)> solver =
        [](double p, const double& seed) -> double {
        auto r = complex_newton(
            [p](const CVec& z) -> CVec { return {z[0] * z[0] - p}; },
            {Complex(seed == 0.0 ? 1.0 : seed)});
        return r[0].real();
    };
    auto res = continuation_scan<double>(solver, {1.0, 2.0, 3.0}, 1.0);
    REQUIRE(res.points.size() == 3);
    CHECK(res.points[0].second == doctest::Approx(1.0));
    CHECK(res.points[1].second == doctest::Approx(1.41421).epsilon(1e-5));
    CHECK(res.points[2].second == doctest::Approx(1.73205).epsilon(1e-5));
}

TEST_CASE("continuation_scan: branch loss reporting") {
    std::function<double(double, const double&)> solver =
        [](double p, const double&) -> double {
        if (p >= 2.0) throw NonConvergence("forced failure");
        return p * p;
    };
    auto res = continuation_scan<double>(solver, {1.0, 1.5, 2.0}, 0.0);
    REQUIRE(res.branch_lost_at.has_value());
    CHECK(*res.branch_lost_at == 2.0);
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[1].first == 1.5);
    CHECK(res.points[1].second == doctest::Approx(2.25));
}

TEST_CASE("continuation_scan: refinement rescues a large step") {
    // Solver converges only when seeded from a nearby parameter value.
    std::function<double(double, const double&)> solver =
        [](double p, const double& seed) -> double {
        if (std::abs(p - seed) > 0.6) throw NonConvergence("seed too far");
        return p;
    };
    auto res = continuation_scan<double>(solver, {1.0, 2.0}, 1.0);
    CHECK_FALSE(res.branch_lost_at.has_value());
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[1].second == doctest::Approx(2.0));

    std::function<double(double, const double&)> strict =
        [](double p, const double& seed) -> double {
        if (std::abs(p - seed) > 0.3) throw NonConvergence("seed too far");
        return p;
    };
    auto lost = continuation_scan<double>(strict, {1.0, 2.0}, 1.0);
    REQUIRE(lost.branch_lost_at.has_value());
    CHECK(*lost.branch_lost_at == 2.0);
}

TEST_CASE("parallel_for: worker count does not change results") {
    std::vector<double> one(997), four(997);
    parallel_for(one.size(), [&](std::size_t i) { one[i] = std::sin(double(i)); }, 1);
    parallel_for(four.size(), [&](std::size_t i) { four[i] = std::sin(double(i)); }, 4);
    CHECK(one == four);

    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
        if (i == 7) throw InvalidParams("boom");
    }, 3), InvalidParams);
}

TEST_CASE("grids: endpoints and spacing") {
    auto lg = log_grid(1e-4, 1e-1, 4);
    REQUIRE(lg.size() == 4);
    CHECK(lg.front() == 1e-4);
    CHECK(lg.back() == 1e-1);
    CHECK(lg[1] == doctest::Approx(1e-3).epsilon(1e-12));

    auto ln = linear_grid(0.0, 1.0, 5);
    CHECK(ln[3] == doctest::Approx(0.75));
    CHECK_THROWS_AS(log_grid(-1.0, 1.0, 10), InvalidParams);
}
