#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "waveguide/geometry.hpp"

using namespace wg;
using std::numbers::pi;

namespace {

ModelParams one_turn_params(double b = 0.0) {
    ModelParams p;
    p.alpha = 0.0;
    p.beta = pi / 3;
    p.b = b;
    return p;
}

ModelParams two_turn_params(double b = 0.0) {
    ModelParams p;
    p.alpha = pi / 30;
    p.beta = pi / 3;
    p.L = 1.0;
    p.b = b;
    return p;
}

} // namespace

TEST_CASE("params validation") {
    CHECK_NOTHROW(two_turn_params().validate());
    ModelParams bad = two_turn_params();
    bad.beta = pi / 2;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = two_turn_params();
    bad.alpha = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = two_turn_params();
    bad.alpha = bad.beta;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = two_turn_params();
    bad.L = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = two_turn_params();
    bad.b = -1e-3;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("waveguide value on the channel pieces") {
    auto p1 = one_turn_params();
    // deep in the incoming arm w equals the transverse offset y
    CHECK(waveguide_value(p1, -5.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));

    // past the corner w = eta cos(beta)
    double x = 2.0, y = -0.5;
    double cb = std::cos(p1.beta), sb = std::sin(p1.beta);
    double xi = cb * x - sb * y, eta = sb * x + cb * y;
    REQUIRE(xi > 0);
    CHECK(waveguide_value(p1, x, y) == doctest::Approx(eta * cb).epsilon(1e-14));

    // center line of the middle arm of the two-turn guide
    auto p2 = two_turn_params();
    double ca = std::cos(p2.alpha), sa = std::sin(p2.alpha);
    double xm = 0.5 * ca, ym = 0.5 * sa; // (x', y') = (0.5, 0)
    CHECK(std::abs(waveguide_value(p2, xm, ym)) < 1e-15);
}

TEST_CASE("waveguide continuity across the turn lines at b = 0") {
    auto p2 = two_turn_params();
    double ca = std::cos(p2.alpha), sa = std::sin(p2.alpha);
    double cb = std::cos(p2.beta), sb = std::sin(p2.beta);
    for (double s : {-0.4, -0.1, 0.05, 0.3}) {
        // point on the first turn line x' = 0 at height y' = s
        double x = -s * sa, y = s * ca;
        double w = waveguide_value(p2, x, y);
        CHECK(w == doctest::Approx(s * ca + 0.0).epsilon(1e-13)); // both pieces give y = cos(a) y'
        // point on the second turn line xi = 0 at height eta = s
        PhasePoint pt{{0.0, s}, {0.0, 0.0}};
        auto lab = transform_frame(p2, pt, Frame::Final, Frame::Initial);
        double w2 = waveguide_value(p2, lab.position.x, lab.position.y);
        double yprime = s * cb; // y' on the line xi = 0 at eta = s
        CHECK(w2 == doctest::Approx(s * ca * cb).epsilon(1e-13));
        CHECK(w2 == doctest::Approx(yprime * ca).epsilon(1e-13));
    }

    auto p1 = one_turn_params();
    for (double s : {-0.4, 0.2}) {
        double x = s * std::sin(p1.beta), y = s * std::cos(p1.beta); // xi = 0, eta = s
        CHECK(waveguide_value(p1, x, y) ==
              doctest::Approx(s * std::cos(p1.beta)).epsilon(1e-13));
    }
}

TEST_CASE("smoothened waveguide converges to the sharp one away from the turns") {
    double b = 0.05;
    auto sharp = two_turn_params();
    auto smooth = two_turn_params(b);
    double ca = std::cos(smooth.alpha), sa = std::sin(smooth.alpha);
    double cb = std::cos(smooth.beta), sb = std::sin(smooth.beta);
    double worst = 0.0;
    int counted = 0;
    for (double x = -3.0; x <= 3.0; x += 0.1) {
        for (double y = -3.0; y <= 3.0; y += 0.1) {
            double xp = ca * x + sa * y, yp = -sa * x + ca * y;
            double xi = cb * (xp - smooth.L) - sb * yp;
            if (std::abs(xi) < 10 * b || std::abs(xp) < 10 * b) continue;
            worst = std::max(worst,
                             std::abs(waveguide_value(smooth, x, y) -
                                      waveguide_value(sharp, x, y)));
            ++counted;
        }
    }
    CHECK(counted > 1000);
    CHECK(worst <= std::exp(-10.0));
}

TEST_CASE("waveguide gradient matches finite differences") {
    auto p = two_turn_params(0.02);
    double h = 1e-6;
    for (auto [x, y] : std::vector<std::pair<double, double>>{
             {-1.0, 0.2}, {0.3, 0.05}, {0.9, -0.1}, {1.4, 0.4}}) {
        auto e = waveguide_eval(p, x, y);
        double fx = (waveguide_value(p, x + h, y) - waveguide_value(p, x - h, y)) / (2 * h);
        double fy = (waveguide_value(p, x, y + h) - waveguide_value(p, x, y - h)) / (2 * h);
        CHECK(e.wx == doctest::Approx(fx).epsilon(1e-6));
        CHECK(e.wy == doctest::Approx(fy).epsilon(1e-6));
        CHECK(e.w == doctest::Approx(waveguide_value(p, x, y)));
    }
}

TEST_CASE("frame transforms: reference points") {
    auto p = two_turn_params();
    PhasePoint origin{{0.0, 0.0}, {0.0, 0.0}};
    auto r = transform_frame(p, origin, Frame::Initial, Frame::Intermediate);
    CHECK(r.position.x == 0.0);
    CHECK(r.position.y == 0.0);

    PhasePoint corner{{p.L, 0.0}, {0.0, 0.0}};
    r = transform_frame(p, corner, Frame::Intermediate, Frame::Final);
    CHECK(std::abs(r.position.x) < 1e-15);
    CHECK(std::abs(r.position.y) < 1e-15);

    PhasePoint unit{{1.0, 0.0}, {0.0, 0.0}};
    r = transform_frame(p, unit, Frame::Initial, Frame::Intermediate);
    CHECK(r.position.x == doctest::Approx(std::cos(pi / 30)).epsilon(1e-15));
    CHECK(r.position.y == doctest::Approx(-std::sin(pi / 30)).epsilon(1e-15));
}

TEST_CASE("frame transforms: round trips and velocity norms") {
    auto p2 = two_turn_params();
    auto p1 = one_turn_params();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const Frame frames[] = {Frame::Initial, Frame::Intermediate, Frame::Final};
    for (int k = 0; k < 50; ++k) {
        PhasePoint pt{{u(rng), u(rng)}, {u(rng), u(rng)}};
        double vnorm = std::hypot(pt.velocity.x, pt.velocity.y);
        for (Frame a : frames) {
            for (Frame b : frames) {
                auto fwd = transform_frame(p2, pt, a, b);
                auto back = transform_frame(p2, fwd, b, a);
                CHECK(std::abs(back.position.x - pt.position.x) < 1e-14);
                CHECK(std::abs(back.position.y - pt.position.y) < 1e-14);
                CHECK(std::abs(back.velocity.x - pt.velocity.x) < 1e-14);
                CHECK(std::abs(back.velocity.y - pt.velocity.y) < 1e-14);
                CHECK(std::abs(std::hypot(fwd.velocity.x, fwd.velocity.y) - vnorm) < 1e-14);
            }
        }
        auto fwd = transform_frame(p1, pt, Frame::Initial, Frame::Final);
        auto back = transform_frame(p1, fwd, Frame::Final, Frame::Initial);
        CHECK(std::abs(back.position.x - pt.position.x) < 1e-14);
        CHECK(std::abs(back.position.y - pt.position.y) < 1e-14);
    }
    CHECK_THROWS_AS(transform_frame(p1, PhasePoint{}, Frame::Initial, Frame::Intermediate),
                    InvalidFrame);
}

TEST_CASE("smooth profile") {
    auto p = one_turn_params(1e-3);
    auto prof = smooth_profile(p);
    CHECK(prof.psi0 == doctest::Approx(1.2785).epsilon(1e-3));
    CHECK(prof.v(0.0) == 0.0);
    CHECK(prof.d2v(prof.psi0) < 0.0);
    CHECK(std::abs(prof.dv(prof.psi0)) < 1e-10);

    // analytic derivatives against finite differences
    for (double psi : {-3.0, -0.5, 0.7, 1.9, 4.0}) {
        double h = 1e-6;
        double fd1 = (prof.v(psi + h) - prof.v(psi - h)) / (2 * h);
        double fd2 = (prof.v(psi + h) - 2 * prof.v(psi) + prof.v(psi - h)) / (h * h);
        CHECK(prof.dv(psi) == doctest::Approx(fd1).epsilon(1e-7));
        CHECK(prof.d2v(psi) == doctest::Approx(fd2).epsilon(1e-3));
    }

    // v approaches the linear ramp psi tan(beta) far on the negative side
    for (double psi : {-5.0, -12.0}) {
        double rel = std::abs(prof.v(psi) - psi * prof.tan_beta) /
                     std::abs(psi * prof.tan_beta);
        CHECK(rel <= std::exp(psi));
    }

    // stays finite at large |psi|
    CHECK(std::isfinite(prof.v(800.0)));
    CHECK(prof.v(800.0) == 0.0);
    CHECK(std::isfinite(prof.d2v(-800.0)));

    CHECK_THROWS_AS(smooth_profile(one_turn_params(0.0)), SharpModel);
}

TEST_CASE("model parameters from a JSON file") {
    const char* path = "geometry_params_test.json";
    {
        std::ofstream out(path);
        out << R"({"alpha": 0.10471975511965977, "beta": 1.0471975511965976, "L": 1.0, "b": 0.01})";
    }
    auto p = load_model_params(path);
    CHECK(p.alpha == doctest::Approx(pi / 30).epsilon(1e-15));
    CHECK(p.beta == doctest::Approx(pi / 3).epsilon(1e-15));
    CHECK(p.L == 1.0);
    CHECK(p.b == 0.01);

    {
        std::ofstream out(path);
        out << R"({"beta": 0.9})";
    }
    p = load_model_params(path);
    CHECK(p.alpha == 0.0);
    CHECK(p.b == 0.0);
    CHECK(p.one_turn());

    {
        std::ofstream out(path);
        out << R"({"beta": 2.2})";
    }
    CHECK_THROWS_AS(load_model_params(path), InvalidParams);
    std::remove(path);
    CHECK_THROWS_AS(load_model_params("no_such_file.json"), InvalidParams);
}
