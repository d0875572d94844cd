#include "waveguide/one_turn.hpp"

#include <cmath>
#include <limits>

#include "waveguide/errors.hpp"

namespace wg {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0) || !(beta < M_PI / 2))
        throw InvalidParams("need 0 < beta < pi/2");
}

} // namespace

double nu_critical(double beta) {
    check_beta(beta);
    double c = std::cos(beta);
    return c * c;
}

double suppression_closed_form(double beta, double nu) {
    check_beta(beta);
    double nucr = nu_critical(beta);
    if (!(nu >= 0.0) || !(nu <= nucr))
        throw OutOfDomain("nu outside [0, cos^2 beta]");

    double cb = std::cos(beta);
    double sb = std::sin(beta);
    if (nu == 0.0)
        return -2.0 + 2.0 / cb * std::atanh(cb);

    double s = std::sqrt(nucr - nu);
    return 2.0 / cb * std::asinh(s / sb)
         - 2.0 * nu * std::asinh(s / (sb * std::sqrt(nu)))
         - 2.0 / cb * s * std::sqrt(1.0 - nu);
}

OneTurnSolution solve_matching(double beta, double nu) {
    check_beta(beta);
    double nucr = nu_critical(beta);
    if (!(nu >= 0.0) || !(nu <= nucr))
        throw OutOfDomain("nu outside [0, cos^2 beta]");

    double cb = std::cos(beta);
    double sb = std::sin(beta);

    OneTurnSolution sol;
    sol.nu = nu;
    sol.p0 = std::sqrt(2.0 * (1.0 - nu));

    if (nu == nucr) {
        // critical trajectory: all matching parameters vanish
        sol.a = std::complex<double>(0.0, cb / std::sqrt(2.0));
        return sol;
    }

    double s = std::sqrt(nucr - nu);
    sol.T1 = -std::asinh(s / sb) / cb;
    if (sol.T1 > 0.0)
        throw BranchViolation("T1 > 0 from principal branch");
    sol.T = 2.0 * sol.T1 + 2.0 * s / (cb * std::sqrt(1.0 - nu));

    if (nu == 0.0) {
        // theta diverges while theta*nu -> 0; the amplitude dies with it
        sol.theta = std::numeric_limits<double>::infinity();
        sol.a = 0.0;
        sol.f = -sol.T;
    } else {
        sol.theta = 2.0 * sol.T1 - sol.T + 2.0 * std::asinh(s / (sb * std::sqrt(nu)));
        sol.f = -sol.T - sol.theta * nu;
        sol.a = std::complex<double>(0.0, std::sqrt(nu / 2.0))
              * std::exp(-(sol.T + sol.theta) / 2.0);
    }

    double closed = suppression_closed_form(beta, nu);
    if (std::abs(sol.f - closed) > 1e-10 * (1.0 + std::abs(closed)))
        throw ResidualTooLarge("matching route disagrees with closed form");
    return sol;
}

Vec2 critical_trajectory(double beta, double t) {
    return {std::sqrt(2.0) * t * std::sin(beta),
            std::sqrt(2.0) * std::sin(t) * std::cos(beta)};
}

} // namespace wg
