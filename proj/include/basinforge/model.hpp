#pragma once

// The parametrically forced, damped pendulum in nondimensional time:
//
//     x' = y,   y' = -f(tau - tau0) sin x - gamma(tau) y,
//
// with f(tau) = alpha - beta cos(tau) when the support oscillation stabilises
// the hanging (downward) position, and f(tau) = -(alpha + beta cos(tau)) for
// the inverted configuration, which is the same equation written in the
// coordinate measured from the upward position (x -> x + pi).  The forcing
// period is 2*pi throughout.
//
// A linear-in-time damping ramp gamma0 -> gamma1 over [0, T0] is supported;
// T0 = 0 means constant damping gamma1.

#include <array>
#include <cmath>
#include <stdexcept>

namespace basinforge {

enum class Orientation { downward, inverted };

struct PendulumParams {
    double alpha = 0.5;   ///< mean of the forcing coefficient (> 0)
    double beta = 0.1;    ///< forcing amplitude (>= 0)
    Orientation orientation = Orientation::downward;
    double tau0 = 0.0;    ///< forcing phase

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::domain_error("PendulumParams: alpha must be positive");
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::domain_error("PendulumParams: beta must be nonnegative");
        if (!std::isfinite(tau0))
            throw std::domain_error("PendulumParams: tau0 must be finite");
    }
};

/// Cubic oscillator y' = -(1 + eps cos tau) x^3 - gamma y (smoke-test model).
struct CubicParams {
    double epsilon = 0.1;

    void validate() const {
        if (!std::isfinite(epsilon))
            throw std::domain_error("CubicParams: epsilon must be finite");
    }
};

/// Damping gamma(tau): linear ramp gamma0 -> gamma1 on [0, T0], then constant.
struct DampingSchedule {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double T0 = 0.0;

    static DampingSchedule constant(double gamma) { return {gamma, gamma, 0.0}; }

    bool is_constant() const { return T0 == 0.0 || gamma0 == gamma1; }

    double gamma(double tau) const {
        if (tau >= T0 || T0 == 0.0) return gamma1;
        if (tau <= 0.0) return gamma0;
        return gamma0 + (gamma1 - gamma0) * tau / T0;
    }

    void validate() const {
        if (!(gamma0 >= 0.0) || !(gamma1 >= 0.0) || !(T0 >= 0.0) ||
            !std::isfinite(gamma0) || !std::isfinite(gamma1) || !std::isfinite(T0))
            throw std::domain_error("DampingSchedule: need gamma0, gamma1, T0 >= 0");
    }
};

/// Phase-space point (angle, angular velocity).
struct State {
    double x = 0.0;
    double y = 0.0;
};

/// Forcing coefficient f(tau) including the orientation sign convention.
inline double forcing(const PendulumParams& p, double tau) {
    double c = std::cos(tau - p.tau0);
    return p.orientation == Orientation::downward ? p.alpha - p.beta * c
                                                  : -(p.alpha + p.beta * c);
}

/// Right-hand side of the first-order pendulum system.
struct PendulumRhs {
    PendulumParams params;
    DampingSchedule damping;

    void operator()(double tau, const std::array<double, 2>& s,
                    std::array<double, 2>& ds) const {
        ds[0] = s[1];
        ds[1] = -forcing(params, tau) * std::sin(s[0]) - damping.gamma(tau) * s[1];
    }
};

/// Right-hand side of the cubic oscillator.
struct CubicRhs {
    CubicParams params;
    DampingSchedule damping;

    void operator()(double tau, const std::array<double, 2>& s,
                    std::array<double, 2>& ds) const {
        ds[0] = s[1];
        ds[1] = -(1.0 + params.epsilon * std::cos(tau)) * s[0] * s[0] * s[0] -
                damping.gamma(tau) * s[1];
    }
};

/// Energy of the unforced, undamped limit (beta = 0, gamma = 0): conserved
/// along trajectories of that limit, used as an integrator diagnostic.
inline double pendulum_energy(const PendulumParams& p, const State& s) {
    double a = p.orientation == Orientation::downward ? p.alpha : -p.alpha;
    return 0.5 * s.y * s.y - a * std::cos(s.x);
}

inline double cubic_energy(const State& s) {
    return 0.5 * s.y * s.y + 0.25 * s.x * s.x * s.x * s.x;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * M_PI);  // (-pi, pi], ties to even
    if (w <= -M_PI) w = M_PI;
    return w;
}

}  // namespace basinforge
