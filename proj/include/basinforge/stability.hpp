#pragma once

// Linear (Floquet) stability of the two pendulum equilibria, the closed-form
// damping bound above which every trajectory is drawn to the hanging state,
// and a runtime certificate that the energy in Liouville-transformed time is
// non-increasing along trajectories.
//
// Linearising x' = y, y' = -f(tau - tau0) sin x - gamma y about a fixed point
// gives Hill's equation u'' + gamma u' +/- f(tau - tau0) u = 0 (+ at x = 0,
// - at x = pi).  Stability is read off the monodromy matrix over one forcing
// period 2 pi.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "integrate.hpp"
#include "model.hpp"
#include "rk853.hpp"

namespace basinforge {

/// Physical equilibrium to linearise about, independent of the coordinate
/// convention: `down` is the hanging position, `up` the inverted one.
enum class EquilibriumPoint { down, up };

enum class FloquetVerdict { stable, marginal, unstable };

/// Monodromy data of the linearisation over one forcing period.
struct FloquetResult {
    std::array<std::array<double, 2>, 2> monodromy{};  ///< [row][column]
    std::array<std::complex<double>, 2> multipliers{};
    FloquetVerdict verdict = FloquetVerdict::unstable;
    bool stable = false;  ///< verdict == stable; strict moduli for gamma > 0

    double trace() const { return monodromy[0][0] + monodromy[1][1]; }
    double det() const {
        return monodromy[0][0] * monodromy[1][1] - monodromy[0][1] * monodromy[1][0];
    }
};

namespace detail {

/// u' = v, v' = -sign f(tau - tau0) u - gamma v.
struct LinearizedRhs {
    PendulumParams params;
    double gamma;
    double sign;

    void operator()(double tau, const std::array<double, 2>& u,
                    std::array<double, 2>& du) const {
        du[0] = u[1];
        du[1] = -sign * forcing(params, tau) * u[0] - gamma * u[1];
    }
};

}  // namespace detail

/// Floquet analysis of one equilibrium under constant damping.  The verdict
/// uses strict multiplier moduli when gamma > 0; for gamma = 0 the
/// multipliers sit on the unit circle throughout the stable tongues, so the
/// trace criterion |tr| < 2 applies and tongue boundaries are `marginal`.
inline FloquetResult floquet(const PendulumParams& params, double gamma,
                             EquilibriumPoint point) {
    params.validate();
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::domain_error("floquet: gamma must be a nonnegative constant");

    // x = 0 is the hanging position for the downward convention and the
    // upright one for the inverted convention.
    bool at_origin = (point == EquilibriumPoint::up) ==
                     (params.orientation == Orientation::inverted);
    detail::LinearizedRhs rhs{params, gamma, at_origin ? 1.0 : -1.0};

    FloquetResult out;
    for (int col = 0; col < 2; ++col) {
        Rk853<2, detail::LinearizedRhs> rk(rhs, 1e-11, 1e-13, 2.0 * M_PI);
        std::array<double, 2> u{col == 0 ? 1.0 : 0.0, col == 0 ? 0.0 : 1.0};
        double tau = 0.0;
        rk.integrate_to(tau, u, 2.0 * M_PI);
        out.monodromy[0][col] = u[0];
        out.monodromy[1][col] = u[1];
    }

    double tr = out.trace(), det = out.det();
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double root = std::sqrt(disc);
        double big = 0.5 * (tr + (tr >= 0.0 ? root : -root));
        double small = big != 0.0 ? det / big : 0.5 * (tr - root);
        out.multipliers = {std::complex<double>(big, 0.0),
                           std::complex<double>(small, 0.0)};
    } else {
        double im = 0.5 * std::sqrt(-disc);
        out.multipliers = {std::complex<double>(0.5 * tr, im),
                           std::complex<double>(0.5 * tr, -im)};
    }

    constexpr double tol = 1e-9;
    if (gamma > 0.0) {
        double mx = std::max(std::abs(out.multipliers[0]), std::abs(out.multipliers[1]));
        out.verdict = mx < 1.0 - tol   ? FloquetVerdict::stable
                      : mx > 1.0 + tol ? FloquetVerdict::unstable
                                       : FloquetVerdict::marginal;
    } else {
        double t = std::fabs(tr);
        out.verdict = t < 2.0 - tol   ? FloquetVerdict::stable
                      : t > 2.0 + tol ? FloquetVerdict::unstable
                                      : FloquetVerdict::marginal;
    }
    out.stable = out.verdict == FloquetVerdict::stable;
    return out;
}

/// Damping above which every trajectory converges to the hanging state:
/// gamma must exceed -min_tau f'/(2f) = beta / (2 sqrt(alpha^2 - beta^2))
/// for f = alpha - beta cos tau (critical point at cos tau = beta/alpha).
/// Requires 0 <= beta < alpha so that f stays positive.
inline double global_attraction_bound(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta >= 0.0))
        throw std::domain_error("global_attraction_bound: need alpha > 0, beta >= 0");
    if (!(beta < alpha))
        throw std::domain_error(
            "global_attraction_bound: requires beta < alpha (f must stay positive)");
    return beta / (2.0 * std::sqrt((alpha - beta) * (alpha + beta)));
}

/// Outcome of monitoring the transformed energy along one trajectory.
struct EnergyCertificate {
    long samples = 0;       ///< monitored increments
    long violations = 0;    ///< increments where the energy grew beyond 1e-9
    double max_increase = 0.0;  ///< largest increment seen (<= 0 when monotone)
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double liouville_time = 0.0;  ///< integral of sqrt(f) over the run

    bool passed() const { return violations == 0; }
};

/// Integrates one trajectory under constant damping and verifies that
/// H = 1 - cos x + y^2 / (2 f(tau - tau0)) never increases between
/// checkpoints (samples_per_period per forcing period) by more than 1e-9.
/// H is the pendulum energy in the rescaled time tau~ with d tau~ = sqrt(f)
/// d tau, where the velocity is y / sqrt(f); the rescaled clock is
/// accumulated by quadrature and reported.  Requires the downward
/// configuration, beta < alpha, and gamma above global_attraction_bound.
inline EnergyCertificate energy_decrease_certificate(const PendulumParams& params,
                                                     double gamma, const State& start,
                                                     double tau_span,
                                                     int samples_per_period = 64) {
    params.validate();
    if (params.orientation != Orientation::downward)
        throw std::domain_error(
            "energy_decrease_certificate: requires the downward configuration");
    if (!(params.beta < params.alpha))
        throw std::domain_error("energy_decrease_certificate: requires beta < alpha");
    if (!(gamma > global_attraction_bound(params.alpha, params.beta)))
        throw std::domain_error(
            "energy_decrease_certificate: gamma must exceed the attraction bound");
    if (!(tau_span > 0.0) || samples_per_period < 1)
        throw std::domain_error(
            "energy_decrease_certificate: need tau_span > 0 and samples_per_period >= 1");

    // 8-point Gauss-Legendre half-rule for the sqrt(f) quadrature; the
    // integrand is entire and the panels are short, so this is exact to
    // roundoff.
    static constexpr double gl_x[4] = {0.1834346424956498, 0.5255324099163290,
                                       0.7966664774136267, 0.9602898564975363};
    static constexpr double gl_w[4] = {0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};

    auto energy = [&](double tau, const State& s) {
        return 1.0 - std::cos(s.x) + 0.5 * s.y * s.y / forcing(params, tau);
    };

    IntegratorSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-13;
    PendulumIntegrator integ(params, DampingSchedule::constant(gamma), spec);
    integ.reset(0.0, start);

    EnergyCertificate cert;
    cert.initial_energy = energy(0.0, start);
    double prev_energy = cert.initial_energy;
    double step = 2.0 * M_PI / samples_per_period;
    long n = static_cast<long>(std::ceil(tau_span / step - 1e-12));
    for (long k = 1; k <= n; ++k) {
        double target = std::fmin(static_cast<double>(k) * step, tau_span);
        double mid = 0.5 * (integ.tau() + target), half = 0.5 * (target - integ.tau());
        double inc = 0.0;
        for (int j = 0; j < 4; ++j)
            inc += gl_w[j] * (std::sqrt(forcing(params, mid - half * gl_x[j])) +
                              std::sqrt(forcing(params, mid + half * gl_x[j])));
        cert.liouville_time += inc * half;

        integ.advance_to(target);
        double e = energy(integ.tau(), integ.state());
        double d = e - prev_energy;
        ++cert.samples;
        if (d > cert.max_increase) cert.max_increase = d;
        if (d > 1e-9) ++cert.violations;
        prev_energy = e;
    }
    cert.final_energy = prev_energy;
    return cert;
}

/// A periodic orbit of the stroboscopic map under constant damping, polished
/// by Newton iteration, with the monodromy of the map cycle.
struct PeriodicOrbit {
    State point;  ///< cycle point on the section tau = 0 (mod 2 pi)
    std::array<std::array<double, 2>, 2> monodromy{};  ///< D(P^n) at the point
    std::array<std::complex<double>, 2> multipliers{};
    int periods = 1;             ///< n: forcing periods per map cycle
    int winding_per_period = 0;  ///< full turns of x per forcing period
    double residual = 0.0;       ///< |P^n(z) - z - 2 pi n w| after Newton

    double trace() const { return monodromy[0][0] + monodromy[1][1]; }
    double det() const {
        return monodromy[0][0] * monodromy[1][1] - monodromy[0][1] * monodromy[1][0];
    }
    /// 1 + tr + det: negative iff a real multiplier lies below -1, so a sign
    /// change along a parameter path brackets a period-doubling point.
    double flip_margin() const { return 1.0 + trace() + det(); }
};

namespace detail {

inline State strobe_map(const PendulumParams& params, double gamma, int periods,
                        const State& z, const IntegratorSpec& spec) {
    PendulumIntegrator integ(params, DampingSchedule::constant(gamma), spec);
    integ.reset(0.0, z);
    integ.advance_to(2.0 * M_PI * periods);
    return integ.state();
}

}  // namespace detail

/// Newton-polish a period-n orbit of the stroboscopic map that advances x by
/// 2 pi n w over its cycle, starting from `guess`.  The Jacobian comes from
/// central differences of the flow; the phase-space contraction invariant
/// det = exp(-2 pi n gamma) holds to the integration tolerance and makes a
/// useful external check.  Throws when Newton fails to converge (e.g. no such
/// orbit exists at this damping).
inline PeriodicOrbit find_periodic_orbit(const PendulumParams& params, double gamma,
                                         int periods, int winding_per_period, State guess,
                                         const IntegratorSpec& spec_in = {}) {
    params.validate();
    if (!(gamma >= 0.0)) throw std::domain_error("find_periodic_orbit: gamma < 0");
    if (periods < 1) throw std::domain_error("find_periodic_orbit: periods < 1");

    IntegratorSpec spec = spec_in;
    if (spec.rel_tol > 1e-11) spec.rel_tol = 1e-12;
    if (spec.abs_tol > 1e-13) spec.abs_tol = 1e-14;

    const double shift = 2.0 * M_PI * periods * winding_per_period;
    const double fd_h = 1e-6;
    State z = guess;
    PeriodicOrbit orbit;
    orbit.periods = periods;
    orbit.winding_per_period = winding_per_period;

    for (int it = 0; it < 50; ++it) {
        State f = detail::strobe_map(params, gamma, periods, z, spec);
        double gx = f.x - z.x - shift;
        double gy = f.y - z.y;

        State fxp = detail::strobe_map(params, gamma, periods, {z.x + fd_h, z.y}, spec);
        State fxm = detail::strobe_map(params, gamma, periods, {z.x - fd_h, z.y}, spec);
        State fyp = detail::strobe_map(params, gamma, periods, {z.x, z.y + fd_h}, spec);
        State fym = detail::strobe_map(params, gamma, periods, {z.x, z.y - fd_h}, spec);
        double a = (fxp.x - fxm.x) / (2.0 * fd_h);
        double b = (fyp.x - fym.x) / (2.0 * fd_h);
        double c = (fxp.y - fxm.y) / (2.0 * fd_h);
        double d = (fyp.y - fym.y) / (2.0 * fd_h);

        double m00 = a - 1.0, m01 = b, m10 = c, m11 = d - 1.0;
        double det = m00 * m11 - m01 * m10;
        if (!(std::fabs(det) > 1e-14))
            throw std::domain_error("find_periodic_orbit: singular Newton system");
        double dx = (-gx * m11 + gy * m01) / det;
        double dy = (gx * m10 - gy * m00) / det;
        z.x += dx;
        z.y += dy;
        if (!(std::isfinite(z.x) && std::isfinite(z.y)) || std::fabs(z.y) > 1e3)
            throw std::domain_error("find_periodic_orbit: iteration diverged");

        if (std::fabs(dx) + std::fabs(dy) < 1e-12) {
            State fr = detail::strobe_map(params, gamma, periods, z, spec);
            orbit.point = z;
            orbit.monodromy = {{{a, b}, {c, d}}};
            orbit.residual = std::hypot(fr.x - z.x - shift, fr.y - z.y);
            double tr = a + d, dt = a * d - b * c;
            std::complex<double> disc =
                std::sqrt(std::complex<double>(tr * tr - 4.0 * dt, 0.0));
            orbit.multipliers = {0.5 * (tr + disc), 0.5 * (tr - disc)};
            return orbit;
        }
    }
    throw std::domain_error("find_periodic_orbit: Newton did not converge");
}

}  // namespace basinforge
