#pragma once

// Taylor-series integrator for the forced pendulum.  The trigonometric
// nonlinearity is removed by augmenting the state with s = sin x, c = cos x:
//
//     x' = y,  y' = -f(tau) s - gamma(tau) y,  s' = c y,  c' = -s y,
//
// which is polynomial, so Taylor coefficients follow from Cauchy-product
// recurrences.  The forcing cosine enters through its exact Taylor
// coefficients at the expansion point; the damping ramp is linear in tau.
// Step size comes from the coefficient decay (series convergence radius
// estimate) combined with an accuracy bound on the last two terms.

#include <array>
#include <cmath>
#include <stdexcept>

#include "model.hpp"
#include "rk853.hpp"

namespace basinforge {

/// Pendulum state augmented with the sine/cosine pair of the angle.
struct AugState {
    double x = 0.0, y = 0.0, s = 0.0, c = 1.0;

    static AugState from_state(const State& st) {
        return {st.x, st.y, std::sin(st.x), std::cos(st.x)};
    }
    State state() const { return {x, y}; }
};

class TaylorPendulum {
public:
    static constexpr int max_order = 40;

    TaylorPendulum(const PendulumParams& params, const DampingSchedule& damping,
                   int order = 20, bool renormalize = true, double tol = 1e-12,
                   double max_step = 1e100)
        : params_(params), damping_(damping), order_(order),
          renormalize_(renormalize), tol_(tol), max_step_(max_step) {
        params_.validate();
        damping_.validate();
        if (order < 4 || order > max_order)
            throw std::domain_error("TaylorPendulum: order out of range");
        if (!(tol > 0.0))
            throw std::domain_error("TaylorPendulum: tolerance must be positive");
        a_ = params.orientation == Orientation::downward ? params.alpha : -params.alpha;
    }

    /// One Taylor step from (tau, st), not exceeding h_max.  Returns the step
    /// actually taken.  The caller keeps steps away from the damping-ramp
    /// corner (gamma is not smooth there); integrate_to does this itself.
    double step(double& tau, AugState& st, double h_max) {
        const int n = order_;
        expand(tau, st);
        // Radius estimate from the decay of the last two coefficient norms.
        double nm1 = coef_norm(n - 1), nm = coef_norm(n);
        double radius = nm > 0.0 ? nm1 / nm : 1e100;
        if (nm1 > 0.0 && radius < 1e-12)
            throw IntegrationError("TaylorPendulum: series radius collapse", tau);
        double h_acc = 1e100;
        if (nm1 > 0.0) h_acc = std::pow(tol_ / nm1, 1.0 / (n - 1));
        if (nm > 0.0) h_acc = std::fmin(h_acc, std::pow(tol_ / nm, 1.0 / n));
        double h = 0.8 * std::fmin(radius, h_acc);
        h = std::fmin(h, std::fmin(h_max, max_step_));
        if (h < 1e-14 * std::fmax(1.0, std::fabs(tau)))
            throw IntegrationError("TaylorPendulum: step size underflow", tau);
        st.x = horner(cx_, h);
        st.y = horner(cy_, h);
        st.s = horner(cs_, h);
        st.c = horner(cc_, h);
        if (!std::isfinite(st.x) || !std::isfinite(st.y) || !std::isfinite(st.s) ||
            !std::isfinite(st.c))
            throw IntegrationError("TaylorPendulum: non-finite state", tau);
        if (renormalize_) {
            double r = std::hypot(st.s, st.c);
            st.s /= r;
            st.c /= r;
        }
        tau += h;
        ++n_steps;
        return h;
    }

    /// Advance to exactly tau_end, splitting at the damping-ramp corner.
    void integrate_to(double& tau, AugState& st, double tau_end) {
        if (!(tau_end >= tau))
            throw std::domain_error("TaylorPendulum: backward integration not supported");
        double corner = damping_.is_constant() ? -1.0 : damping_.T0;
        while (tau < tau_end) {
            double stop = tau_end;
            if (tau < corner && corner < tau_end) stop = corner;
            double remaining = stop - tau;
            if (remaining <= 1e-14 * std::fmax(1.0, std::fabs(tau))) {
                tau = stop;
                continue;
            }
            double before = tau;
            step(tau, st, remaining);
            if (stop - tau <= 1e-14 * std::fmax(1.0, std::fabs(tau)) && tau > before)
                tau = stop;  // landed on the stop within roundoff
        }
    }

    long n_steps = 0;

private:
    using Coefs = std::array<double, max_order + 1>;

    /// Fill coefficient arrays of the Taylor expansion at (tau, st).
    void expand(double tau, const AugState& st) {
        const int n = order_;
        cx_[0] = st.x;
        cy_[0] = st.y;
        cs_[0] = st.s;
        cc_[0] = st.c;
        // Forcing cosine coefficients: cos(tau - tau0 + j pi/2) / j!.
        double cosv = std::cos(tau - params_.tau0), sinv = std::sin(tau - params_.tau0);
        double cyc[4] = {cosv, -sinv, -cosv, sinv};
        double fact = 1.0;
        for (int j = 0; j <= n; ++j) {
            if (j > 0) fact /= j;
            fc_[j] = cyc[j & 3] * fact;
        }
        // Damping, linear in tau on the ramp: gamma(tau) = g0 + g1 * (t-tau).
        double g0 = damping_.gamma(tau);
        double g1 = (!damping_.is_constant() && tau < damping_.T0)
                        ? (damping_.gamma1 - damping_.gamma0) / damping_.T0
                        : 0.0;
        const double beta = params_.beta;
        for (int j = 0; j < n; ++j) {
            double conv_fs = 0.0, conv_cy = 0.0, conv_sy = 0.0;
            for (int i = 0; i <= j; ++i) {
                conv_fs += fc_[i] * cs_[j - i];
                conv_cy += cc_[i] * cy_[j - i];
                conv_sy += cs_[i] * cy_[j - i];
            }
            double fs = a_ * cs_[j] - beta * conv_fs;
            double gy = g0 * cy_[j] + (j >= 1 ? g1 * cy_[j - 1] : 0.0);
            double inv = 1.0 / (j + 1);
            cx_[j + 1] = cy_[j] * inv;
            cy_[j + 1] = -(fs + gy) * inv;
            cs_[j + 1] = conv_cy * inv;
            cc_[j + 1] = -conv_sy * inv;
        }
    }

    double coef_norm(int j) const {
        return std::fmax(std::fmax(std::fabs(cx_[j]), std::fabs(cy_[j])),
                         std::fmax(std::fabs(cs_[j]), std::fabs(cc_[j])));
    }

    double horner(const Coefs& c, double h) const {
        double v = c[order_];
        for (int j = order_ - 1; j >= 0; --j) v = v * h + c[j];
        return v;
    }

    PendulumParams params_;
    DampingSchedule damping_;
    int order_;
    bool renormalize_;
    double tol_, max_step_, a_;
    Coefs cx_{}, cy_{}, cs_{}, cc_{}, fc_{};
};

}  // namespace basinforge
