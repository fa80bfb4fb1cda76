#pragma once

// Unified driver for pendulum trajectories.  Wraps the two integration
// back-ends (adaptive Runge-Kutta and Taylor series) behind one interface,
// splits every advance at the damping-ramp corner where gamma(tau) is only
// C^0, and lands on requested times exactly so Poincare sections need no
// interpolation.  The angle x is kept unwrapped; winding numbers follow from
// differences of x across periods.

#include <cmath>
#include <optional>
#include <stdexcept>

#include "model.hpp"
#include "rk853.hpp"
#include "taylor.hpp"

namespace basinforge {

enum class Method { rk_adaptive, taylor };

/// Tolerances and back-end selection for a pendulum integration.
struct IntegratorSpec {
    Method method = Method::rk_adaptive;
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = 1e100;
    int taylor_order = 20;
    bool taylor_renormalize = true;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0))
            throw std::domain_error("IntegratorSpec: tolerances must be positive");
        if (taylor_order < 4 || taylor_order > TaylorPendulum::max_order)
            throw std::domain_error("IntegratorSpec: taylor_order out of range");
    }
};

class PendulumIntegrator {
public:
    PendulumIntegrator(const PendulumParams& params, const DampingSchedule& damping,
                       const IntegratorSpec& spec = {})
        : params_(params), damping_(damping), spec_(spec) {
        params_.validate();
        damping_.validate();
        spec_.validate();
        if (spec_.method == Method::rk_adaptive) {
            rk_.emplace(PendulumRhs{params_, damping_}, spec_.rel_tol, spec_.abs_tol,
                        spec_.max_step);
        } else {
            // Pendulum states are O(1), so a single per-step tolerance serves.
            double tol = std::fmax(spec_.abs_tol, spec_.rel_tol);
            taylor_.emplace(params_, damping_, spec_.taylor_order,
                            spec_.taylor_renormalize, tol, spec_.max_step);
        }
    }

    /// Place the trajectory at (tau, st), discarding step-size memory.
    void reset(double tau, const State& st) {
        tau_ = tau;
        if (rk_) {
            y_ = {st.x, st.y};
            rk_->reset_step();
        } else {
            aug_ = AugState::from_state(st);
        }
    }

    double tau() const { return tau_; }

    State state() const { return rk_ ? State{y_[0], y_[1]} : aug_.state(); }

    /// Advance to exactly tau_end (>= current tau), splitting at the ramp corner.
    void advance_to(double tau_end) {
        if (!(tau_end >= tau_))
            throw std::domain_error("PendulumIntegrator: backward integration not supported");
        if (taylor_) {
            taylor_->integrate_to(tau_, aug_, tau_end);
            return;
        }
        double corner = damping_.is_constant() ? -1.0 : damping_.T0;
        while (tau_ < tau_end) {
            double stop = (tau_ < corner && corner < tau_end) ? corner : tau_end;
            rk_->integrate_to(tau_, y_, stop);
        }
    }

    /// Run n forcing periods from the current time, calling cb(k, state) at
    /// tau = start + 2 pi k for k = 1..n.  The callback returns false to stop
    /// early.  Section times are recomputed from k, so they do not drift.
    template <class Callback>
    void run_periods(long n, Callback&& cb) {
        double base = tau_;
        for (long k = 1; k <= n; ++k) {
            advance_to(base + 2.0 * M_PI * static_cast<double>(k));
            if (!cb(k, state())) return;
        }
    }

    /// Accepted steps so far (both back-ends count only accepted steps).
    long steps() const { return rk_ ? rk_->n_accepted : taylor_->n_steps; }

    const PendulumParams& params() const { return params_; }
    const DampingSchedule& damping() const { return damping_; }
    const IntegratorSpec& spec() const { return spec_; }

private:
    PendulumParams params_;
    DampingSchedule damping_;
    IntegratorSpec spec_;
    std::optional<Rk853<2, PendulumRhs>> rk_;
    std::optional<TaylorPendulum> taylor_;
    double tau_ = 0.0;
    std::array<double, 2> y_{};
    AugState aug_{};
};

}  // namespace basinforge
