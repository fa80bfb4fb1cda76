#pragma once

// Action-angle coordinates of the unforced, undamped pendulum x'' = -alpha
// sin x, used as the reference frame for perturbation analysis.  Oscillations
// inside the separatrix ("libration", energy below alpha) and full turns
// outside it ("rotation") get separate charts, both parametrised by an
// elliptic modulus k derived from the energy.  The perturbed vector field
// (forcing amplitude epsilon, damping gamma = C1 epsilon) is available in
// these coordinates with the secular terms absorbed into the Jacobi zeta
// function, so every coefficient is periodic in the angle.

#include <cmath>
#include <stdexcept>

#include "elliptic.hpp"
#include "model.hpp"

namespace basinforge {

enum class Regime { libration, rotation };

/// Thrown when a state or action is too close to the separatrix for the
/// coordinates to make sense (the period diverges there).
class SeparatrixError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Action-angle point.  For rotations, branch is the sign of the angular
/// velocity: the two rotation families are mirror images under
/// (x, y) -> (-x, -y) and share one chart up to that reflection.
struct ActionAngle {
    double I = 0.0;
    double phi = 0.0;  ///< angle, canonically in [0, 2 pi)
    Regime regime = Regime::libration;
    int branch = +1;  ///< +1 or -1; meaningful for rotations only
};

/// Action of the separatrix orbit, the supremum of libration actions.
inline double separatrix_action(double alpha) { return 8.0 * std::sqrt(alpha) / M_PI; }

/// Infimum of rotation actions (the separatrix approached from outside).
inline double rotation_min_action(double alpha) { return 4.0 * std::sqrt(alpha) / M_PI; }

/// Action as a function of the modulus:
///   libration  I = (8/pi) sqrt(alpha) [E(k) - (1 - k^2) K(k)],
///   rotation   I = (4/(pi k)) sqrt(alpha) E(k).
inline double action_from_modulus(const Modulus& k, Regime regime, double alpha) {
    double K = complete_K(k), E = complete_E(k);
    double sa = std::sqrt(alpha);
    if (regime == Regime::libration) return 8.0 / M_PI * sa * (E - k.m1() * K);
    return 4.0 / (M_PI * k.k()) * sa * E;
}

/// dI/dk: (8/pi) k K sqrt(alpha) for librations, -(4/(pi k^2)) K sqrt(alpha)
/// for rotations.
inline double action_modulus_derivative(const Modulus& k, Regime regime, double alpha) {
    double K = complete_K(k), sa = std::sqrt(alpha);
    if (regime == Regime::libration) return 8.0 / M_PI * k.k() * K * sa;
    return -4.0 / (M_PI * k.k() * k.k()) * K * sa;
}

/// Orbital frequency dE/dI: pi sqrt(alpha)/(2K) inside the separatrix,
/// pi sqrt(alpha)/(k K) outside.
inline double frequency(const Modulus& k, Regime regime, double alpha) {
    double K = complete_K(k), sa = std::sqrt(alpha);
    return regime == Regime::libration ? M_PI * sa / (2.0 * K) : M_PI * sa / (k.k() * K);
}

/// Derivative of the frequency with respect to the action, d Omega / d I.
/// Both charts scale I and Omega by sqrt(alpha), so this depends on k only.
/// Negative for librations (period grows with amplitude), positive for
/// rotations (faster spinning shortens the period).
inline double frequency_derivative(const Modulus& k, Regime regime) {
    double K = complete_K(k), E = complete_E(k);
    double K3 = K * K * K;
    if (regime == Regime::libration)
        return -M_PI * M_PI / (16.0 * k.m() * K3) * (E / k.m1() - K);
    return M_PI * M_PI * E / (4.0 * k.m1() * K3);
}

/// Modulus from the action (inverse of action_from_modulus).  Rejects actions
/// within 1e-12 of the separatrix value, where k is no longer resolvable.
inline Modulus modulus_from_action(double I, Regime regime, double alpha) {
    if (!(I > 0.0) || !std::isfinite(I))
        throw std::domain_error("modulus_from_action: action must be positive");
    double sa = std::sqrt(alpha);
    if (regime == Regime::libration) {
        if (I >= separatrix_action(alpha) - 1e-12)
            throw SeparatrixError("modulus_from_action: action at the separatrix");
    } else {
        if (I <= rotation_min_action(alpha) + 1e-12)
            throw SeparatrixError("modulus_from_action: action at the separatrix");
    }
    // Small-orbit / fast-rotation asymptotics give the starting guess.
    double k = regime == Regime::libration ? std::sqrt(I / (2.0 * sa))
                                           : 2.0 * sa / I;
    k = std::fmin(std::fmax(k, 1e-8), 1.0 - 1e-8);
    double lo = 1e-14, hi = 1.0 - 5e-16;  // I is monotone in k on (lo, hi)
    for (int it = 0; it < 80; ++it) {
        Modulus mk = Modulus::from_k(k);
        double f = action_from_modulus(mk, regime, alpha) - I;
        if (std::fabs(f) < 1e-14 * (1.0 + std::fabs(I))) return mk;
        bool increasing = regime == Regime::libration;
        if ((f > 0.0) == increasing)
            hi = k;
        else
            lo = k;
        double step = f / action_modulus_derivative(mk, regime, alpha);
        double next = k - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - k) < 1e-17) return Modulus::from_k(next);
        k = next;
    }
    Modulus mk = Modulus::from_k(k);
    if (std::fabs(action_from_modulus(mk, regime, alpha) - I) < 1e-9 * (1.0 + std::fabs(I)))
        return mk;
    throw std::runtime_error("modulus_from_action: iteration stalled");
}

namespace detail {

/// Jacobi-function argument of the chart: u = 2 K phi / pi (libration) or
/// u = K phi / pi (rotation); one angle period covers 4K resp. 2K in u.
inline double chart_argument(double phi, const Modulus& k, Regime regime) {
    double K = complete_K(k);
    return regime == Regime::libration ? 2.0 * K * phi / M_PI : K * phi / M_PI;
}

}  // namespace detail

/// Cartesian point of the chart.  Librations:
///   q = 2 arcsin(k sn(u)), p = 2 k sqrt(alpha) cn(u), u = 2 K phi / pi.
/// Rotations (branch +1):
///   q = 2 am(u), p = (2/k) sqrt(alpha) dn(u), u = K phi / pi,
/// where am is the Jacobi amplitude (the arcsin form only covers half a
/// turn); branch -1 negates both coordinates.  q is returned in (-pi, pi].
inline State to_cartesian(const ActionAngle& aa, double alpha) {
    Modulus k = modulus_from_action(aa.I, aa.regime, alpha);
    double u = detail::chart_argument(aa.phi, k, aa.regime);
    JacobiTriple j = jacobi_sncndn(u, k);
    double sa = std::sqrt(alpha);
    if (aa.regime == Regime::libration) {
        double arg = std::fmin(1.0, std::fmax(-1.0, k.k() * j.sn));
        return {2.0 * std::asin(arg), 2.0 * k.k() * sa * j.cn};
    }
    double q = wrap_angle(2.0 * std::atan2(j.sn, j.cn));
    double p = 2.0 / k.k() * sa * j.dn;
    if (aa.branch < 0) {
        q = wrap_angle(-q);
        p = -p;
    }
    return {q, p};
}

/// Inverse chart.  The energy fixes regime and modulus; the angle comes from
/// inverting the sn argument with the incomplete integral of the first kind,
/// using the sign of p (libration) or the reflection branch (rotation) to
/// select the quadrant, which keeps phi continuous along every orbit.
inline ActionAngle from_cartesian(const State& st, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("from_cartesian: alpha must be positive");
    double q = wrap_angle(st.x), p = st.y;
    double sh = std::sin(0.5 * q), ch = std::cos(0.5 * q);
    double p2 = p * p / (4.0 * alpha);
    // Cancellation-free energy offsets: E0 + 1 = 2 (sh^2 + p2),
    // E0 - 1 = 2 (p2 - ch^2), with E0 = E / alpha.
    double below = ch * ch - p2;  // (1 - E0) / 2: positive inside the separatrix
    if (std::fabs(below) <= 5e-11)
        throw SeparatrixError("from_cartesian: state on the separatrix");
    if (below > 0.0) {
        double m = sh * sh + p2;  // k^2 for the libration chart
        if (m <= 0.0) return {0.0, 0.0, Regime::libration, +1};  // equilibrium
        Modulus k = m <= 0.5 ? Modulus::from_k(std::sqrt(m)) : Modulus::from_m1(below);
        double s = std::fmin(1.0, std::fmax(-1.0, sh / k.k()));
        double u = incomplete_F(std::asin(s), k);
        double K = complete_K(k);
        if (p < 0.0) u = 2.0 * K - u;
        double phi = M_PI * u / (2.0 * K);
        if (phi < 0.0) phi += 2.0 * M_PI;
        return {action_from_modulus(k, Regime::libration, alpha), phi,
                Regime::libration, +1};
    }
    int branch = p > 0.0 ? +1 : -1;
    if (branch < 0) q = wrap_angle(-q);
    // k^2 = 2/(E0 + 1); complementary parameter (E0 - 1)/(E0 + 1).
    double sum = 2.0 * (sh * sh + p2);
    double m = 2.0 / sum, m1 = -2.0 * below / sum;
    Modulus k = m <= 0.5 ? Modulus::from_k(std::sqrt(m)) : Modulus::from_m1(m1);
    double u = incomplete_F(0.5 * q, k);
    double K = complete_K(k);
    double phi = M_PI * u / K;
    if (phi < 0.0) phi += 2.0 * M_PI;
    return {action_from_modulus(k, Regime::rotation, alpha), phi, Regime::rotation,
            branch};
}

/// Partial derivatives of the chart (q, p) = X(I, phi) at a point.  The
/// secular pieces of the k-derivatives cancel into the Jacobi zeta function,
/// leaving angle-periodic entries.
struct ChartJacobian {
    double dq_dI, dp_dI, dq_dphi, dp_dphi;
};

inline ChartJacobian chart_jacobian(const ActionAngle& aa, double alpha) {
    Modulus k = modulus_from_action(aa.I, aa.regime, alpha);
    double K = complete_K(k);
    double u = detail::chart_argument(aa.phi, k, aa.regime);
    JacobiTriple j = jacobi_sncndn(u, k);
    double Z = jacobi_zeta(u, k);
    double sa = std::sqrt(alpha);
    double kk = k.k(), m = k.m(), m1 = k.m1();
    ChartJacobian J;
    if (aa.regime == Regime::libration) {
        J.dq_dI = M_PI / (4.0 * kk * K * sa) *
                  (j.sn / j.dn + m * j.sn * j.cn * j.cn / (m1 * j.dn) -
                   Z * j.cn / m1);
        J.dp_dI = M_PI / (4.0 * kk * K) *
                  (j.cn - m * j.sn * j.sn * j.cn / m1 + Z * j.sn * j.dn / m1);
        J.dq_dphi = 4.0 * kk * K * j.cn / M_PI;
        J.dp_dphi = -sa * 4.0 * kk * K * j.sn * j.dn / M_PI;
        return J;
    }
    J.dq_dI = -M_PI * m / (2.0 * K * sa) *
              (kk * j.sn * j.cn / m1 - Z * j.dn / (kk * m1));
    J.dp_dI = M_PI * m / (2.0 * K) *
              (j.dn / m + j.sn * j.sn * j.dn / m1 - Z * j.sn * j.cn / m1);
    J.dq_dphi = 2.0 * K * j.dn / M_PI;
    J.dp_dphi = -sa * 2.0 * kk * K * j.sn * j.cn / M_PI;
    if (aa.branch < 0) {  // chart is the reflection of the branch +1 chart
        J.dq_dI = -J.dq_dI;
        J.dp_dI = -J.dp_dI;
        J.dq_dphi = -J.dq_dphi;
        J.dp_dphi = -J.dp_dphi;
    }
    return J;
}

/// Determinant of the chart Jacobian; equals 1 for a canonical transformation.
inline double jacobian_det(const ActionAngle& aa, double alpha) {
    ChartJacobian J = chart_jacobian(aa, alpha);
    return J.dq_dphi * J.dp_dI - J.dq_dI * J.dp_dphi;
}

/// Rates of change of (phi, I).
struct ActionAngleRate {
    double dphi, dI;
};

/// The forced, damped pendulum written in action-angle coordinates, with
/// forcing amplitude epsilon = beta and damping gamma = C1 epsilon.  The
/// reflection symmetry of the equations makes the field identical on both
/// rotation branches.  Requires the downward orientation (the chart expands
/// about the hanging equilibrium).
inline ActionAngleRate perturbed_rhs(const ActionAngle& aa, double tau,
                                     const PendulumParams& params, double C1) {
    if (params.orientation != Orientation::downward)
        throw std::domain_error("perturbed_rhs: chart expands about the hanging equilibrium");
    double alpha = params.alpha, eps = params.beta;
    Modulus k = modulus_from_action(aa.I, aa.regime, alpha);
    double K = complete_K(k);
    double u = detail::chart_argument(aa.phi, k, aa.regime);
    JacobiTriple j = jacobi_sncndn(u, k);
    double Z = jacobi_zeta(u, k);
    double sa = std::sqrt(alpha);
    double kk = k.k(), m = k.m(), m1 = k.m1();
    double cosf = std::cos(tau - params.tau0);
    double scd = j.sn * j.cn * j.dn;
    ActionAngleRate r;
    if (aa.regime == Regime::libration) {
        double forc = j.sn * j.sn + m * j.sn * j.sn * j.cn * j.cn / m1 - Z * scd / m1;
        double damp = j.cn * (j.sn / j.dn + m * j.sn * j.cn * j.cn / (m1 * j.dn) -
                              Z * j.cn / m1);
        r.dphi = M_PI * sa / (2.0 * K) - eps * M_PI / (2.0 * K * sa) * forc * cosf +
                 C1 * eps * M_PI / (2.0 * K) * damp;
        r.dI = 8.0 * eps * m * K / M_PI * cosf * scd -
               8.0 * C1 * eps * m * sa * K / M_PI * j.cn * j.cn;
        return r;
    }
    double forc = m * j.sn * j.sn * j.cn * j.cn / m1 - Z * scd / m1;
    double damp = m * scd / m1 - Z * j.dn * j.dn / m1;
    r.dphi = M_PI * sa / (kk * K) + eps * M_PI * kk / (sa * K) * forc * cosf -
             C1 * eps * M_PI / K * damp;
    r.dI = 4.0 * eps * K / M_PI * cosf * scd -
           4.0 * C1 * eps * sa * K / (M_PI * kk) * j.dn * j.dn;
    return r;
}

}  // namespace basinforge
