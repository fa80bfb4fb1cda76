#pragma once

// First-order damping thresholds for subharmonic responses of the forced
// pendulum.  A p:q resonance locks p orbital periods to q forcing periods;
// at first order in the forcing amplitude epsilon only p = 1 with q even
// survives, and the response persists while gamma <= C1(1/q) epsilon.  The
// threshold coefficient combines a resonant modulus (fixed by the period
// condition), a damping average Delta, and the resonant harmonic G1 of the
// product sn cn dn along the unperturbed orbit.

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "action_angle.hpp"
#include "elliptic.hpp"

namespace basinforge {

/// A p:q subharmonic resonance in one of the two regimes.
struct ResonanceSpec {
    int p = 1;
    int q = 2;
    Regime regime = Regime::libration;

    void validate() const {
        if (p < 1 || q < 1) throw std::domain_error("ResonanceSpec: p, q must be positive");
        if (std::gcd(p, q) != 1) throw std::domain_error("ResonanceSpec: p, q must be coprime");
    }
};

/// True when the resonance carries a first-order threshold: p = 1, q even.
/// All other resonances respond only at higher order in epsilon.
inline bool admissible(const ResonanceSpec& spec) {
    spec.validate();
    return spec.p == 1 && spec.q % 2 == 0;
}

/// Modulus locking the orbit period to q forcing periods: K(k) = pi q
/// sqrt(alpha) / (2p) inside the separatrix, k K(k) = pi q sqrt(alpha) / (2p)
/// outside.  Throws when the resonance lies outside the frequency range
/// (libration frequencies do not exceed sqrt(alpha)).
inline Modulus resonant_modulus(const ResonanceSpec& spec, double alpha) {
    if (!admissible(spec))
        throw std::domain_error("resonant_modulus: resonance has no first-order threshold");
    if (!(alpha > 0.0)) throw std::domain_error("resonant_modulus: alpha must be positive");
    double target = M_PI * spec.q * std::sqrt(alpha) / (2.0 * spec.p);
    return invert_modulus(target, spec.regime == Regime::libration
                                      ? InversionForm::complete_K
                                      : InversionForm::k_times_K);
}

/// Mean square of the velocity factor the damping acts on, over one period:
/// cn^2 averages to (1/k^2)[E/K - (1 - k^2)] inside the separatrix, dn^2 to
/// E/K outside.
inline double delta(const Modulus& k, Regime regime) {
    double ratio = complete_E(k) / complete_K(k);
    if (regime == Regime::rotation) return ratio;
    return (ratio - k.m1()) / k.m();
}

namespace detail {

/// Period average (1/K) Int_0^K sn cn dn sin(pi q u / (2K)) du for even q;
/// both regimes reduce to this form in the orbit parameter u, using the
/// symmetries of sn cn dn about u = K and u = 2K.  Composite 16-point
/// Gauss-Legendre panels, one per quarter oscillation of the sine factor,
/// doubled until two sweeps agree to 1e-12.
inline double resonant_average(const Modulus& k, int q) {
    static constexpr double gl_x[8] = {
        0.0950125098376374401853193, 0.2816035507792589132304605,
        0.4580167776572273863424194, 0.6178762444026437484466718,
        0.7554044083550030338951012, 0.8656312023878317438804679,
        0.9445750230732325760779884, 0.9894009349916499325961542};
    static constexpr double gl_w[8] = {
        0.1894506104550684962853967, 0.1826034150449235888667637,
        0.1691565193950025381893121, 0.1495959888165767320815017,
        0.1246289712555338720524763, 0.0951585116824927848099251,
        0.0622535239386478928628438, 0.0271524594117540948517806};
    double K = complete_K(k);
    double omega = M_PI * q / (2.0 * K);
    auto f = [&](double u) {
        JacobiTriple j = jacobi_sncndn(u, k);
        return j.sn * j.cn * j.dn * std::sin(omega * u);
    };
    double prev = 0.0;
    for (int n = std::max(4, q);; n *= 2) {
        double panel = K / n, sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double mid = (i + 0.5) * panel, half = 0.5 * panel;
            double local = 0.0;
            for (int j = 0; j < 8; ++j)
                local += gl_w[j] * (f(mid - half * gl_x[j]) + f(mid + half * gl_x[j]));
            sum += local * half;
        }
        double value = sum / K;
        if (n > std::max(4, q) && std::fabs(value - prev) < 1e-12) return value;
        if (n >= 4096) return value;
        prev = value;
    }
}

}  // namespace detail

/// Resonant harmonic of sn cn dn along the orbit locked to the forcing.
inline double g1(const ResonanceSpec& spec, double alpha) {
    return detail::resonant_average(resonant_modulus(spec, alpha), spec.q);
}

/// One assembled table row for a 1:q resonance.
struct ThresholdRow {
    int q;
    Modulus k;
    double G1;
    double Delta;
    double C1;
};

/// Threshold coefficient C1(1/q): G1/(sqrt(alpha) Delta) inside the
/// separatrix, with an extra factor k outside.  The response survives
/// damping gamma <= C1(1/q) epsilon.
inline ThresholdRow threshold_row(const ResonanceSpec& spec, double alpha) {
    Modulus k = resonant_modulus(spec, alpha);
    double G1 = detail::resonant_average(k, spec.q);
    double D = delta(k, spec.regime);
    double C1 = G1 / (std::sqrt(alpha) * D);
    if (spec.regime == Regime::rotation) C1 *= k.k();
    return {spec.q, k, G1, D, C1};
}

/// Rows for q = 2, 4, ..., qmax in one regime.
inline std::vector<ThresholdRow> threshold_table(Regime regime, double alpha, int qmax) {
    std::vector<ThresholdRow> rows;
    for (int q = 2; q <= qmax; q += 2)
        rows.push_back(threshold_row({1, q, regime}, alpha));
    return rows;
}

/// Forcing phase realising a prescribed damping coefficient at threshold:
/// C1_actual = sin(tau0) C1(1/q), principal branch.  Throws when the
/// requested coefficient exceeds the threshold.
inline double phase_for_threshold(const ResonanceSpec& spec, double alpha,
                                  double C1_actual) {
    double cap = threshold_row(spec, alpha).C1;
    if (std::fabs(C1_actual) > cap)
        throw std::domain_error("phase_for_threshold: coefficient above threshold");
    return std::asin(C1_actual / cap);
}

/// Second-order thresholds (damping scaling with epsilon^2) are a separate
/// expansion that this library does not carry out.
[[noreturn]] inline double threshold_C2(const ResonanceSpec&, double) {
    throw std::logic_error("threshold_C2: second-order thresholds are not implemented");
}

}  // namespace basinforge
