#pragma once

// Adaptive embedded Runge-Kutta integrator of order 8(5,3) — the Dormand-
// Prince pair popularised by Hairer, Norsett & Wanner (DOP853), without the
// dense-output stages.  Event times (Poincare sections, damping-ramp corners)
// are hit exactly by clamping the step, so interpolation is never needed.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace basinforge {

/// Thrown when an integration cannot continue; carries the last good time.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& msg, double tau)
        : std::runtime_error(msg + " at tau = " + std::to_string(tau)), tau_(tau) {}
    double tau() const { return tau_; }

private:
    double tau_;
};

namespace dop853 {
// Butcher tableau (Hairer's published coefficients).
inline constexpr double c2 = 0.526001519587677318785587544488e-01,
    c3 = 0.789002279381515978178381316732e-01,
    c4 = 0.118350341907227396726757197510e+00,
    c5 = 0.281649658092772603273242802490e+00,
    c6 = 1.0 / 3.0, c7 = 0.25, c8 = 0.307692307692307692307692307692e+00,
    c9 = 0.651282051282051282051282051282e+00, c10 = 0.6,
    c11 = 0.857142857142857142857142857142e+00;
inline constexpr double a21 = 5.26001519587677318785587544488e-2,
    a31 = 1.97250569845378994544595329183e-2, a32 = 5.91751709536136983633785987549e-2,
    a41 = 2.95875854768068491816892993775e-2, a43 = 8.87627564304205475450678981324e-2,
    a51 = 2.41365134159266685502369798665e-1, a53 = -8.84549479328286085344864962717e-1,
    a54 = 9.24834003261792003115737966543e-1, a61 = 3.7037037037037037037037037037e-2,
    a64 = 1.70828608729473871279604482173e-1, a65 = 1.25467687566822425016691814123e-1,
    a71 = 3.7109375e-2, a74 = 1.70252211019544039314978060272e-1,
    a75 = 6.02165389804559606850219397283e-2, a76 = -1.7578125e-2,
    a81 = 3.70920001185047927108779319836e-2, a84 = 1.70383925712239993810214054705e-1,
    a85 = 1.07262030446373284651809199168e-1, a86 = -1.53194377486244017527936158236e-2,
    a87 = 8.27378916381402288758473766002e-3, a91 = 6.24110958716075717114429577812e-1,
    a94 = -3.36089262944694129406857109825e0, a95 = -8.68219346841726006818189891453e-1,
    a96 = 2.75920996994467083049415600797e1, a97 = 2.01540675504778934086186788979e1,
    a98 = -4.34898841810699588477366255144e1, a101 = 4.77662536438264365890433908527e-1,
    a104 = -2.48811461997166764192642586468e0, a105 = -5.90290826836842996371446475743e-1,
    a106 = 2.12300514481811942347288949897e1, a107 = 1.52792336328824235832596922938e1,
    a108 = -3.32882109689848629194453265587e1, a109 = -2.03312017085086261358222928593e-2,
    a111 = -9.3714243008598732571704021658e-1, a114 = 5.18637242884406370830023853209e0,
    a115 = 1.09143734899672957818500254654e0, a116 = -8.14978701074692612513997267357e0,
    a117 = -1.85200656599969598641566180701e1, a118 = 2.27394870993505042818970056734e1,
    a119 = 2.49360555267965238987089396762e0, a1110 = -3.0467644718982195003823669022e0,
    a121 = 2.27331014751653820792359768449e0, a124 = -1.05344954667372501984066689879e1,
    a125 = -2.00087205822486249909675718444e0, a126 = -1.79589318631187989172765950534e1,
    a127 = 2.79488845294199600508499808837e1, a128 = -2.85899827713502369474065508674e0,
    a129 = -8.87285693353062954433549289258e0, a1210 = 1.23605671757943030647266201528e1,
    a1211 = 6.43392746015763530355970484046e-1;
inline constexpr double b1 = 5.42937341165687622380535766363e-2,
    b6 = 4.45031289275240888144113950566e0, b7 = 1.89151789931450038304281599044e0,
    b8 = -5.8012039600105847814672114227e0, b9 = 3.1116436695781989440891606237e-1,
    b10 = -1.52160949662516078556178806805e-1, b11 = 2.01365400804030348374776537501e-1,
    b12 = 4.47106157277725905176885569043e-2;
// 3rd-order error weights (applied to k1, k9, k12).
inline constexpr double bhh1 = 0.244094488188976377952755905512e+00,
    bhh2 = 0.733846688281611857341361741547e+00,
    bhh3 = 0.220588235294117647058823529412e-01;
// 5th-order error weights.
inline constexpr double er1 = 0.1312004499419488073250102996e-01,
    er6 = -0.1225156446376204440720569753e+01, er7 = -0.4957589496572501915214079952e+00,
    er8 = 0.1664377182454986536961530415e+01, er9 = -0.3503288487499736816886487290e+00,
    er10 = 0.3341791187130174790297318841e+00, er11 = 0.8192320648511571246570742613e-01,
    er12 = -0.2235530786388629525884427845e-01;
}  // namespace dop853

/// Explicit 8th-order integrator with 5th/3rd-order embedded error estimate.
/// RHS must be callable as rhs(tau, y, dy) with y, dy std::array<double, N>.
template <std::size_t N, class RHS>
class Rk853 {
public:
    using Vec = std::array<double, N>;

    Rk853(RHS rhs, double rel_tol, double abs_tol, double max_step)
        : rhs_(rhs), rel_tol_(rel_tol), abs_tol_(abs_tol), max_step_(max_step) {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0))
            throw std::domain_error("Rk853: tolerances and max_step must be positive");
    }

    /// Advance (tau, y) to exactly tau_end (requires tau_end >= tau).
    void integrate_to(double& tau, Vec& y, double tau_end) {
        if (!(tau_end >= tau))
            throw std::domain_error("Rk853: backward integration not supported");
        if (tau_end == tau) return;
        if (h_ <= 0.0) h_ = initial_step(tau, y, tau_end);
        while (tau < tau_end) {
            bool clipped = false;
            double h = std::fmin(h_, max_step_);
            if (tau + h >= tau_end) {
                h = tau_end - tau;
                clipped = true;
            }
            if (h < 1e-14 * std::fmax(1.0, std::fabs(tau))) {
                if (clipped) {  // nothing left but roundoff
                    tau = tau_end;
                    return;
                }
                throw IntegrationError("Rk853: step size underflow", tau);
            }
            double err = try_step(tau, y, h, ynew_);
            if (err <= 1.0) {  // accept
                tau = clipped ? tau_end : tau + h;
                y = ynew_;
                for (double v : y)
                    if (!std::isfinite(v))
                        throw IntegrationError("Rk853: non-finite state", tau);
                if (!clipped) {
                    // Keep the nominal step memory across clipped event hits,
                    // otherwise every section crossing would shrink it.
                    double fac = std::pow(std::fmax(err, 1e-10), 0.125) / 0.9;
                    fac = std::fmax(1.0 / 6.0, std::fmin(3.0, fac));
                    h_ = h / fac;
                }
                ++n_accepted;
            } else {
                double fac = std::fmin(3.0, std::pow(err, 0.125) / 0.9);
                h_ = h / fac;
                ++n_rejected;
            }
        }
    }

    /// Reset the internal step-size memory (after discontinuous changes).
    void reset_step() { h_ = 0.0; }

    long n_accepted = 0, n_rejected = 0, n_rhs = 0;

private:
    /// One trial step; returns the scaled error norm (accept if <= 1).
    double try_step(double tau, const Vec& y, double h, Vec& out) {
        using namespace dop853;
        Vec k1, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, t;
        auto stage = [&](double c, const Vec& arg, Vec& k) {
            rhs_(tau + c * h, arg, k);
            ++n_rhs;
        };
        stage(0.0, y, k1);
        axpy(t, y, h, {{a21, k1}});
        stage(c2, t, k2);
        axpy(t, y, h, {{a31, k1}, {a32, k2}});
        stage(c3, t, k3);
        axpy(t, y, h, {{a41, k1}, {a43, k3}});
        stage(c4, t, k4);
        axpy(t, y, h, {{a51, k1}, {a53, k3}, {a54, k4}});
        stage(c5, t, k5);
        axpy(t, y, h, {{a61, k1}, {a64, k4}, {a65, k5}});
        stage(c6, t, k6);
        axpy(t, y, h, {{a71, k1}, {a74, k4}, {a75, k5}, {a76, k6}});
        stage(c7, t, k7);
        axpy(t, y, h, {{a81, k1}, {a84, k4}, {a85, k5}, {a86, k6}, {a87, k7}});
        stage(c8, t, k8);
        axpy(t, y, h, {{a91, k1}, {a94, k4}, {a95, k5}, {a96, k6}, {a97, k7}, {a98, k8}});
        stage(c9, t, k9);
        axpy(t, y, h,
             {{a101, k1}, {a104, k4}, {a105, k5}, {a106, k6}, {a107, k7}, {a108, k8},
              {a109, k9}});
        stage(c10, t, k10);
        axpy(t, y, h,
             {{a111, k1}, {a114, k4}, {a115, k5}, {a116, k6}, {a117, k7}, {a118, k8},
              {a119, k9}, {a1110, k10}});
        stage(c11, t, k11);
        axpy(t, y, h,
             {{a121, k1}, {a124, k4}, {a125, k5}, {a126, k6}, {a127, k7}, {a128, k8},
              {a129, k9}, {a1210, k10}, {a1211, k11}});
        stage(1.0, t, k12);

        double err5 = 0.0, err3 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sum = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] +
                         b9 * k9[i] + b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            out[i] = y[i] + h * sum;
            double sk = abs_tol_ + rel_tol_ * std::fmax(std::fabs(y[i]), std::fabs(out[i]));
            double e3 = sum - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
            double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                        er9 * k9[i] + er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
            err3 += (e3 / sk) * (e3 / sk);
            err5 += (e5 / sk) * (e5 / sk);
        }
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) deno = 1.0;
        return std::fabs(h) * err5 * std::sqrt(1.0 / (N * deno));
    }

    /// Hairer-style starting step estimate.
    double initial_step(double tau, const Vec& y, double tau_end) {
        Vec f0, f1, y1;
        rhs_(tau, y, f0);
        ++n_rhs;
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = abs_tol_ + rel_tol_ * std::fabs(y[i]);
            d0 += (y[i] / sk) * (y[i] / sk);
            d1 += (f0[i] / sk) * (f0[i] / sk);
        }
        double h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
        h = std::fmin(h, std::fmin(max_step_, tau_end - tau));
        for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h * f0[i];
        rhs_(tau + h, y1, f1);
        ++n_rhs;
        double d2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = abs_tol_ + rel_tol_ * std::fabs(y[i]);
            double df = (f1[i] - f0[i]) / sk;
            d2 += df * df;
        }
        d2 = std::sqrt(d2) / h;
        double der12 = std::fmax(std::sqrt(d1), d2);
        double h1 = (der12 <= 1e-15)
                        ? std::fmax(1e-6, h * 1e-3)
                        : std::pow(0.01 / der12, 1.0 / 8.0);
        return std::fmin(std::fmin(100.0 * h, h1), std::fmin(max_step_, tau_end - tau));
    }

    struct Term {
        double a;
        const Vec& k;
    };
    static void axpy(Vec& out, const Vec& y, double h, std::initializer_list<Term> terms) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (const Term& t : terms) s += t.a * t.k[i];
            out[i] = y[i] + h * s;
        }
    }

    RHS rhs_;
    double rel_tol_, abs_tol_, max_step_;
    double h_ = 0.0;
    Vec ynew_{};
};

}  // namespace basinforge
