#pragma once

// Complete and incomplete elliptic integrals, Jacobi elliptic functions and
// the Jacobi zeta function, all through the arithmetic-geometric mean.
// References: Abramowitz & Stegun ch. 16-17, DLMF ch. 19/22.
//
// Everything here is plain double precision.  The modulus is carried together
// with its complement so that k -> 1 (the regime of high-order resonances,
// where 1 - k^2 can be ~1e-11) keeps full relative precision.

#include <cmath>
#include <stdexcept>
#include <string>

namespace basinforge {

/// Smallest admissible complementary parameter k'^2 = 1 - k^2.  Moduli closer
/// to 1 are rejected: the AGM has no precision left once 1 - k^2 underflows.
inline constexpr double min_complementary_parameter = 1e-15;

/// Elliptic modulus k with its complement k' = sqrt(1 - k^2).
class Modulus {
public:
    static Modulus from_k(double k) {
        if (!(k >= 0.0) || k >= 1.0)
            throw std::domain_error("Modulus: need 0 <= k < 1, got " + std::to_string(k));
        // (1-k)(1+k) keeps relative precision in k'^2 when k is close to 1.
        double m1 = (1.0 - k) * (1.0 + k);
        if (m1 < min_complementary_parameter)
            throw std::domain_error("Modulus: 1 - k^2 below minimum");
        return Modulus(k, std::sqrt(m1));
    }
    static Modulus from_kprime(double kprime) {
        if (!(kprime > 0.0) || kprime > 1.0)
            throw std::domain_error("Modulus: need 0 < k' <= 1");
        if (kprime * kprime < min_complementary_parameter)
            throw std::domain_error("Modulus: 1 - k^2 below minimum");
        return Modulus(std::sqrt((1.0 - kprime) * (1.0 + kprime)), kprime);
    }
    /// From the complementary parameter m1 = k'^2.
    static Modulus from_m1(double m1) {
        if (!(m1 >= min_complementary_parameter) || m1 > 1.0)
            throw std::domain_error("Modulus: complementary parameter out of range");
        return Modulus(std::sqrt(1.0 - m1), std::sqrt(m1));
    }

    double k() const { return k_; }
    double kprime() const { return kprime_; }
    double m() const { return k_ * k_; }        ///< parameter m = k^2
    double m1() const { return kprime_ * kprime_; }  ///< 1 - k^2

    /// Complementary modulus (k and k' swapped).
    Modulus complement() const { return Modulus(kprime_, k_); }

private:
    Modulus(double k, double kprime) : k_(k), kprime_(kprime) {}
    double k_, kprime_;
};

struct JacobiTriple {
    double sn, cn, dn;
};

namespace detail {

/// AGM sequence a_i, b_i, c_i started from (1, k', k).  The common limit a_n
/// gives K = pi/(2 a_n); the c_i drive the descending Landen recursion.
struct AgmChain {
    static constexpr int max_len = 64;
    int n = 0;  // a[n] is converged; c[n] is negligible
    double a[max_len], b[max_len], c[max_len];
};

inline AgmChain agm_chain(const Modulus& mod) {
    AgmChain ch;
    ch.a[0] = 1.0;
    ch.b[0] = mod.kprime();
    ch.c[0] = mod.k();
    int i = 0;
    while (i + 1 < AgmChain::max_len) {
        ch.a[i + 1] = 0.5 * (ch.a[i] + ch.b[i]);
        ch.b[i + 1] = std::sqrt(ch.a[i] * ch.b[i]);
        // c_{i+1} = (a_i - b_i)/2 written without cancellation.
        ch.c[i + 1] = ch.c[i] * ch.c[i] / (4.0 * ch.a[i + 1]);
        ++i;
        if (ch.c[i] < 4e-16 * ch.a[i]) break;
    }
    ch.n = i;
    return ch;
}

/// sn, cn, dn and the Jacobi zeta at reduced argument |u| <= K(k) + eps,
/// by the backward amplitude recursion (A&S 16.4, 17.6.3).
inline void sncndn_reduced(double u, const Modulus& mod, const AgmChain& ch,
                           JacobiTriple& out, double& zeta) {
    double phi = std::ldexp(ch.a[ch.n] * u, ch.n);
    zeta = 0.0;
    for (int i = ch.n; i >= 1; --i) {
        double s = std::sin(phi);
        zeta += ch.c[i] * s;
        double t = ch.c[i] / ch.a[i] * s;
        t = std::fmin(1.0, std::fmax(-1.0, t));
        phi = 0.5 * (phi + std::asin(t));
    }
    out.sn = std::sin(phi);
    out.cn = std::cos(phi);
    // dn = sqrt(1 - k^2 sn^2) = sqrt(cn^2 + k'^2 sn^2): no cancellation
    // even when k -> 1 and |sn| -> 1.
    out.dn = std::sqrt(out.cn * out.cn + mod.m1() * out.sn * out.sn);
}

inline void check_finite(double u, const char* fn) {
    if (!std::isfinite(u))
        throw std::domain_error(std::string(fn) + ": non-finite argument");
}

}  // namespace detail

/// Complete elliptic integral of the first kind K(k).
inline double complete_K(const Modulus& mod) {
    auto ch = detail::agm_chain(mod);
    return M_PI / (2.0 * ch.a[ch.n]);
}

/// Complete elliptic integral of the second kind E(k).
inline double complete_E(const Modulus& mod) {
    auto ch = detail::agm_chain(mod);
    double sum = 0.0;
    for (int i = ch.n; i >= 0; --i)  // small terms first
        sum += std::ldexp(ch.c[i] * ch.c[i], i - 1);
    return M_PI / (2.0 * ch.a[ch.n]) * (1.0 - sum);
}

/// dK/dk = (E/(1-k^2) - K)/k.  Requires k > 0.
inline double dK_dk(const Modulus& mod) {
    return (complete_E(mod) / mod.m1() - complete_K(mod)) / mod.k();
}

/// dE/dk = (E - K)/k.  Requires k > 0.
inline double dE_dk(const Modulus& mod) {
    return (complete_E(mod) - complete_K(mod)) / mod.k();
}

/// Jacobi elliptic functions sn, cn, dn at argument u.
inline JacobiTriple jacobi_sncndn(double u, const Modulus& mod) {
    detail::check_finite(u, "jacobi_sncndn");
    auto ch = detail::agm_chain(mod);
    double K = M_PI / (2.0 * ch.a[ch.n]);
    // Reduce by the 2K half-period: sn and cn flip sign, dn is periodic.
    double n = std::nearbyint(u / (2.0 * K));
    double ur = u - 2.0 * K * n;
    JacobiTriple t;
    double zeta;
    detail::sncndn_reduced(ur, mod, ch, t, zeta);
    if (std::fmod(std::fabs(n), 2.0) == 1.0) {
        t.sn = -t.sn;
        t.cn = -t.cn;
    }
    return t;
}

inline double jacobi_sn(double u, const Modulus& mod) { return jacobi_sncndn(u, mod).sn; }
inline double jacobi_cn(double u, const Modulus& mod) { return jacobi_sncndn(u, mod).cn; }
inline double jacobi_dn(double u, const Modulus& mod) { return jacobi_sncndn(u, mod).dn; }

/// Jacobi zeta function Z(u, k) = E(u, k) - E(k) u / K(k); odd, 2K-periodic.
inline double jacobi_zeta(double u, const Modulus& mod) {
    detail::check_finite(u, "jacobi_zeta");
    auto ch = detail::agm_chain(mod);
    double K = M_PI / (2.0 * ch.a[ch.n]);
    double n = std::nearbyint(u / (2.0 * K));
    double ur = u - 2.0 * K * n;
    JacobiTriple t;
    double zeta;
    detail::sncndn_reduced(ur, mod, ch, t, zeta);
    return zeta;
}

/// Incomplete elliptic integral of the second kind in Jacobi form,
/// E(u, k) = int_0^u dn^2(t, k) dt.  Quasi-periodic: E(u + 2K) = E(u) + 2E.
inline double incomplete_E(double u, const Modulus& mod) {
    return jacobi_zeta(u, mod) + complete_E(mod) / complete_K(mod) * u;
}

/// Incomplete elliptic integral of the first kind F(phi, k) in amplitude
/// form, i.e. the inverse of the amplitude function: am(F(phi,k), k) = phi.
inline double incomplete_F(double phi, const Modulus& mod) {
    detail::check_finite(phi, "incomplete_F");
    double K = complete_K(mod);
    // Reduce to |phi| <= pi/2 via F(phi + n*pi) = F(phi) + 2nK.
    double n = std::nearbyint(phi / M_PI);
    double pr = phi - n * M_PI;
    double u;
    if (std::fabs(pr) >= M_PI_2 - 1e-12) {
        u = std::copysign(K, pr);
    } else {
        // Newton on am(u) = pr; am is monotone with am' = dn >= k' > 0.
        u = pr * (2.0 * K / M_PI);
        for (int it = 0; it < 8; ++it) {
            JacobiTriple t = jacobi_sncndn(u, mod);
            double s = std::fmin(1.0, std::fmax(-1.0, t.sn));
            double diff = std::asin(s) - pr;
            u -= diff / t.dn;
            u = std::fmin(K, std::fmax(-K, u));
            if (std::fabs(diff) < 1e-15) break;
        }
    }
    return u + 2.0 * n * K;
}

/// The nome q = exp(-pi K(k') / K(k)).
inline double nome(const Modulus& mod) {
    double k = mod.k();
    if (k == 0.0) return 0.0;
    if (k < 1e-7) {
        double m = k * k;  // q = m/16 (1 + m/2 + ...), error O(m^2 q)
        return m / 16.0 * (1.0 + 0.5 * m);
    }
    return std::exp(-M_PI * complete_K(mod.complement()) / complete_K(mod));
}

enum class InversionForm {
    complete_K,  ///< solve K(k) = target (target >= pi/2)
    k_times_K,   ///< solve k * K(k) = target (target > 0)
};

/// Solve K(k) = target or k*K(k) = target for the modulus.  Both left-hand
/// sides are strictly increasing in k, so the root is unique.  Works in
/// s = log(1 - k^2), which stays well conditioned as k -> 1 (K ~ -s/2).
inline Modulus invert_modulus(double target, InversionForm form) {
    detail::check_finite(target, "invert_modulus");
    const double s_lo = std::log(min_complementary_parameter);
    if (form == InversionForm::complete_K) {
        if (target < M_PI_2 - 1e-14)
            throw std::domain_error("invert_modulus: K(k) >= pi/2");
        if (target <= M_PI_2) return Modulus::from_k(0.0);
    } else {
        if (!(target > 0.0))
            throw std::domain_error("invert_modulus: k*K(k) > 0 required");
    }
    auto eval = [&](double s, double& deriv) {
        Modulus mod = Modulus::from_m1(std::exp(s));
        double K = complete_K(mod), E = complete_E(mod);
        if (form == InversionForm::complete_K) {
            // dK/ds with s = log m1:  -(E - m1 K) / (2 k^2)
            deriv = -(E - mod.m1() * K) / (2.0 * mod.m());
            return K - target;
        }
        deriv = -E / (2.0 * mod.k());  // d(kK)/ds
        return mod.k() * K - target;
    };
    // Bracket, then safeguarded Newton.
    double lo = s_lo, hi = -1e-14;
    double d;
    double flo = eval(lo, d), fhi = eval(hi, d);
    if (flo < 0.0)
        throw std::domain_error("invert_modulus: target beyond modulus cap");
    if (fhi > 0.0) {
        // Root closer to k = 0 than m1 = 1 - 1e-14 resolves; only reachable
        // for k_times_K with tiny target or complete_K barely above pi/2.
        return form == InversionForm::complete_K
                   ? Modulus::from_k(0.0)
                   : Modulus::from_k(2.0 * target / M_PI);
    }
    double s = (target > 2.0) ? std::log(16.0) - 2.0 * target : 0.5 * (lo + hi);
    s = std::fmin(hi, std::fmax(lo, s));
    for (int it = 0; it < 80; ++it) {
        double f = eval(s, d);
        if (f > 0.0) lo = s; else hi = s;
        double step = f / d;
        double s_next = s - step;
        if (!(s_next > lo && s_next < hi)) s_next = 0.5 * (lo + hi);
        if (std::fabs(s_next - s) < 1e-15 * std::fabs(s) + 1e-16) { s = s_next; break; }
        s = s_next;
    }
    return Modulus::from_m1(std::exp(s));
}

}  // namespace basinforge
