#pragma once

// Independent numerical oracles used by the test suites only.  These
// deliberately avoid the library's own evaluation routes: integrals are done
// by adaptive Simpson quadrature, Jacobi functions by their Fourier series in
// the nome, so that agreement is a genuine cross-check.

#include <basinforge/elliptic.hpp>

#include <cmath>
#include <cstdlib>

namespace oracle {

namespace detail {

template <class F>
double simpson_recurse(F& f, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
template <class F>
double adaptive_simpson(F f, double a, double b, double tol = 1e-13) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// sn via its Fourier series in the nome (usable for k not too close to 1).
inline double fourier_sn(double u, const basinforge::Modulus& mod) {
    double K = basinforge::complete_K(mod), q = basinforge::nome(mod);
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
        double qp = std::pow(q, n - 0.5);
        double coeff = qp / (1.0 - std::pow(q, 2 * n - 1));
        sum += coeff * std::sin((2 * n - 1) * M_PI * u / (2.0 * K));
        if (std::fabs(coeff) < 1e-17) break;
    }
    return 2.0 * M_PI / (mod.k() * K) * sum;
}

inline double fourier_cn(double u, const basinforge::Modulus& mod) {
    double K = basinforge::complete_K(mod), q = basinforge::nome(mod);
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
        double qp = std::pow(q, n - 0.5);
        double coeff = qp / (1.0 + std::pow(q, 2 * n - 1));
        sum += coeff * std::cos((2 * n - 1) * M_PI * u / (2.0 * K));
        if (std::fabs(coeff) < 1e-17) break;
    }
    return 2.0 * M_PI / (mod.k() * K) * sum;
}

inline double fourier_dn(double u, const basinforge::Modulus& mod) {
    double K = basinforge::complete_K(mod), q = basinforge::nome(mod);
    double sum = 0.0;
    for (int n = 1; n < 200; ++n) {
        // Standard series (A&S 16.23.3): denominator 1 + q^(2n).
        double coeff = std::pow(q, n) / (1.0 + std::pow(q, 2 * n));
        sum += coeff * std::cos(n * M_PI * u / K);
        if (std::fabs(coeff) < 1e-17) break;
    }
    return M_PI / (2.0 * K) + 2.0 * M_PI / K * sum;
}

}  // namespace oracle
