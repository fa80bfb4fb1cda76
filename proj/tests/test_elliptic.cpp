#include <basinforge/elliptic.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "support/oracles.hpp"

using namespace basinforge;
using Catch::Approx;

namespace {
const double kGrid[] = {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999999};
}

TEST_CASE("complete integrals match frozen references", "[elliptic]") {
    struct Row { double k, K, E; };
    // Reference values from a 40-digit independent computation.
    const Row rows[] = {
        {0.1,      1.574745561517356,  1.5668619420216683},
        {0.5,      1.685750354812596,  1.4674622093394272},
        {0.7,      1.8456939983747235, 1.3556611355719555},
        {0.9,      2.2805491384227702, 1.1716970527816141},
        {0.99,     3.3566005233611924, 1.028475809028804},
    };
    for (const Row& r : rows) {
        Modulus mod = Modulus::from_k(r.k);
        CHECK(complete_K(mod) == Approx(r.K).epsilon(1e-14));
        CHECK(complete_E(mod) == Approx(r.E).epsilon(1e-14));
    }
    // k itself rounds to a double here, and dK/dk ~ 5e5 amplifies that
    // rounding to ~3e-11: compare accordingly (the sharp near-1 anchor below
    // pins the modulus through 1-k^2 instead).
    CHECK(complete_K(Modulus::from_k(0.999999)) ==
          Approx(7.9474797735623448).margin(1e-10));
    CHECK(complete_E(Modulus::from_k(0.999999)) ==
          Approx(1.0000074474777242).margin(1e-12));
    // Extreme modulus, specified through the complementary parameter so the
    // reference stays meaningful (K is sensitive to relative error in 1-k^2).
    Modulus near_one = Modulus::from_m1(4.1999999999559e-11);
    CHECK(complete_K(near_one) == Approx(13.332970110077227).epsilon(1e-13));
    CHECK(complete_E(near_one) == Approx(1.0000000002694924).epsilon(1e-13));
    // Special values.
    CHECK(complete_K(Modulus::from_k(0.0)) == Approx(M_PI_2).epsilon(1e-15));
    CHECK(complete_E(Modulus::from_k(0.0)) == Approx(M_PI_2).epsilon(1e-15));
    CHECK(complete_K(Modulus::from_k(std::sqrt(0.5))) ==
          Approx(1.8540746773013719).epsilon(1e-15));
}

TEST_CASE("complete integrals match their defining integrals", "[elliptic]") {
    for (double k : {0.1, 0.5, 0.9, 0.99}) {
        Modulus mod = Modulus::from_k(k);
        double m = k * k;
        double Kq = oracle::adaptive_simpson(
            [m](double t) { double s = std::sin(t); return 1.0 / std::sqrt(1.0 - m * s * s); },
            0.0, M_PI_2);
        double Eq = oracle::adaptive_simpson(
            [m](double t) { double s = std::sin(t); return std::sqrt(1.0 - m * s * s); },
            0.0, M_PI_2);
        CHECK(complete_K(mod) == Approx(Kq).epsilon(1e-12));
        CHECK(complete_E(mod) == Approx(Eq).epsilon(1e-12));
    }
}

TEST_CASE("Legendre relation", "[elliptic]") {
    for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
        Modulus mod = Modulus::from_k(k);
        Modulus comp = mod.complement();
        double lhs = complete_E(mod) * complete_K(comp) +
                     complete_E(comp) * complete_K(mod) -
                     complete_K(mod) * complete_K(comp);
        CHECK(lhs == Approx(M_PI_2).margin(1e-11));
    }
}

TEST_CASE("jacobi functions match frozen references", "[elliptic]") {
    {
        Modulus mod = Modulus::from_k(0.7);
        JacobiTriple t = jacobi_sncndn(1.0, mod);
        CHECK(t.sn == Approx(0.80380172005899359).margin(1e-13));
        CHECK(t.cn == Approx(0.5948972977163397).margin(1e-13));
        CHECK(t.dn == Approx(0.82668758879446087).margin(1e-13));
        CHECK(jacobi_zeta(1.0, mod) == Approx(0.14016216444378545).margin(1e-13));
        CHECK(incomplete_E(1.0, mod) == Approx(0.87466156508426001).margin(1e-13));
    }
    {
        Modulus mod = Modulus::from_k(0.999999);
        JacobiTriple t = jacobi_sncndn(0.3, mod);
        CHECK(t.sn == Approx(0.29131262083734872).margin(1e-12));
        CHECK(t.cn == Approx(0.95662790934661482).margin(1e-12));
        CHECK(t.dn == Approx(0.95662799805717392).margin(1e-12));
        CHECK(jacobi_zeta(0.3, mod) == Approx(0.25356453292166989).margin(1e-12));
    }
    {
        // Large argument: exercises periodic reduction and quasi-periodicity.
        Modulus mod = Modulus::from_k(0.8);
        CHECK(incomplete_E(7.25, mod) == Approx(4.445119236428562).margin(1e-12));
        CHECK(jacobi_zeta(7.25, mod) == Approx(-0.19254136905208291).margin(1e-12));
    }
    // Values at u = K: sn = 1, cn = 0, dn = k'.
    for (double k : {0.5, 0.9, 0.999999}) {
        Modulus mod = Modulus::from_k(k);
        JacobiTriple t = jacobi_sncndn(complete_K(mod), mod);
        CHECK(t.sn == Approx(1.0).margin(1e-12));
        CHECK(t.cn == Approx(0.0).margin(1e-12));
        CHECK(t.dn == Approx(mod.kprime()).margin(1e-12));
    }
    // k = 0 degenerates to circular functions.
    Modulus zero = Modulus::from_k(0.0);
    CHECK(jacobi_sn(2.3, zero) == Approx(std::sin(2.3)).margin(1e-15));
    CHECK(jacobi_cn(2.3, zero) == Approx(std::cos(2.3)).margin(1e-15));
    CHECK(jacobi_dn(2.3, zero) == Approx(1.0).margin(1e-15));
}

TEST_CASE("pointwise identities on a grid", "[elliptic]") {
    std::mt19937_64 rng(20260823);
    std::uniform_real_distribution<double> du(-20.0, 20.0);
    for (double k : kGrid) {
        Modulus mod = Modulus::from_k(k);
        double K = complete_K(mod), E = complete_E(mod);
        for (int i = 0; i < 40; ++i) {
            double u = du(rng);
            JacobiTriple t = jacobi_sncndn(u, mod);
            CHECK(t.sn * t.sn + t.cn * t.cn == Approx(1.0).margin(1e-12));
            CHECK(t.dn * t.dn == Approx(k * k * t.cn * t.cn + mod.m1()).margin(1e-12));
            // Parity.
            JacobiTriple tm = jacobi_sncndn(-u, mod);
            CHECK(tm.sn == Approx(-t.sn).margin(1e-12));
            CHECK(tm.cn == Approx(t.cn).margin(1e-12));
            // Zeta periodicity and E quasi-periodicity.
            CHECK(jacobi_zeta(u + 2.0 * K, mod) == Approx(jacobi_zeta(u, mod)).margin(1e-11));
            CHECK(incomplete_E(u + 2.0 * K, mod) ==
                  Approx(incomplete_E(u, mod) + 2.0 * E).margin(1e-11));
        }
    }
}

TEST_CASE("Fourier series route agrees with AGM route", "[elliptic]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> du(-10.0, 10.0);
    for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
        Modulus mod = Modulus::from_k(k);
        for (int i = 0; i < 25; ++i) {
            double u = du(rng);
            JacobiTriple t = jacobi_sncndn(u, mod);
            CHECK(t.sn == Approx(oracle::fourier_sn(u, mod)).margin(1e-10));
            CHECK(t.cn == Approx(oracle::fourier_cn(u, mod)).margin(1e-10));
            CHECK(t.dn == Approx(oracle::fourier_dn(u, mod)).margin(1e-10));
        }
    }
}

TEST_CASE("argument derivatives match finite differences", "[elliptic]") {
    const double h = 1e-5;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> du(-5.0, 5.0);
    for (double k : {0.2, 0.6, 0.9, 0.99}) {
        Modulus mod = Modulus::from_k(k);
        for (int i = 0; i < 20; ++i) {
            double u = du(rng);
            JacobiTriple t = jacobi_sncndn(u, mod);
            auto fd = [&](auto getter) {
                return (getter(jacobi_sncndn(u + h, mod)) -
                        getter(jacobi_sncndn(u - h, mod))) / (2.0 * h);
            };
            CHECK(fd([](JacobiTriple a) { return a.sn; }) ==
                  Approx(t.cn * t.dn).margin(1e-6));
            CHECK(fd([](JacobiTriple a) { return a.cn; }) ==
                  Approx(-t.sn * t.dn).margin(1e-6));
            CHECK(fd([](JacobiTriple a) { return a.dn; }) ==
                  Approx(-k * k * t.sn * t.cn).margin(1e-6));
            // d/du E(u,k) = dn^2, d/du Z(u,k) = dn^2 - E/K.
            double dE = (incomplete_E(u + h, mod) - incomplete_E(u - h, mod)) / (2.0 * h);
            CHECK(dE == Approx(t.dn * t.dn).margin(1e-6));
        }
    }
}

TEST_CASE("modulus derivatives match finite differences", "[elliptic]") {
    const double h = 1e-6;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> du(-3.0, 3.0);
    for (double k : {0.2, 0.5, 0.8}) {
        Modulus mod = Modulus::from_k(k);
        Modulus lo = Modulus::from_k(k - h), hi = Modulus::from_k(k + h);
        // dK/dk and dE/dk helpers.
        CHECK(dK_dk(mod) ==
              Approx((complete_K(hi) - complete_K(lo)) / (2.0 * h)).margin(1e-7));
        CHECK(dE_dk(mod) ==
              Approx((complete_E(hi) - complete_E(lo)) / (2.0 * h)).margin(1e-7));
        double kp2 = mod.m1();
        for (int i = 0; i < 12; ++i) {
            double u = du(rng);
            JacobiTriple t = jacobi_sncndn(u, mod);
            double Eu = incomplete_E(u, mod);
            double dsn = u / k * t.cn * t.dn + k / kp2 * t.sn * t.cn * t.cn -
                         Eu * t.cn * t.dn / (k * kp2);
            double dcn = -u / k * t.sn * t.dn - k / kp2 * t.sn * t.sn * t.cn +
                         Eu * t.sn * t.dn / (k * kp2);
            double ddn = -k * u * t.sn * t.cn - k / kp2 * t.sn * t.sn * t.dn +
                         k / kp2 * Eu * t.sn * t.cn;
            auto fd = [&](auto getter) {
                return (getter(jacobi_sncndn(u, hi)) - getter(jacobi_sncndn(u, lo))) /
                       (2.0 * h);
            };
            CHECK(fd([](JacobiTriple a) { return a.sn; }) == Approx(dsn).margin(1e-5));
            CHECK(fd([](JacobiTriple a) { return a.cn; }) == Approx(dcn).margin(1e-5));
            CHECK(fd([](JacobiTriple a) { return a.dn; }) == Approx(ddn).margin(1e-5));
        }
    }
}

TEST_CASE("incomplete E equals the dn^2 integral", "[elliptic]") {
    for (double k : {0.3, 0.7, 0.95}) {
        Modulus mod = Modulus::from_k(k);
        for (double x1 : {0.4, 1.1, 2.9}) {
            double q = oracle::adaptive_simpson(
                [&](double t) { double d = jacobi_dn(t, mod); return d * d; }, 0.0, x1);
            CHECK(incomplete_E(x1, mod) == Approx(q).margin(1e-11));
        }
    }
}

TEST_CASE("incomplete F: references, quadrature, amplitude round-trip", "[elliptic]") {
    CHECK(incomplete_F(0.7, Modulus::from_k(0.6)) ==
          Approx(0.72007839946519029).margin(1e-13));
    CHECK(incomplete_F(1.2, Modulus::from_k(0.99)) ==
          Approx(1.6480538781987344).margin(1e-12));
    for (double k : {0.2, 0.6, 0.9}) {
        Modulus mod = Modulus::from_k(k);
        double m = k * k;
        for (double phi : {0.3, 0.9, 1.4}) {
            double q = oracle::adaptive_simpson(
                [m](double t) { double s = std::sin(t); return 1.0 / std::sqrt(1.0 - m * s * s); },
                0.0, phi);
            CHECK(incomplete_F(phi, mod) == Approx(q).margin(1e-12));
        }
        // Round-trip u -> am(u) -> u on (-K, K).
        double K = complete_K(mod);
        for (double f : {-0.95, -0.4, 0.2, 0.8}) {
            double u = f * K;
            JacobiTriple t = jacobi_sncndn(u, mod);
            double am = std::atan2(t.sn, t.cn);
            CHECK(incomplete_F(am, mod) == Approx(u).margin(1e-12));
        }
        CHECK(incomplete_F(M_PI_2, mod) == Approx(K).margin(1e-12));
    }
}

TEST_CASE("nome", "[elliptic]") {
    CHECK(nome(Modulus::from_k(0.0)) == 0.0);
    CHECK(nome(Modulus::from_k(0.5)) == Approx(0.01797238700896724).epsilon(1e-13));
    CHECK(nome(Modulus::from_k(0.9)) == Approx(0.10235242351354435).epsilon(1e-13));
    // Self-complementary point: q = exp(-pi) exactly.
    CHECK(nome(Modulus::from_k(std::sqrt(0.5))) == Approx(std::exp(-M_PI)).epsilon(1e-14));
    // Tiny-k series branch: q = k^2/16 to leading order, and it joins the
    // direct formula continuously at the branch point.
    CHECK(nome(Modulus::from_k(1e-8)) == Approx(6.25e-18).epsilon(1e-6));
    {
        double k = 1.2e-7;  // just above the series cutoff: direct formula
        double m = k * k;
        CHECK(nome(Modulus::from_k(k)) ==
              Approx(m / 16.0 * (1.0 + 0.5 * m)).epsilon(1e-9));
    }
}

TEST_CASE("modulus inversion", "[elliptic]") {
    // Round-trips K(k) = target.
    for (double k : kGrid) {
        Modulus mod = Modulus::from_k(k);
        Modulus back = invert_modulus(complete_K(mod), InversionForm::complete_K);
        CHECK(back.k() == Approx(k).margin(1e-12));
    }
    // Round-trips k K(k) = target.
    for (double k : kGrid) {
        Modulus mod = Modulus::from_k(k);
        Modulus back = invert_modulus(k * complete_K(mod), InversionForm::k_times_K);
        CHECK(back.k() == Approx(k).margin(1e-12));
    }
    // Resonant moduli of the alpha = 1/2 pendulum: K(k) = pi q sqrt(alpha)/2.
    double sa = std::sqrt(0.5);
    CHECK(invert_modulus(M_PI * 2.0 * sa / 2.0, InversionForm::complete_K).k() ==
          Approx(0.885201568846).margin(1e-11));
    CHECK(invert_modulus(M_PI * 12.0 * sa / 2.0, InversionForm::complete_K).k() ==
          Approx(0.999999999979).margin(1e-11));
    CHECK(invert_modulus(M_PI * 2.0 * sa / 2.0, InversionForm::k_times_K).k() ==
          Approx(0.924397052341).margin(1e-11));
    // Degenerate and out-of-range targets.
    CHECK(invert_modulus(M_PI_2, InversionForm::complete_K).k() == 0.0);
    CHECK_THROWS_AS(invert_modulus(1.0, InversionForm::complete_K), std::domain_error);
    CHECK_THROWS_AS(invert_modulus(40.0, InversionForm::complete_K), std::domain_error);
    CHECK_THROWS_AS(invert_modulus(-1.0, InversionForm::k_times_K), std::domain_error);
    CHECK_THROWS_AS(invert_modulus(40.0, InversionForm::k_times_K), std::domain_error);
}

TEST_CASE("modulus guards", "[elliptic]") {
    CHECK_THROWS_AS(Modulus::from_k(-0.1), std::domain_error);
    CHECK_THROWS_AS(Modulus::from_k(1.0), std::domain_error);
    CHECK_THROWS_AS(Modulus::from_k(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(Modulus::from_m1(1e-16), std::domain_error);
    CHECK_NOTHROW(Modulus::from_m1(1e-15));
    CHECK_THROWS_AS(jacobi_sncndn(std::nan(""), Modulus::from_k(0.5)), std::domain_error);
}
