#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levy/wienerhopf.hpp"
#include "oracles.hpp"

using namespace levy;

namespace {

CharExponent table8_model() {
    const double c = calibrate_c(0.1, 1.2, -11.0, 12.0, 0.0);
    return CharExponent::kobol(1.2, c, -11.0, 12.0, 0.0);
}

}  // namespace

TEST_CASE("roots: BM closed forms") {
    const double s2 = 0.09, q = 1.3;
    const auto m0 = CharExponent::bm(s2, 0.0);
    const WhFactorField f0(m0, q);
    const double b = std::sqrt(2.0 * q / s2);
    CHECK(f0.beta_plus().value() == doctest::Approx(b).epsilon(1e-12));
    CHECK(f0.beta_minus().value() == doctest::Approx(-b).epsilon(1e-12));

    const double mu = 0.05;
    const auto m1 = CharExponent::bm(s2, mu);
    const WhFactorField f1(m1, q);
    const double disc = std::sqrt(mu * mu + 2.0 * q * s2);
    CHECK(f1.beta_plus().value() == doctest::Approx((-mu + disc) / s2).epsilon(1e-12));
    CHECK(f1.beta_minus().value() == doctest::Approx((-mu - disc) / s2).epsilon(1e-12));
}

TEST_CASE("roots: KoBoL residual") {
    const auto m = table8_model();
    const WhFactorField f(m, 1.1);
    REQUIRE(f.beta_minus().has_value());
    REQUIRE(f.beta_plus().has_value());
    CHECK(std::abs(1.1 + m.psi(cplx(0.0, f.sigma_plus())).real()) < 1e-12);
    CHECK(std::abs(1.1 + m.psi(cplx(0.0, f.sigma_minus())).real()) < 1e-12);
    // large q: no root before the cut
    const WhFactorField fbig(m, 50.0);
    CHECK(!fbig.beta_minus().has_value());
    CHECK(fbig.sigma_plus() == doctest::Approx(12.0));
}

TEST_CASE("normalization phi(0) = 1") {
    const WhFactorField f(table8_model(), 1.1);
    CHECK(std::abs(f.phi_plus(0.0) - 1.0) == 0.0);
    CHECK(std::abs(f.phi_minus(0.0) - 1.0) == 0.0);
}

TEST_CASE("Table 8 golden values at y = 0") {
    const auto m = table8_model();
    const WhFactorField f(m, 1.1, WhOptions{1e-15 * 1.01, 0.25 * pi, 0.55, 0.75});
    const cplx xi = std::sinh(cplx(0.0, -0.15));  // = -i sin 0.15
    const cplx plus = f.phi_plus(xi);
    const cplx minus = f.phi_minus(xi);
    CHECK(std::abs(plus.real() - 1.03663360053561) < 1e-10);
    CHECK(std::abs(minus.real() - 0.972251835483482) < 1e-10);
    CHECK(std::abs(plus.imag()) < 1e-12);
    CHECK(std::abs(minus.imag()) < 1e-12);
}

TEST_CASE("Table 8 factor values across the evaluation curve") {
    const auto m = table8_model();
    const WhFactorField f(m, 1.1, WhOptions{1e-15 * 1.01, 0.25 * pi, 0.55, 0.75});
    const struct {
        double y;
        double re_p, im_p, re_m, im_m;
    } rows[] = {
        {-5.0, -3.8732615824580e-03, -5.8173831101994e-02, 1.68715279339566e-02,
         6.88181160078408e-02},
        {5.0, -3.8732615824580e-03, 5.8173831101994e-02, 1.68715279339566e-02,
         -6.88181160078408e-02},
        {-10.0, -4.67991818674e-05, 4.358762795728e-04, 1.0003700599534e-04,
         5.3263366781895e-04},
    };
    for (const auto& row : rows) {
        const cplx xi = std::sinh(cplx(row.y, -0.15));
        const cplx p = f.phi_plus(xi), mv = f.phi_minus(xi);
        CHECK(std::abs(p.real() - row.re_p) < 2e-9);
        CHECK(std::abs(p.imag() - row.im_p) < 2e-9);
        CHECK(std::abs(mv.real() - row.re_m) < 2e-9);
        CHECK(std::abs(mv.imag() - row.im_m) < 2e-9);
    }
}

TEST_CASE("factorization identity residual") {
    const auto m = table8_model();
    const double q = 1.1;
    const WhFactorField f(m, q, WhOptions{1e-15 * 1.01, 0.25 * pi, 0.55, 0.75});
    for (int k = -15; k <= 14; ++k) {
        const cplx xi = std::sinh(cplx(k * 0.5, -0.15));
        const cplx res = f.phi_plus(xi) * f.phi_minus(xi) * (q + m.psi(xi)) / q - 1.0;
        CHECK(std::abs(res) < 1e-12);
    }
}

TEST_CASE("cross-method agreement of direct and continued factors") {
    const auto m = table8_model();
    const WhFactorField f(m, 1.1, WhOptions{1e-15 * 1.01, 0.25 * pi, 0.55, 0.75});
    // near the real axis both routes are available for phi^+
    for (double t : {-4.0, -1.0, 0.3, 2.0, 6.0}) {
        const cplx xi(t, -0.12);
        const cplx direct = f.phi_plus_direct(xi);
        const cplx continued = 1.1 / ((1.1 + m.psi(xi)) * f.phi_minus_direct(xi));
        CHECK(std::abs(direct - continued) < 1e-13 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("conjugation symmetry") {
    const WhFactorField f(table8_model(), 2.3);
    for (double t : {0.4, 1.7, 5.0}) {
        const cplx xi(t, 0.8);
        CHECK(std::abs(f.phi_plus(-std::conj(xi)) - std::conj(f.phi_plus(xi))) < 1e-12);
        const cplx xi2(t, -0.6);
        CHECK(std::abs(f.phi_minus(-std::conj(xi2)) - std::conj(f.phi_minus(xi2))) < 1e-12);
    }
}

TEST_CASE("modulus bound |phi^+| <= 1 on the real line") {
    const WhFactorField f(table8_model(), 1.1);
    for (double t = -30.0; t <= 30.0; t += 1.37) {
        CHECK(std::abs(f.phi_plus(cplx(t, 0.0))) <= 1.0 + 1e-12);
        CHECK(std::abs(f.phi_minus(cplx(t, 0.0))) <= 1.0 + 1e-12);
    }
}

TEST_CASE("residue identity at the roots") {
    const auto m = table8_model();
    const double q = 1.1;
    const WhFactorField f(m, q);
    // lim (xi + i beta^-) phi^-(xi)/q = 1/(psi'(-i beta^-) phi^+(-i beta^-))
    const cplx root(0.0, f.sigma_plus());
    auto probe = [&](double eps) {
        const cplx xi = root + cplx(eps, 0.0);
        return (xi - root) * f.phi_minus(xi) / q;
    };
    // Richardson extrapolation in the offset
    const cplx lim = 2.0 * probe(5e-6) - probe(1e-5);
    const cplx rhs = 1.0 / (m.dpsi(root) * f.phi_plus_direct(root));
    CHECK(std::abs(lim - rhs) < 1e-6 * (1.0 + std::abs(rhs)));
}

TEST_CASE("half-plane analyticity probe: two admissible contours agree") {
    const auto m = table8_model();
    const WhFactorField f1(m, 1.1, WhOptions{1e-12, 0.25 * pi, 0.55, 0.75});
    const WhFactorField f2(m, 1.1, WhOptions{1e-12, 0.30 * pi, 0.40, 0.75});
    for (double t : {-3.0, 0.5, 4.0}) {
        const cplx xi(t, 0.9);
        CHECK(std::abs(f1.phi_plus(xi) - f2.phi_plus(xi)) < 1e-11);
    }
}

TEST_CASE("exponent integral against the reference quadrature") {
    const auto m = table8_model();
    const double q = 1.1;
    const WhFactorField f(m, q);
    const cplx xi(0.7, 1.5);
    // flat-line version of the phi^+ exponent on a line below Im xi
    const double w = -2.0;
    const cplx flat = oracles::reference_quadrature(
        [&](double t) {
            const cplx eta(t, w);
            return xi * std::log(1.0 + m.psi(eta) / q) / (eta * (xi - eta));
        },
        1e-11);
    const cplx expected = std::exp(flat / (2.0 * pi * iu));
    CHECK(std::abs(f.phi_plus_direct(xi) - expected) < 1e-9 * (1.0 + std::abs(expected)));
}

TEST_CASE("extended representation: pure BM is exactly rational") {
    const double s2 = 0.16, q = 2.0;
    const auto m = CharExponent::bm(s2, 0.0);
    const WhFactorField f(m, q);
    const double b = std::sqrt(2.0 * q / s2);
    for (double t : {-2.0, 0.4, 3.0}) {
        const cplx xi(t, 0.1);
        bool fb = true;
        const cplx plus = wh_factor_extended(f, true, xi, &fb);
        CHECK(!fb);
        CHECK(std::abs(plus - b / (b - iu * xi)) < 1e-14 * std::abs(plus));
        const cplx xi2(t, -0.1);
        const cplx minus = wh_factor_extended(f, false, xi2, &fb);
        CHECK(std::abs(minus - b / (b + iu * xi2)) < 1e-14 * std::abs(minus));
        // and the general machinery agrees
        CHECK(std::abs(f.phi_plus(xi) - b / (b - iu * xi)) < 1e-10);
    }
}

TEST_CASE("extended representation: finite variation KoBoL with drift") {
    const auto m = CharExponent::kobol(0.7, 0.2, -8.0, 9.0, 0.1);
    const WhFactorField f(m, 1.4, WhOptions{1e-13, 0.25 * pi, 0.55, 0.75});
    bool fb = true;
    int checked = 0;
    for (double t : {-6.0, -2.5, -0.8, 0.4, 1.9, 4.2, 8.0, 12.0, 17.0, 25.0}) {
        const cplx xi(t, 0.6);
        const cplx a = wh_factor_extended(f, true, xi, &fb);
        CHECK(!fb);
        CHECK(std::abs(a - f.phi_plus(xi)) < 1e-11 * (1.0 + std::abs(a)));
        const cplx xi2(t, -0.5);
        const cplx b = wh_factor_extended(f, false, xi2, &fb);
        CHECK(std::abs(b - f.phi_minus(xi2)) < 1e-11 * (1.0 + std::abs(b)));
        checked += 2;
    }
    CHECK(checked == 20);
}

TEST_CASE("extended representation falls back outside its cases") {
    const auto m = table8_model();  // nu > 1, sigma = 0: no enhanced case
    const WhFactorField f(m, 1.1);
    bool fb = false;
    const cplx v = wh_factor_extended(f, true, cplx(0.5, 0.4), &fb);
    CHECK(fb);
    CHECK(std::abs(v - f.phi_plus(cplx(0.5, 0.4))) == 0.0);
}

TEST_CASE("grid sizes stay within the reported windows") {
    const auto m = table8_model();
    const WhFactorField f15(m, 1.1, WhOptions{1.01e-15, 0.25 * pi, 0.55, 0.75});
    CHECK(f15.grid_minus().N >= 350);
    CHECK(f15.grid_minus().N <= 385);
    const WhFactorField f10(m, 1.1, WhOptions{1e-10, 0.25 * pi, 0.55, 0.75});
    CHECK(f10.grid_minus().N >= 159);
    CHECK(f10.grid_minus().N <= 175);
}
