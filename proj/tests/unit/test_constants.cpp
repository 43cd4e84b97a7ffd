#include <doctest.h>

#include <cmath>
#include <numbers>

#include "muskat/constants.hpp"
#include "muskat/error.hpp"
#include "muskat/special_functions.hpp"

using namespace muskat;

TEST_CASE("c_alpha examples") {
    CHECK(c_alpha(0.0) == std::numbers::pi);
    CHECK(c_alpha(0.5) == 12.0);
    CHECK(c_alpha(0.25) == 8.0);
    CHECK_THROWS_AS(c_alpha(1.0), InvalidArgument);
}

TEST_CASE("k0 value, root property and bracketing") {
    const double k = k0_of_alpha(0.0);
    CHECK(std::abs(k - 0.106) <= 1e-3);
    CHECK(std::abs(2 * c_alpha(0.0) * weighted_series(k, 0.0) - 1.0) <= 1e-10);
    CHECK(std::abs(2 * c_alpha(0.0) * weighted_partial_sum(k, 0.0, 200) - 1.0) <= 1e-10);
    for (double a : {0.0, 0.1, 0.25, 0.45}) {
        const double r = k0_of_alpha(a);
        CHECK(r > 0.0);
        CHECK(r < 1.0);
        CHECK(2 * c_alpha(a) * weighted_series(0.99 * r, a) < 1.0);
        CHECK(2 * c_alpha(a) * weighted_series(1.01 * r, a) > 1.0);
    }
    CHECK(k0_of_alpha(0.25) < k0_of_alpha(0.0));
}

TEST_CASE("k0 strictly decreasing on a 0.01 grid") {
    double prev = k0_of_alpha(0.0);
    for (int i = 1; i <= 45; ++i) {
        const double v = k0_of_alpha(0.01 * i);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("k0 outside the regime") {
    CHECK_THROWS_WITH_AS(k0_of_alpha(0.5), "alpha must be < 0.5 for k0", InvalidArgument);
}

TEST_CASE("mu examples and monotonicity") {
    CHECK(mu_of(0.0, 0.0) == 1.0);
    CHECK(std::abs(mu_of(0.2, k0_of_alpha(0.2))) <= 1e-10);
    const double m = mu_of(0.0, 0.05);
    CHECK(m == doctest::Approx(1 - 2 * std::numbers::pi * weighted_series(0.05, 0.0)));
    CHECK(m > 0.0);
    double prev = 2.0;
    for (double z = 0.0; z < 0.5; z += 0.01) {
        const double v = mu_of(0.3, z);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(mu_of(0.0, 0.9 * k0_of_alpha(0.0)) > 0.0);
    CHECK(mu_of(0.0, 0.9 * k0_of_alpha(0.0)) <= 1.0);
    CHECK_THROWS_AS(mu_of(0.0, 1.0), InvalidArgument);
}

TEST_CASE("gradient threshold examples") {
    CHECK(grad_threshold(0.0, 1e-12) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-10));
    CHECK(grad_threshold(0.0, 0.4) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(grad_threshold(0.45, 0.1) == doctest::Approx(0.49320).epsilon(1e-5));
    double prev = 0.0;
    for (double a = 0.0; a < 0.99; a += 0.05) {
        const double t = grad_threshold(a, 0.1);
        CHECK(t < 1.0);
        CHECK(t > prev);
        prev = t;
    }
    CHECK_THROWS_AS(grad_threshold(0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(grad_threshold(0.0, 1.0), InvalidArgument);
}

TEST_CASE("decay constants examples and inversion") {
    const DecayConstants d = decay_constants(0.0, 1.0, 1.0);
    CHECK(d.c_tilde == doctest::Approx(0.11738).epsilon(1e-4));
    CHECK(d.c_decay == doctest::Approx(0.05869).epsilon(1e-4));
    double prev = 1e300;
    for (double l1 = 0.0; l1 < 100.0; l1 += 5.0) {
        const double c = decay_constants(0.2, 0.5, l1).c_tilde;
        CHECK(c < prev);
        prev = c;
    }
    for (double a : {0.0, 0.3})
        for (double li : {0.1, 1.0, 2.0}) {
            const double l1 = 3.0;
            const double base = 1 + 2 * l1 / std::numbers::pi + 4 * li * li * li;
            const double c = decay_constants(a, li, l1).c_tilde;
            CHECK(std::abs(c * 2 * std::pow(base, 0.5 * (3 + a)) - std::numbers::pi) <= 1e-12);
        }
    CHECK(2.0 / (1.0 + 0.45) == doctest::Approx(1.37931).epsilon(1e-5));
    CHECK_THROWS_AS(decay_constants(0.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("c_sharp formula") {
    const double a = 0.2, eps = 0.1, li = 0.3, g0 = 0.4, mt = 1.5;
    const double K = eps / (2 * std::pow(1 + 2 * mt / std::numbers::pi + 4 * li * li * g0, 0.5 * (3 + a)));
    CHECK(c_sharp(a, eps, li, g0, mt) == doctest::Approx(K * (1 + a) / 4 * std::pow(g0, (1 + a) / 2)));
}

TEST_CASE("constants report fills what the inputs allow") {
    DataNorms n;
    n.f1_norm = 0.05;
    n.linf = 1.0;
    n.l1 = 1.0;
    n.eps = 0.1;
    const ConstantsReport r = constants_report(0.0, n);
    CHECK(r.c_alpha == std::numbers::pi);
    REQUIRE(r.k0);
    CHECK(r.mu);
    CHECK(r.grad_threshold);
    REQUIRE(r.decay);
    CHECK(r.decay->c_decay == doctest::Approx(0.05869).epsilon(1e-4));
    CHECK(!r.c_sharp_note.empty());
    const ConstantsReport h = constants_report(0.5);
    CHECK(h.c_alpha == 12.0);
    CHECK(!h.k0);
    CHECK(h.k0_error == "alpha must be < 0.5 for k0");
}
