#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "muskat/constants.hpp"
#include "muskat/kernel.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;
using namespace testing;

namespace {

ScalarField negated_laplacian(const ScalarField& f, const AlphaParams& a) {
    ScalarField l = fractional_laplacian(f, a.order());
    for (double& v : l.values) v = -v;
    return l;
}

double mean(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s / static_cast<double>(f.values.size());
}

ScalarField scaled(const ScalarField& f, double c) {
    ScalarField o = f;
    for (double& v : o.values) v *= c;
    return o;
}

ScalarField roll(const ScalarField& f, int di, int dj) {
    ScalarField o(f.grid);
    const int nx = f.grid.nx, ny = f.grid.ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) o.at((i + di) % nx, (j + dj) % ny) = f.at(i, j);
    return o;
}

const RhsMethod kMethods[] = {DirectQuadrature{}, SplitSpectral{}, SeriesTruncated{}};

}  // namespace

TEST_CASE("method validation and names") {
    CHECK_THROWS_AS(validate(DirectQuadrature{0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SplitSpectral{0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SeriesTruncated{0}), InvalidArgument);
    CHECK(method_name(DirectQuadrature{}) == "direct");
    CHECK(method_name(SplitSpectral{}) == "split");
    CHECK(method_name(SeriesTruncated{}) == "series");
    CHECK(contour_prefactor(0.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("constant and zero fields give a zero rhs") {
    const GridSpec g = square(32);
    const AlphaParams a(0.3);
    for (const auto& m : kMethods) {
        CHECK(max_abs(evaluate_rhs(sample(g, [](double, double) { return 1.7; }), a, m)) == 0.0);
        CHECK(max_abs(evaluate_rhs(ScalarField(g), a, m)) == 0.0);
    }
}

TEST_CASE("linearization of a small cosine on 128 points, alpha 0.25") {
    const GridSpec g = square(128);
    const AlphaParams a(0.25);
    const auto f = sample(g, [](double x, double) { return 1e-6 * std::cos(x); });
    const auto lin = negated_laplacian(f, a);
    for (const auto& m : kMethods) CHECK(rel_l2(evaluate_rhs(f, a, m), lin) <= 1e-3);
}

TEST_CASE("split remainder of a tiny single mode is negligible") {
    const GridSpec g = square(64);
    const AlphaParams a(0.25);
    const auto f = sample(g, [](double x, double y) { return 1e-6 * std::cos(x + y); });
    const auto n = nonlinear_remainder(f, a, SplitSpectral{});
    double nn = 0.0, ll = 0.0;
    const auto lin = negated_laplacian(f, a);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        nn += n.values[k] * n.values[k];
        ll += lin.values[k] * lin.values[k];
    }
    CHECK(std::sqrt(nn / ll) <= 1e-9);
    CHECK_THROWS_AS(nonlinear_remainder(f, a, DirectQuadrature{}), InvalidArgument);
}

TEST_CASE("cross-method agreement on a random band-limited field of amplitude 0.1") {
    const GridSpec g = square(128);
    for (double al : {0.0, 0.45}) {
        const AlphaParams a(al);
        const auto f = band_limited(g, 3, 0.1, 42);
        const auto d = rhs_direct(f, a), s = rhs_split(f, a), se = rhs_series(f, a, 8);
        CHECK(rel_l2(d, s) <= 1e-4);
        CHECK(rel_l2(se, s) <= 1e-4);
    }
}

TEST_CASE("series with one term matches split at amplitude 1e-3") {
    const GridSpec g = square(64);
    const AlphaParams a(0.2);
    const auto f = band_limited(g, 3, 1e-3, 9);
    CHECK(rel_l2(rhs_series(f, a, 1), rhs_split(f, a)) <= 1e-9);
}

TEST_CASE("series error decreases geometrically with n_max at amplitude 0.3") {
    const GridSpec g = square(64);
    const AlphaParams a(0.0);
    const auto f = bump(g, 0.3, 0.6);
    REQUIRE(sup_norms(f).grad_linf < 1.0);
    const auto s = nonlinear_remainder(f, a, SplitSpectral{});
    double prev = 1e300;
    for (int n : {1, 2, 4, 8}) {
        const auto se = nonlinear_remainder(f, a, SeriesTruncated{n});
        const double e = rel_l2(se, s);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("series refuses steep data") {
    const GridSpec g = square(32);
    const auto f = sample(g, [](double x, double) { return 1.5 * std::sin(x); });
    CHECK_THROWS_AS(rhs_series(f, AlphaParams(0.0), 4), NumericalError);
}

TEST_CASE("translation equivariance for lattice shifts") {
    const GridSpec g = square(32);
    const AlphaParams a(0.3);
    const auto f = band_limited(g, 3, 0.2, 1);
    for (const auto& m : kMethods) {
        const auto lhs = evaluate_rhs(roll(f, 5, 11), a, m);
        const auto rhs = roll(evaluate_rhs(f, a, m), 5, 11);
        CHECK(rel_l2(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("odd symmetry and mean preservation") {
    const GridSpec g = square(32, 4.0);
    const AlphaParams a(0.15);
    const auto f = band_limited(g, 4, 0.2, 77);
    for (const auto& m : kMethods) {
        const auto r = evaluate_rhs(f, a, m);
        const auto rn = evaluate_rhs(scaled(f, -1.0), a, m);
        CHECK(rel_l2(rn, scaled(r, -1.0)) <= 1e-12);
        CHECK(std::abs(mean(r)) <= 1e-8 * l2_norm(f));
    }
}

TEST_CASE("deviation from the linear response is quadratic in the amplitude") {
    const GridSpec g = square(32);
    const AlphaParams a(0.25);
    const auto unit = band_limited(g, 3, 1.0, 5);
    for (const auto& m : kMethods) {
        // Each method is compared with its own response at vanishing amplitude.
        const auto lin = scaled(evaluate_rhs(scaled(unit, 1e-9), a, m), 1e9);
        std::vector<double> la, le;
        for (double amp : {1e-2, 1e-3, 1e-4}) {
            const auto r = evaluate_rhs(scaled(unit, amp), a, m);
            la.push_back(std::log(amp));
            le.push_back(std::log(rel_l2(scaled(r, 1.0 / amp), lin)));
        }
        const double slope = (le[2] - le[0]) / (la[2] - la[0]);
        CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("results are bit-identical for a fixed thread count") {
    const GridSpec g = square(32);
    const AlphaParams a(0.1);
    const auto f = band_limited(g, 3, 0.1, 8);
    set_kernel_threads(3);
    const auto r1 = rhs_split(f, a), r2 = rhs_split(f, a);
    CHECK(r1.values == r2.values);
    set_kernel_threads(1);
    const auto r3 = rhs_split(f, a);
    CHECK(rel_l2(r1, r3) <= 1e-13);
    CHECK(kernel_threads() == 1);
}

TEST_CASE("monitors on zero, positive and gentle data") {
    const GridSpec g = square(64, 4 * kPi);
    const AlphaParams a(0.25);
    const KernelMonitors z = monitors(ScalarField(g), {0.0, 0.0}, a);
    CHECK(z.d3_value == 0.0);
    CHECK(z.c_alpha_min == 1.25);
    CHECK(z.dyf_sup == 0.0);

    const auto f = bump(g, 0.1, 0.5);
    const SupNorms n = sup_norms(f);
    const KernelMonitors m = monitors(f, {n.linf, n.l1}, a);
    CHECK(m.d3_value >= m.d3_lower_bound);
    CHECK(m.d3_lower_bound > 0.0);
    CHECK(m.dyf_sup == doctest::Approx(n.grad_linf));

    const double eps = 0.1, thr = grad_threshold(0.25, eps);
    const auto gentle = scaled(f, 0.9 * thr / n.grad_linf);
    const SupNorms gn = sup_norms(gentle);
    CHECK(monitors(gentle, {gn.linf, gn.l1}, a).c_alpha_min > eps);
}

TEST_CASE("kernel factor identities") {
    // Equal slopes leave only 1+alpha.
    CHECK(c_alpha_factor(0.3, 0.4, 0.4) == doctest::Approx(1.3));
    CHECK(c_alpha_factor(0.0, 0.0, 0.0) == 1.0);
    // Lower bound 1+a - 2(3+a)G^2/(1+G^2) when |d|, |g| <= G.
    const double a = 0.2, G = 0.3;
    for (double d = -G; d <= G; d += 0.05)
        for (double gg = -G; gg <= G; gg += 0.05)
            CHECK(c_alpha_factor(a, d, gg) >= 1 + a - 2 * (3 + a) * G * G / (1 + G * G) - 1e-14);
}
