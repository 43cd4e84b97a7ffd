#include <doctest.h>

#include "helpers.hpp"
#include "muskat/spectral.hpp"

using namespace muskat;
using namespace testing;

TEST_CASE("grid validation rejects odd, small and nonpositive sizes") {
    CHECK_THROWS_AS(GridSpec({15, 16, 1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(GridSpec({14, 16, 1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(GridSpec({16, 16, 0.0, 1.0}).validate(), InvalidArgument);
    CHECK_NOTHROW(GridSpec({16, 32, 1.0, 2.0}).validate());
}

TEST_CASE("forward of zero is zero") {
    const SpectralField F = forward(ScalarField(square(16)));
    for (auto c : F.coeffs) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("forward of a single cosine has two half coefficients") {
    const GridSpec g = square(32, 3.0);
    const SpectralField F = forward(sample(g, [&](double x, double) { return std::cos(2 * kPi * x / g.lx); }));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const bool mode = j == 0 && (i == 1 || i == g.nx - 1);
            CHECK(std::abs(F.at(i, j) - std::complex<double>(mode ? 0.5 : 0.0, 0.0)) < 1e-15);
        }
}

TEST_CASE("transform round trip and Parseval on 100 seeded fields") {
    const GridSpec g{32, 16, 2.0, 5.0};
    std::mt19937 rng(42);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int s = 0; s < 100; ++s) {
        ScalarField f(g);
        for (double& v : f.values) v = n(rng);
        const SpectralField F = forward(f);
        CHECK(rel_l2(inverse(F), f) <= 1e-12);
        double lhs = 0.0, rhs = 0.0;
        for (auto c : F.coeffs) lhs += std::norm(c);
        for (double v : f.values) rhs += v * v;
        rhs /= static_cast<double>(g.size());
        CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
        // Hermitian symmetry of a real field.
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                CHECK(std::abs(F.at(i, j) - std::conj(F.at((g.nx - i) % g.nx, (g.ny - j) % g.ny))) < 1e-14);
    }
}

TEST_CASE("forward rejects non-finite input") {
    ScalarField f(square(16));
    f.values[3] = std::nan("");
    CHECK_THROWS_AS(forward(f), InvalidArgument);
}

TEST_CASE("fractional laplacian scales single modes and kills constants") {
    const GridSpec g = square(32);
    const auto m1 = sample(g, [](double x, double) { return std::cos(x); });
    const auto m2 = sample(g, [](double x, double) { return std::cos(2 * x); });
    CHECK(rel_l2(fractional_laplacian(m1, 1.5), m1) < 1e-13);
    auto scaled = m2;
    for (double& v : scaled.values) v *= std::pow(2.0, 1.5);
    CHECK(rel_l2(fractional_laplacian(m2, 1.5), scaled) < 1e-13);
    CHECK(std::pow(2.0, 1.5) == doctest::Approx(2.828427).epsilon(1e-6));
    const auto c = sample(g, [](double, double) { return 3.0; });
    CHECK(max_abs(fractional_laplacian(c, 0.7)) == 0.0);
    CHECK_THROWS_AS(apply_fractional_laplacian(forward(c), -0.1), InvalidArgument);
}

TEST_CASE("fractional laplacian composes additively") {
    const auto f = band_limited(square(32), 6, 1.0, 7);
    const auto a = fractional_laplacian(fractional_laplacian(f, 0.4), 0.85);
    CHECK(rel_l2(a, fractional_laplacian(f, 1.25)) <= 1e-12);
}

TEST_CASE("gradient of sin and of a constant") {
    const GridSpec g = square(32);
    const auto gr = gradient(sample(g, [](double x, double) { return std::sin(x); }));
    CHECK(rel_l2(gr[0], sample(g, [](double x, double) { return std::cos(x); })) < 1e-13);
    CHECK(max_abs(gr[1]) < 1e-14);
    const auto gc = gradient(sample(g, [](double, double) { return 2.0; }));
    CHECK(max_abs(gc[0]) == 0.0);
    CHECK(max_abs(gc[1]) == 0.0);
}

TEST_CASE("gradient matches centered differences at second order") {
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
        const GridSpec g = square(n);
        const auto f = sample(g, [](double x, double y) { return std::sin(x + 2 * y) + 0.5 * std::cos(3 * x - y); });
        const auto gx = gradient(f)[0];
        double err = 0.0;
        const double h = g.hx();
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double fd = (f.at((i + 1) % n, j) - f.at((i + n - 1) % n, j)) / (2 * h);
                err = std::max(err, std::abs(fd - gx.at(i, j)));
            }
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
        prev = err;
    }
}

TEST_CASE("fourier norm examples and homogeneity") {
    const GridSpec g = square(32);
    const auto c1 = sample(g, [](double x, double) { return std::cos(x); });
    CHECK(fourier_norm(c1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fourier_norm(ScalarField(g), 1.0) == 0.0);
    const auto c2 = sample(g, [](double x, double y) { return std::cos(x) + std::cos(2 * y); });
    CHECK(fourier_norm(c2, 2.0) == doctest::Approx(5.0).epsilon(1e-12));
    const auto shifted = sample(g, [](double x, double) { return 2.0 + std::cos(x); });
    CHECK(fourier_norm(shifted, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fourier_norm(shifted, 0.0, true) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(fourier_norm(c1, -1.0), InvalidArgument);
    const auto f = band_limited(g, 5, 1.0, 3);
    auto fc = f;
    for (double& v : fc.values) v *= -2.5;
    CHECK(std::abs(fourier_norm(fc, 1.3) - 2.5 * fourier_norm(f, 1.3)) <= 1e-14 * fourier_norm(fc, 1.3));
}

TEST_CASE("fourier norm of order one dominates the gradient sup") {
    for (unsigned s = 0; s < 20; ++s) {
        const auto f = band_limited(square(32), 5, 1.0, 100 + s);
        CHECK(sup_norms(f).grad_linf <= fourier_norm(f, 1.0));
    }
}

TEST_CASE("sup norms of cos and of zero") {
    const GridSpec g = square(32);
    const SupNorms n = sup_norms(sample(g, [](double x, double) { return std::cos(x); }));
    CHECK(n.linf == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(n.grad_linf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(n.mass) < 1e-14);
    const SupNorms z = sup_norms(ScalarField(g));
    CHECK(z.linf == 0.0);
    CHECK(z.grad_linf == 0.0);
    CHECK(z.l1 == 0.0);
    CHECK(z.mass == 0.0);
}

TEST_CASE("sup norms of a Gaussian bump on 256 points") {
    const GridSpec g = square(256);
    const SupNorms n = sup_norms(bump(g, 1.0, 0.5));
    CHECK(std::abs(n.l1 - 2 * kPi * 0.25) <= 1e-6);
    CHECK(std::abs(n.mass - 2 * kPi * 0.25) <= 1e-6);
    CHECK(n.linf == doctest::Approx(1.0).epsilon(1e-12));
    // max |grad| = e^{-1/2}/sigma.
    CHECK(n.grad_linf == doctest::Approx(std::exp(-0.5) / 0.5).epsilon(1e-10));
}

TEST_CASE("sup norms find off-grid maxima") {
    const GridSpec g = square(16);
    const auto f = sample(g, [](double x, double y) { return std::cos(x - 0.123) * std::cos(y + 0.321); });
    CHECK(sup_norms(f).linf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid_norms(f).linf < 1.0 - 1e-4);
}

TEST_CASE("translation by the shift theorem") {
    const GridSpec g = square(32);
    const auto f = sample(g, [](double x, double y) { return std::sin(x) * std::cos(2 * y); });
    const auto t = translate(f, 0.3, -0.2);
    CHECK(rel_l2(t, sample(g, [](double x, double y) { return std::sin(x + 0.3) * std::cos(2 * (y - 0.2)); })) < 1e-13);
}

TEST_CASE("point jet evaluates derivatives of the interpolant") {
    const GridSpec g = square(32);
    const auto F = forward(sample(g, [](double x, double y) { return std::sin(x) * std::cos(y); }));
    const PointJet j = evaluate_jet(F, 0.7, 1.1);
    CHECK(j.f == doctest::Approx(std::sin(0.7) * std::cos(1.1)));
    CHECK(j.fx == doctest::Approx(std::cos(0.7) * std::cos(1.1)));
    CHECK(j.fxy == doctest::Approx(-std::cos(0.7) * std::sin(1.1)));
    CHECK(j.fyyy == doctest::Approx(std::sin(0.7) * std::sin(1.1)));
}

TEST_CASE("argmax and gradient argmax are refined") {
    const GridSpec g = square(32);
    const auto f = sample(g, [](double x, double y) { return std::exp(std::cos(x - 1.0) + std::cos(y - 2.0)); });
    const PeakLocation p = argmax(f);
    CHECK(p.x == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.y == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(p.value == doctest::Approx(std::exp(2.0)));
    const PeakLocation q = grad_argmax(sample(g, [](double x, double) { return std::sin(x); }));
    CHECK(q.value == doctest::Approx(1.0));
}

TEST_CASE("hessian and sobolev norm of a single mode") {
    const GridSpec g = square(32);
    const auto f = sample(g, [](double x, double) { return std::cos(x); });
    const Hessian h = hessian(f);
    auto minus = f;
    for (double& v : minus.values) v = -v;
    CHECK(rel_l2(h.xx, minus) < 1e-13);
    CHECK(max_abs(h.xy) < 1e-14);
    // ||cos||_{L2}^2 = 2 pi^2, weight (1+1)^k.
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(2 * kPi * kPi)));
    CHECK(sobolev_norm(f, 2) == doctest::Approx(std::sqrt(4.0 * 2 * kPi * kPi)));
}

TEST_CASE("alpha params range") {
    CHECK_THROWS_AS(AlphaParams(1.0), InvalidArgument);
    CHECK_THROWS_AS(AlphaParams(-0.1), InvalidArgument);
    CHECK_THROWS_AS(AlphaParams(1.2), InvalidArgument);
    CHECK(AlphaParams(0.25).beta() == 1.625);
    CHECK_THROWS_AS(AlphaParams(0.5).require_global_regime(), InvalidArgument);
    CHECK_NOTHROW(AlphaParams(0.45).require_global_regime());
}
