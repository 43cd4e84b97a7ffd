#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "muskat/field.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

inline muskat::GridSpec square(int n, double l = 2.0 * kPi) { return {n, n, l, l}; }

inline muskat::ScalarField sample(const muskat::GridSpec& g, const std::function<double(double, double)>& fn) {
    muskat::ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.x(i), g.y(j));
    return f;
}

// Smooth random field on modes |n| <= kmax, fixed seed.
inline muskat::ScalarField band_limited(const muskat::GridSpec& g, int kmax, double amp, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    muskat::ScalarField f(g);
    for (int n2 = 0; n2 <= kmax; ++n2)
        for (int n1 = -kmax; n1 <= kmax; ++n1) {
            const double a = u(rng), b = u(rng);
            const double k1 = 2.0 * kPi * n1 / g.lx, k2 = 2.0 * kPi * n2 / g.ly;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double ph = k1 * g.x(i) + k2 * g.y(j);
                    f.at(i, j) += a * std::cos(ph) + b * std::sin(ph);
                }
        }
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    for (double& v : f.values) v *= amp / m;
    return f;
}

inline muskat::ScalarField bump(const muskat::GridSpec& g, double amp, double sigma) {
    return sample(g, [&](double x, double y) {
        const double dx = x - 0.5 * g.lx, dy = y - 0.5 * g.ly;
        return amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    });
}

inline double rel_l2(const muskat::ScalarField& a, const muskat::ScalarField& b) {
    double s = 0.0, t = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        s += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
        t += b.values[k] * b.values[k];
    }
    return t > 0.0 ? std::sqrt(s / t) : std::sqrt(s);
}

inline double max_abs(const muskat::ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace testing
