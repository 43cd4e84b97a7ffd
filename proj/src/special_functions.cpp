#include "muskat/special_functions.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "muskat/error.hpp"

namespace muskat {

namespace {

void require_alpha(double alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
}

}  // namespace

double taylor_coeff(int n, double alpha) {
    require(n >= 1, "taylor_coeff: n must be >= 1");
    require_alpha(alpha);
    const double b = 0.5 * (3.0 + alpha);
    double a = b;
    for (int k = 1; k < n; ++k) a *= (b + k) / (k + 1);
    return a;
}

CoeffTable::CoeffTable(double alpha_, int n_max) : alpha(alpha_) {
    require(n_max >= 1, "coeff table: n_max must be >= 1");
    require_alpha(alpha);
    const double b = 0.5 * (3.0 + alpha);
    a.resize(static_cast<std::size_t>(n_max));
    a[0] = b;
    for (int k = 1; k < n_max; ++k) a[k] = a[k - 1] * (b + k) / (k + 1);
}

double r_alpha(double z, double alpha) {
    require_alpha(alpha);
    // 1 - (1+u)^{-b} = -expm1(-b log1p(u)) avoids cancellation near z = 0.
    return -std::expm1(-0.5 * (3.0 + alpha) * std::log1p(z * z));
}

double r_alpha_series(double z, double alpha, int n_max) {
    const CoeffTable t(alpha, n_max);
    const double z2 = z * z;
    double s = 0.0;
    for (int n = n_max; n >= 1; --n) s = (s + ((n % 2) ? 1.0 : -1.0) * t(n)) * z2;
    return s;
}

double weighted_series(double z, double alpha) {
    require_alpha(alpha);
    require(std::isfinite(z) && std::abs(z) < 1.0, "weighted_series: |z| must be < 1");
    const double z2 = z * z;
    const double poly = 1.0 + (10.0 + 4.0 * alpha) * z2 + (2.0 + alpha) * (2.0 + alpha) * z2 * z2;
    // (1-z^2)^{-(7+a)/2} poly - 1, written to keep relative accuracy at small z.
    const double lp = -0.5 * (7.0 + alpha) * std::log1p(-z2);
    return std::expm1(lp) * poly + (poly - 1.0);
}

double weighted_partial_sum(double z, double alpha, int n_terms) {
    const CoeffTable t(alpha, n_terms);
    const double z2 = z * z;
    double s = 0.0, p = 1.0;
    for (int n = 1; n <= n_terms; ++n) {
        p *= z2;
        s += t(n) * (2.0 * n + 1) * (2.0 * n + 1) * p;
    }
    return s;
}

namespace {

constexpr int kHypMaxTerms = 1000000;

double hyp_series(double a, double b, double c, double x) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < kHypMaxTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (term == 0.0 || std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    throw NumericalError("hyp2f1: series did not converge");
}

}  // namespace

double hyp2f1(double a, double b, double c, double x) {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(x), "hyp2f1: non-finite input");
    require(x <= 0.0, "hyp2f1: only x <= 0 is supported");
    require(!(c <= 0.0 && c == std::floor(c)), "hyp2f1: c must not be a non-positive integer");
    if (x == 0.0) return 1.0;
    if (x > -0.5) return hyp_series(a, b, c, x);
    // Pfaff: 2F1(a,b;c;x) = (1-x)^{-a} 2F1(a, c-b; c; x/(x-1)).
    return std::pow(1.0 - x, -a) * hyp_series(a, c - b, c, x / (x - 1.0));
}

double ode_solution_h(double z, double alpha) {
    require_alpha(alpha);
    return (3.0 + alpha) * z * z * z / 3.0 * hyp2f1(1.5, 0.5 * (5.0 + alpha), 2.5, -z * z);
}

double ode_solution_g(double z, double alpha) {
    return ode_solution_h(z, alpha) * std::pow(1.0 + z * z, 0.5 * (3.0 + alpha));
}

namespace {

using GL = boost::math::quadrature::gauss<double, 30>;

constexpr int kHalfPeriods = 200;
constexpr int kHeadPanels = 4;
constexpr int kTailTerms = 8;

}  // namespace

double sine_moment(double alpha) {
    require_alpha(alpha);
    const double p = 1.0 + alpha;
    // [0,1]: u = v^{1/(1-alpha)} turns u^{-alpha} du into dv/(1-alpha).
    const double e = 1.0 / (1.0 - alpha);
    double head = 0.0;
    for (int k = 0; k < kHeadPanels; ++k) {
        const double lo = static_cast<double>(k) / kHeadPanels, hi = static_cast<double>(k + 1) / kHeadPanels;
        head += GL::integrate(
            [&](double v) {
                if (v <= 0.0) return 1.0;
                const double u = std::pow(v, e);
                return std::sin(u) / u;
            },
            lo, hi);
    }
    head *= e;
    // [1, N pi] per half period.
    auto f = [&](double u) { return std::sin(u) * std::pow(u, -p); };
    double body = GL::integrate(f, 1.0, std::numbers::pi);
    for (int k = 1; k < kHalfPeriods; ++k) body += GL::integrate(f, k * std::numbers::pi, (k + 1) * std::numbers::pi);
    // Tail by repeated integration by parts; sin(N pi) = 0 kills half the boundary terms.
    const double R = kHalfPeriods * std::numbers::pi;
    double tail = 0.0, poch = 1.0;
    for (int m = 0; m < kTailTerms; ++m) {
        tail += ((m % 2) ? -1.0 : 1.0) * poch * std::pow(R, -p - 2.0 * m);
        poch *= (p + 2.0 * m) * (p + 2.0 * m + 1.0);
    }
    tail *= (kHalfPeriods % 2) ? -1.0 : 1.0;
    return head + body + tail;
}

double pv_exp_integral(double S, double alpha) {
    require_alpha(alpha);
    require(std::isfinite(S), "pv_exp_integral: S must be finite");
    if (S == 0.0) return 0.0;
    // int_0^inf sin(rS) r^{-1-alpha} dr = sign(S) |S|^alpha int_0^inf sin(u) u^{-1-alpha} du.
    const double sgn = S > 0.0 ? 1.0 : -1.0;
    return 2.0 * sgn * std::pow(std::abs(S), alpha) * sine_moment(alpha);
}

}  // namespace muskat
