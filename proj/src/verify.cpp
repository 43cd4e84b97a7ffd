#include "muskat/verify.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "muskat/constants.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/error.hpp"
#include "muskat/special_functions.hpp"

namespace muskat {

namespace {

constexpr double kSeriesRelTol = 1e-10;
constexpr int kSeriesTerms = 200;
constexpr double kPvLimitTol = 1e-4;
constexpr double kOdeResidualTol = 1e-6;
constexpr double kQuadTol = 1e-8;
constexpr double kHypTol = 1e-10;

SuiteCheck make(const std::string& id) {
    SuiteCheck c;
    c.id = id;
    return c;
}

// The bracket without its leading 1, as the identity is sometimes misprinted.
double wrong_weighted_series(double z, double alpha) {
    const double z2 = z * z;
    return std::pow(1.0 - z2, -0.5 * (7.0 + alpha)) * ((10.0 + 4.0 * alpha) * z2 + (2.0 + alpha) * (2.0 + alpha) * z2 * z2) - 1.0;
}

SuiteCheck series_identity(bool wrong) {
    SuiteCheck c = make("series-identity");
    double worst = 0.0, literal = 0.0;
    for (int ia = 0; ia <= 9; ++ia)
        for (int iz = 0; iz <= 19; ++iz) {
            const double a = 0.05 * ia, z = 0.05 * iz;
            const double closed = wrong ? wrong_weighted_series(z, a) : weighted_series(z, a);
            const double partial = weighted_partial_sum(z, a, kSeriesTerms);
            const double tail = weighted_series_tail_bound(z, a, kSeriesTerms);
            const double scale = std::max(std::abs(closed), 1e-300);
            const double gap = std::abs(closed - partial);
            literal = std::max(literal, gap / scale);
            // Distance beyond the partial sum's own truncation error.
            worst = std::max(worst, std::max(0.0, gap - tail) / scale);
        }
    c.passed = worst <= kSeriesRelTol;
    c.worst = worst;
    c.detail = "closed form vs " + std::to_string(kSeriesTerms) + "-term sums beyond the tail bound: " +
               format_double(worst) + " (raw gap " + format_double(literal) + "), tol " + format_double(kSeriesRelTol);
    return c;
}

SuiteCheck pv_bound(int samples, std::uint64_t seed) {
    SuiteCheck c = make("pv-bound");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(-100.0, 100.0), ua(0.0, 0.95);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double S = us(rng), a = ua(rng);
        const double v = pv_exp_integral(S, a);
        const double bound = c_alpha(a) * std::pow(std::abs(S), a);
        worst = std::max(worst, std::abs(v) / bound);
    }
    const double limit = pv_exp_integral(1.0, 1e-7);
    const double lim_err = std::abs(limit - std::numbers::pi);
    c.passed = worst <= 1.0 && lim_err <= kPvLimitTol;
    c.worst = worst;
    c.detail = "max |pv|/(C(alpha)|S|^alpha) " + format_double(worst) + " over " + std::to_string(samples) +
               " samples; |pv(1, 0+) - pi| " + format_double(lim_err);
    return c;
}

SuiteCheck k0_check() {
    SuiteCheck c = make("k0");
    const double k = k0_of_alpha(0.0);
    // Partial sums converge fast at z = k0; 400 terms leave no visible tail.
    const double resid = std::abs(2.0 * c_alpha(0.0) * weighted_partial_sum(k, 0.0, 400) - 1.0);
    bool decreasing = true;
    double prev = k;
    for (int i = 1; i <= 45; ++i) {
        const double v = k0_of_alpha(0.01 * i);
        if (!(v < prev)) decreasing = false;
        prev = v;
    }
    c.passed = std::abs(k - 0.106) <= 1e-3 && resid <= 1e-10 && decreasing;
    c.worst = k;
    c.detail = "k0(0) = " + format_double(k) + ", partial-sum residual " + format_double(resid) +
               (decreasing ? ", strictly decreasing on [0, 0.45]" : ", NOT decreasing on [0, 0.45]");
    return c;
}

SuiteCheck ode_residual(bool wrong) {
    SuiteCheck c = make("ode-residual");
    double worst = 0.0;
    for (double a : {0.0, 0.45})
        for (int k = 0; k < 50; ++k) {
            const double z = -2.5 + 5.0 * (k + 0.5) / 50.0;
            const double h = 1e-5;
            const double gp = (ode_solution_g(z + h, a) - ode_solution_g(z - h, a)) / (2.0 * h);
            const double g = ode_solution_g(z, a);
            // The misprinted form drops the factor g from the second term.
            const double r = wrong ? (1 + z * z) * gp - (3 + a) * z - (3 + a) * z * z
                                   : (1 + z * z) * gp - (3 + a) * z * g - (3 + a) * z * z;
            worst = std::max(worst, std::abs(r));
        }
    double qerr = 0.0;
    for (double a : {0.0, 0.45})
        for (double z : {0.25, 0.5, 1.0, 2.0}) {
            auto hp = [a](double s) { return (3.0 + a) * s * s * std::pow(1.0 + s * s, -0.5 * (5.0 + a)); };
            const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(hp, 0.0, z, 15, 1e-14);
            qerr = std::max(qerr, std::abs(q - ode_solution_h(z, a)));
        }
    c.passed = worst <= kOdeResidualTol && qerr <= kQuadTol;
    c.worst = worst;
    c.detail = "max residual " + format_double(worst) + " at 100 points; |H - int H'| " + format_double(qerr);
    return c;
}

SuiteCheck hyp2f1_check() {
    SuiteCheck c = make("hyp2f1");
    double worst = 0.0;
    for (double x : {-0.1, -0.4, -0.6, -1.0, -3.0, -10.0}) {
        worst = std::max(worst, std::abs(hyp2f1(1, 1, 2, x) / (-std::log1p(-x) / x) - 1.0));
        worst = std::max(worst, std::abs(hyp2f1(1.5, 2.5, 2.5, x) / std::pow(1.0 - x, -1.5) - 1.0));
    }
    c.passed = worst <= kHypTol;
    c.worst = worst;
    c.detail = "max relative error vs log and binomial identities " + format_double(worst);
    return c;
}

}  // namespace

double weighted_series_tail_bound(double z, double alpha, int n_terms) {
    const double z2 = z * z;
    if (z2 == 0.0) return 0.0;
    require(z2 < 1.0, "tail bound: |z| must be < 1");
    const double beta = 0.5 * (3.0 + alpha);
    const int n = n_terms + 1;
    const double lt = std::lgamma(beta + n) - std::lgamma(beta) - std::lgamma(n + 1.0);
    const double term = std::exp(lt + 2.0 * std::log(2.0 * n + 1.0) + n * std::log(z2));
    // Term ratios decrease with n, so the first omitted ratio bounds all later ones.
    const double q = (beta + n) / (n + 1.0) * std::pow((2.0 * n + 3.0) / (2.0 * n + 1.0), 2) * z2;
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    return term / (1.0 - q);
}

const std::vector<std::string>& property_check_names() {
    static const std::vector<std::string> names{"series-identity", "pv-bound", "k0", "ode-residual", "hyp2f1"};
    return names;
}

std::vector<SuiteCheck> property_checks(const VerifyOptions& opts) {
    const auto& names = property_check_names();
    auto known = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
    if (opts.only) require(known(*opts.only), "unknown check: " + *opts.only);
    if (opts.inject_wrong_identity)
        require(*opts.inject_wrong_identity == "series-identity" || *opts.inject_wrong_identity == "ode-residual",
                "wrong identities exist only for series-identity and ode-residual");
    require(opts.samples >= 1, "samples must be >= 1");
    std::vector<SuiteCheck> out;
    auto want = [&](const char* n) { return !opts.only || *opts.only == n; };
    auto wrong = [&](const char* n) { return opts.inject_wrong_identity && *opts.inject_wrong_identity == n; };
    if (want("series-identity")) out.push_back(series_identity(wrong("series-identity")));
    if (want("pv-bound")) out.push_back(pv_bound(opts.samples, opts.seed));
    if (want("k0")) out.push_back(k0_check());
    if (want("ode-residual")) out.push_back(ode_residual(wrong("ode-residual")));
    if (want("hyp2f1")) out.push_back(hyp2f1_check());
    return out;
}

}  // namespace muskat
