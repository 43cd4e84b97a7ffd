#include "muskat/constants.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>

#include "muskat/error.hpp"
#include "muskat/special_functions.hpp"

namespace muskat {

namespace {

void require_alpha(double alpha) {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
}

}  // namespace

double c_alpha(double alpha) {
    require_alpha(alpha);
    return alpha == 0.0 ? std::numbers::pi : 6.0 / (1.0 - alpha);
}

double k0_of_alpha(double alpha) {
    require_alpha(alpha);
    require(alpha < 0.5, "alpha must be < 0.5 for k0");
    const double c = c_alpha(alpha);
    auto F = [&](double z) { return 2.0 * c * weighted_series(z, alpha) - 1.0; };
    const double lo = 0.0, hi = 1.0 - 1e-9;
    if (!(F(lo) < 0.0 && F(hi) > 0.0)) throw NumericalError("k0: no sign change in (0,1)");
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
    const auto [a, b] = boost::math::tools::bisect(F, lo, hi, tol);
    return 0.5 * (a + b);
}

double mu_of(double alpha, double f1_norm) {
    require(std::isfinite(f1_norm) && f1_norm >= 0.0 && f1_norm < 1.0, "mu: f1_norm must lie in [0,1)");
    return 1.0 - 2.0 * c_alpha(alpha) * weighted_series(f1_norm, alpha);
}

double grad_threshold(double alpha, double eps) {
    require_alpha(alpha);
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0 + alpha, "grad_threshold: eps must lie in (0, 1+alpha)");
    return std::sqrt((1.0 + alpha - eps) / (5.0 + alpha + eps));
}

DecayConstants decay_constants(double alpha, double linf0, double l1_0) {
    require_alpha(alpha);
    require(std::isfinite(linf0) && linf0 > 0.0, "decay_constants: linf0 must be > 0");
    require(std::isfinite(l1_0) && l1_0 >= 0.0, "decay_constants: l1_0 must be >= 0");
    const double beta = 0.5 * (3.0 + alpha);
    const double base = 1.0 + 2.0 * l1_0 / std::numbers::pi + 4.0 * linf0 * linf0 * linf0;
    DecayConstants d;
    d.c_tilde = std::numbers::pi / (2.0 * std::pow(base, beta));
    d.c_decay = 0.5 * (1.0 + alpha) * std::pow(linf0, 0.5 * (1.0 + alpha)) * d.c_tilde;
    return d;
}

double c_sharp(double alpha, double eps, double linf0, double grad0, double m_t) {
    require_alpha(alpha);
    require(eps > 0.0 && linf0 >= 0.0 && grad0 > 0.0 && m_t >= 0.0, "c_sharp: invalid norms");
    const double beta = 0.5 * (3.0 + alpha);
    const double base = 1.0 + 2.0 * m_t / std::numbers::pi + 4.0 * linf0 * linf0 * grad0;
    const double K = eps / (2.0 * std::pow(base, beta));
    return K * 0.25 * (1.0 + alpha) * std::pow(grad0, 0.5 * (1.0 + alpha));
}

ConstantsReport constants_report(double alpha, const DataNorms& norms) {
    ConstantsReport r;
    r.alpha = alpha;
    r.c_alpha = c_alpha(alpha);
    try {
        r.k0 = k0_of_alpha(alpha);
    } catch (const InvalidArgument& e) {
        r.k0_error = e.what();
    }
    if (norms.f1_norm) r.mu = mu_of(alpha, *norms.f1_norm);
    if (norms.eps) r.grad_threshold = grad_threshold(alpha, *norms.eps);
    if (norms.linf && norms.l1) r.decay = decay_constants(alpha, *norms.linf, *norms.l1);
    r.c_sharp_note = "gradient-decay constant depends on the observed sup of the gradient L1 norm; reported per run";
    return r;
}

}  // namespace muskat
