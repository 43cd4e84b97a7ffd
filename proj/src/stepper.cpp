#include "muskat/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "muskat/error.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

namespace {

constexpr double kPhiTaylor = 1e-2;
constexpr double kGrowMax = 5.0;
constexpr double kShrinkMin = 0.2;
constexpr int kMaxRejects = 60;

double sup_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

void require_finite_field(const ScalarField& f, const char* what) {
    for (double v : f.values)
        if (!std::isfinite(v)) throw NumericalError(std::string("non-finite values in ") + what);
}

// Linear symbol -|k|^{1+alpha} on the storage layout.
std::vector<double> linear_symbol(const GridSpec& g, double order) {
    std::vector<double> L(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
            L[static_cast<std::size_t>(j) * g.nx + i] = k2 == 0.0 ? 0.0 : -std::pow(k2, 0.5 * order);
        }
    return L;
}

struct Attempt {
    ScalarField f;
    double err_ratio;
};

Attempt etd_rk2(const ScalarField& u, double h, const StepperConfig& cfg, const AlphaParams& alpha,
                const std::vector<double>& L) {
    const GridSpec& g = u.grid;
    const SpectralField U = forward(u);
    SpectralField A = U;
    if (cfg.linear_only) {
        for (std::size_t k = 0; k < A.coeffs.size(); ++k) A.coeffs[k] *= std::exp(L[k] * h);
        return {inverse(A), 0.0};
    }
    const ScalarField nu = nonlinear_part(u, alpha, cfg.rhs_method);
    require_finite_field(nu, "rhs");
    const SpectralField NU = forward(nu);
    for (std::size_t k = 0; k < A.coeffs.size(); ++k)
        A.coeffs[k] = std::exp(L[k] * h) * U.coeffs[k] + h * phi1(L[k] * h) * NU.coeffs[k];
    const ScalarField a = inverse(A);
    const ScalarField na = nonlinear_part(a, alpha, cfg.rhs_method);
    require_finite_field(na, "rhs");
    const SpectralField NA = forward(na);
    SpectralField D(g);
    for (std::size_t k = 0; k < D.coeffs.size(); ++k) D.coeffs[k] = h * phi2(L[k] * h) * (NA.coeffs[k] - NU.coeffs[k]);
    const ScalarField corr = inverse(D);
    ScalarField out = a;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] += corr.values[k];
    const double scale = cfg.rtol * std::max(sup_abs(u), std::numeric_limits<double>::min());
    return {out, sup_abs(corr) / scale};
}

ScalarField rk4_once(const ScalarField& u, double h, const StepperConfig& cfg, const AlphaParams& alpha) {
    auto rhs = [&](const ScalarField& v) {
        ScalarField r = evaluate_rhs(v, alpha, cfg.rhs_method);
        require_finite_field(r, "rhs");
        return r;
    };
    auto axpy = [](const ScalarField& x, double a, const ScalarField& y) {
        ScalarField z = x;
        for (std::size_t k = 0; k < z.values.size(); ++k) z.values[k] += a * y.values[k];
        return z;
    };
    const ScalarField k1 = rhs(u);
    const ScalarField k2 = rhs(axpy(u, 0.5 * h, k1));
    const ScalarField k3 = rhs(axpy(u, 0.5 * h, k2));
    const ScalarField k4 = rhs(axpy(u, h, k3));
    ScalarField out = u;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] += h / 6.0 * (k1.values[k] + 2.0 * k2.values[k] + 2.0 * k3.values[k] + k4.values[k]);
    return out;
}

// Step doubling: the two-half-step result is kept, the difference estimates its error.
Attempt rk4_doubling(const ScalarField& u, double h, const StepperConfig& cfg, const AlphaParams& alpha) {
    const ScalarField full = rk4_once(u, h, cfg, alpha);
    const ScalarField half = rk4_once(rk4_once(u, 0.5 * h, cfg, alpha), 0.5 * h, cfg, alpha);
    double diff = 0.0;
    for (std::size_t k = 0; k < u.values.size(); ++k) diff = std::max(diff, std::abs(half.values[k] - full.values[k]));
    const double scale = cfg.rtol * std::max(sup_abs(u), std::numeric_limits<double>::min());
    return {half, diff / 15.0 / scale};
}

double initial_dt(const StepperConfig& cfg, const GridSpec& g, const AlphaParams& alpha) {
    return std::min(cfg.dt_init, 0.5 / std::pow(g.kmax(), alpha.order()));
}

// Explicit RK4 is kept inside its real-axis stability interval.
double stability_cap(const StepperConfig& cfg, const GridSpec& g, const AlphaParams& alpha) {
    if (cfg.method == TimeMethod::ETD_RK2) return cfg.dt_max;
    return std::min(cfg.dt_max, 2.5 / std::pow(g.kmax(), alpha.order()));
}

}  // namespace

std::string to_string(TimeMethod m) { return m == TimeMethod::ETD_RK2 ? "ETD_RK2" : "RK4_explicit"; }

TimeMethod time_method_from_string(const std::string& s) {
    if (s == "ETD_RK2") return TimeMethod::ETD_RK2;
    if (s == "RK4_explicit") return TimeMethod::RK4_explicit;
    throw InvalidArgument("unknown time method: " + s);
}

void StepperConfig::validate() const {
    require(std::isfinite(dt_init) && dt_init > 0.0, "stepper: dt_init must be > 0");
    require(std::isfinite(dt_max) && dt_init <= dt_max, "stepper: dt_init must be <= dt_max");
    require(std::isfinite(t_end) && t_end >= 0.0, "stepper: t_end must be >= 0");
    require(safety > 0.0 && safety <= 1.0, "stepper: safety must lie in (0,1]");
    require(rtol >= 1e-12 && rtol <= 1e-2, "stepper: rtol must lie in [1e-12, 1e-2]");
    require(!(linear_only && method != TimeMethod::ETD_RK2), "stepper: linear_only requires ETD_RK2");
    muskat::validate(rhs_method);
}

double phi1(double z) {
    if (std::abs(z) < kPhiTaylor) return 1.0 + z * (1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120))));
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < kPhiTaylor) return 1.0 / 2 + z * (1.0 / 6 + z * (1.0 / 24 + z * (1.0 / 120 + z * (1.0 / 720))));
    return (std::expm1(z) - z) / (z * z);
}

namespace {

SimState step_to(const SimState& s, const StepperConfig& cfg, const AlphaParams& alpha, double t_stop) {
    const GridSpec& g = s.f.grid;
    const std::vector<double> L = linear_symbol(g, alpha.order());
    double dt = s.next_dt > 0.0 ? s.next_dt : initial_dt(cfg, g, alpha);
    dt = std::min(dt, stability_cap(cfg, g, alpha));
    const double floor = 1e-14 * std::max(cfg.t_end, 1.0);
    for (int tries = 0; tries <= kMaxRejects; ++tries) {
        // A remainder below the floor is folded into this step.
        const bool last = dt >= t_stop - s.t - floor;
        const double h = last ? t_stop - s.t : dt;
        if (h < floor) throw NumericalError("dt underflow at t = " + std::to_string(s.t));
        Attempt a = cfg.method == TimeMethod::ETD_RK2 ? etd_rk2(s.f, h, cfg, alpha, L) : rk4_doubling(s.f, h, cfg, alpha);
        const double expo = cfg.method == TimeMethod::ETD_RK2 ? 0.5 : 0.2;
        const double fac = a.err_ratio == 0.0
                               ? kGrowMax
                               : std::clamp(cfg.safety * std::pow(1.0 / a.err_ratio, expo), kShrinkMin, kGrowMax);
        if (a.err_ratio <= 1.0) {
            require_finite_field(a.f, "state");
            SimState out;
            out.t = last ? t_stop : s.t + h;
            out.f = std::move(a.f);
            out.step_count = s.step_count + 1;
            out.last_dt = h;
            // A step shortened to hit t_stop does not shrink the proposal.
            out.next_dt = std::min(std::max(dt, h) * fac, stability_cap(cfg, g, alpha));
            return out;
        }
        dt = h * fac;
    }
    throw NumericalError("step rejected too many times at t = " + std::to_string(s.t));
}

}  // namespace

SimState step(const SimState& state, const StepperConfig& cfg, const AlphaParams& alpha) {
    cfg.validate();
    const double target = state.t < cfg.t_end ? cfg.t_end : state.t + cfg.dt_max;
    return step_to(state, cfg, alpha, target);
}

SimState run(const ScalarField& f0, const StepperConfig& cfg, const AlphaParams& alpha, const RunHooks& hooks) {
    cfg.validate();
    f0.grid.validate();
    f0.require_finite();
    SimState s;
    s.f = f0;
    if (hooks.on_record) hooks.on_record(s);
    std::vector<double> stops;
    for (double t : hooks.snapshot_times)
        if (t >= 0.0 && t <= cfg.t_end) stops.push_back(t);
    std::sort(stops.begin(), stops.end());
    std::size_t next_stop = 0;
    while (next_stop < stops.size() && stops[next_stop] <= 0.0) {
        if (hooks.on_snapshot) hooks.on_snapshot(s);
        ++next_stop;
    }
    while (s.t < cfg.t_end) {
        const double target = next_stop < stops.size() ? stops[next_stop] : cfg.t_end;
        s = step_to(s, cfg, alpha, target);
        if (hooks.on_record) hooks.on_record(s);
        while (next_stop < stops.size() && stops[next_stop] <= s.t) {
            if (hooks.on_snapshot) hooks.on_snapshot(s);
            ++next_stop;
        }
    }
    return s;
}

}  // namespace muskat
