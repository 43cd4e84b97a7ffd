#include "muskat/diagnostics.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "muskat/error.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

namespace {

// Records with min f above this fraction of -max|f0| count as nonnegative.
constexpr double kPositivityTol = 1e-12;

}  // namespace

double support_margin(const ScalarField& f, double level) {
    const GridSpec& g = f.grid;
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.5;
    const double cut = level * m;
    double margin = 0.5;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (std::abs(f.at(i, j)) <= cut) continue;
            const double fx = static_cast<double>(i) / g.nx, fy = static_cast<double>(j) / g.ny;
            margin = std::min({margin, fx, 1.0 - fx, fy, 1.0 - fy});
        }
    return std::clamp(margin, 0.0, 0.5);
}

DiagnosticsRecord record(const SimState& state, const AlphaParams& alpha, const InitialNorms& f0,
                         const RecordOptions& opts) {
    const ScalarField& f = state.f;
    DiagnosticsRecord r;
    r.t = state.t;
    r.dt = state.last_dt;
    const SupNorms n = sup_norms(f);
    r.linf = n.linf;
    r.grad_linf = n.grad_linf;
    r.l1 = n.l1;
    r.mass = n.mass;
    r.fnorm_1 = fourier_norm(f, 1.0);
    r.fnorm_2pa = fourier_norm(f, 2.0 + alpha.alpha());
    r.support_margin = support_margin(f, opts.support_level);
    r.fmin = *std::min_element(f.values.begin(), f.values.end());
    if (opts.monitors) {
        const KernelMonitors km = monitors(f, f0, alpha);
        r.c_alpha_min = km.c_alpha_min;
        r.d3_value = km.d3_value;
        r.d3_lower_bound = km.d3_lower_bound;
        if (r.fmin >= -kPositivityTol * f0.linf && km.d3_lower_bound > 0.0) r.d3_ratio = km.d3_value / km.d3_lower_bound;
    }
    return r;
}

const char* const kDiagnosticsHeader = "t,dt,linf,grad_linf,l1,mass,fnorm_1,fnorm_2pa,d3_ratio,c_alpha_min,support_margin";

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& os) { os << kDiagnosticsHeader << '\n'; }

void write_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    os << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.linf) << ','
       << format_double(r.grad_linf) << ',' << format_double(r.l1) << ',' << format_double(r.mass) << ','
       << format_double(r.fnorm_1) << ',' << format_double(r.fnorm_2pa) << ',' << opt(r.d3_ratio) << ','
       << opt(r.c_alpha_min) << ',' << format_double(r.support_margin) << '\n';
}

namespace {

struct LineFit {
    double slope, intercept, sse, sst;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double icpt = my - slope * mx;
    double sse = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double e = y[k] - (icpt + slope * x[k]);
        sse += e * e;
    }
    return {slope, icpt, sse, syy};
}

double r_squared(const LineFit& f) { return f.sst > 0.0 ? std::clamp(1.0 - f.sse / f.sst, 0.0, 1.0) : 1.0; }

constexpr double kLogCLo = -12.0;
constexpr double kLogCHi = 12.0;
constexpr int kScanPoints = 97;

}  // namespace

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, DecayKind kind) {
    require(series.size() >= 8, "fit_decay: need at least 8 samples");
    std::vector<double> t, lv;
    for (const auto& [ti, v] : series) {
        require(std::isfinite(ti) && std::isfinite(v), "fit_decay: non-finite sample");
        require(v > 0.0, "fit_decay: values must be positive");
        t.push_back(ti);
        lv.push_back(std::log(v));
    }
    const auto [tlo, thi] = std::minmax_element(t.begin(), t.end());
    require(*thi > *tlo, "fit_decay: degenerate window");
    DecayFit out;
    out.window = {*tlo, *thi};
    if (kind == DecayKind::exponential) {
        const LineFit f = least_squares(t, lv);
        out.exponent = -f.slope;
        out.constant = std::exp(f.intercept);
        out.amplitude = out.constant;
        out.r_squared = r_squared(f);
        return out;
    }
    auto fit_at = [&](double logc) {
        const double c = std::exp(logc);
        std::vector<double> x(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) x[k] = std::log1p(c * t[k]);
        return least_squares(x, lv);
    };
    // Coarse scan in log C, then Brent refinement around the best bracket.
    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScanPoints; ++k) {
        const double lc = kLogCLo + (kLogCHi - kLogCLo) * k / (kScanPoints - 1);
        const double sse = fit_at(lc).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best = k;
        }
    }
    const double step = (kLogCHi - kLogCLo) / (kScanPoints - 1);
    const double lo = kLogCLo + step * std::max(best - 1, 0), hi = kLogCLo + step * std::min(best + 1, kScanPoints - 1);
    const auto [lc, sse] = boost::math::tools::brent_find_minima([&](double x) { return fit_at(x).sse; }, lo, hi, 52);
    (void)sse;
    const LineFit f = fit_at(lc);
    out.exponent = -f.slope;
    out.constant = std::exp(lc);
    out.amplitude = std::exp(f.intercept);
    out.r_squared = r_squared(f);
    return out;
}

MonotonicityReport monotonicity_report(const std::vector<std::pair<double, double>>& series, double tol) {
    MonotonicityReport r;
    for (std::size_t k = 1; k < series.size(); ++k) {
        const double inc = series[k].second - series[k - 1].second;
        if (inc > tol) r.is_nonincreasing = false;
        r.worst_violation = std::max(r.worst_violation, inc);
    }
    return r;
}

}  // namespace muskat
