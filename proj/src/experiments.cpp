#include "muskat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "muskat/config.hpp"
#include "muskat/error.hpp"
#include "muskat/io.hpp"
#include "muskat/kernel.hpp"
#include "muskat/spectral.hpp"

namespace muskat {

using nlohmann::json;

namespace {

// Records closer to the cell boundary than this fraction are outside the plane surrogate.
constexpr double kSupportGate = 0.25;
// Per-step tolerances of the run-level assertions.
constexpr double kLinfStepTol = 1e-10;
constexpr double kMassRelTol = 1e-8;
constexpr double kFnormStepTol = 1e-8;
constexpr double kGradStepTol = 1e-8;
// Relative slack on envelope comparisons, covering the sup refinement accuracy.
constexpr double kEnvelopeSlack = 1e-9;
constexpr double kSuiteEps = 0.1;
constexpr double kDissipationDelta = 0.2;
constexpr double kDecayFitSlack = 0.15;

SuiteCheck make_check(const std::string& id, const std::string& scenario) {
    SuiteCheck c;
    c.id = id;
    c.scenario = scenario;
    return c;
}

double wrap(double d, double period) { return d - period * std::round(d / period); }

double gaussian_at(const GridSpec& g, int i, int j, double cx, double cy, double amp, double sigma) {
    const double dx = wrap(g.x(i) - cx, g.lx), dy = wrap(g.y(j) - cy, g.ly);
    return amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

double l1_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += std::abs(v);
    return s * f.grid.cell_area();
}

ScalarField difference(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a;
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
    return d;
}

bool name_is_safe(const std::string& n) {
    if (n.empty() || n == "." || n == "..") return false;
    return std::all_of(n.begin(), n.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.';
    });
}

json constants_json(const ConstantsReport& c) {
    json j = {{"alpha", c.alpha}, {"c_alpha", c.c_alpha}};
    j["k0"] = c.k0 ? json(*c.k0) : json(nullptr);
    if (!c.k0_error.empty()) j["k0_error"] = c.k0_error;
    j["mu"] = c.mu ? json(*c.mu) : json(nullptr);
    j["grad_threshold"] = c.grad_threshold ? json(*c.grad_threshold) : json(nullptr);
    if (c.decay)
        j["decay"] = {{"c_tilde", c.decay->c_tilde}, {"c_decay", c.decay->c_decay}};
    else
        j["decay"] = nullptr;
    j["c_sharp_note"] = c.c_sharp_note;
    return j;
}

void write_plot_script(const std::filesystem::path& dir, const std::string& name) {
    std::ofstream p(dir / "diagnostics.plt");
    p << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 't'\n"
      << "set logscale y\n"
      << "set title '" << name << "'\n"
      << "set terminal pngcairo size 900,600\n"
      << "set output 'norms.png'\n"
      << "plot 'diagnostics.csv' using 1:3 with lines, '' using 1:4 with lines, '' using 1:7 with lines\n"
      << "unset logscale y\n"
      << "set output 'monitors.png'\n"
      << "plot 'diagnostics.csv' using 1:9 with lines, '' using 1:10 with lines, '' using 1:11 with lines\n";
}

std::vector<std::pair<double, double>> series(const std::vector<DiagnosticsRecord>& rs,
                                              double DiagnosticsRecord::*field) {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : rs) out.emplace_back(r.t, r.*field);
    return out;
}

std::vector<DiagnosticsRecord> gated(const std::vector<DiagnosticsRecord>& rs) {
    std::vector<DiagnosticsRecord> out;
    for (const auto& r : rs) {
        if (r.support_margin < kSupportGate) break;
        out.push_back(r);
    }
    return out;
}

SuiteCheck monotone_check(const std::string& id, const std::string& scen, const std::vector<DiagnosticsRecord>& rs,
                          double DiagnosticsRecord::*field, double tol) {
    const MonotonicityReport m = monotonicity_report(series(rs, field), tol);
    SuiteCheck c = make_check(id, scen);
    c.passed = m.is_nonincreasing;
    c.worst = m.worst_violation;
    c.detail = "largest increase " + format_double(m.worst_violation) + " over " + std::to_string(rs.size()) +
               " records, tol " + format_double(tol);
    return c;
}

SuiteCheck mass_check(const ScenarioResult& r) {
    SuiteCheck c = make_check("mass_conservation", "");
    double worst = 0.0;
    for (const auto& rec : r.records) worst = std::max(worst, std::abs(rec.mass - r.records.front().mass));
    const double tol = kMassRelTol * r.f0.l1;
    c.passed = worst <= tol;
    c.worst = worst;
    c.detail = "max |mass - mass0| " + format_double(worst) + ", tol " + format_double(tol);
    return c;
}

SuiteCheck unmet(const std::string& id, const std::string& scen, const std::string& why) {
    SuiteCheck c = make_check(id, scen);
    c.hypothesis_met = false;
    c.detail = "hypothesis not met: " + why;
    return c;
}

}  // namespace

std::string initial_kind(const InitialData& d) {
    static const char* const names[] = {"gaussian", "cosine_mode", "random_band", "positive_bump"};
    return names[d.index()];
}

void Scenario::validate() const {
    require(name_is_safe(name), "scenario: name must be nonempty and use only [A-Za-z0-9_.-]");
    AlphaParams a(alpha);
    (void)a;
    grid.validate();
    stepper.validate();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            require(std::isfinite(v.amp), "initial_data: amp must be finite");
            if constexpr (std::is_same_v<T, Gaussian> || std::is_same_v<T, PositiveBump>)
                require(std::isfinite(v.sigma) && v.sigma > 0.0, "initial_data: sigma must be > 0");
            if constexpr (std::is_same_v<T, PositiveBump>) require(v.amp >= 0.0, "initial_data: positive_bump needs amp >= 0");
            if constexpr (std::is_same_v<T, Gaussian>) {
                if (v.center) require(std::isfinite((*v.center)[0]) && std::isfinite((*v.center)[1]), "initial_data: center must be finite");
            }
            if constexpr (std::is_same_v<T, RandomBand>)
                require(v.kmax >= 1 && v.kmax < std::min(grid.nx, grid.ny) / 2, "initial_data: kmax must lie in [1, n/2)");
            if constexpr (std::is_same_v<T, CosineMode>)
                require(std::abs(v.k[0]) < grid.nx / 2 && std::abs(v.k[1]) < grid.ny / 2, "initial_data: k must be below Nyquist");
        },
        initial);
}

ScalarField initial_field(const Scenario& s) {
    s.validate();
    const GridSpec& g = s.grid;
    ScalarField f(g);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                const double cx = v.center ? (*v.center)[0] : 0.5 * g.lx, cy = v.center ? (*v.center)[1] : 0.5 * g.ly;
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i) f.at(i, j) = gaussian_at(g, i, j, cx, cy, v.amp, v.sigma);
            } else if constexpr (std::is_same_v<T, PositiveBump>) {
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i) f.at(i, j) = gaussian_at(g, i, j, 0.5 * g.lx, 0.5 * g.ly, v.amp, v.sigma);
            } else if constexpr (std::is_same_v<T, CosineMode>) {
                const double k1 = 2.0 * std::numbers::pi * v.k[0] / g.lx, k2 = 2.0 * std::numbers::pi * v.k[1] / g.ly;
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i) f.at(i, j) = v.amp * std::cos(k1 * g.x(i) + k2 * g.y(j));
            } else {
                std::mt19937_64 rng(v.seed);
                std::normal_distribution<double> normal(0.0, 1.0);
                SpectralField F(g);
                for (int n2 = -v.kmax; n2 <= v.kmax; ++n2)
                    for (int n1 = -v.kmax; n1 <= v.kmax; ++n1) {
                        // One draw per conjugate pair keeps the field real.
                        if (n2 < 0 || (n2 == 0 && n1 <= 0)) continue;
                        const std::complex<double> c(normal(rng), normal(rng));
                        const int i = (n1 + g.nx) % g.nx, j = (n2 + g.ny) % g.ny;
                        const int ic = (g.nx - n1) % g.nx, jc = (g.ny - n2) % g.ny;
                        F.at(i, j) = c;
                        F.at(ic, jc) = std::conj(c);
                    }
                f = inverse(F);
                double m = 0.0;
                for (double x : f.values) m = std::max(m, std::abs(x));
                for (double& x : f.values) x *= v.amp / m;
            }
        },
        s.initial);
    return f;
}

std::vector<Scenario> canonical_scenarios(double alpha, const GridSpec& grid, double t_end) {
    std::vector<Scenario> out(4);
    out[0].name = "gaussian";
    out[0].initial = Gaussian{-0.1, 0.5, std::array<double, 2>{0.45 * grid.lx, 0.55 * grid.ly}};
    out[1].name = "cosine_mode";
    out[1].initial = CosineMode{0.1, {1, 1}};
    out[2].name = "random_band";
    out[2].initial = RandomBand{0.1, 3, 42};
    out[3].name = "positive_bump";
    out[3].initial = PositiveBump{0.1, 0.5};
    for (auto& s : out) {
        s.grid = grid;
        s.alpha = alpha;
        s.stepper.t_end = t_end;
    }
    return out;
}

double grad_l1_norm(const ScalarField& f) {
    const auto g = gradient(f);
    double s = 0.0;
    for (std::size_t k = 0; k < f.values.size(); ++k) s += std::hypot(g[0].values[k], g[1].values[k]);
    return s * f.grid.cell_area();
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opts) {
    s.validate();
    require(opts.threads >= 1, "threads must be >= 1");
    set_kernel_threads(opts.threads);
    const AlphaParams alpha(s.alpha);
    const ScalarField f0 = initial_field(s);

    ScenarioResult res;
    const SupNorms n0 = sup_norms(f0);
    res.f0 = {n0.linf, n0.l1};
    res.f0_grad_linf = n0.grad_linf;
    res.f0_fnorm_1 = fourier_norm(f0, 1.0);
    DataNorms dn;
    if (res.f0_fnorm_1 < 1.0) dn.f1_norm = res.f0_fnorm_1;
    if (n0.linf > 0.0) {
        dn.linf = n0.linf;
        dn.l1 = n0.l1;
    }
    dn.eps = kSuiteEps;
    res.constants = constants_report(s.alpha, dn);

    RunConfig cfg;
    cfg.scenario = s;
    cfg.snapshot_times = opts.snapshot_times;
    cfg.record_monitors = opts.record.monitors;
    cfg.support_level = opts.record.support_level;
    cfg.verify = opts.verify;

    std::ofstream csv;
    if (opts.out_root) {
        res.dir = *opts.out_root / s.name;
        std::filesystem::create_directories(res.dir / "fields");
        csv.open(res.dir / "diagnostics.csv", std::ios::binary);
        if (!csv) throw InvalidArgument("cannot write to " + res.dir.string());
        write_csv_header(csv);
    }

    int snap_index = 0;
    RunHooks hooks;
    hooks.snapshot_times = opts.snapshot_times;
    hooks.on_record = [&](const SimState& st) {
        DiagnosticsRecord r = record(st, alpha, res.f0, opts.record);
        res.grad_l1_sup = std::max(res.grad_l1_sup, grad_l1_norm(st.f));
        if (csv.is_open()) write_csv_row(csv, r);
        res.records.push_back(r);
        if (opts.on_state) opts.on_state(st);
    };
    hooks.on_snapshot = [&](const SimState& st) {
        if (res.dir.empty()) return;
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%04d.mskf", snap_index++);
        write_snapshot(res.dir / "fields" / name, st.f, st.t, s.alpha);
    };
    res.final = run(f0, s.stepper, alpha, hooks);

    if (!res.dir.empty()) {
        csv.close();
        write_snapshot(res.dir / "fields" / "final.mskf", res.final.f, res.final.t, s.alpha);
        json meta = {
            {"config", to_json(cfg)},
            {"config_hash", config_hash(cfg)},
            {"config_hash_without_seed", config_hash_without_seed(cfg)},
            {"threads", opts.threads},
            {"rhs_method", method_name(s.stepper.rhs_method)},
            {"contour_prefactor", contour_prefactor(s.alpha)},
            {"normalization", "linear part is exactly -Lambda^{1+alpha}; integral prefactor C_{2,1+alpha}/(1+alpha)"},
            {"constants", constants_json(res.constants)},
            {"initial_norms",
             {{"linf", n0.linf}, {"l1", n0.l1}, {"mass", n0.mass}, {"grad_linf", n0.grad_linf}, {"fnorm_1", res.f0_fnorm_1}}},
            {"grad_l1_sup", res.grad_l1_sup},
            {"final", {{"t", res.final.t}, {"steps", res.final.step_count}, {"records", res.records.size()}}},
            {"snapshots", snap_index},
        };
        std::ofstream m(res.dir / "metadata.json");
        m << meta.dump(2) << '\n';
        if (opts.emit_plots) write_plot_script(res.dir, s.name);
    }
    return res;
}

std::vector<SuiteCheck> verify_run(const ScenarioResult& r, const VerifyToggles& v) {
    std::vector<SuiteCheck> out;
    const std::string name = r.dir.empty() ? std::string() : r.dir.filename().string();
    if (v.linf_monotone)
        out.push_back(monotone_check("linf_monotone", name, r.records, &DiagnosticsRecord::linf, kLinfStepTol));
    if (v.mass_conservation) {
        SuiteCheck c = mass_check(r);
        c.scenario = name;
        out.push_back(c);
    }
    return out;
}

ConvergenceResult alpha_convergence_study(const Scenario& base, const std::vector<double>& alphas, double t_star,
                                          const StudyOptions& opts) {
    require(!alphas.empty(), "convergence study: empty alpha list");
    require(std::isfinite(t_star) && t_star >= 0.0, "convergence study: t_star must be >= 0");
    require(opts.hk_order >= 0, "convergence study: hk_order must be >= 0");
    for (double a : alphas) AlphaParams{a};

    auto member = [&](double a) {
        Scenario s = base;
        s.alpha = a;
        s.stepper.t_end = t_star;
        s.name = base.name + "_alpha_" + format_double(a);
        RunOptions ro = opts.run;
        ro.record.monitors = false;
        const ScalarField f0 = initial_field(s);
        const double ceiling = opts.h4_ceiling_factor * (fourier_norm(f0, 4.0) + l2_norm(f0));
        ro.on_state = [&, ceiling](const SimState& st) {
            if (opts.run.on_state) opts.run.on_state(st);
            const double h = fourier_norm(st.f, 4.0) + l2_norm(st.f);
            if (!(h <= ceiling))
                throw NumericalError("convergence study: member alpha = " + format_double(a) +
                                     " left the common existence window at t = " + format_double(st.t));
        };
        return run_scenario(s, ro).final.f;
    };

    ConvergenceResult res;
    res.t_star = t_star;
    res.hk_order = opts.hk_order;
    const ScalarField ref = member(0.0);
    for (double a : alphas) {
        const ScalarField fa = a == 0.0 ? ref : member(a);
        const ScalarField d = difference(fa, ref);
        res.alphas.push_back(a);
        res.l2_errors.push_back(l2_norm(d));
        res.hk_errors.push_back(sobolev_norm(d, opts.hk_order));
        res.l1_errors.push_back(l1_norm(d));
    }
    // Slope over the three smallest positive alphas.
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < res.alphas.size(); ++k)
        if (res.alphas[k] > 0.0 && res.l2_errors[k] > 0.0) pts.emplace_back(res.alphas[k], res.l2_errors[k]);
    std::sort(pts.begin(), pts.end());
    if (pts.size() > 3) pts.resize(3);
    if (pts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto& [a, e] : pts) {
            mx += std::log(a);
            my += std::log(e);
        }
        mx /= pts.size();
        my /= pts.size();
        double sxx = 0, sxy = 0;
        for (auto& [a, e] : pts) {
            sxx += (std::log(a) - mx) * (std::log(a) - mx);
            sxy += (std::log(a) - mx) * (std::log(e) - my);
        }
        res.slope = sxx > 0 ? sxy / sxx : 0.0;
    }
    return res;
}

bool SuiteReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return !c.passed || *c.passed; });
}

namespace {

// Amplitude that gives a centered bump the requested value of a norm linear in amp.
Scenario scaled_bump(const std::string& name, double alpha, const SuiteOptions& o, double sigma,
                     double (*norm)(const ScalarField&), double target) {
    Scenario s;
    s.name = name;
    s.alpha = alpha;
    s.grid = o.grid;
    s.stepper.t_end = o.t_end;
    s.stepper.rtol = o.rtol;
    s.initial = PositiveBump{1.0, sigma};
    const double unit = norm(initial_field(s));
    s.initial = PositiveBump{target / unit, sigma};
    return s;
}

double norm_fourier1(const ScalarField& f) { return fourier_norm(f, 1.0); }
double norm_grad(const ScalarField& f) { return sup_norms(f).grad_linf; }

void envelope_check(SuiteCheck& c, const std::vector<DiagnosticsRecord>& rs, double DiagnosticsRecord::*field,
                    double v0, double rate, double p) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : rs) {
        const double env = v0 * std::pow(1.0 + rate * r.t, -p);
        worst = std::max(worst, r.*field / env - 1.0);
    }
    c.passed = worst <= kEnvelopeSlack;
    c.worst = worst;
    c.detail = "max value/envelope - 1 = " + format_double(worst) + " over " + std::to_string(rs.size()) +
               " gated records, rate " + format_double(rate);
}

}  // namespace

SuiteReport theorem_suite(double alpha, const SuiteOptions& opts) {
    const AlphaParams ap(alpha);
    SuiteReport rep;
    rep.alpha = alpha;
    auto add = [&](SuiteCheck c) { rep.checks.push_back(std::move(c)); };
    const double p = 2.0 / ap.order();

    auto run = [&](Scenario s) {
        s.stepper.rtol = opts.rtol;
        s.stepper.t_end = opts.t_end;
        return run_scenario(s, opts.run);
    };

    // Maximum principle and mean conservation on every canonical shape.
    for (const Scenario& s : canonical_scenarios(alpha, opts.grid, opts.t_end)) {
        const ScenarioResult r = run(s);
        add(monotone_check("b_linf_monotone", s.name, r.records, &DiagnosticsRecord::linf, kLinfStepTol));
        SuiteCheck m = mass_check(r);
        m.scenario = s.name;
        add(m);
        if (s.name != "positive_bump") continue;

        SuiteCheck l1 = make_check("l1_constant", s.name);
        double worst = 0.0;
        for (const auto& rec : r.records) worst = std::max(worst, std::abs(rec.l1 - r.f0.l1));
        l1.passed = worst <= kMassRelTol * r.f0.l1;
        l1.worst = worst;
        l1.detail = "max |l1 - l1_0| " + format_double(worst) + ", tol " + format_double(kMassRelTol * r.f0.l1);
        add(l1);

        const auto g = gated(r.records);
        if (g.size() < 2) {
            add(unmet("c_d3_ratio", s.name, "fewer than 2 records inside the support window"));
            add(unmet("e_linf_envelope", s.name, "fewer than 2 records inside the support window"));
            continue;
        }
        SuiteCheck d3 = make_check("c_d3_ratio", s.name);
        double lo = std::numeric_limits<double>::infinity();
        bool defined = true;
        for (const auto& rec : g) {
            if (!rec.d3_ratio) defined = false;
            else lo = std::min(lo, *rec.d3_ratio);
        }
        d3.passed = defined && lo >= 1.0;
        d3.worst = lo;
        d3.detail = defined ? "min d3_ratio " + format_double(lo) + " over " + std::to_string(g.size()) + " gated records"
                            : "d3_ratio undefined on a gated record";
        add(d3);

        SuiteCheck env = make_check("e_linf_envelope", s.name);
        envelope_check(env, g, &DiagnosticsRecord::linf, r.f0.linf, r.constants.decay->c_decay, p);
        add(env);

        SuiteCheck fit = make_check("decay_fit", s.name);
        if (g.size() < 8) {
            add(unmet("decay_fit", s.name, "fewer than 8 records inside the support window"));
        } else {
            const DecayFit df = fit_decay(series(g, &DiagnosticsRecord::linf), DecayKind::algebraic);
            fit.passed = df.exponent >= p - kDecayFitSlack;
            fit.worst = df.exponent;
            fit.detail = "fitted exponent " + format_double(df.exponent) + " vs envelope " + format_double(p) +
                         " on [" + format_double(df.window.first) + ", " + format_double(df.window.second) + "]";
            add(fit);
        }
    }

    // Fourier-norm monotonicity and the time-integrated dissipation bound.
    if (alpha < 0.5) {
        const double k0 = k0_of_alpha(alpha);
        const Scenario s = scaled_bump("fnorm_small", alpha, opts, 0.5, norm_fourier1, 0.8 * k0);
        const ScalarField f0 = initial_field(s);
        const double f1 = fourier_norm(f0, 1.0);
        const double mu = mu_of(alpha, f1);
        const double bound = fourier_norm(f0, 1.0 + kDissipationDelta) / mu;
        double integral = 0.0, prev_t = 0.0, prev_v = 0.0;
        bool first = true;
        RunOptions ro = opts.run;
        ro.on_state = [&](const SimState& st) {
            if (opts.run.on_state) opts.run.on_state(st);
            const double v = fourier_norm(st.f, 2.0 + kDissipationDelta + alpha);
            if (!first) integral += 0.5 * (st.t - prev_t) * (v + prev_v);
            first = false;
            prev_t = st.t;
            prev_v = v;
        };
        Scenario sr = s;
        sr.stepper.rtol = opts.rtol;
        const ScenarioResult r = run_scenario(sr, ro);
        if (f1 < k0 && mu > 0.0) {
            add(monotone_check("a_fnorm1_monotone", s.name, r.records, &DiagnosticsRecord::fnorm_1, kFnormStepTol));
            SuiteCheck c = make_check("a_dissipation_integral", s.name);
            c.passed = integral <= bound;
            c.worst = integral / bound;
            c.detail = "int_0^t |f|_{2+delta+alpha} = " + format_double(integral) + " <= |f0|_{1+delta}/mu = " +
                       format_double(bound) + " at delta " + format_double(kDissipationDelta);
            add(c);
        } else {
            add(unmet("a_fnorm1_monotone", s.name, "fnorm_1(f0) >= k0"));
            add(unmet("a_dissipation_integral", s.name, "fnorm_1(f0) >= k0"));
        }
    } else {
        add(unmet("a_fnorm1_monotone", "fnorm_small", "alpha >= 1/2"));
        add(unmet("a_dissipation_integral", "fnorm_small", "alpha >= 1/2"));
    }

    // Gradient maximum principle and the gradient and W^{1,inf} envelopes.
    {
        const double thr = grad_threshold(alpha, opts.eps);
        const double target = opts.grad0.value_or(0.9 * thr);
        Scenario s = scaled_bump(opts.grad0 ? "grad_adversarial" : "grad_small", alpha, opts, 0.5, norm_grad, target);
        const ScenarioResult r = run(s);
        const double g0 = r.f0_grad_linf;
        if (g0 < thr) {
            add(monotone_check("d_grad_monotone", s.name, r.records, &DiagnosticsRecord::grad_linf, kGradStepTol));
            SuiteCheck ca = make_check("d_c_alpha_min", s.name);
            double lo = std::numeric_limits<double>::infinity();
            for (const auto& rec : r.records) lo = std::min(lo, rec.c_alpha_min.value_or(-1.0));
            ca.passed = lo > opts.eps;
            ca.worst = lo;
            ca.detail = "min c_alpha_min " + format_double(lo) + " vs eps " + format_double(opts.eps);
            add(ca);
            const auto g = gated(r.records);
            if (g.size() < 2) {
                add(unmet("e_grad_envelope", s.name, "fewer than 2 records inside the support window"));
                add(unmet("f_w1inf_envelope", s.name, "fewer than 2 records inside the support window"));
            } else {
                const double cs = c_sharp(alpha, opts.eps, r.f0.linf, g0, r.grad_l1_sup);
                SuiteCheck ge = make_check("e_grad_envelope", s.name);
                envelope_check(ge, g, &DiagnosticsRecord::grad_linf, g0, cs, p);
                ge.detail += ", observed M_T " + format_double(r.grad_l1_sup);
                add(ge);
                const double cstar = std::min(cs, r.constants.decay->c_decay);
                SuiteCheck w = make_check("f_w1inf_envelope", s.name);
                double worst = -std::numeric_limits<double>::infinity();
                for (const auto& rec : g) {
                    const double env = (r.f0.linf + g0) * std::pow(1.0 + cstar * rec.t, -p);
                    worst = std::max(worst, (rec.linf + rec.grad_linf) / env - 1.0);
                }
                w.passed = worst <= kEnvelopeSlack;
                w.worst = worst;
                w.detail = "max W1inf/envelope - 1 = " + format_double(worst) + ", C* " + format_double(cstar);
                add(w);
            }
        } else {
            const std::string why = "grad_linf(f0) = " + format_double(g0) + " >= threshold " + format_double(thr);
            add(unmet("d_grad_monotone", s.name, why));
            add(unmet("d_c_alpha_min", s.name, why));
            add(unmet("e_grad_envelope", s.name, why));
            add(unmet("f_w1inf_envelope", s.name, why));
        }
    }
    return rep;
}

}  // namespace muskat
