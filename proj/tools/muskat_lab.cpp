#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "muskat/config.hpp"
#include "muskat/constants.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/error.hpp"
#include "muskat/experiments.hpp"
#include "muskat/kernel.hpp"
#include "muskat/spectral.hpp"
#include "muskat/verify.hpp"

namespace {

using namespace muskat;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

// Three-way agreement threshold of the cross-method oracle.
constexpr double kOracleTol = 1e-4;
constexpr double kOracleSigma = 0.5;

struct Global {
    std::optional<std::string> out;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    bool emit_plots = false;

    std::filesystem::path out_root() const {
        if (out) return *out;
        if (const char* env = std::getenv("MUSKAT_LAB_OUT"); env && *env) return env;
        return "runs";
    }
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw InvalidArgument("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void print_checks(const std::vector<SuiteCheck>& checks) {
    for (const auto& c : checks) {
        const char* tag = !c.hypothesis_met ? "SKIP" : (*c.passed ? "PASS" : "FAIL");
        std::cout << tag << ' ' << c.id;
        if (!c.scenario.empty()) std::cout << " [" << c.scenario << ']';
        std::cout << ": " << c.detail << '\n';
    }
}

bool all_pass(const std::vector<SuiteCheck>& checks) {
    for (const auto& c : checks)
        if (c.passed && !*c.passed) return false;
    return true;
}

int cmd_constants(const std::vector<std::string>& alpha_args, const std::optional<std::string>& csv_path) {
    std::vector<double> alphas;
    for (const auto& a : alpha_args)
        for (double v : parse_list(a)) alphas.push_back(v);
    if (alphas.empty()) throw InvalidArgument("constants: at least one alpha is required");
    int code = kOk;
    std::ostringstream table;
    table << "alpha,c_alpha,k0,grad_threshold_eps0.1,contour_prefactor\n";
    for (double a : alphas) {
        DataNorms dn;
        dn.eps = 0.1;
        const ConstantsReport r = constants_report(a, dn);
        table << format_double(a) << ',' << format_double(r.c_alpha) << ',' << opt_str(r.k0) << ','
              << opt_str(r.grad_threshold) << ',' << format_double(contour_prefactor(a)) << '\n';
        if (!r.k0_error.empty()) {
            std::cerr << "error: " << r.k0_error << " (alpha = " << format_double(a) << ")\n";
            code = kUsage;
        }
    }
    std::cout << table.str();
    if (csv_path) {
        std::ofstream f(*csv_path);
        if (!f) throw InvalidArgument("cannot write " + *csv_path);
        f << table.str();
    }
    return code;
}

int cmd_verify(const std::optional<std::string>& check, int samples, const Global& g,
               const std::optional<std::string>& inject) {
    VerifyOptions o;
    o.only = check;
    o.samples = samples;
    if (g.seed) o.seed = *g.seed;
    o.inject_wrong_identity = inject;
    const auto checks = property_checks(o);
    print_checks(checks);
    const bool ok = all_pass(checks);
    std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
    return ok ? kOk : kCheckFailed;
}

// Threads recorded in a metadata.json, if that is what the path holds.
std::optional<int> recorded_threads(const std::filesystem::path& p) {
    std::ifstream in(p);
    json j = json::parse(in, nullptr, false);
    if (j.is_object() && j.contains("threads") && j.at("threads").is_number_integer()) return j.at("threads").get<int>();
    return std::nullopt;
}

int cmd_run(const std::string& path, const Global& g) {
    if (!std::filesystem::is_regular_file(path)) throw InvalidArgument("config file not found: " + path);
    RunConfig cfg = load_config(path);
    if (g.seed)
        if (auto* rb = std::get_if<RandomBand>(&cfg.scenario.initial)) rb->seed = *g.seed;
    RunOptions o = cfg.options();
    o.out_root = g.out_root();
    o.emit_plots = g.emit_plots;
    o.threads = g.threads.value_or(recorded_threads(path).value_or(1));
    const ScenarioResult r = run_scenario(cfg.scenario, o);
    std::cout << "run " << cfg.scenario.name << ": t = " << format_double(r.final.t) << ", "
              << r.final.step_count << " steps, " << r.records.size() << " records -> " << r.dir.string() << '\n';
    const auto checks = verify_run(r, cfg.verify);
    print_checks(checks);
    return all_pass(checks) ? kOk : kCheckFailed;
}

int cmd_sweep(const std::string& alphas_text, const std::string& path, double t_star, double rtol, const Global& g) {
    if (!std::filesystem::is_regular_file(path)) throw InvalidArgument("config file not found: " + path);
    const std::vector<double> alphas = parse_list(alphas_text);
    if (alphas.empty()) throw InvalidArgument("sweep: --alphas is empty");
    RunConfig cfg = load_config(path);
    if (g.seed)
        if (auto* rb = std::get_if<RandomBand>(&cfg.scenario.initial)) rb->seed = *g.seed;
    cfg.scenario.stepper.rtol = rtol;
    cfg.scenario.stepper.validate();
    StudyOptions so;
    so.run = cfg.options();
    so.run.threads = g.threads.value_or(1);
    const std::filesystem::path root = g.out_root() / (cfg.scenario.name + "_sweep");
    so.run.out_root = root;
    so.run.emit_plots = g.emit_plots;
    const ConvergenceResult res = alpha_convergence_study(cfg.scenario, alphas, t_star, so);

    // Errors must shrink as alpha decreases.
    std::vector<std::size_t> order(res.alphas.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return res.alphas[a] > res.alphas[b]; });
    bool decreasing = true;
    for (std::size_t k = 1; k < order.size(); ++k)
        if (!(res.l2_errors[order[k]] < res.l2_errors[order[k - 1]])) decreasing = false;

    json j = {{"alphas", res.alphas},           {"l2_errors", res.l2_errors}, {"hk_errors", res.hk_errors},
              {"l1_errors", res.l1_errors},     {"slope", res.slope},         {"hk_order", res.hk_order},
              {"t_star", res.t_star},           {"rtol", rtol},               {"l2_decreasing", decreasing},
              {"base_config", to_json(cfg)}};
    std::filesystem::create_directories(root);
    std::ofstream(root / "convergence.json") << j.dump(2) << '\n';
    std::cout << j.dump(2) << '\n';
    return decreasing ? kOk : kCheckFailed;
}

double rel_l2(const ScalarField& a, const ScalarField& b, double scale) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += (a.values[k] - b.values[k]) * (a.values[k] - b.values[k]);
    return scale > 0.0 ? std::sqrt(s) / scale : std::sqrt(s);
}

double l2(const ScalarField& a) {
    double s = 0.0;
    for (double v : a.values) s += v * v;
    return std::sqrt(s);
}

int cmd_oracle(double amp, const std::string& alphas_text, int n, const Global& g) {
    const std::vector<double> alphas = parse_list(alphas_text);
    if (alphas.empty()) throw InvalidArgument("oracle: --alphas is empty");
    if (!std::isfinite(amp)) throw InvalidArgument("oracle: --amp must be finite");
    set_kernel_threads(g.threads.value_or(1));
    GridSpec grid{n, n, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi};
    grid.validate();
    bool ok = true;
    std::cout << "alpha,amp,direct_vs_split,direct_vs_series,split_vs_series,direct_vs_linear,split_vs_linear,"
                 "series_vs_linear,max_abs_rhs\n";
    for (double a : alphas) {
        Scenario s;
        s.grid = grid;
        s.alpha = a;
        s.initial = Gaussian{amp, kOracleSigma, std::nullopt};
        const ScalarField f = initial_field(s);
        const AlphaParams ap(a);
        const ScalarField d = rhs_direct(f, ap), sp = rhs_split(f, ap), se = rhs_series(f, ap, 8);
        ScalarField lin = fractional_laplacian(f, ap.order());
        for (double& v : lin.values) v = -v;
        const double scale = l2(lin);
        double mx = 0.0;
        for (const auto* r : {&d, &sp, &se})
            for (double v : r->values) mx = std::max(mx, std::abs(v));
        const double ds = rel_l2(d, sp, scale), dse = rel_l2(d, se, scale), sse = rel_l2(sp, se, scale);
        std::cout << format_double(a) << ',' << format_double(amp) << ',' << format_double(ds) << ','
                  << format_double(dse) << ',' << format_double(sse) << ',' << format_double(rel_l2(d, lin, scale))
                  << ',' << format_double(rel_l2(sp, lin, scale)) << ',' << format_double(rel_l2(se, lin, scale))
                  << ',' << format_double(mx) << '\n';
        if (std::max({ds, dse, sse}) > kOracleTol) ok = false;
    }
    std::cout << (ok ? "oracle: three-way agreement within " : "oracle: FAILED agreement ") << format_double(kOracleTol)
              << '\n';
    return ok ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"muskat_lab: simulation and verification driver for the generalised Muskat interface equation"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--out", g.out, "Output root (default $MUSKAT_LAB_OUT or ./runs)");
    app.add_option("--threads", g.threads, "Worker threads for lattice sums")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Seed for random initial data and sampled checks");
    app.add_flag("--emit-plots", g.emit_plots, "Write gnuplot scripts next to the CSVs");

    auto* c_const = app.add_subcommand("constants", "Print the constants table");
    std::vector<std::string> alpha_args;
    std::optional<std::string> csv_path;
    c_const->add_option("--alpha", alpha_args, "Alpha values (comma-separated or repeated)")->required();
    c_const->add_option("--csv", csv_path, "Also write the table to this CSV file");

    auto* c_verify = app.add_subcommand("verify", "Run the special-function and constants property checks");
    std::optional<std::string> check, inject;
    int samples = 1000;
    c_verify->add_option("--check", check, "Run one check");
    c_verify->add_option("--samples", samples, "Random samples for pv-bound")->check(CLI::PositiveNumber);
    c_verify->add_option("--inject-wrong-identity", inject, "Test hook: evaluate a known-wrong identity");

    auto* c_run = app.add_subcommand("run", "Run a scenario from a config or metadata.json");
    std::string run_path;
    c_run->add_option("config", run_path, "Config path")->required();

    auto* c_sweep = app.add_subcommand("sweep", "Alpha convergence study against the alpha = 0 run");
    std::string sweep_alphas, sweep_path;
    double t_star = 1.0, sweep_rtol = 1e-8;
    c_sweep->add_option("--alphas", sweep_alphas, "Comma-separated alphas")->required();
    c_sweep->add_option("--t-star", t_star, "Comparison time");
    c_sweep->add_option("--rtol", sweep_rtol, "Stepper tolerance for every member run");
    c_sweep->add_option("config", sweep_path, "Base config path")->required();

    auto* c_oracle = app.add_subcommand("oracle", "Cross-method RHS agreement on a Gaussian bump");
    double amp = 0.1;
    int n = 128;
    std::string oracle_alphas = "0,0.25,0.45";
    c_oracle->add_option("--amp", amp, "Bump amplitude");
    c_oracle->add_option("--alphas", oracle_alphas, "Comma-separated alphas");
    c_oracle->add_option("--n", n, "Grid points per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*c_const) return cmd_constants(alpha_args, csv_path);
        if (*c_verify) return cmd_verify(check, samples, g, inject);
        if (*c_run) return cmd_run(run_path, g);
        if (*c_sweep) return cmd_sweep(sweep_alphas, sweep_path, t_star, sweep_rtol, g);
        if (*c_oracle) return cmd_oracle(amp, oracle_alphas, n, g);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kUsage;
}
