#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "muskat/constants.hpp"
#include "muskat/field.hpp"
#include "muskat/diagnostics.hpp"
#include "muskat/stepper.hpp"

namespace muskat {

// Centered at the cell middle unless a center (absolute coordinates) is given.
struct Gaussian {
    double amp = 0.1;
    double sigma = 0.5;
    std::optional<std::array<double, 2>> center;
    bool operator==(const Gaussian&) const = default;
};
// amp cos(k.x) with integer mode numbers k.
struct CosineMode {
    double amp = 1e-8;
    std::array<int, 2> k{1, 0};
    bool operator==(const CosineMode&) const = default;
};
// Random coefficients on modes with max(|n1|,|n2|) <= kmax, rescaled to max|f| = amp.
struct RandomBand {
    double amp = 0.1;
    int kmax = 4;
    std::uint64_t seed = 42;
    bool operator==(const RandomBand&) const = default;
};
// Nonnegative centered Gaussian bump.
struct PositiveBump {
    double amp = 0.1;
    double sigma = 0.5;
    bool operator==(const PositiveBump&) const = default;
};
using InitialData = std::variant<Gaussian, CosineMode, RandomBand, PositiveBump>;

std::string initial_kind(const InitialData& d);

struct Scenario {
    std::string name = "scenario";
    InitialData initial = PositiveBump{};
    GridSpec grid{64, 64, 4.0 * std::numbers::pi, 4.0 * std::numbers::pi};
    double alpha = 0.0;
    StepperConfig stepper;

    void validate() const;
};

ScalarField initial_field(const Scenario& s);

// The four canonical shapes on a cell of period 2 pi l_scale.
std::vector<Scenario> canonical_scenarios(double alpha, const GridSpec& grid, double t_end);

struct SuiteCheck {
    std::string id;
    std::string scenario;
    bool hypothesis_met = true;
    std::optional<bool> passed;  // absent when the hypothesis failed
    double worst = 0.0;
    std::string detail;
};

// Post-run assertions selected by a run config.
struct VerifyToggles {
    bool linf_monotone = true;
    bool mass_conservation = true;
    bool operator==(const VerifyToggles&) const = default;
};

struct RunOptions {
    std::optional<std::filesystem::path> out_root;  // nothing written when absent
    bool emit_plots = false;
    int threads = 1;
    RecordOptions record;
    std::vector<double> snapshot_times;
    VerifyToggles verify;
    // Extra observer of every accepted state, including the initial one.
    std::function<void(const SimState&)> on_state;
};

struct ScenarioResult {
    SimState final;
    std::filesystem::path dir;
    std::vector<DiagnosticsRecord> records;
    InitialNorms f0;
    double f0_grad_linf = 0.0;
    double f0_fnorm_1 = 0.0;
    // Observed sup over the run of the gradient L1 norm.
    double grad_l1_sup = 0.0;
    ConstantsReport constants;
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& opts = {});

// Checks selected by the toggles against a finished run.
std::vector<SuiteCheck> verify_run(const ScenarioResult& r, const VerifyToggles& v);

// int |grad f| over the cell.
double grad_l1_norm(const ScalarField& f);

struct ConvergenceResult {
    std::vector<double> alphas;
    std::vector<double> l2_errors, hk_errors, l1_errors;
    double slope = 0.0;
    int hk_order = 2;
    double t_star = 1.0;
};

struct StudyOptions {
    int hk_order = 2;
    // Members abort when fourier_norm(f,4) + L2 exceeds this multiple of its initial value.
    double h4_ceiling_factor = 10.0;
    RunOptions run;
};

ConvergenceResult alpha_convergence_study(const Scenario& base, const std::vector<double>& alphas, double t_star,
                                          const StudyOptions& opts = {});

struct SuiteReport {
    double alpha = 0.0;
    std::vector<SuiteCheck> checks;
    bool all_passed() const;
};

struct SuiteOptions {
    GridSpec grid{64, 64, 4.0 * std::numbers::pi, 4.0 * std::numbers::pi};
    double t_end = 4.0;
    double rtol = 1e-6;
    double eps = 0.1;
    // Initial slope for the gradient run; default 0.9 of the threshold.
    std::optional<double> grad0;
    RunOptions run;
};

SuiteReport theorem_suite(double alpha, const SuiteOptions& opts = {});

// Stable 64-bit FNV-1a hash, hex encoded.
std::string content_hash(const std::string& text);

}  // namespace muskat
