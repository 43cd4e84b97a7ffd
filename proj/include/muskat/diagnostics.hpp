#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "muskat/kernel.hpp"
#include "muskat/stepper.hpp"

namespace muskat {

struct DiagnosticsRecord {
    double t = 0.0;
    double dt = 0.0;
    double linf = 0.0;
    double grad_linf = 0.0;
    double l1 = 0.0;
    double mass = 0.0;
    double fnorm_1 = 0.0;
    double fnorm_2pa = 0.0;
    std::optional<double> d3_ratio;
    std::optional<double> c_alpha_min;
    double support_margin = 0.5;
    // Not serialized: kept for in-process checks.
    double fmin = 0.0;
    double d3_value = 0.0;
    double d3_lower_bound = 0.0;
};

struct RecordOptions {
    bool monitors = true;
    // Support is where |f| exceeds this fraction of max |f|.
    double support_level = 1e-2;
};

DiagnosticsRecord record(const SimState& state, const AlphaParams& alpha, const InitialNorms& f0,
                         const RecordOptions& opts = {});

// Distance of the support from the cell boundary as a fraction of the cell, in [0, 0.5].
double support_margin(const ScalarField& f, double level);

extern const char* const kDiagnosticsHeader;
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& r);
// Shortest round-trip decimal.
std::string format_double(double v);

enum class DecayKind { algebraic, exponential };

struct DecayFit {
    double exponent = 0.0;
    double constant = 0.0;
    double amplitude = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    double r_squared = 0.0;
};

// algebraic: value ~ A (1 + C t)^{-p}, exponent p, constant C.
// exponential: value ~ A e^{-lambda t}, exponent lambda, constant A.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& series, DecayKind kind);

struct MonotonicityReport {
    bool is_nonincreasing = true;
    double worst_violation = 0.0;
};
MonotonicityReport monotonicity_report(const std::vector<std::pair<double, double>>& series, double tol);

}  // namespace muskat
