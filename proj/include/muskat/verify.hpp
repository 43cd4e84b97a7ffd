#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "muskat/experiments.hpp"

namespace muskat {

struct VerifyOptions {
    // Run a single check by name; all checks when absent.
    std::optional<std::string> only;
    int samples = 1000;
    std::uint64_t seed = 1;
    // Negative control: the named check evaluates a known-wrong identity and must fail.
    std::optional<std::string> inject_wrong_identity;
};

// series-identity, pv-bound, k0, ode-residual, hyp2f1.
const std::vector<std::string>& property_check_names();

// Throws InvalidArgument for an unknown check name.
std::vector<SuiteCheck> property_checks(const VerifyOptions& opts = {});

// Upper bound on sum_{n > n_terms} a_n (2n+1)^2 z^{2n} from the monotone term ratio.
double weighted_series_tail_bound(double z, double alpha, int n_terms);

}  // namespace muskat
