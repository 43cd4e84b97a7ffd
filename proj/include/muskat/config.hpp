#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/experiments.hpp"

namespace muskat {

inline constexpr int kSchemaVersion = 1;

// Everything a run needs; serializes to a strict JSON document with "schema_version": 1.
struct RunConfig {
    Scenario scenario;
    std::vector<double> snapshot_times;
    bool record_monitors = true;
    double support_level = 1e-2;
    VerifyToggles verify;

    void validate() const;
    RunOptions options() const;
    bool operator==(const RunConfig&) const;
};

nlohmann::json to_json(const RunConfig& c);
// Unknown keys, a missing or wrong schema_version and invalid values raise InvalidArgument.
RunConfig config_from_json(const nlohmann::json& j);
// Accepts a config file or a run's metadata.json.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json rhs_to_json(const RhsMethod& m);
RhsMethod rhs_from_json(const nlohmann::json& j);

// Canonical text used for hashing; the second form drops the random seed.
std::string config_hash(const RunConfig& c);
std::string config_hash_without_seed(const RunConfig& c);

}  // namespace muskat
