#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "muskat/config.hpp"
#include "muskat/io.hpp"

using namespace muskat;
using namespace testing;

namespace fs = std::filesystem;

TEST_CASE("snapshot round trip is exact") {
    const fs::path p = fs::temp_directory_path() / "muskat_unit_snap.mskf";
    const auto f = band_limited(GridSpec{16, 32, 2 * kPi, kPi}, 3, 0.3, 5);
    write_snapshot(p, f, 0.75, 0.2);
    const Snapshot s = read_snapshot(p);
    CHECK(s.field.grid.nx == 16);
    CHECK(s.field.grid.ny == 32);
    CHECK(s.field.grid.ly == kPi);
    CHECK(s.t == 0.75);
    CHECK(s.alpha == 0.2);
    CHECK(s.field.values == f.values);
    CHECK(fs::file_size(p) == 4 + 4 + 8 + 32 + 16 * 32 * 8);
    fs::remove(p);
}

TEST_CASE("corrupt snapshots are rejected") {
    const fs::path p = fs::temp_directory_path() / "muskat_unit_bad.mskf";
    {
        std::ofstream o(p, std::ios::binary);
        o << "NOPE0000";
    }
    CHECK_THROWS(read_snapshot(p));
    const auto f = band_limited(square(8), 2, 0.1, 1);
    write_snapshot(p, f, 0.0, 0.0);
    fs::resize_file(p, fs::file_size(p) - 8);
    CHECK_THROWS(read_snapshot(p));
    fs::remove(p);
}

TEST_CASE("config json round trip") {
    RunConfig c;
    c.scenario.name = "rt";
    c.scenario.alpha = 0.3;
    c.scenario.initial = RandomBand{0.05, 3, 9};
    c.scenario.stepper.rhs_method = SeriesTruncated{6};
    c.scenario.stepper.method = TimeMethod::RK4_explicit;
    c.snapshot_times = {0.5, 1.0};
    c.record_monitors = false;
    const auto j = to_json(c);
    CHECK(j.at("schema_version") == 1);
    CHECK(config_from_json(j) == c);
    CHECK(config_from_json(nlohmann::json::parse(j.dump())) == c);

    for (const InitialData& d : {InitialData{Gaussian{-0.1, 0.4, std::array<double, 2>{1.0, 2.0}}},
                                 InitialData{CosineMode{0.1, {2, -1}}}, InitialData{PositiveBump{}}}) {
        RunConfig e;
        e.scenario.initial = d;
        CHECK(config_from_json(to_json(e)) == e);
    }
    for (const RhsMethod& m : {RhsMethod{DirectQuadrature{3}}, RhsMethod{SplitSpectral{2}}}) {
        RunConfig e;
        e.scenario.stepper.rhs_method = m;
        CHECK(config_from_json(to_json(e)) == e);
    }
}

TEST_CASE("config strictness") {
    const auto base = to_json(RunConfig{});
    auto j = base;
    j["extra"] = 1;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["stepper"]["bogus"] = 1;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j.erase("schema_version");
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["schema_version"] = 2;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["grid"]["nx"] = 63;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["grid"]["nx"] = 64.5;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["alpha"] = 1.0;
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["alpha"] = "0.1";
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
    j = base;
    j["initial_data"] = {{"kind", "square"}};
    CHECK_THROWS_AS(config_from_json(j), InvalidArgument);
}

TEST_CASE("config hashes") {
    RunConfig a;
    a.scenario.initial = RandomBand{0.1, 3, 1};
    RunConfig b = a;
    b.scenario.initial = RandomBand{0.1, 3, 2};
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash_without_seed(a) == config_hash_without_seed(b));
    CHECK(config_hash(a) == config_hash(a));
}

TEST_CASE("load_config errors and metadata input") {
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), InvalidArgument);
    const fs::path p = fs::temp_directory_path() / "muskat_unit_meta.json";
    RunConfig c;
    c.scenario.name = "meta";
    {
        std::ofstream o(p);
        o << nlohmann::json{{"config", to_json(c)}, {"threads", 1}}.dump();
    }
    CHECK(load_config(p) == c);
    {
        std::ofstream o(p);
        o << "{ not json";
    }
    CHECK_THROWS_AS(load_config(p), InvalidArgument);
    fs::remove(p);
}
