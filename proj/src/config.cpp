#include "muskat/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "muskat/error.hpp"

namespace muskat {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    require(j.is_object(), where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw InvalidArgument(where + ": unknown key '" + k + "'");
}

template <class T>
T get_or(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    if constexpr (std::is_same_v<T, int>)
        require(j.at(key).is_number_integer(), where + ": '" + key + "' must be an integer");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(where + ": bad value for '" + key + "'");
    }
}

double number_or(const json& j, const char* key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    require(j.at(key).is_number(), where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

json initial_to_json(const InitialData& d) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            json j;
            if constexpr (std::is_same_v<T, Gaussian>) {
                j = {{"kind", "gaussian"}, {"amp", v.amp}, {"sigma", v.sigma}};
                if (v.center) j["center"] = {(*v.center)[0], (*v.center)[1]};
            } else if constexpr (std::is_same_v<T, CosineMode>) {
                j = {{"kind", "cosine_mode"}, {"amp", v.amp}, {"k", {v.k[0], v.k[1]}}};
            } else if constexpr (std::is_same_v<T, RandomBand>) {
                j = {{"kind", "random_band"}, {"amp", v.amp}, {"kmax", v.kmax}, {"seed", v.seed}};
            } else {
                j = {{"kind", "positive_bump"}, {"amp", v.amp}, {"sigma", v.sigma}};
            }
            return j;
        },
        d);
}

InitialData initial_from_json(const json& j) {
    const std::string w = "initial_data";
    require(j.is_object() && j.contains("kind") && j.at("kind").is_string(), w + ": missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        require_keys(j, w, {"kind", "amp", "sigma", "center"});
        Gaussian g;
        g.amp = number_or(j, "amp", w, g.amp);
        g.sigma = number_or(j, "sigma", w, g.sigma);
        if (j.contains("center")) {
            const json& c = j.at("center");
            require(c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number(),
                    w + ": 'center' must be two numbers");
            g.center = std::array<double, 2>{c[0].get<double>(), c[1].get<double>()};
        }
        return g;
    }
    if (kind == "cosine_mode") {
        require_keys(j, w, {"kind", "amp", "k"});
        CosineMode c;
        c.amp = number_or(j, "amp", w, c.amp);
        if (j.contains("k")) {
            const json& k = j.at("k");
            require(k.is_array() && k.size() == 2 && k[0].is_number_integer() && k[1].is_number_integer(),
                    w + ": 'k' must be two integers");
            c.k = {k[0].get<int>(), k[1].get<int>()};
        }
        return c;
    }
    if (kind == "random_band") {
        require_keys(j, w, {"kind", "amp", "kmax", "seed"});
        RandomBand r;
        r.amp = number_or(j, "amp", w, r.amp);
        r.kmax = get_or<int>(j, "kmax", w, r.kmax);
        if (j.contains("seed")) {
            require(j.at("seed").is_number_unsigned(), w + ": 'seed' must be a nonnegative integer");
            r.seed = j.at("seed").get<std::uint64_t>();
        }
        return r;
    }
    if (kind == "positive_bump") {
        require_keys(j, w, {"kind", "amp", "sigma"});
        PositiveBump p;
        p.amp = number_or(j, "amp", w, p.amp);
        p.sigma = number_or(j, "sigma", w, p.sigma);
        return p;
    }
    throw InvalidArgument(w + ": unknown kind '" + kind + "'");
}

}  // namespace

json rhs_to_json(const RhsMethod& m) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DirectQuadrature>)
                return {{"kind", "direct"}, {"cutoff_cells", v.cutoff_cells}};
            else if constexpr (std::is_same_v<T, SplitSpectral>)
                return {{"kind", "split"}, {"quad_refinement", v.quad_refinement}};
            else
                return {{"kind", "series"}, {"n_max", v.n_max}};
        },
        m);
}

RhsMethod rhs_from_json(const json& j) {
    const std::string w = "stepper.rhs";
    require(j.is_object() && j.contains("kind") && j.at("kind").is_string(), w + ": missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "direct") {
        require_keys(j, w, {"kind", "cutoff_cells"});
        return DirectQuadrature{get_or<int>(j, "cutoff_cells", w, 32)};
    }
    if (kind == "split") {
        require_keys(j, w, {"kind", "quad_refinement"});
        return SplitSpectral{get_or<int>(j, "quad_refinement", w, 1)};
    }
    if (kind == "series") {
        require_keys(j, w, {"kind", "n_max"});
        return SeriesTruncated{get_or<int>(j, "n_max", w, 8)};
    }
    throw InvalidArgument(w + ": unknown kind '" + kind + "'");
}

void RunConfig::validate() const {
    scenario.validate();
    require(std::isfinite(support_level) && support_level > 0.0 && support_level < 1.0,
            "output: support_level must lie in (0,1)");
    for (double t : snapshot_times) require(std::isfinite(t) && t >= 0.0, "output: snapshot times must be >= 0");
}

RunOptions RunConfig::options() const {
    RunOptions o;
    o.snapshot_times = snapshot_times;
    o.record.monitors = record_monitors;
    o.record.support_level = support_level;
    o.verify = verify;
    return o;
}

bool RunConfig::operator==(const RunConfig& o) const { return to_json(*this) == to_json(o); }

json to_json(const RunConfig& c) {
    const Scenario& s = c.scenario;
    const StepperConfig& st = s.stepper;
    return {
        {"schema_version", kSchemaVersion},
        {"name", s.name},
        {"alpha", s.alpha},
        {"grid", {{"nx", s.grid.nx}, {"ny", s.grid.ny}, {"lx", s.grid.lx}, {"ly", s.grid.ly}}},
        {"initial_data", initial_to_json(s.initial)},
        {"stepper",
         {{"dt_init", st.dt_init},
          {"dt_max", st.dt_max},
          {"t_end", st.t_end},
          {"safety", st.safety},
          {"rtol", st.rtol},
          {"method", to_string(st.method)},
          {"rhs", rhs_to_json(st.rhs_method)},
          {"linear_only", st.linear_only}}},
        {"output",
         {{"snapshot_times", c.snapshot_times},
          {"record_monitors", c.record_monitors},
          {"support_level", c.support_level}}},
        {"verify", {{"linf_monotone", c.verify.linf_monotone}, {"mass_conservation", c.verify.mass_conservation}}},
    };
}

RunConfig config_from_json(const json& j) {
    require_keys(j, "config", {"schema_version", "name", "alpha", "grid", "initial_data", "stepper", "output", "verify"});
    require(j.contains("schema_version") && j.at("schema_version").is_number_integer(),
            "config: missing 'schema_version'");
    require(j.at("schema_version").get<int>() == kSchemaVersion,
            "config: unsupported schema_version " + j.at("schema_version").dump());
    RunConfig c;
    Scenario& s = c.scenario;
    s.name = get_or<std::string>(j, "name", "config", s.name);
    s.alpha = number_or(j, "alpha", "config", s.alpha);
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        require_keys(g, "grid", {"nx", "ny", "lx", "ly"});
        s.grid.nx = get_or<int>(g, "nx", "grid", s.grid.nx);
        s.grid.ny = get_or<int>(g, "ny", "grid", s.grid.ny);
        s.grid.lx = number_or(g, "lx", "grid", s.grid.lx);
        s.grid.ly = number_or(g, "ly", "grid", s.grid.ly);
    }
    if (j.contains("initial_data")) s.initial = initial_from_json(j.at("initial_data"));
    if (j.contains("stepper")) {
        const json& st = j.at("stepper");
        const std::string w = "stepper";
        require_keys(st, w, {"dt_init", "dt_max", "t_end", "safety", "rtol", "method", "rhs", "linear_only"});
        StepperConfig& c2 = s.stepper;
        c2.dt_init = number_or(st, "dt_init", w, c2.dt_init);
        c2.dt_max = number_or(st, "dt_max", w, c2.dt_max);
        c2.t_end = number_or(st, "t_end", w, c2.t_end);
        c2.safety = number_or(st, "safety", w, c2.safety);
        c2.rtol = number_or(st, "rtol", w, c2.rtol);
        if (st.contains("method")) c2.method = time_method_from_string(get_or<std::string>(st, "method", w, ""));
        if (st.contains("rhs")) c2.rhs_method = rhs_from_json(st.at("rhs"));
        c2.linear_only = get_or<bool>(st, "linear_only", w, c2.linear_only);
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        require_keys(o, "output", {"snapshot_times", "record_monitors", "support_level"});
        c.snapshot_times = get_or<std::vector<double>>(o, "snapshot_times", "output", c.snapshot_times);
        c.record_monitors = get_or<bool>(o, "record_monitors", "output", c.record_monitors);
        c.support_level = number_or(o, "support_level", "output", c.support_level);
    }
    if (j.contains("verify")) {
        const json& v = j.at("verify");
        require_keys(v, "verify", {"linf_monotone", "mass_conservation"});
        c.verify.linf_monotone = get_or<bool>(v, "linf_monotone", "verify", c.verify.linf_monotone);
        c.verify.mass_conservation = get_or<bool>(v, "mass_conservation", "verify", c.verify.mass_conservation);
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument("cannot parse " + path.string() + ": " + e.what());
    }
    // A run's metadata.json embeds its config.
    if (j.is_object() && !j.contains("schema_version") && j.contains("config")) return config_from_json(j.at("config"));
    return config_from_json(j);
}

std::string config_hash(const RunConfig& c) { return content_hash(to_json(c).dump()); }

std::string config_hash_without_seed(const RunConfig& c) {
    json j = to_json(c);
    j["initial_data"].erase("seed");
    return content_hash(j.dump());
}

}  // namespace muskat
