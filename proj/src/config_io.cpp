#include "znsim/config_io.h"

#include <fstream>
#include <set>
#include <string>

#include "znsim/errors.h"

namespace znsim {

namespace {

using nlohmann::json;

void require_object(const json& node, const std::string& where) {
    if (!node.is_object())
        throw ConfigError("config: '" + where + "' must be an object");
}

void reject_unknown_keys(const json& node, const std::string& where,
                         const std::set<std::string>& allowed) {
    for (auto it = node.begin(); it != node.end(); ++it)
        if (!allowed.contains(it.key()))
            throw ConfigError("config: unknown key '" +
                              (where.empty() ? it.key() : where + "." + it.key()) + "'");
}

const json& require_key(const json& node, const std::string& where,
                        const std::string& key) {
    auto it = node.find(key);
    if (it == node.end())
        throw ConfigError("config: missing key '" +
                          (where.empty() ? key : where + "." + key) + "'");
    return *it;
}

double get_number(const json& node, const std::string& where, const std::string& key) {
    const json& v = require_key(node, where, key);
    if (!v.is_number())
        throw ConfigError("config: '" + (where.empty() ? key : where + "." + key) +
                          "' must be a number");
    return v.get<double>();
}

std::uint64_t get_seed(const json& node, const std::string& key) {
    const json& v = require_key(node, "", key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ConfigError("config: '" + key + "' must be a nonnegative integer");
}

NoiseModel parse_noise(const json& node) {
    require_object(node, "noise");
    const json& kind_node = require_key(node, "noise", "kind");
    if (!kind_node.is_string())
        throw ConfigError("config: 'noise.kind' must be a string");
    const std::string kind = kind_node.get<std::string>();

    try {
        if (kind == "brownian") {
            reject_unknown_keys(node, "noise", {"kind"});
            return NoiseModel::brownian();
        }
        if (kind == "stable") {
            reject_unknown_keys(node, "noise", {"kind", "stability_index"});
            return NoiseModel::symmetric_stable(get_number(node, "noise", "stability_index"));
        }
        if (kind == "fbm") {
            reject_unknown_keys(node, "noise", {"kind", "hurst"});
            return NoiseModel::fractional_brownian(get_number(node, "noise", "hurst"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    throw ConfigError("config: 'noise.kind' must be one of brownian, stable, fbm");
}

} // namespace

RunConfig parse_run_config(const json& doc) {
    require_object(doc, "document");
    reject_unknown_keys(doc, "",
                        {"drift", "noise", "epsilon", "x0", "horizon", "dt", "seed",
                         "drift_floor", "classification"});

    const json& drift_node = require_key(doc, "", "drift");
    require_object(drift_node, "drift");
    reject_unknown_keys(drift_node, "drift", {"c_plus", "c_minus", "alpha"});

    RunConfig run;
    run.sim.drift.c_plus = get_number(drift_node, "drift", "c_plus");
    run.sim.drift.c_minus = get_number(drift_node, "drift", "c_minus");
    run.sim.drift.alpha = get_number(drift_node, "drift", "alpha");
    run.sim.noise = parse_noise(require_key(doc, "", "noise"));
    run.sim.epsilon = get_number(doc, "", "epsilon");
    run.sim.x0 = get_number(doc, "", "x0");
    run.sim.horizon = get_number(doc, "", "horizon");
    run.sim.dt = get_number(doc, "", "dt");
    run.sim.seed = get_seed(doc, "seed");
    run.sim.drift_floor = doc.contains("drift_floor")
                              ? get_number(doc, "", "drift_floor")
                              : default_drift_floor(run.sim.drift.alpha, run.sim.dt);

    if (doc.contains("classification")) {
        const json& cls = doc["classification"];
        require_object(cls, "classification");
        reject_unknown_keys(cls, "classification", {"threshold", "tail_fraction"});
        if (cls.contains("threshold")) {
            run.classify.threshold = get_number(cls, "classification", "threshold");
            if (!(*run.classify.threshold > 0.0))
                throw ConfigError("config: 'classification.threshold' must be positive");
        }
        if (cls.contains("tail_fraction")) {
            run.classify.tail_fraction = get_number(cls, "classification", "tail_fraction");
            if (!(run.classify.tail_fraction > 0.0) || run.classify.tail_fraction > 1.0)
                throw ConfigError("config: 'classification.tail_fraction' must lie in (0,1]");
        }
    }

    try {
        validate(run.sim);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return run;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("config: cannot read '" + file.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error in '" + file.string() + "': " + e.what());
    }
    return parse_run_config(doc);
}

nlohmann::json to_json(const SimConfig& config) {
    json noise;
    switch (config.noise.kind) {
        case NoiseModel::Kind::Brownian:
            noise = {{"kind", "brownian"}};
            break;
        case NoiseModel::Kind::SymmetricStable:
            noise = {{"kind", "stable"}, {"stability_index", config.noise.stability_index}};
            break;
        case NoiseModel::Kind::FractionalBrownian:
            noise = {{"kind", "fbm"}, {"hurst", config.noise.hurst}};
            break;
    }
    return json{{"drift",
                 {{"c_plus", config.drift.c_plus},
                  {"c_minus", config.drift.c_minus},
                  {"alpha", config.drift.alpha}}},
                {"noise", noise},
                {"epsilon", config.epsilon},
                {"x0", config.x0},
                {"horizon", config.horizon},
                {"dt", config.dt},
                {"seed", config.seed},
                {"drift_floor", config.drift_floor}};
}

nlohmann::json to_json(const RunConfig& config) {
    json doc = to_json(config.sim);
    json cls = json::object();
    if (config.classify.threshold) cls["threshold"] = *config.classify.threshold;
    cls["tail_fraction"] = config.classify.tail_fraction;
    doc["classification"] = cls;
    return doc;
}

} // namespace znsim
