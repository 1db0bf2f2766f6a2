// JSON configuration loading and serialization for the CLI.
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "znsim/sde.h"
#include "znsim/selection.h"

namespace znsim {

struct RunConfig {
    SimConfig sim;
    ClassifyParams classify;
};

// Parses and validates a config document. The noise/drift/amplitude/seed keys
// are mandatory (regime conditions make silent defaults dangerous); only the
// regularization floor and classification thresholds have defaults. Unknown
// keys are rejected. Throws ConfigError with a message naming the offending
// key.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& file);

// Full echo of the configuration, suitable for a manifest.
nlohmann::json to_json(const SimConfig& config);
nlohmann::json to_json(const RunConfig& config);

} // namespace znsim
