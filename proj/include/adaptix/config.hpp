#pragma once

#include <filesystem>

#include "adaptix/experiment.hpp"
#include "json.hpp"

namespace adaptix {

// Keys mirror ExperimentConfig in snake_case; every key is optional and
// unknown keys are rejected. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

}  // namespace adaptix
