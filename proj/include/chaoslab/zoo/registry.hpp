#pragma once

#include "chaoslab/core/model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace chaoslab::zoo {

/// Names accepted in the "model" field of a model configuration.
std::vector<std::string> available_models();

/// Builds a model from `{"model": <name>, "params": {...}}`. Missing params
/// take the constructor defaults; unknown names or keys throw ConfigError
/// naming the offending key.
SystemModel model_from_config(const nlohmann::json& config);

/// The parameter names (with defaults) a named model accepts.
nlohmann::json default_params(const std::string& name);

}  // namespace chaoslab::zoo
