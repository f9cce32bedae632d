#pragma once

#include "creepdiv/levy_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace creepdiv {

/// Model config text. Either key = value lines
///
///     # comment
///     c = 2
///     sigma = 1
///     q = 4
///     delta = 1.8
///     S = 0.05
///     [jump]
///     lambda = 1
///     p = 0.5
///
/// with one [jump] section per phase, or a JSON object with the same scalar
/// keys and "jumps": [{"lambda": .., "p": ..}]. Syntax problems throw
/// InvalidConfig; invalid parameter values throw InvalidModel.
LevyModel parse_model(const std::string& text);

/// Reads and parses a config file; a missing file throws InvalidConfig.
LevyModel load_model(const std::filesystem::path& path);

nlohmann::ordered_json model_to_json(const LevyModel& m);
LevyModel model_from_json(const nlohmann::ordered_json& j);

}  // namespace creepdiv
