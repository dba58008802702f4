#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "tcan/config.hpp"
#include "tcan/synthgen.hpp"

namespace tcan::cli {

using nlohmann::json;

/// Reads a flat config file into a JSON object. `.json` files are parsed
/// as JSON; anything else as TOML/INI `key = value` lines.
json read_config_file(const std::string& path);

/// Overlay string-valued flag overrides onto `base`. Values are typed by
/// what they parse as: integer, real, bool, comma list of integers, or
/// string.
void apply_overrides(json& base, const std::map<std::string, std::string>& overrides);

ModelConfig model_config_from(const json& j);

GenConfig gen_config_from(const json& j);
json gen_config_to_json(const GenConfig& c);

/// Field names accepted by the model and generator configs.
const std::vector<std::string>& model_config_keys();
const std::vector<std::string>& gen_config_keys();

}  // namespace tcan::cli
