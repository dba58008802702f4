#include "config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "tcan/error.hpp"

namespace tcan::cli {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

json typed_scalar(std::string v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  std::int64_t i = 0;
  auto [pi, ei] = std::from_chars(v.data(), v.data() + v.size(), i);
  if (ei == std::errc() && pi == v.data() + v.size()) return i;
  double d = 0.0;
  auto [pd, ed] = std::from_chars(v.data(), v.data() + v.size(), d);
  if (ed == std::errc() && pd == v.data() + v.size()) return d;
  return v;
}

json typed_value(const std::vector<std::string>& inputs, bool list_key) {
  if (inputs.size() == 1 && !list_key) return typed_scalar(inputs.front());
  json arr = json::array();
  for (const auto& part : inputs) {
    std::stringstream ss(part);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(" []"));
      item.erase(item.find_last_not_of(" []") + 1);
      if (!item.empty()) arr.push_back(typed_scalar(item));
    }
  }
  return arr;
}

bool is_list_key(const std::string& key) { return key == "mlp_hidden"; }

void check_keys(const json& j, const std::vector<std::string>& allowed, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(std::string("unknown ") + what + " key '" + key + "'");
    }
  }
}

}  // namespace

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  if (ends_with(path, ".json")) {
    try {
      json j = json::parse(in);
      if (!j.is_object()) throw ValidationError("config file " + path + " must hold a JSON object");
      return j;
    } catch (const json::parse_error& e) {
      throw ValidationError("config file " + path + ": " + e.what());
    }
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ValidationError("config file " + path + ": " + e.what());
  }
  json j = json::object();
  for (const auto& item : items) {
    if (item.inputs.empty()) continue;
    j[item.name] = typed_value(item.inputs, is_list_key(item.name));
  }
  return j;
}

void apply_overrides(json& base, const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, value] : overrides) base[key] = typed_value({value}, is_list_key(key));
}

const std::vector<std::string>& model_config_keys() {
  static const std::vector<std::string> keys{"d",           "d_t",          "cgat_layers", "heads",
                                             "csat_layers", "d_h",          "mlp_hidden",  "lr",
                                             "weight_decay", "dropout",     "batch_size",  "patience",
                                             "max_epochs",  "max_steps",    "seed",        "variant",
                                             "mask",        "residual",     "normalize_time"};
  return keys;
}

const std::vector<std::string>& gen_config_keys() {
  static const std::vector<std::string> keys{"n_cascades", "branching_mean", "decay_rate", "powerlaw_alpha",
                                             "max_size",   "min_size",       "t_end",      "seed",
                                             "n_users",    "influence_sigma", "publish_span"};
  return keys;
}

ModelConfig model_config_from(const json& j) {
  check_keys(j, model_config_keys(), "model config");
  return ModelConfig::from_json(j.dump());
}

GenConfig gen_config_from(const json& j) {
  check_keys(j, gen_config_keys(), "generator config");
  GenConfig c;
  try {
    c.n_cascades = j.value("n_cascades", c.n_cascades);
    c.branching_mean = j.value("branching_mean", c.branching_mean);
    c.decay_rate = j.value("decay_rate", c.decay_rate);
    c.powerlaw_alpha = j.value("powerlaw_alpha", c.powerlaw_alpha);
    c.max_size = j.value("max_size", c.max_size);
    c.min_size = j.value("min_size", c.min_size);
    c.t_end = j.value("t_end", c.t_end);
    c.seed = j.value("seed", c.seed);
    c.n_users = j.value("n_users", c.n_users);
    c.influence_sigma = j.value("influence_sigma", c.influence_sigma);
    c.publish_span = j.value("publish_span", c.publish_span);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad generator config field: ") + e.what());
  }
  c.validate();
  return c;
}

json gen_config_to_json(const GenConfig& c) {
  return {{"n_cascades", c.n_cascades},         {"branching_mean", c.branching_mean},
          {"decay_rate", c.decay_rate},         {"powerlaw_alpha", c.powerlaw_alpha},
          {"max_size", c.max_size},             {"min_size", c.min_size},
          {"t_end", c.t_end},                   {"seed", c.seed},
          {"n_users", c.n_users},               {"influence_sigma", c.influence_sigma},
          {"publish_span", c.publish_span}};
}

}  // namespace tcan::cli
