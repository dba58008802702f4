#include "tcan/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "tcan/error.hpp"

namespace tcan {

using nlohmann::json;

std::string checkpoint_to_string(const Checkpoint& ck) {
  json j;
  j["format"] = "tcan-checkpoint";
  j["version"] = kCheckpointVersion;
  j["meta"] = json::parse(ck.meta);
  json arr = json::array();
  for (const auto& [name, t] : ck.tensors) {
    arr.push_back({{"name", name}, {"shape", t.shape()}, {"data", t.storage()}});
  }
  j["tensors"] = std::move(arr);
  return j.dump();
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "tcan-checkpoint") throw ValidationError("not a tcan checkpoint");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + j.value("version", json(0)).dump());
  }
  Checkpoint ck;
  ck.meta = j.contains("meta") ? j["meta"].dump() : "{}";
  std::unordered_set<std::string> seen;
  try {
    for (const auto& e : j.at("tensors")) {
      auto name = e.at("name").get<std::string>();
      if (!seen.insert(name).second) throw ValidationError("duplicate tensor '" + name + "' in checkpoint");
      ck.tensors.emplace_back(std::move(name), Tensor(e.at("shape").get<std::vector<std::size_t>>(),
                                                      e.at("data").get<std::vector<double>>()));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
  return ck;
}

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_string(ck) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

Checkpoint capture_parameters(const ParameterStore& store, std::string meta) {
  Checkpoint ck;
  ck.meta = std::move(meta);
  for (const Parameter* p : store.all()) ck.tensors.emplace_back(p->name, p->value);
  return ck;
}

void apply_parameters(const Checkpoint& ck, ParameterStore& store) {
  if (ck.tensors.size() != store.size()) {
    throw ValidationError("checkpoint has " + std::to_string(ck.tensors.size()) + " tensors, model expects " +
                          std::to_string(store.size()));
  }
  for (const auto& [name, t] : ck.tensors) {
    Parameter* p = store.find(name);
    if (!p) throw ValidationError("checkpoint tensor '" + name + "' not in model");
    if (!p->value.same_shape(t)) {
      throw ValidationError("shape mismatch for '" + name + "': checkpoint " + t.shape_str() + ", model " +
                            p->value.shape_str());
    }
    p->value = t;
  }
}

}  // namespace tcan
