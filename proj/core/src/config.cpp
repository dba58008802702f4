#include "tcan/config.hpp"

#include <algorithm>

#include "json.hpp"
#include "tcan/error.hpp"

namespace tcan {

using nlohmann::json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NT: return "NT";
    case Variant::PL: return "PL";
    case Variant::G: return "G";
    case Variant::S: return "S";
    case Variant::RNN: return "RNN";
  }
  return "?";
}

std::string to_string(MaskMode m) { return m == MaskMode::Symmetric ? "symmetric" : "parent_to_child"; }

std::string to_string(ResidualMode r) { return r == ResidualMode::Conventional ? "conventional" : "as_written"; }

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::Full, Variant::NT, Variant::PL, Variant::G, Variant::S, Variant::RNN}) {
    if (s == to_string(v)) return v;
  }
  if (s == "FULL" || s == "Full") return Variant::Full;
  throw ValidationError("unknown variant '" + s + "' (expected full, NT, PL, G, S or RNN)");
}

MaskMode parse_mask_mode(const std::string& s) {
  if (s == "parent_to_child") return MaskMode::ParentToChild;
  if (s == "symmetric") return MaskMode::Symmetric;
  throw ValidationError("unknown mask mode '" + s + "'");
}

ResidualMode parse_residual_mode(const std::string& s) {
  if (s == "as_written") return ResidualMode::AsWritten;
  if (s == "conventional") return ResidualMode::Conventional;
  throw ValidationError("unknown residual mode '" + s + "'");
}

std::size_t ModelConfig::periodic_dim() const {
  if (!uses_time()) return 0;
  const std::size_t extra = uses_sqrt_channel() ? 2 : 1;
  return d_t > extra ? d_t - extra : 0;
}

void ModelConfig::validate() const {
  if (d == 0) throw ValidationError("d must be positive");
  if (uses_time() && periodic_dim() < 1) {
    throw ValidationError("d_t too small: need at least one periodic channel");
  }
  if (heads == 0 || width() % heads != 0) {
    throw ValidationError("heads (" + std::to_string(heads) + ") must divide the model width " +
                          std::to_string(width()));
  }
  if (cgat_layers == 0) throw ValidationError("cgat_layers must be >= 1");
  if (csat_layers == 0) throw ValidationError("csat_layers must be >= 1");
  if (d_h == 0 || d_h % 2 != 0) throw ValidationError("d_h must be positive and even");
  if (!(lr > 0.0)) throw ValidationError("lr must be positive");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight_decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0, 1)");
  if (batch_size == 0) throw ValidationError("batch_size must be positive");
  if (max_epochs == 0) throw ValidationError("max_epochs must be positive");
  for (std::size_t h : mlp_hidden) {
    if (h == 0) throw ValidationError("mlp hidden sizes must be positive");
  }
}

std::string ModelConfig::to_json() const {
  json j;
  j["d"] = d;
  j["d_t"] = d_t;
  j["cgat_layers"] = cgat_layers;
  j["heads"] = heads;
  j["csat_layers"] = csat_layers;
  j["d_h"] = d_h;
  j["mlp_hidden"] = mlp_hidden;
  j["lr"] = lr;
  j["weight_decay"] = weight_decay;
  j["dropout"] = dropout;
  j["batch_size"] = batch_size;
  j["patience"] = patience;
  j["max_epochs"] = max_epochs;
  j["max_steps"] = max_steps;
  j["seed"] = seed;
  j["variant"] = to_string(variant);
  j["mask"] = to_string(mask);
  j["residual"] = to_string(residual);
  j["normalize_time"] = normalize_time;
  return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  ModelConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("model config must be a JSON object");
  static const char* const kKeys[] = {"d",          "d_t",          "cgat_layers", "heads",     "csat_layers",
                                      "d_h",        "mlp_hidden",   "lr",          "weight_decay", "dropout",
                                      "batch_size", "patience",     "max_epochs",  "max_steps", "seed",
                                      "variant",    "mask",         "residual",    "normalize_time"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ValidationError("unknown model config key '" + key + "'");
    }
  }
  try {
    c.d = j.value("d", c.d);
    c.d_t = j.value("d_t", c.d_t);
    c.cgat_layers = j.value("cgat_layers", c.cgat_layers);
    c.heads = j.value("heads", c.heads);
    c.csat_layers = j.value("csat_layers", c.csat_layers);
    c.d_h = j.value("d_h", c.d_h);
    c.mlp_hidden = j.value("mlp_hidden", c.mlp_hidden);
    c.lr = j.value("lr", c.lr);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.dropout = j.value("dropout", c.dropout);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.patience = j.value("patience", c.patience);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.seed = j.value("seed", c.seed);
    c.variant = parse_variant(j.value("variant", to_string(c.variant)));
    c.mask = parse_mask_mode(j.value("mask", to_string(c.mask)));
    c.residual = parse_residual_mode(j.value("residual", to_string(c.residual)));
    c.normalize_time = j.value("normalize_time", c.normalize_time);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad model config field: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace tcan
