#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tcan {

/// Ablations: NT drops time embedding, PL drops the sqrt channel, G keeps
/// only the graph encoder, S only the sequence encoder, RNN replaces
/// attention pooling with the Bi-LSTM's last hidden states.
enum class Variant { Full, NT, PL, G, S, RNN };

/// ParentToChild: row i attends j iff j->i is an edge or i == j.
/// Symmetric: edges in either direction, plus self-loops.
enum class MaskMode { ParentToChild, Symmetric };

/// AsWritten: out = LN(FFN(MHA(x)) + x).
/// Conventional: h = LN(MHA(x) + x); out = LN(FFN(h) + h).
enum class ResidualMode { AsWritten, Conventional };

std::string to_string(Variant v);
std::string to_string(MaskMode m);
std::string to_string(ResidualMode r);
Variant parse_variant(const std::string& s);
MaskMode parse_mask_mode(const std::string& s);
ResidualMode parse_residual_mode(const std::string& s);

struct ModelConfig {
  std::size_t d = 32;
  /// Total time-embedding width; periodic width is derived per variant.
  std::size_t d_t = 32;
  std::size_t cgat_layers = 3;
  std::size_t heads = 4;
  std::size_t csat_layers = 2;
  std::size_t d_h = 64;
  std::vector<std::size_t> mlp_hidden = {64, 64};

  double lr = 1e-3;
  double weight_decay = 5e-4;
  double dropout = 0.1;
  std::size_t batch_size = 32;
  std::size_t patience = 10;
  std::size_t max_epochs = 100;
  /// Hard cap on optimizer steps, 0 for none.
  std::size_t max_steps = 0;
  std::uint64_t seed = 1;

  Variant variant = Variant::Full;
  MaskMode mask = MaskMode::ParentToChild;
  ResidualMode residual = ResidualMode::AsWritten;
  /// Divide timestamps by t_obs before the time embedding; its initial
  /// scales are rescaled to match.
  bool normalize_time = false;

  bool uses_time() const { return variant != Variant::NT; }
  bool uses_sqrt_channel() const { return uses_time() && variant != Variant::PL; }
  bool uses_graph() const { return variant != Variant::S; }
  bool uses_sequence() const { return variant != Variant::G; }
  bool uses_attn_pool() const { return uses_sequence() && variant != Variant::RNN; }

  /// d'_t: number of cosine channels (d_t - 2, or d_t - 1 without sqrt).
  std::size_t periodic_dim() const;
  /// Effective time-embedding width (0 when time is ablated).
  std::size_t time_dim() const { return uses_time() ? d_t : 0; }
  /// Node width after fusion; also the CGAT model width.
  std::size_t width() const { return d + time_dim(); }
  std::size_t mlp_input() const { return width() + d_h; }

  void validate() const;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
};

}  // namespace tcan
