#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace vcdm {

enum class EncoderKind { bilstm, self_attention, bag_of_words };
enum class AttentionProjection { shared, separate };
enum class FreeBitsMode { total, per_dim };

struct EncoderConfig {
  EncoderKind kind = EncoderKind::bilstm;
  std::size_t embedding_dim = 32;      // d_w
  std::size_t context_hidden = 64;     // d_c
  std::size_t definition_hidden = 64;  // d_e
  std::size_t layers = 2;
  std::size_t vocab_cap = 10000;
  bool subword_bigrams = false;
};

struct ModelConfig {
  EncoderConfig encoder;
  std::size_t latent_dim = 8;        // d_z
  std::size_t decoder_hidden = 64;   // d_d
  std::size_t decoder_embedding = 32;
  std::size_t output_vocab_cap = 10000;
  bool standard_lstm_cell = false;
  bool tied_encoders = false;
  bool prior_hidden_layer = false;
  AttentionProjection attention_projection = AttentionProjection::shared;
  double init_scale = 0.3;
};

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double target_rate = 1.0;  // total free-bits rate across latent dimensions
  FreeBitsMode free_bits_mode = FreeBitsMode::total;
  bool anneal_kl = true;
  double anneal_midpoint = -1.0;     // s0; negative -> one epoch of steps
  double anneal_temperature = -1.0;  // tau; negative -> s0 / 6
  std::size_t max_epochs = 500;
  std::uint64_t seed = 1;
  bool freeze_context_encoder = false;
  bool freeze_definition_encoder = false;
  bool freeze_both = false;
  double clip_norm = 0.0;  // 0 disables
  std::size_t max_len = 32;
  std::size_t beam = 5;
};

struct RunConfig {
  ModelConfig model;
  TrainConfig train;
};

// Parses "key = value" lines; '#' starts a comment. Unknown keys, malformed
// values and violated invariants raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);
// Canonical text form, one key per line in a fixed order; parse_config
// round-trips it exactly.
std::string serialize_config(const RunConfig& config);
void validate_config(const RunConfig& config);

}  // namespace vcdm
