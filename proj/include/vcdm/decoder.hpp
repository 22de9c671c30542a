#pragma once

#include <array>
#include <span>
#include <vector>

#include "vcdm/config.hpp"
#include "vcdm/encoders.hpp"
#include "vcdm/parameters.hpp"
#include "vcdm/tensor.hpp"
#include "vcdm/vocabulary.hpp"

namespace vcdm {

struct DecoderState {
  Tensor hidden;        // s_j
  Tensor cell;          // C_j
  Tensor prev_context;  // c_{j-1}
};

struct AttentionResult {
  Tensor context;  // c_j, [d_d]
  Tensor weights;  // alphas, [annotation count]
};

// Attention inputs that do not depend on the decoder state, computed once per
// sequence.
struct AttentionMemory {
  Tensor annotations;       // h_c, [L, d_c]
  Tensor keys;              // h_c W_a^T, [L, d_d]
  Tensor context_source;    // [d_d, L] (shared) or h_c^T [d_c, L] (separate)
};

// Latent-dependent gate terms V_* h'_d + b_*, constant across decoding steps.
struct LatentDrive {
  std::array<Tensor, 4> terms;  // input, forget, output, candidate
};

struct TeacherForcedScore {
  Tensor total;                    // sum of gold-token log-probabilities
  std::vector<double> per_token;   // one entry per predicted position
};

struct DecoderStep {
  DecoderState state;  // prev_context already holds c_j for the next step
  Tensor log_probs;    // log p(. | d_<j, z, w)
  Tensor attention;
};

class Decoder {
 public:
  Decoder() = default;
  Decoder(const ModelConfig& config, std::size_t context_dim, std::size_t vocab_size, ParameterStore& store);

  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t vocab_size() const { return vocab_size_; }

  // s_0 = h'_d, C_0 = 0, c_0 = 0.
  DecoderState initial_state(const Tensor& h_d_prime) const;
  LatentDrive latent_drive(const Tensor& h_d_prime) const;

  // One VCDM cell update. Returns the new hidden and cell state; prev_context
  // is carried over unchanged.
  DecoderState cell_step(const Tensor& token_embedding, const DecoderState& state, const LatentDrive& drive) const;
  DecoderState cell_step(const Tensor& token_embedding, const DecoderState& state, const Tensor& h_d_prime) const;

  AttentionMemory prepare_attention(const Tensor& annotations) const;
  AttentionResult attend(const Tensor& hidden, const AttentionMemory& memory) const;
  AttentionResult attend(const Tensor& hidden, const Tensor& annotations) const;

  Tensor output_logits(const Tensor& hidden, const Tensor& context) const;
  Tensor output_distribution(const Tensor& hidden, const Tensor& context) const;

  Tensor embed(TokenId token) const;

  // cell step (with c_{j-1}) -> attention with s_j -> output distribution.
  DecoderStep step(TokenId input, const DecoderState& state, const LatentDrive& drive,
                   const AttentionMemory& memory) const;

  // `target` is [BOS, d_1, ..., EOS] in output-vocabulary ids.
  TeacherForcedScore score_teacher_forced(const ContextEncoding& encoding, const Tensor& h_d_prime,
                                          std::span<const TokenId> target) const;

  Tensor embedding;
  // Cell matrices, index 0..3 = input, forget, output, candidate gates.
  std::array<Tensor, 4> w, u, a, v, b;
  Tensor w_attention;  // W_a, [d_d, d_c]
  Tensor w_context;    // [d_d, d_c], separate projection mode only
  Tensor w_mix, b_mix, w_out, b_out;

 private:
  std::size_t hidden_dim_ = 0;
  std::size_t vocab_size_ = 0;
  std::size_t context_dim_ = 0;
  bool standard_cell_ = false;
  AttentionProjection projection_ = AttentionProjection::shared;
};

}  // namespace vcdm
