#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcdm/beam_search.hpp"
#include "vcdm/config.hpp"
#include "vcdm/corpus.hpp"
#include "vcdm/decoder.hpp"
#include "vcdm/encoders.hpp"
#include "vcdm/inferer.hpp"
#include "vcdm/parameters.hpp"
#include "vcdm/vocabulary.hpp"

namespace vcdm {

// An example mapped to the ids each component consumes.
struct PreparedExample {
  EncodedPair pair;                      // [CLS] phrase [SEP] context [SEP], encoder ids
  std::vector<TokenId> definition_ids;   // [CLS] definition [SEP], encoder ids
  std::vector<TokenId> target_ids;       // [BOS] definition [EOS], output ids
  std::vector<std::string> reference;    // definition as seen by the output vocabulary
  std::optional<std::string> sense_id;
  bool has_definition = false;
};

struct Generation {
  std::vector<TokenId> ids;
  std::vector<std::string> tokens;
  double log_prob = 0.0;
  bool finished = false;
};

// Step-model adapter exposing the decoder to beam_search / greedy_decode.
class DecoderSearch {
 public:
  DecoderSearch(const Decoder& decoder, const Tensor& h_d_prime, const Tensor& annotations);
  DecoderState start() const { return start_; }
  std::pair<DecoderState, std::vector<double>> step(const DecoderState& state, TokenId input) const;

 private:
  const Decoder* decoder_;
  LatentDrive drive_;
  AttentionMemory memory_;
  DecoderState start_;
};

class DefinitionModel {
 public:
  DefinitionModel(const ModelConfig& config, Vocabulary encoder_vocab, Vocabulary output_vocab, std::uint64_t seed);
  DefinitionModel(const DefinitionModel&) = delete;
  DefinitionModel& operator=(const DefinitionModel&) = delete;
  DefinitionModel(DefinitionModel&&) = default;
  DefinitionModel& operator=(DefinitionModel&&) = default;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& encoder_vocab() const { return encoder_vocab_; }
  const Vocabulary& output_vocab() const { return output_vocab_; }
  ParameterStore& parameters() { return *params_; }
  const ParameterStore& parameters() const { return *params_; }

  PreparedExample prepare(const Example& example) const;

  ContextEncoding encode_context(const PreparedExample& example) const;
  Tensor encode_definition(const PreparedExample& example) const;
  GaussianParams posterior(const Tensor& r_w, const Tensor& r_d) const { return posterior_(r_w, r_d); }
  GaussianParams prior(const Tensor& r_w) const { return prior_(r_w); }
  Tensor project_latent(const Tensor& z) const { return projection_(z); }

  const Encoder& context_encoder() const { return *context_encoder_; }
  const Encoder& definition_encoder() const { return definition_encoder_ ? *definition_encoder_ : *context_encoder_; }
  const Posterior& posterior_net() const { return posterior_; }
  const Prior& prior_net() const { return prior_; }
  const Decoder& decoder() const { return decoder_; }

  // Test-time generation uses z = prior mean; `use_posterior` decodes from the
  // posterior mean instead (needs a definition).
  Generation generate(const PreparedExample& example, std::size_t beam_width, std::size_t max_len,
                      bool use_posterior = false) const;
  Generation greedy(const PreparedExample& example, std::size_t max_len, bool use_posterior = false) const;

 private:
  Tensor decoding_latent(const PreparedExample& example, const ContextEncoding& enc, bool use_posterior) const;
  Generation finish(const BeamResult& result) const;

  ModelConfig config_;
  Vocabulary encoder_vocab_;
  Vocabulary output_vocab_;
  std::unique_ptr<ParameterStore> params_;
  std::unique_ptr<Encoder> context_encoder_;
  std::unique_ptr<Encoder> definition_encoder_;  // null when tied
  Posterior posterior_;
  Prior prior_;
  LatentProjection projection_;
  Decoder decoder_;
};

// Encoder vocabulary over phrase, context and definition tokens (plus bigram
// pieces when enabled); output vocabulary over definition tokens.
Vocabulary build_encoder_vocab(const std::vector<Example>& examples, const EncoderConfig& config);
Vocabulary build_output_vocab(const std::vector<Example>& examples, std::size_t cap);

}  // namespace vcdm
