#include "vcdm/model.hpp"

#include "vcdm/errors.hpp"
#include "vcdm/text.hpp"

namespace vcdm {

DecoderSearch::DecoderSearch(const Decoder& decoder, const Tensor& h_d_prime, const Tensor& annotations)
    : decoder_(&decoder),
      drive_(decoder.latent_drive(h_d_prime)),
      memory_(decoder.prepare_attention(annotations)),
      start_(decoder.initial_state(h_d_prime)) {}

std::pair<DecoderState, std::vector<double>> DecoderSearch::step(const DecoderState& state, TokenId input) const {
  DecoderStep out = decoder_->step(input, state, drive_, memory_);
  auto lp = out.log_probs.values();
  return {std::move(out.state), std::vector<double>(lp.begin(), lp.end())};
}

DefinitionModel::DefinitionModel(const ModelConfig& config, Vocabulary encoder_vocab, Vocabulary output_vocab,
                                 std::uint64_t seed)
    : config_(config),
      encoder_vocab_(std::move(encoder_vocab)),
      output_vocab_(std::move(output_vocab)),
      params_(std::make_unique<ParameterStore>()) {
  params_->seed(seed);
  const auto& enc = config_.encoder;
  const double s = config_.init_scale;
  context_encoder_ = make_encoder(enc, enc.context_hidden, encoder_vocab_.size(), *params_, "context_encoder",
                                  ParamGroup::context_encoder, s);
  if (!config_.tied_encoders) {
    definition_encoder_ = make_encoder(enc, enc.definition_hidden, encoder_vocab_.size(), *params_,
                                       "definition_encoder", ParamGroup::definition_encoder, s);
  }
  const std::size_t d_e = config_.tied_encoders ? enc.context_hidden : enc.definition_hidden;
  posterior_ = Posterior(enc.context_hidden, d_e, config_.latent_dim, *params_, s);
  prior_ = Prior(enc.context_hidden, config_.latent_dim, config_.prior_hidden_layer, *params_, s);
  projection_ = LatentProjection(config_.latent_dim, config_.decoder_hidden, *params_, s);
  decoder_ = Decoder(config_, enc.context_hidden, output_vocab_.size(), *params_);
}

PreparedExample DefinitionModel::prepare(const Example& example) const {
  PreparedExample out;
  const bool subword = config_.encoder.subword_bigrams;
  out.pair = encode_pair(tokenize(example.phrase), tokenize(example.context), encoder_vocab_, subword);
  out.sense_id = example.sense_id;
  if (!example.definition.empty()) {
    out.has_definition = true;
    const auto def = tokenize(example.definition);
    out.definition_ids.push_back(kCls);
    const auto ids = encode_tokens(def, encoder_vocab_, subword);
    out.definition_ids.insert(out.definition_ids.end(), ids.begin(), ids.end());
    out.definition_ids.push_back(kSep);
    out.target_ids.push_back(kBos);
    for (const auto& tok : def) {
      const TokenId id = output_vocab_.id(tok);
      out.target_ids.push_back(id);
      out.reference.push_back(output_vocab_.token(id));
    }
    out.target_ids.push_back(kEos);
  }
  return out;
}

ContextEncoding DefinitionModel::encode_context(const PreparedExample& example) const {
  return vcdm::encode_context(*context_encoder_, example.pair.ids, example.pair.span);
}

Tensor DefinitionModel::encode_definition(const PreparedExample& example) const {
  if (!example.has_definition) throw ContractError("encode_definition: example has no definition");
  return vcdm::encode_definition(definition_encoder(), example.definition_ids);
}

Tensor DefinitionModel::decoding_latent(const PreparedExample& example, const ContextEncoding& enc,
                                        bool use_posterior) const {
  if (use_posterior) return posterior(enc.target, encode_definition(example)).mu;
  return prior_mean_latent(prior(enc.target));
}

Generation DefinitionModel::finish(const BeamResult& result) const {
  Generation g;
  g.ids = result.tokens;
  g.tokens = output_vocab_.decode(result.tokens);
  g.log_prob = result.score;
  g.finished = result.finished;
  return g;
}

Generation DefinitionModel::generate(const PreparedExample& example, std::size_t beam_width, std::size_t max_len,
                                     bool use_posterior) const {
  NoGradGuard guard;
  const ContextEncoding enc = encode_context(example);
  const Tensor h = project_latent(decoding_latent(example, enc, use_posterior));
  const DecoderSearch search(decoder_, h, enc.annotations);
  return finish(beam_search(search, beam_width, max_len));
}

Generation DefinitionModel::greedy(const PreparedExample& example, std::size_t max_len, bool use_posterior) const {
  NoGradGuard guard;
  const ContextEncoding enc = encode_context(example);
  const Tensor h = project_latent(decoding_latent(example, enc, use_posterior));
  const DecoderSearch search(decoder_, h, enc.annotations);
  return finish(greedy_decode(search, max_len));
}

Vocabulary build_encoder_vocab(const std::vector<Example>& examples, const EncoderConfig& config) {
  std::vector<std::vector<std::string>> seqs;
  for (const auto& ex : examples) {
    seqs.push_back(tokenize(ex.phrase));
    seqs.push_back(tokenize(ex.context));
    seqs.push_back(tokenize(ex.definition));
  }
  if (config.subword_bigrams) {
    const std::size_t n = seqs.size();
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> pieces;
      for (const auto& tok : seqs[i]) {
        for (auto& p : bigram_pieces(tok)) pieces.push_back(std::move(p));
      }
      seqs.push_back(std::move(pieces));
    }
  }
  return build_vocab(seqs, config.vocab_cap);
}

Vocabulary build_output_vocab(const std::vector<Example>& examples, std::size_t cap) {
  std::vector<std::vector<std::string>> seqs;
  for (const auto& ex : examples) seqs.push_back(tokenize(ex.definition));
  return build_vocab(seqs, cap);
}

}  // namespace vcdm
