#include "vcdm/encoders.hpp"

#include <cmath>
#include <vector>

#include "vcdm/errors.hpp"

namespace vcdm {

namespace {

void check_ids(std::span<const TokenId> ids, std::size_t vocab_size) {
  if (ids.empty()) throw ContractError("encoder: empty input sequence");
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw ContractError("encoder: token id " + std::to_string(id) + " outside vocabulary of size " +
                          std::to_string(vocab_size));
    }
  }
}

std::vector<Tensor> embed(const Tensor& table, std::span<const TokenId> ids) {
  std::vector<Tensor> out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(row(table, static_cast<std::size_t>(id)));
  return out;
}

// One direction of one LSTM layer with a fused [4h, in + h] gate matrix
// (gate order: input, forget, candidate, output).
struct LstmDirection {
  Tensor weight;
  Tensor bias;
  std::size_t hidden = 0;

  std::vector<Tensor> run(const std::vector<Tensor>& inputs, bool reverse) const {
    std::vector<Tensor> outputs(inputs.size());
    Tensor h = Tensor::zeros({hidden});
    Tensor c = Tensor::zeros({hidden});
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const std::size_t t = reverse ? inputs.size() - 1 - k : k;
      const Tensor gates = matvec(weight, concat({inputs[t], h})) + bias;
      const Tensor i = sigmoid(slice(gates, 0, hidden));
      const Tensor f = sigmoid(slice(gates, hidden, hidden));
      const Tensor g = tanh(slice(gates, 2 * hidden, hidden));
      const Tensor o = sigmoid(slice(gates, 3 * hidden, hidden));
      c = f * c + i * g;
      h = o * tanh(c);
      outputs[t] = h;
    }
    return outputs;
  }
};

class BiLstmEncoder final : public Encoder {
 public:
  BiLstmEncoder(const EncoderConfig& cfg, std::size_t output_dim, std::size_t vocab_size, ParameterStore& store,
                const std::string& prefix, ParamGroup group, double init_scale)
      : output_dim_(output_dim), vocab_size_(vocab_size), group_(group) {
    embedding_ = store.add(prefix + ".embedding", group, {vocab_size, cfg.embedding_dim}, init_scale);
    const std::size_t half = output_dim / 2;
    std::size_t in = cfg.embedding_dim;
    for (std::size_t l = 0; l < cfg.layers; ++l) {
      Layer layer;
      for (int d = 0; d < 2; ++d) {
        const std::string name = prefix + ".layer" + std::to_string(l) + (d == 0 ? ".fwd" : ".bwd");
        LstmDirection& dir = d == 0 ? layer.forward : layer.backward;
        dir.hidden = half;
        dir.weight = store.add(name + ".weight", group, {4 * half, in + half}, init_scale);
        dir.bias = store.add_zeros(name + ".bias", group, {4 * half});
      }
      layers_.push_back(std::move(layer));
      in = output_dim;
    }
  }

  Tensor encode(std::span<const TokenId> ids) const override {
    check_ids(ids, vocab_size_);
    std::vector<Tensor> states = embed(embedding_, ids);
    for (const auto& layer : layers_) {
      const auto fwd = layer.forward.run(states, false);
      const auto bwd = layer.backward.run(states, true);
      for (std::size_t t = 0; t < states.size(); ++t) states[t] = concat({fwd[t], bwd[t]});
    }
    return stack_rows(states);
  }

  std::size_t output_dim() const override { return output_dim_; }
  std::size_t vocab_size() const override { return vocab_size_; }
  ParamGroup group() const override { return group_; }

 private:
  struct Layer {
    LstmDirection forward;
    LstmDirection backward;
  };
  std::size_t output_dim_;
  std::size_t vocab_size_;
  ParamGroup group_;
  Tensor embedding_;
  std::vector<Layer> layers_;
};

// Single scaled dot-product self-attention layer over embeddings plus fixed
// sinusoidal positions, with a residual projection of the input.
class SelfAttentionEncoder final : public Encoder {
 public:
  SelfAttentionEncoder(const EncoderConfig& cfg, std::size_t output_dim, std::size_t vocab_size,
                       ParameterStore& store, const std::string& prefix, ParamGroup group, double init_scale)
      : output_dim_(output_dim), vocab_size_(vocab_size), embedding_dim_(cfg.embedding_dim), group_(group) {
    embedding_ = store.add(prefix + ".embedding", group, {vocab_size, cfg.embedding_dim}, init_scale);
    query_ = store.add(prefix + ".query", group, {cfg.embedding_dim, output_dim}, init_scale);
    key_ = store.add(prefix + ".key", group, {cfg.embedding_dim, output_dim}, init_scale);
    value_ = store.add(prefix + ".value", group, {cfg.embedding_dim, output_dim}, init_scale);
    residual_ = store.add(prefix + ".residual", group, {cfg.embedding_dim, output_dim}, init_scale);
    bias_ = store.add_zeros(prefix + ".bias", group, {output_dim});
  }

  Tensor encode(std::span<const TokenId> ids) const override {
    check_ids(ids, vocab_size_);
    std::vector<Tensor> rows = embed(embedding_, ids);
    for (std::size_t t = 0; t < rows.size(); ++t) rows[t] = rows[t] + position(t);
    const Tensor x = stack_rows(rows);
    const Tensor q = matmul(x, query_);
    const Tensor k = matmul(x, key_);
    const Tensor v = matmul(x, value_);
    const Tensor weights = softmax(scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(output_dim_))));
    return tanh(add_row_bias(matmul(weights, v) + matmul(x, residual_), bias_));
  }

  std::size_t output_dim() const override { return output_dim_; }
  std::size_t vocab_size() const override { return vocab_size_; }
  ParamGroup group() const override { return group_; }

 private:
  Tensor position(std::size_t t) const {
    std::vector<double> p(embedding_dim_);
    for (std::size_t i = 0; i < embedding_dim_; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(embedding_dim_));
      p[i] = i % 2 == 0 ? std::sin(static_cast<double>(t) * rate) : std::cos(static_cast<double>(t) * rate);
    }
    return Tensor::vector(std::move(p));
  }

  std::size_t output_dim_;
  std::size_t vocab_size_;
  std::size_t embedding_dim_;
  ParamGroup group_;
  Tensor embedding_, query_, key_, value_, residual_, bias_;
};

// Position-independent token-wise projection; annotations do not see
// neighbouring tokens. Used as an oracle for span pooling.
class BagOfWordsEncoder final : public Encoder {
 public:
  BagOfWordsEncoder(const EncoderConfig& cfg, std::size_t output_dim, std::size_t vocab_size, ParameterStore& store,
                    const std::string& prefix, ParamGroup group, double init_scale)
      : output_dim_(output_dim), vocab_size_(vocab_size), group_(group) {
    embedding_ = store.add(prefix + ".embedding", group, {vocab_size, cfg.embedding_dim}, init_scale);
    weight_ = store.add(prefix + ".weight", group, {cfg.embedding_dim, output_dim}, init_scale);
    bias_ = store.add_zeros(prefix + ".bias", group, {output_dim});
  }

  Tensor encode(std::span<const TokenId> ids) const override {
    check_ids(ids, vocab_size_);
    return tanh(add_row_bias(matmul(stack_rows(embed(embedding_, ids)), weight_), bias_));
  }

  std::size_t output_dim() const override { return output_dim_; }
  std::size_t vocab_size() const override { return vocab_size_; }
  ParamGroup group() const override { return group_; }

 private:
  std::size_t output_dim_;
  std::size_t vocab_size_;
  ParamGroup group_;
  Tensor embedding_, weight_, bias_;
};

}  // namespace

std::unique_ptr<Encoder> make_encoder(const EncoderConfig& config, std::size_t output_dim, std::size_t vocab_size,
                                      ParameterStore& store, const std::string& prefix, ParamGroup group,
                                      double init_scale) {
  switch (config.kind) {
    case EncoderKind::bilstm:
      if (output_dim % 2 != 0) throw ConfigError("bilstm encoder output dimension must be even");
      return std::make_unique<BiLstmEncoder>(config, output_dim, vocab_size, store, prefix, group, init_scale);
    case EncoderKind::self_attention:
      return std::make_unique<SelfAttentionEncoder>(config, output_dim, vocab_size, store, prefix, group, init_scale);
    case EncoderKind::bag_of_words:
      return std::make_unique<BagOfWordsEncoder>(config, output_dim, vocab_size, store, prefix, group, init_scale);
  }
  throw ConfigError("unknown encoder kind");
}

ContextEncoding encode_context(const Encoder& encoder, std::span<const TokenId> pair, IndexRange target_span) {
  if (target_span.first > target_span.last || target_span.last >= pair.size()) {
    throw ContractError("encode_context: target span [" + std::to_string(target_span.first) + "," +
                        std::to_string(target_span.last) + "] invalid for pair of length " +
                        std::to_string(pair.size()));
  }
  ContextEncoding out;
  out.annotations = encoder.encode(pair);
  out.target = target_span.width() == 1
                   ? row(out.annotations, target_span.first)
                   : mean_axis(row_range(out.annotations, target_span.first, target_span.last + 1), 0);
  return out;
}

Tensor encode_definition(const Encoder& encoder, std::span<const TokenId> sequence) {
  if (sequence.empty()) throw ContractError("encode_definition: empty sequence");
  return row(encoder.encode(sequence), 0);
}

}  // namespace vcdm
