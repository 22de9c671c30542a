#include "vcdm/decoder.hpp"

#include "vcdm/errors.hpp"

namespace vcdm {

namespace {

constexpr std::array<const char*, 4> kGateSuffix = {"", "_f", "_o", "_g"};

void expect_vector(const char* what, const Tensor& t, std::size_t dim) {
  if (t.rank() != 1 || t.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(dim) + ", got " +
                         shape_string(t.shape()));
  }
}

}  // namespace

Decoder::Decoder(const ModelConfig& config, std::size_t context_dim, std::size_t vocab_size, ParameterStore& store)
    : hidden_dim_(config.decoder_hidden),
      vocab_size_(vocab_size),
      context_dim_(context_dim),
      standard_cell_(config.standard_lstm_cell),
      projection_(config.attention_projection) {
  const auto g = ParamGroup::decoder;
  const double s = config.init_scale;
  const std::size_t dd = hidden_dim_;
  const std::size_t dw = config.decoder_embedding;
  embedding = store.add("decoder.embedding", g, {vocab_size, dw}, s);
  for (std::size_t k = 0; k < 4; ++k) {
    const std::string suffix = kGateSuffix[k];
    w[k] = store.add("decoder.cell.W" + suffix, g, {dd, dw}, s);
    u[k] = store.add("decoder.cell.U" + suffix, g, {dd, dd}, s);
    a[k] = store.add("decoder.cell.A" + suffix, g, {dd, dd}, s);
    v[k] = store.add("decoder.cell.V" + suffix, g, {dd, dd}, s);
    b[k] = store.add_zeros("decoder.cell.b" + suffix, g, {dd});
  }
  w_attention = store.add("decoder.attention.W_a", g, {dd, context_dim}, s);
  if (projection_ == AttentionProjection::separate) {
    w_context = store.add("decoder.attention.W_c", g, {dd, context_dim}, s);
  }
  w_mix = store.add("decoder.output.W_mix", g, {dd, 2 * dd}, s);
  b_mix = store.add_zeros("decoder.output.b_mix", g, {dd});
  w_out = store.add("decoder.output.W_out", g, {vocab_size, dd}, s);
  b_out = store.add_zeros("decoder.output.b_out", g, {vocab_size});
}

DecoderState Decoder::initial_state(const Tensor& h_d_prime) const {
  expect_vector("initial_state h'_d", h_d_prime, hidden_dim_);
  return {h_d_prime, Tensor::zeros({hidden_dim_}), Tensor::zeros({hidden_dim_})};
}

LatentDrive Decoder::latent_drive(const Tensor& h_d_prime) const {
  expect_vector("latent_drive h'_d", h_d_prime, hidden_dim_);
  LatentDrive drive;
  for (std::size_t k = 0; k < 4; ++k) drive.terms[k] = matvec(v[k], h_d_prime) + b[k];
  return drive;
}

DecoderState Decoder::cell_step(const Tensor& token_embedding, const DecoderState& state,
                                const LatentDrive& drive) const {
  expect_vector("cell_step embedding", token_embedding, w[0].cols());
  expect_vector("cell_step hidden", state.hidden, hidden_dim_);
  expect_vector("cell_step cell", state.cell, hidden_dim_);
  expect_vector("cell_step context", state.prev_context, hidden_dim_);
  std::array<Tensor, 4> pre;
  for (std::size_t k = 0; k < 4; ++k) {
    pre[k] = matvec(w[k], token_embedding) + matvec(u[k], state.hidden) + matvec(a[k], state.prev_context) +
             drive.terms[k];
  }
  const Tensor input_gate = sigmoid(pre[0]);
  const Tensor forget_gate = sigmoid(pre[1]);
  const Tensor output_gate = sigmoid(pre[2]);
  const Tensor candidate = tanh(pre[3]);
  const Tensor update = forget_gate * state.cell + input_gate * candidate;
  // The VCDM cell squashes the cell update through a sigmoid; the standard
  // LSTM cell (ablation) does not.
  const Tensor cell = standard_cell_ ? update : sigmoid(update);
  return {tanh(cell) * output_gate, cell, state.prev_context};
}

DecoderState Decoder::cell_step(const Tensor& token_embedding, const DecoderState& state,
                                const Tensor& h_d_prime) const {
  return cell_step(token_embedding, state, latent_drive(h_d_prime));
}

AttentionMemory Decoder::prepare_attention(const Tensor& annotations) const {
  if (!annotations.defined() || annotations.rank() != 2 || annotations.cols() != context_dim_) {
    throw DimensionError("attention: annotations must be [L, " + std::to_string(context_dim_) + "], got " +
                         (annotations.defined() ? shape_string(annotations.shape()) : std::string("undefined")));
  }
  AttentionMemory memory;
  memory.annotations = annotations;
  memory.keys = matmul(annotations, transpose(w_attention));
  memory.context_source =
      projection_ == AttentionProjection::shared ? transpose(memory.keys) : transpose(annotations);
  return memory;
}

AttentionResult Decoder::attend(const Tensor& hidden, const AttentionMemory& memory) const {
  expect_vector("attend hidden", hidden, hidden_dim_);
  const Tensor weights = softmax(matvec(memory.keys, hidden));
  Tensor context = matvec(memory.context_source, weights);
  if (projection_ == AttentionProjection::separate) context = matvec(w_context, context);
  return {context, weights};
}

AttentionResult Decoder::attend(const Tensor& hidden, const Tensor& annotations) const {
  return attend(hidden, prepare_attention(annotations));
}

Tensor Decoder::output_logits(const Tensor& hidden, const Tensor& context) const {
  expect_vector("output hidden", hidden, hidden_dim_);
  expect_vector("output context", context, hidden_dim_);
  const Tensor mixed = tanh(matvec(w_mix, concat({hidden, context})) + b_mix);
  return matvec(w_out, mixed) + b_out;
}

Tensor Decoder::output_distribution(const Tensor& hidden, const Tensor& context) const {
  return softmax(output_logits(hidden, context));
}

Tensor Decoder::embed(TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_size_) {
    throw ContractError("decoder: token id " + std::to_string(token) + " outside output vocabulary");
  }
  return row(embedding, static_cast<std::size_t>(token));
}

DecoderStep Decoder::step(TokenId input, const DecoderState& state, const LatentDrive& drive,
                          const AttentionMemory& memory) const {
  DecoderState next = cell_step(embed(input), state, drive);
  AttentionResult att = attend(next.hidden, memory);
  Tensor log_probs = log_softmax(output_logits(next.hidden, att.context));
  next.prev_context = att.context;
  return {std::move(next), std::move(log_probs), std::move(att.weights)};
}

TeacherForcedScore Decoder::score_teacher_forced(const ContextEncoding& encoding, const Tensor& h_d_prime,
                                                 std::span<const TokenId> target) const {
  if (target.size() < 2) throw ContractError("score_teacher_forced: target needs at least BOS and EOS");
  if (target.front() != kBos || target.back() != kEos) {
    throw ContractError("score_teacher_forced: target must start with BOS and end with EOS");
  }
  const AttentionMemory memory = prepare_attention(encoding.annotations);
  const LatentDrive drive = latent_drive(h_d_prime);
  DecoderState state = initial_state(h_d_prime);
  TeacherForcedScore score;
  for (std::size_t j = 1; j < target.size(); ++j) {
    DecoderStep out = step(target[j - 1], state, drive, memory);
    const Tensor lp = pick(out.log_probs, static_cast<std::size_t>(target[j]));
    score.per_token.push_back(lp.item());
    score.total = score.total.defined() ? score.total + lp : lp;
    state = std::move(out.state);
  }
  return score;
}

}  // namespace vcdm
