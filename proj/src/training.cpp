#include "vcdm/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "vcdm/checkpoint.hpp"
#include "vcdm/errors.hpp"
#include "vcdm/logging.hpp"

namespace vcdm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t step_noise_seed(std::uint64_t seed, std::size_t step) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(step));
}

void write_vocab(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::string text;
  for (const auto& t : vocab.tokens()) text += t + "\n";
  write_file_atomic(path, text);
}

}  // namespace

double anneal_weight(double step, double s0, double tau) {
  if (!(tau > 0.0)) throw ContractError("anneal_weight: tau must be > 0");
  return 1.0 / (1.0 + std::exp(-(step - s0) / tau));
}

// ---- free bits --------------------------------------------------------------

FreeBits FreeBits::from(double rate, FreeBitsMode mode, std::size_t latent_dim) {
  return {rate, mode == FreeBitsMode::total ? latent_dim : std::size_t{1}};
}

double FreeBits::value(std::span<const double> kl) const {
  const double threshold = floor();
  double above = 0.0;
  std::size_t below = 0;
  for (double k : kl) {
    if (k > threshold) {
      above += k;
    } else {
      ++below;
    }
  }
  // count * rate / divisor keeps the all-below case exactly equal to the rate.
  return above + static_cast<double>(below) * rate / static_cast<double>(divisor);
}

Tensor FreeBits::apply(const Tensor& kl_per_dim) const {
  if (kl_per_dim.rank() != 1) throw DimensionError("free_bits: expected a KL vector, got " + shape_string(kl_per_dim.shape()));
  const double threshold = floor();
  return Tensor::make_result({}, {value(kl_per_dim.values())}, {kl_per_dim}, [threshold](detail::Node& self) {
    detail::Node& p = *self.parents[0];
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p.value[i] > threshold) g[i] += self.grad[0];
    }
  });
}

// ---- objective --------------------------------------------------------------

Objective Objective::from(const TrainConfig& config, std::size_t steps_per_epoch, std::size_t latent_dim) {
  Objective o;
  o.anneal = config.anneal_kl;
  o.midpoint = config.anneal_midpoint >= 0.0 ? config.anneal_midpoint : static_cast<double>(steps_per_epoch);
  o.temperature = config.anneal_temperature > 0.0 ? config.anneal_temperature : std::max(o.midpoint, 1.0) / 6.0;
  o.free_bits = FreeBits::from(config.target_rate, config.free_bits_mode, latent_dim);
  return o;
}

double Objective::gamma(std::size_t step) const {
  return anneal ? anneal_weight(static_cast<double>(step), midpoint, temperature) : 1.0;
}

Loss compute_loss(std::span<const PreparedExample> batch, const DefinitionModel& model, const Objective& objective,
                  std::size_t step, std::optional<std::uint64_t> noise_seed) {
  if (batch.empty()) throw ContractError("compute_loss: empty batch");
  const double gamma = objective.gamma(step);
  const std::size_t d_z = model.config().latent_dim;
  std::mt19937_64 rng(noise_seed.value_or(0));
  std::normal_distribution<double> normal(0.0, 1.0);

  Tensor nll_sum, kl_eff_sum;
  double kl_raw_sum = 0.0;
  for (const auto& ex : batch) {
    if (!ex.has_definition) throw ContractError("compute_loss: example without a definition");
    const ContextEncoding enc = model.encode_context(ex);
    const Tensor r_d = model.encode_definition(ex);
    const GaussianParams q = model.posterior(enc.target, r_d);
    const GaussianParams p = model.prior(enc.target);
    std::vector<double> noise(d_z, 0.0);
    if (noise_seed) {
      for (double& e : noise) e = normal(rng);
    }
    const LatentSample sample = reparameterize(q, noise);
    const Tensor h = model.project_latent(sample.z);
    const TeacherForcedScore score = model.decoder().score_teacher_forced(enc, h, ex.target_ids);
    const Tensor kl = kl_diag_gaussians(q, p);
    const Tensor kl_eff = objective.free_bits.apply(kl);
    for (double k : kl.values()) kl_raw_sum += k;
    const Tensor nll = scale(score.total, -1.0);
    nll_sum = nll_sum.defined() ? nll_sum + nll : nll;
    kl_eff_sum = kl_eff_sum.defined() ? kl_eff_sum + kl_eff : kl_eff;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  const Tensor nll_mean = scale(nll_sum, inv);
  const Tensor kl_eff_mean = scale(kl_eff_sum, inv);
  Loss loss;
  loss.total = nll_mean + scale(kl_eff_mean, gamma);
  loss.breakdown.nll = nll_mean.item();
  loss.breakdown.kl_raw = kl_raw_sum * inv;
  loss.breakdown.kl_effective = kl_eff_mean.item();
  loss.breakdown.gamma = gamma;
  loss.breakdown.total = loss.total.item();
  return loss;
}

// ---- optimization -----------------------------------------------------------

void adam_step(ParameterStore& params, AdamState& state, const AdamOptions& options, const std::vector<bool>& frozen) {
  auto& entries = params.entries();
  if (frozen.size() != entries.size()) throw ContractError("adam_step: frozen mask size mismatch");
  if (state.m.empty()) {
    for (const auto& p : entries) {
      state.m.emplace_back(p.tensor.size(), 0.0);
      state.v.emplace_back(p.tensor.size(), 0.0);
    }
  }
  if (state.m.size() != entries.size()) throw ContractError("adam_step: optimizer state does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (frozen[k]) continue;
    Tensor& tensor = entries[k].tensor;
    auto values = tensor.mutable_values();
    auto grad = tensor.mutable_grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * grad[i];
      v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

std::vector<bool> frozen_mask(const DefinitionModel& model, const TrainConfig& config) {
  const bool tied = model.config().tied_encoders;
  const bool freeze_ctx = config.freeze_both || config.freeze_context_encoder ||
                          (tied && config.freeze_definition_encoder);
  const bool freeze_def = config.freeze_both || config.freeze_definition_encoder;
  std::vector<bool> mask;
  for (const auto& p : model.parameters().entries()) {
    mask.push_back((p.group == ParamGroup::context_encoder && freeze_ctx) ||
                   (p.group == ParamGroup::definition_encoder && freeze_def));
  }
  return mask;
}

double clip_gradients(ParameterStore& params, const std::vector<bool>& frozen, double max_norm) {
  auto& entries = params.entries();
  double sq = 0.0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (frozen[k] || !entries[k].tensor.has_grad()) continue;
    for (double g : entries[k].tensor.grad()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      if (frozen[k] || !entries[k].tensor.has_grad()) continue;
      for (double& g : entries[k].tensor.mutable_grad()) g *= factor;
    }
  }
  return norm;
}

LossBreakdown train_step(DefinitionModel& model, AdamState& state, const RunConfig& config,
                         std::span<const PreparedExample> batch, const Objective& objective, std::size_t step) {
  const auto frozen = frozen_mask(model, config.train);
  model.parameters().zero_grads();
  const Loss loss = compute_loss(batch, model, objective, step, step_noise_seed(config.train.seed, step));
  backward(loss.total);
  if (config.train.clip_norm > 0.0) clip_gradients(model.parameters(), frozen, config.train.clip_norm);
  adam_step(model.parameters(), state, AdamOptions{config.train.learning_rate}, frozen);
  return loss.breakdown;
}

// ---- fit --------------------------------------------------------------------

nlohmann::json metrics_to_json(const EpochMetrics& m) {
  nlohmann::json j;
  j["epoch"] = m.epoch;
  j["train_nll"] = m.train_nll;
  j["train_kl_raw"] = m.train_kl_raw;
  j["train_kl_effective"] = m.train_kl_effective;
  j["gamma"] = m.gamma;
  j["valid_nll"] = m.valid_nll ? nlohmann::json(*m.valid_nll) : nlohmann::json(nullptr);
  j["valid_kl_raw"] = m.valid_kl_raw ? nlohmann::json(*m.valid_kl_raw) : nlohmann::json(nullptr);
  return j;
}

FitResult fit(const Corpus& corpus, const RunConfig& config, const FitOptions& options) {
  validate_config(config);
  if (corpus.train.empty()) throw ContractError("fit: train partition is empty");
  const auto& tc = config.train;

  DefinitionModel model(config.model, build_encoder_vocab(corpus.train, config.model.encoder),
                        build_output_vocab(corpus.train, config.model.output_vocab_cap), tc.seed);
  std::vector<PreparedExample> train;
  for (const auto& ex : corpus.train) train.push_back(model.prepare(ex));
  std::vector<PreparedExample> valid;
  for (const auto& ex : corpus.valid) valid.push_back(model.prepare(ex));

  const std::size_t steps_per_epoch = (train.size() + tc.batch_size - 1) / tc.batch_size;
  const Objective objective = Objective::from(tc, steps_per_epoch, config.model.latent_dim);
  logging::info("training on ", train.size(), " examples, ", steps_per_epoch, " steps/epoch, ",
            model.parameters().scalar_count(), " parameters, seed ", tc.seed);
  logging::debug("anneal midpoint ", objective.midpoint, ", temperature ", objective.temperature);

  std::optional<std::filesystem::path> metrics_path;
  if (options.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + options.out_dir->string() + ": " + ec.message());
    write_vocab(*options.out_dir / "encoder_vocab.txt", model.encoder_vocab());
    write_vocab(*options.out_dir / "output_vocab.txt", model.output_vocab());
    metrics_path = *options.out_dir / "metrics.jsonl";
    std::ofstream(*metrics_path, std::ios::trunc);
  }

  FitResult result{std::move(model), {}, 0, 0};
  DefinitionModel& m = result.model;
  AdamState adam;
  std::mt19937_64 shuffle_rng(splitmix64(tc.seed));
  std::vector<std::size_t> order(train.size());
  double best = 0.0;
  std::size_t step = 0;

  for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochMetrics metrics;
    metrics.epoch = epoch;
    double total_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += tc.batch_size) {
      const std::size_t end = std::min(order.size(), begin + tc.batch_size);
      std::vector<PreparedExample> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(train[order[i]]);
      const LossBreakdown b = train_step(m, adam, config, batch, objective, step);
      const double w = static_cast<double>(batch.size());
      metrics.train_nll += b.nll * w;
      metrics.train_kl_raw += b.kl_raw * w;
      metrics.train_kl_effective += b.kl_effective * w;
      total_sum += b.total * w;
      metrics.gamma = b.gamma;
      ++step;
    }
    const double n = static_cast<double>(train.size());
    metrics.train_nll /= n;
    metrics.train_kl_raw /= n;
    metrics.train_kl_effective /= n;
    metrics.selection_loss = total_sum / n;

    if (!valid.empty()) {
      NoGradGuard guard;
      double nll = 0.0, kl_raw = 0.0, kl_eff = 0.0;
      for (const auto& ex : valid) {
        const Loss l = compute_loss(std::span<const PreparedExample>(&ex, 1), m, objective, step, std::nullopt);
        nll += l.breakdown.nll;
        kl_raw += l.breakdown.kl_raw;
        kl_eff += l.breakdown.kl_effective;
      }
      const double nv = static_cast<double>(valid.size());
      metrics.valid_nll = nll / nv;
      metrics.valid_kl_raw = kl_raw / nv;
      metrics.selection_loss = *metrics.valid_nll + objective.gamma(step) * (kl_eff / nv);
    }

    logging::info("epoch ", epoch, " train_nll ", metrics.train_nll, " kl ", metrics.train_kl_raw, " gamma ",
              metrics.gamma, metrics.valid_nll ? " valid_nll " + std::to_string(*metrics.valid_nll) : std::string());
    if (metrics_path) {
      std::ofstream out(*metrics_path, std::ios::app);
      out << metrics_to_json(metrics).dump() << '\n';
      if (!out) throw IoError("cannot append to " + metrics_path->string());
    }
    const bool improved = result.metrics.empty() || metrics.selection_loss < best;
    if (improved) {
      best = metrics.selection_loss;
      result.best_epoch = epoch;
      if (options.out_dir) save_checkpoint(m, config, *options.out_dir / "model.ckpt");
    }
    result.metrics.push_back(metrics);
    if (options.on_epoch && !options.on_epoch(metrics, m)) break;
  }
  result.steps = step;
  if (options.out_dir) save_checkpoint(m, config, *options.out_dir / "last.ckpt");
  return result;
}

// ---- gradient check ---------------------------------------------------------

Example synthetic_gradcheck_example() {
  return {"w0", "w1 w2 w0 w3 w4", "w5 w6 w7 w8", std::nullopt};
}

Vocabulary synthetic_gradcheck_vocab() {
  std::vector<std::string> words;
  for (int i = 0; i < 14; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary(words);
}

GradCheckReport check_model_gradients(const RunConfig& config, const GradCheckOptions& options) {
  validate_config(config);
  const DefinitionModel model(config.model, synthetic_gradcheck_vocab(), synthetic_gradcheck_vocab(), config.train.seed);
  const PreparedExample ex = model.prepare(synthetic_gradcheck_example());
  const Objective objective = Objective::from(config.train, 1, config.model.latent_dim);
  const auto noise_seed = step_noise_seed(config.train.seed, 0);
  auto loss_fn = [&] {
    return compute_loss(std::span<const PreparedExample>(&ex, 1), model, objective, 0, noise_seed).total;
  };
  return finite_difference_check(loss_fn, named_parameters(model.parameters()), options);
}

}  // namespace vcdm
