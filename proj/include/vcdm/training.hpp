#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "vcdm/config.hpp"
#include "vcdm/corpus.hpp"
#include "vcdm/gradcheck.hpp"
#include "vcdm/model.hpp"

namespace vcdm {

// gamma = 1 / (1 + exp(-(step - s0) / tau))
double anneal_weight(double step, double s0, double tau);

// Free-bits floor on the KL term. In `total` mode the rate is spread evenly
// over the latent dimensions (floor rate / d_z each); in `per_dim` mode every
// dimension is floored at the full rate.
struct FreeBits {
  double rate = 1.0;
  std::size_t divisor = 1;

  static FreeBits from(double rate, FreeBitsMode mode, std::size_t latent_dim);
  double floor() const { return rate / static_cast<double>(divisor); }
  // sum_i max(floor, kl_i); zero gradient for dimensions at or below the floor.
  double value(std::span<const double> kl_per_dim) const;
  Tensor apply(const Tensor& kl_per_dim) const;
};

// Resolved annealing + free-bits settings for one run.
struct Objective {
  bool anneal = true;
  double midpoint = 0.0;
  double temperature = 1.0;
  FreeBits free_bits;

  static Objective from(const TrainConfig& config, std::size_t steps_per_epoch, std::size_t latent_dim);
  double gamma(std::size_t step) const;
};

struct LossBreakdown {
  double nll = 0.0;
  double kl_raw = 0.0;
  double kl_effective = 0.0;
  double gamma = 0.0;
  double total = 0.0;
};

struct Loss {
  Tensor total;
  LossBreakdown breakdown;
};

// Batch objective: mean token-summed NLL under a posterior sample plus gamma
// times the mean free-bits KL. Without a noise seed the posterior mean is used.
Loss compute_loss(std::span<const PreparedExample> batch, const DefinitionModel& model, const Objective& objective,
                  std::size_t step, std::optional<std::uint64_t> noise_seed);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// Bias-corrected Adam over every parameter whose `frozen` entry is false.
// Frozen parameters and their moments are left untouched.
void adam_step(ParameterStore& params, AdamState& state, const AdamOptions& options, const std::vector<bool>& frozen);

std::vector<bool> frozen_mask(const DefinitionModel& model, const TrainConfig& config);

// Scales gradients of unfrozen parameters so their global L2 norm is at most
// max_norm. Returns the norm before clipping.
double clip_gradients(ParameterStore& params, const std::vector<bool>& frozen, double max_norm);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_nll = 0.0;
  double train_kl_raw = 0.0;
  double train_kl_effective = 0.0;
  double gamma = 0.0;
  std::optional<double> valid_nll;
  std::optional<double> valid_kl_raw;
  double selection_loss = 0.0;  // validation total, or train total without a valid split
};

nlohmann::json metrics_to_json(const EpochMetrics& metrics);

struct FitOptions {
  // When set: metrics.jsonl, vocabularies, the best checkpoint (model.ckpt)
  // and the final one (last.ckpt) go here.
  std::optional<std::filesystem::path> out_dir;
  // Called after each epoch; returning false stops training.
  std::function<bool(const EpochMetrics&, const DefinitionModel&)> on_epoch;
};

struct FitResult {
  DefinitionModel model;
  std::vector<EpochMetrics> metrics;
  std::size_t steps = 0;
  std::size_t best_epoch = 0;
};

// Builds vocabularies from the train split, initializes a model from
// config.train.seed, and trains for up to max_epochs.
FitResult fit(const Corpus& corpus, const RunConfig& config, const FitOptions& options = {});

// One seeded epoch-free training step on an existing model (used by ablation
// tests and tools). Returns the loss before the update.
LossBreakdown train_step(DefinitionModel& model, AdamState& state, const RunConfig& config,
                         std::span<const PreparedExample> batch, const Objective& objective, std::size_t step);

// Fixed one-example problem over a 20-token vocabulary ("w0".."w13" plus the
// reserved tokens), used by the gradient check.
Example synthetic_gradcheck_example();
Vocabulary synthetic_gradcheck_vocab();

// Finite-difference check of the full training loss (NLL + gamma * free-bits
// KL, one seeded posterior sample) on the synthetic example.
GradCheckReport check_model_gradients(const RunConfig& config, const GradCheckOptions& options = {});

}  // namespace vcdm
