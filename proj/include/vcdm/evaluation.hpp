#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace vcdm {

// Sentence BLEU with add-one smoothing on n-gram orders n >= 2 and brevity
// penalty exp(min(0, 1 - |ref| / |hyp|)). Empty hypothesis scores 0.
double sentence_bleu(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference,
                     std::size_t max_n = 4);

struct ScoredOutput {
  std::string id;
  std::vector<std::string> hypothesis;
  std::vector<std::string> reference;
  std::optional<std::string> sense_id;
  double sentence_bleu = 0.0;
};

enum class Aggregation { example_wise, sense_wise };

Aggregation parse_aggregation(const std::string& name);

ScoredOutput score_output(std::string id, std::vector<std::string> hypothesis, std::vector<std::string> reference,
                          std::optional<std::string> sense_id = std::nullopt);

struct EvalReport {
  std::size_t n_examples = 0;
  std::size_t n_senses = 0;  // 0 unless sense-wise aggregation was requested
  double bleu_example_wise = 0.0;
  std::optional<double> bleu_sense_wise;
  std::vector<ScoredOutput> per_example;
};

// Example-wise mean is always reported; sense-wise additionally when asked,
// which requires a sense id on every output.
EvalReport corpus_eval(std::vector<ScoredOutput> outputs, Aggregation aggregation);

nlohmann::json report_to_json(const EvalReport& report);

// One-sided paired bootstrap for "a beats b": fraction of resamples whose
// mean(a) <= mean(b).
double bootstrap_test(std::span<const double> scores_a, std::span<const double> scores_b,
                      std::size_t n_samples = 10000, std::uint64_t seed = 2);

struct TTestResult {
  double t = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided
};

TTestResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
// P(|T| >= |t|) for Student t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

}  // namespace vcdm
