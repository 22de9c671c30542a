#include "vcdm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "vcdm/errors.hpp"

namespace vcdm {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

double sentence_bleu(const std::vector<std::string>& hypothesis, const std::vector<std::string>& reference,
                     std::size_t max_n) {
  if (hypothesis.empty()) return 0.0;
  if (max_n == 0) throw ContractError("sentence_bleu: max_n must be >= 1");
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const NgramCounts hyp = count_ngrams(hypothesis, n);
    const NgramCounts ref = count_ngrams(reference, n);
    double matched = 0.0;
    for (const auto& [gram, count] : hyp) {
      if (auto it = ref.find(gram); it != ref.end()) matched += static_cast<double>(std::min(count, it->second));
    }
    double total = hypothesis.size() >= n ? static_cast<double>(hypothesis.size() - n + 1) : 0.0;
    if (n > 1) {
      matched += 1.0;
      total += 1.0;
    }
    if (matched == 0.0) return 0.0;
    log_sum += std::log(matched / total);
  }
  const double h = static_cast<double>(hypothesis.size());
  const double r = static_cast<double>(reference.size());
  const double log_bp = std::min(0.0, 1.0 - r / h);
  return std::exp(log_sum / static_cast<double>(max_n) + log_bp);
}

Aggregation parse_aggregation(const std::string& name) {
  if (name == "example_wise") return Aggregation::example_wise;
  if (name == "sense_wise") return Aggregation::sense_wise;
  throw ContractError("unknown aggregation '" + name + "' (expected example_wise or sense_wise)");
}

ScoredOutput score_output(std::string id, std::vector<std::string> hypothesis, std::vector<std::string> reference,
                          std::optional<std::string> sense_id) {
  ScoredOutput out{std::move(id), std::move(hypothesis), std::move(reference), std::move(sense_id), 0.0};
  out.sentence_bleu = sentence_bleu(out.hypothesis, out.reference);
  return out;
}

EvalReport corpus_eval(std::vector<ScoredOutput> outputs, Aggregation aggregation) {
  if (outputs.empty()) throw ContractError("corpus_eval: no outputs to aggregate");
  EvalReport report;
  report.n_examples = outputs.size();
  double total = 0.0;
  for (const auto& o : outputs) total += o.sentence_bleu;
  report.bleu_example_wise = total / static_cast<double>(outputs.size());
  if (aggregation == Aggregation::sense_wise) {
    std::map<std::string, std::pair<double, std::size_t>> senses;
    for (const auto& o : outputs) {
      if (!o.sense_id) throw ContractError("corpus_eval: sense_wise aggregation needs a sense_id on every example (missing on " + o.id + ")");
      auto& [sum, count] = senses[*o.sense_id];
      sum += o.sentence_bleu;
      ++count;
    }
    double mean_of_means = 0.0;
    for (const auto& [sense, acc] : senses) mean_of_means += acc.first / static_cast<double>(acc.second);
    report.n_senses = senses.size();
    report.bleu_sense_wise = mean_of_means / static_cast<double>(senses.size());
  }
  report.per_example = std::move(outputs);
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["n_examples"] = report.n_examples;
  j["bleu_example_wise"] = report.bleu_example_wise;
  if (report.bleu_sense_wise) {
    j["bleu_sense_wise"] = *report.bleu_sense_wise;
    j["n_senses"] = report.n_senses;
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& o : report.per_example) {
    nlohmann::json row{{"id", o.id}, {"sentence_bleu", o.sentence_bleu}};
    if (o.sense_id) row["sense_id"] = *o.sense_id;
    rows.push_back(std::move(row));
  }
  j["per_example"] = std::move(rows);
  return j;
}

// ---- significance -----------------------------------------------------------

double bootstrap_test(std::span<const double> scores_a, std::span<const double> scores_b, std::size_t n_samples,
                      std::uint64_t seed) {
  if (scores_a.size() != scores_b.size())
    throw ContractError("bootstrap_test: score lists differ in length (" + std::to_string(scores_a.size()) + " vs " +
                        std::to_string(scores_b.size()) + ")");
  if (scores_a.size() < 2) throw ContractError("bootstrap_test: need at least 2 paired scores");
  if (n_samples == 0) throw ContractError("bootstrap_test: n_samples must be >= 1");
  if (scores_a.size() > std::numeric_limits<std::uint32_t>::max())
    throw ContractError("bootstrap_test: too many scores");

  // Index draws are spelled out (rejection + modulo on raw 32-bit outputs) so
  // the stream does not depend on the standard library's distributions.
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  const std::uint64_t n = scores_a.size();
  const std::uint64_t range = std::uint64_t{1} << 32;
  const std::uint64_t limit = range - range % n;
  std::size_t not_better = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    double sum_a = 0.0, sum_b = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t u;
      do {
        u = rng();
      } while (u >= limit);
      const std::size_t k = static_cast<std::size_t>(u % n);
      sum_a += scores_a[k];
      sum_b += scores_b[k];
    }
    if (sum_a <= sum_b) ++not_better;
  }
  return static_cast<double>(not_better) / static_cast<double>(n_samples);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ContractError("incomplete_beta: a and b must be > 0");
  if (x < 0.0 || x > 1.0) throw ContractError("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  auto continued_fraction = [](double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
      const double m2 = 2.0 * m;
      double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::fabs(delta - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete_beta: continued fraction did not converge");
  };

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * continued_fraction(a, b, x) / a;
  return 1.0 - std::exp(log_front) * continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double dof) {
  if (!(dof > 0.0)) throw ContractError("student_t_two_sided: degrees of freedom must be > 0");
  if (t == 0.0) return 1.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test(std::span<const double> scores_a, std::span<const double> scores_b) {
  if (scores_a.size() != scores_b.size())
    throw ContractError("paired_t_test: score lists differ in length (" + std::to_string(scores_a.size()) + " vs " +
                        std::to_string(scores_b.size()) + ")");
  const std::size_t n = scores_a.size();
  if (n < 2) throw ContractError("paired_t_test: need at least 2 paired scores");
  std::vector<double> diffs(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diffs[i] = scores_a[i] - scores_b[i];
    sum += diffs[i];
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double d : diffs) sq += (d - mean) * (d - mean);
  const double variance = sq / static_cast<double>(n - 1);
  if (variance == 0.0)
    throw DegenerateInputError("paired_t_test: differences have zero variance; the t statistic is undefined");
  TTestResult r;
  r.degrees_of_freedom = static_cast<double>(n - 1);
  r.t = mean / std::sqrt(variance / static_cast<double>(n));
  r.p_value = student_t_two_sided(r.t, r.degrees_of_freedom);
  return r;
}

}  // namespace vcdm
