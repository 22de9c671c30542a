#include "vcdm/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "vcdm/errors.hpp"

namespace vcdm {

std::vector<NamedTensor> named_parameters(const ParameterStore& store) {
  std::vector<NamedTensor> out;
  for (const auto& p : store.entries()) out.push_back({p.name, p.tensor});
  return out;
}

GradCheckReport finite_difference_check(const std::function<Tensor()>& loss_fn,
                                        const std::vector<NamedTensor>& params,
                                        const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw ContractError("finite_difference_check: epsilon must be > 0");

  std::vector<NamedTensor> targets = params;
  for (auto& p : targets) p.tensor.zero_grad();
  const Tensor loss = loss_fn();
  backward(loss);
  const double base = loss.item();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(targets.size());
  for (auto& p : targets) {
    auto g = p.tensor.grad();
    analytic.emplace_back(g.begin(), g.end());
  }
  if (options.inject_fault && !analytic.empty() && !analytic.front().empty()) analytic.front()[0] += 0.1;

  auto evaluate = [&] {
    NoGradGuard guard;
    return loss_fn().item();
  };
  const double again = evaluate();
  if (again != base) {
    throw DeterminismError("finite_difference_check: loss_fn is not deterministic (" + std::to_string(base) +
                           " vs " + std::to_string(again) + ")");
  }

  GradCheckReport report;
  report.max_relative_error = -1.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    auto values = targets[k].tensor.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + options.epsilon;
      const double plus = evaluate();
      values[i] = original - options.epsilon;
      const double minus = evaluate();
      values[i] = original;

      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double a = analytic[k][i];
      const double diff = std::abs(a - numeric);
      const double denom = std::max(std::abs(a), std::abs(numeric));
      const double err = denom < options.absolute_floor ? diff : diff / denom;
      ++report.checked;
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_parameter = targets[k].name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  if (report.max_relative_error < 0.0) report.max_relative_error = 0.0;
  return report;
}

}  // namespace vcdm
