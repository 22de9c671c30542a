#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vcdm/parameters.hpp"
#include "vcdm/tensor.hpp"

namespace vcdm {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Below this magnitude (both terms) the absolute error is reported instead.
  double absolute_floor = 1e-8;
  // Adds 0.1 to the first analytic gradient entry; exercises fault detection.
  bool inject_fault = false;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Compares analytic gradients from backward() with central finite differences
// (L(t+eps) - L(t-eps)) / (2 eps) for every scalar of every listed tensor.
// Throws DeterminismError if loss_fn gives different values at the same point.
GradCheckReport finite_difference_check(const std::function<Tensor()>& loss_fn,
                                        const std::vector<NamedTensor>& params,
                                        const GradCheckOptions& options = {});

std::vector<NamedTensor> named_parameters(const ParameterStore& store);

}  // namespace vcdm
