#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vcdm/tensor.hpp"

namespace vcdm {

// Parameter groups used by the freeze ablations.
enum class ParamGroup { context_encoder, definition_encoder, inferer, decoder };

const char* group_name(ParamGroup group);

struct Parameter {
  std::string name;
  ParamGroup group;
  Tensor tensor;
};

// Ordered collection of trainable leaf tensors. Declaration order is the
// checkpoint order and the initialization order.
class ParameterStore {
 public:
  // Registers a new parameter initialized uniformly in [-init_scale, init_scale].
  Tensor add(std::string name, ParamGroup group, Shape shape, double init_scale);
  // Registers a zero-initialized parameter (biases).
  Tensor add_zeros(std::string name, ParamGroup group, Shape shape);

  const std::vector<Parameter>& entries() const { return entries_; }
  std::vector<Parameter>& entries() { return entries_; }
  const Parameter* find(const std::string& name) const;
  std::size_t scalar_count() const;

  void zero_grads();
  void seed(std::uint64_t seed) { rng_state_ = seed; }

 private:
  std::vector<Parameter> entries_;
  std::uint64_t rng_state_ = 0x9e3779b97f4a7c15ULL;
};

}  // namespace vcdm
