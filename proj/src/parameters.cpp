#include "vcdm/parameters.hpp"

#include <random>

#include "vcdm/errors.hpp"

namespace vcdm {

const char* group_name(ParamGroup group) {
  switch (group) {
    case ParamGroup::context_encoder: return "context_encoder";
    case ParamGroup::definition_encoder: return "definition_encoder";
    case ParamGroup::inferer: return "inferer";
    case ParamGroup::decoder: return "decoder";
  }
  return "unknown";
}

Tensor ParameterStore::add(std::string name, ParamGroup group, Shape shape, double init_scale) {
  if (find(name)) throw ContractError("parameter registered twice: " + name);
  // Each parameter draws from its own generator seeded from the store state so
  // adding a parameter never perturbs the values of earlier ones.
  std::mt19937_64 gen(rng_state_);
  rng_state_ = gen();
  std::uniform_real_distribution<double> dist(-init_scale, init_scale);
  std::vector<double> values(shape_size(shape));
  for (double& v : values) v = dist(gen);
  Tensor t = Tensor::from(std::move(shape), std::move(values), true);
  entries_.push_back({std::move(name), group, t});
  return t;
}

Tensor ParameterStore::add_zeros(std::string name, ParamGroup group, Shape shape) {
  if (find(name)) throw ContractError("parameter registered twice: " + name);
  Tensor t = Tensor::zeros(std::move(shape), true);
  entries_.push_back({std::move(name), group, t});
  return t;
}

const Parameter* ParameterStore::find(const std::string& name) const {
  for (const auto& p : entries_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : entries_) n += p.tensor.size();
  return n;
}

void ParameterStore::zero_grads() {
  for (auto& p : entries_) p.tensor.zero_grad();
}

}  // namespace vcdm
