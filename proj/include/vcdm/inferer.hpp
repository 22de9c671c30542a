#pragma once

#include <span>

#include "vcdm/config.hpp"
#include "vcdm/parameters.hpp"
#include "vcdm/tensor.hpp"

namespace vcdm {

inline constexpr double kLogVarMin = -12.0;
inline constexpr double kLogVarMax = 12.0;

// Diagonal Gaussian over the latent space. log_var is already clamped.
struct GaussianParams {
  Tensor mu;
  Tensor log_var;
};

struct LatentSample {
  Tensor z;
  Tensor noise;
};

// Recognition network q(z | w, d):
//   h_z = tanh(W_z [r_w; r_d] + b_z),  mu = W_mu h_z + b_mu,  log var = W_sigma h_z + b_sigma.
class Posterior {
 public:
  Posterior() = default;
  Posterior(std::size_t context_dim, std::size_t definition_dim, std::size_t latent_dim, ParameterStore& store,
            double init_scale);
  GaussianParams operator()(const Tensor& r_w, const Tensor& r_d) const;

  Tensor w_z, b_z, w_mu, b_mu, w_sigma, b_sigma;

 private:
  std::size_t context_dim_ = 0;
  std::size_t definition_dim_ = 0;
};

// Conditional prior p(z | w): two linear maps of r_w, optionally preceded by
// a tanh layer mirroring the posterior.
class Prior {
 public:
  Prior() = default;
  Prior(std::size_t context_dim, std::size_t latent_dim, bool hidden_layer, ParameterStore& store, double init_scale);
  GaussianParams operator()(const Tensor& r_w) const;

  Tensor w_h, b_h, w_mu, b_mu, w_sigma, b_sigma;

 private:
  std::size_t context_dim_ = 0;
  bool hidden_layer_ = false;
};

// h'_d = tanh(W_d z + b_d)
class LatentProjection {
 public:
  LatentProjection() = default;
  LatentProjection(std::size_t latent_dim, std::size_t decoder_dim, ParameterStore& store, double init_scale);
  Tensor operator()(const Tensor& z) const;

  Tensor w_d, b_d;
};

// z = mu + exp(log_var / 2) * noise; noise is a constant.
LatentSample reparameterize(const GaussianParams& g, std::span<const double> noise);

// Test-time latent: the prior mean.
Tensor prior_mean_latent(const GaussianParams& g);

// Per-dimension KL(q || p) between diagonal Gaussians.
Tensor kl_diag_gaussians(const GaussianParams& q, const GaussianParams& p);

}  // namespace vcdm
