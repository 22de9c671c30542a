#include "vcdm/inferer.hpp"

#include <vector>

#include "vcdm/errors.hpp"

namespace vcdm {

namespace {

void expect_dim(const char* what, const Tensor& t, std::size_t dim) {
  if (t.rank() != 1 || t.size() != dim) {
    throw DimensionError(std::string(what) + ": expected a vector of dimension " + std::to_string(dim) + ", got " +
                         shape_string(t.shape()));
  }
}

}  // namespace

Posterior::Posterior(std::size_t context_dim, std::size_t definition_dim, std::size_t latent_dim,
                     ParameterStore& store, double init_scale)
    : context_dim_(context_dim), definition_dim_(definition_dim) {
  const auto g = ParamGroup::inferer;
  w_z = store.add("posterior.W_z", g, {latent_dim, context_dim + definition_dim}, init_scale);
  b_z = store.add_zeros("posterior.b_z", g, {latent_dim});
  w_mu = store.add("posterior.W_mu", g, {latent_dim, latent_dim}, init_scale);
  b_mu = store.add_zeros("posterior.b_mu", g, {latent_dim});
  w_sigma = store.add("posterior.W_sigma", g, {latent_dim, latent_dim}, init_scale);
  b_sigma = store.add_zeros("posterior.b_sigma", g, {latent_dim});
}

GaussianParams Posterior::operator()(const Tensor& r_w, const Tensor& r_d) const {
  expect_dim("posterior r_w", r_w, context_dim_);
  expect_dim("posterior r_d", r_d, definition_dim_);
  const Tensor h_z = tanh(matvec(w_z, concat({r_w, r_d})) + b_z);
  return {matvec(w_mu, h_z) + b_mu, clamp(matvec(w_sigma, h_z) + b_sigma, kLogVarMin, kLogVarMax)};
}

Prior::Prior(std::size_t context_dim, std::size_t latent_dim, bool hidden_layer, ParameterStore& store,
             double init_scale)
    : context_dim_(context_dim), hidden_layer_(hidden_layer) {
  const auto g = ParamGroup::inferer;
  std::size_t in = context_dim;
  if (hidden_layer) {
    w_h = store.add("prior.W_h", g, {latent_dim, context_dim}, init_scale);
    b_h = store.add_zeros("prior.b_h", g, {latent_dim});
    in = latent_dim;
  }
  w_mu = store.add("prior.W_mu", g, {latent_dim, in}, init_scale);
  b_mu = store.add_zeros("prior.b_mu", g, {latent_dim});
  w_sigma = store.add("prior.W_sigma", g, {latent_dim, in}, init_scale);
  b_sigma = store.add_zeros("prior.b_sigma", g, {latent_dim});
}

GaussianParams Prior::operator()(const Tensor& r_w) const {
  expect_dim("prior r_w", r_w, context_dim_);
  const Tensor input = hidden_layer_ ? tanh(matvec(w_h, r_w) + b_h) : r_w;
  return {matvec(w_mu, input) + b_mu, clamp(matvec(w_sigma, input) + b_sigma, kLogVarMin, kLogVarMax)};
}

LatentProjection::LatentProjection(std::size_t latent_dim, std::size_t decoder_dim, ParameterStore& store,
                                   double init_scale) {
  w_d = store.add("latent.W_d", ParamGroup::inferer, {decoder_dim, latent_dim}, init_scale);
  b_d = store.add_zeros("latent.b_d", ParamGroup::inferer, {decoder_dim});
}

Tensor LatentProjection::operator()(const Tensor& z) const {
  expect_dim("project_latent z", z, w_d.cols());
  return tanh(matvec(w_d, z) + b_d);
}

LatentSample reparameterize(const GaussianParams& g, std::span<const double> noise) {
  if (noise.size() != g.mu.size()) throw DimensionError("reparameterize: noise dimension mismatch");
  Tensor e = Tensor::vector(std::vector<double>(noise.begin(), noise.end()));
  Tensor z = g.mu + exp(scale(g.log_var, 0.5)) * e;
  return {z, e};
}

Tensor prior_mean_latent(const GaussianParams& g) { return g.mu; }

Tensor kl_diag_gaussians(const GaussianParams& q, const GaussianParams& p) {
  if (q.mu.shape() != p.mu.shape() || q.log_var.shape() != p.log_var.shape() || q.mu.shape() != q.log_var.shape()) {
    throw DimensionError("kl_diag_gaussians: shapes " + shape_string(q.mu.shape()) + " and " +
                         shape_string(p.mu.shape()) + " differ");
  }
  // 0.5 * [ (lv_p - lv_q) + (exp(lv_q) + (mu_q - mu_p)^2) * exp(-lv_p) - 1 ]
  const Tensor diff = q.mu - p.mu;
  const Tensor ratio = (exp(q.log_var) + diff * diff) * exp(scale(p.log_var, -1.0));
  return scale(add_scalar((p.log_var - q.log_var) + ratio, -1.0), 0.5);
}

}  // namespace vcdm
