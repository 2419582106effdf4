#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusedhs/dataset.hpp"
#include "fusedhs/linalg.hpp"
#include "fusedhs/rng.hpp"

namespace fusedhs {

enum class ModelKind {
  BayesianLasso,       // "blasso"
  BayesianFusedLasso,  // "bfl"
  FusedHorseshoe,      // "bfh": Laplace on coefficients, horseshoe on successive differences
  HorsesHorseshoe,     // "bhh": Laplace on coefficients, horseshoe on all pairwise differences
};

std::string_view model_name(ModelKind m);
/// Accepts the short names above; throws ConfigError otherwise.
ModelKind parse_model(std::string_view name);

struct SamplerConfig {
  std::size_t iterations = 5000;
  std::size_t burn_in = 2000;
  std::size_t thinning = 1;
  std::uint64_t seed = 1;
  // sigma2 ~ IG(nu0/2, eta0/2)
  double nu0 = 1.0;
  double eta0 = 1.0;
  // Gamma(shape r, rate delta) priors on the Laplace rates.
  double r1 = 1.0;
  double delta1 = 10.0;
  double r2 = 1.0;
  double delta2 = 10.0;
  // Global fusion scale for the pairwise-horseshoe model; it is a tuning
  // parameter there and is never sampled.
  std::optional<double> tilde_tau2_fixed;

  /// Throws ConfigError on an inconsistent configuration.
  void validate() const;
  /// Number of draws run_chain retains.
  std::size_t retained() const;
};

/// Design and response plus the cross-products every sweep needs.
class ModelData {
 public:
  ModelData(const Matrix& X, const Vector& y);
  explicit ModelData(const StandardizedDataset& ds) : ModelData(ds.X, ds.y) {}

  const Matrix& X() const { return x_; }
  const Vector& y() const { return y_; }
  const Matrix& xtx() const { return xtx_; }
  const Vector& xty() const { return xty_; }
  std::size_t n() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(x_.cols()); }

  double residual_sum_of_squares(const Vector& beta) const;

 private:
  Matrix x_;
  Vector y_;
  Matrix xtx_;
  Vector xty_;
};

/// Latent state of the fused-horseshoe sampler.
struct FusedChainState {
  Vector beta;
  double sigma2 = 1.0;
  Vector tau2;                    // p local Laplace mixing scales
  double tilde_lambda1_sq = 1.0;  // Laplace rate
  double tilde_tau2 = 1.0;        // global horseshoe scale
  Vector lambda2;                 // p-1 local horseshoe scales; lambda2[j-1] <-> beta_j - beta_{j-1}
  Vector nu;                      // p-1 auxiliaries of lambda2
  double xi = 1.0;                // auxiliary of tilde_tau2

  static FusedChainState initial(std::size_t p);
  std::size_t p() const { return static_cast<std::size_t>(beta.size()); }
  bool valid() const;
  PrecisionMatrix precision() const;
};

/// Latent state of the pairwise-horseshoe sampler. Pair latents are stored
/// once per unordered pair (see pair_index), which makes them symmetric.
struct HorsesChainState {
  Vector beta;
  double sigma2 = 1.0;
  Vector tau2;
  double tilde_lambda1_sq = 1.0;
  Vector lambda2_pairs;
  Vector nu_pairs;
  double tilde_tau2 = 1.0;  // held fixed

  static HorsesChainState initial(std::size_t p, double tilde_tau2);
  std::size_t p() const { return static_cast<std::size_t>(beta.size()); }
  bool valid() const;
  PrecisionMatrix precision() const;
};

/// Latent state of the Bayesian lasso and Bayesian fused lasso baselines.
/// `tilde_tau2` (p-1 difference mixing scales) and `lambda2_sq` are unused
/// by the lasso.
struct BaselineChainState {
  Vector beta;
  double sigma2 = 1.0;
  Vector tau2;
  Vector tilde_tau2;
  double lambda1_sq = 1.0;
  double lambda2_sq = 1.0;

  static BaselineChainState initial(std::size_t p);
  std::size_t p() const { return static_cast<std::size_t>(beta.size()); }
  bool valid() const;
  PrecisionMatrix precision(ModelKind variant) const;
};

/// Shape of the inverse-gamma full conditional of sigma2. Every Gaussian
/// factor of the prior (one per coefficient, one per penalized difference)
/// contributes 1/2 beside the n/2 of the likelihood.
double sigma2_conditional_shape(ModelKind m, std::size_t n, std::size_t p, double nu0);

/// Gaussian full conditional of beta given the rest of the state.
GaussianConditional beta_conditional(const FusedChainState& s, const ModelData& data);
GaussianConditional beta_conditional(const HorsesChainState& s, const ModelData& data);
GaussianConditional beta_conditional(const BaselineChainState& s, ModelKind variant,
                                     const ModelData& data);

/// One systematic-scan sweep:
/// beta, sigma2, 1/tau2_j, tilde_lambda1_sq, tilde_tau2, lambda2_j, nu_j, xi.
FusedChainState bfh_step(const FusedChainState& state, const ModelData& data,
                         const SamplerConfig& cfg, RngStream& rng);

/// One sweep: beta, sigma2, 1/tau2_j, tilde_lambda1_sq, lambda2_{j,k}, nu_{j,k}.
/// tilde_tau2 is taken from cfg.tilde_tau2_fixed (ConfigError when unset).
HorsesChainState bhh_step(const HorsesChainState& state, const ModelData& data,
                          const SamplerConfig& cfg, RngStream& rng);

/// Bayesian lasso sweep: beta, sigma2, 1/tau2_j, lambda1_sq.
/// Bayesian fused lasso adds 1/tilde_tau2_j and lambda2_sq.
BaselineChainState baseline_step(ModelKind variant, const BaselineChainState& state,
                                 const ModelData& data, const SamplerConfig& cfg,
                                 RngStream& rng);

/// Retained draws of one chain. Row s of `values` holds beta (p columns),
/// sigma2, then the model's scale latents in `columns` order.
struct PosteriorDraws {
  ModelKind model = ModelKind::FusedHorseshoe;
  std::size_t p = 0;
  std::vector<std::string> columns;
  Matrix values;
  SamplerConfig config;
  double wall_seconds = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> beta() const {
    return values.leftCols(static_cast<Eigen::Index>(p));
  }
  Eigen::Block<const Matrix, Eigen::Dynamic, 1, true> sigma2() const {
    return values.col(static_cast<Eigen::Index>(p));
  }
};

/// Runs cfg.iterations sweeps from the neutral start (beta = 0, every scale
/// and auxiliary = 1), discards cfg.burn_in, keeps every cfg.thinning-th draw.
PosteriorDraws run_chain(ModelKind model, const ModelData& data, const SamplerConfig& cfg,
                         RngStream& rng);

}  // namespace fusedhs
