#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fusedhs/dataset.hpp"
#include "fusedhs/models.hpp"

namespace fusedhs {

/// Componentwise posterior summary of beta.
struct Estimate {
  Vector point;  // posterior mean
  Vector median;
  Vector ci_lower;
  Vector ci_upper;
  double level = 0.95;
};

/// Mean, median and equal-tailed `level` interval of every beta column.
/// Quantiles interpolate linearly between order statistics.
Estimate summarize(const PosteriorDraws& draws, double level = 0.95);

/// Same summary over an arbitrary S x p sample matrix.
Estimate summarize_columns(const Matrix& samples, double level = 0.95);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::span<const double> sample, double q);

struct ModelScore {
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;
  Vector pointwise;  // -2 (lppd_i - p_waic_i)
};

/// WAIC from an S x n matrix of pointwise log-likelihoods.
ModelScore waic_from_loglik(const Matrix& loglik);

/// WAIC of retained draws on the data they were fitted to.
ModelScore compute_waic(const PosteriorDraws& draws, const ModelData& data);

/// k values spaced evenly in log10 between lo and hi inclusive.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t k);

/// Five log-spaced candidates for the global fusion scale, 1e4 .. 1e6.
std::vector<double> default_bhh_grid();

struct TuningResult {
  double best = 0.0;
  std::size_t best_index = 0;
  std::vector<double> grid;
  std::vector<ModelScore> scores;
  PosteriorDraws best_draws;
};

/// Fits one chain per grid value of the global fusion scale and keeps the
/// value with the smallest WAIC (ties go to the earlier grid entry). Every
/// grid point runs on an identical copy of `rng`, so scores differ only
/// through the grid value. Only the pairwise-horseshoe model is tunable.
TuningResult select_tuning(std::span<const double> grid, ModelKind model, const ModelData& data,
                           const SamplerConfig& cfg, const RngStream& rng,
                           unsigned threads = 1);

/// Predicts the held-out response of fold `fold` from the training rows.
using FoldPredictor = std::function<double(const Dataset& train, const Vector& x_test,
                                           std::size_t fold, RngStream& rng)>;

struct LoocvResult {
  double cv_mean = 0.0;
  double cv_sd = 0.0;
  std::vector<double> fold_errors;       // squared prediction errors
  std::vector<double> fold_predictions;
  std::vector<double> fold_tuning;       // selected tilde_tau2 per fold (bhh), else empty
};

/// Leave-one-out driver over an arbitrary predictor. Fold i receives
/// rng.derive(i), so results do not depend on the order folds run in.
LoocvResult loocv(const Dataset& data, const FoldPredictor& predictor, const RngStream& rng,
                  unsigned threads = 1);

/// Leave-one-out cross-validation of a model: each fold standardizes its
/// training rows, tunes (bhh) or fits, and predicts the held-out response
/// with the posterior-mean coefficients.
LoocvResult loocv(ModelKind model, const Dataset& data, std::span<const double> grid,
                  const SamplerConfig& cfg, const RngStream& rng, unsigned threads = 1);

/// Posterior-mean fit on standardized data: tunes over `grid` for bhh
/// unless cfg.tilde_tau2_fixed is set.
struct Fit {
  PosteriorDraws draws;
  std::optional<TuningResult> tuning;
};
Fit fit_model(ModelKind model, const ModelData& data, std::span<const double> grid,
              const SamplerConfig& cfg, const RngStream& rng, unsigned threads = 1);

}  // namespace fusedhs
