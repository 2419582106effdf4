#include "fusedhs/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fusedhs/errors.hpp"
#include "fusedhs/parallel.hpp"

namespace fusedhs {

namespace {

// Quantile of an already sorted sample.
double sorted_quantile(const std::vector<double>& x, double q) {
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= x.size()) return x.back();
  return x[lo] + (h - static_cast<double>(lo)) * (x[lo + 1] - x[lo]);
}

double sample_variance(const Eigen::Ref<const Vector>& v) {
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t k) {
  if (!(lo > 0.0) || !(hi >= lo) || k == 0) {
    throw ConfigError("log grid needs 0 < lo <= hi and at least one point");
  }
  if (k == 1) return {lo};
  std::vector<double> g(k);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < k; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_bhh_grid() { return log_spaced_grid(1e4, 1e6, 5); }

double quantile(std::span<const double> sample, double q) {
  if (sample.empty()) throw InsufficientDrawsError("quantile of an empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  return sorted_quantile(x, q);
}

Estimate summarize_columns(const Matrix& samples, double level) {
  if (samples.rows() < 2) {
    throw InsufficientDrawsError("summarize needs at least 2 draws, got " +
                                 std::to_string(samples.rows()));
  }
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
  const auto p = samples.cols();
  Estimate est;
  est.level = level;
  est.point.resize(p);
  est.median.resize(p);
  est.ci_lower.resize(p);
  est.ci_upper.resize(p);
  const double tail = 0.5 * (1.0 - level);
  std::vector<double> col(static_cast<std::size_t>(samples.rows()));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index s = 0; s < samples.rows(); ++s) col[s] = samples(s, j);
    // Summing in sorted order makes the mean independent of draw order.
    std::sort(col.begin(), col.end());
    double sum = 0.0;
    for (double v : col) sum += v;
    est.point(j) = sum / static_cast<double>(col.size());
    est.median(j) = sorted_quantile(col, 0.5);
    est.ci_lower(j) = sorted_quantile(col, tail);
    est.ci_upper(j) = sorted_quantile(col, 1.0 - tail);
  }
  return est;
}

Estimate summarize(const PosteriorDraws& draws, double level) {
  return summarize_columns(draws.beta(), level);
}

ModelScore waic_from_loglik(const Matrix& loglik) {
  const auto S = loglik.rows();
  if (S < 2) {
    throw InsufficientDrawsError("WAIC needs at least 2 draws, got " + std::to_string(S));
  }
  const auto n = loglik.cols();
  ModelScore score;
  score.pointwise.resize(n);
  const double log_s = std::log(static_cast<double>(S));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto col = loglik.col(i);
    const double mx = col.maxCoeff();
    const double lse = mx + std::log((col.array() - mx).exp().sum());
    const double lppd_i = lse - log_s;
    const double pw_i = sample_variance(col);
    score.lppd += lppd_i;
    score.p_waic += pw_i;
    score.pointwise(i) = -2.0 * (lppd_i - pw_i);
  }
  score.waic = -2.0 * (score.lppd - score.p_waic);
  return score;
}

ModelScore compute_waic(const PosteriorDraws& draws, const ModelData& data) {
  const auto S = static_cast<Eigen::Index>(draws.size());
  if (S < 2) {
    throw InsufficientDrawsError("WAIC needs at least 2 draws, got " + std::to_string(S));
  }
  const auto n = static_cast<Eigen::Index>(data.n());
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  const Matrix fitted = draws.beta() * data.X().transpose();  // S x n
  Matrix loglik(S, n);
  for (Eigen::Index s = 0; s < S; ++s) {
    const double sigma2 = draws.sigma2()(s);
    const double c = -0.5 * (kLogTwoPi + std::log(sigma2));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = data.y()(i) - fitted(s, i);
      loglik(s, i) = c - r * r / (2.0 * sigma2);
    }
  }
  return waic_from_loglik(loglik);
}

TuningResult select_tuning(std::span<const double> grid, ModelKind model, const ModelData& data,
                           const SamplerConfig& cfg, const RngStream& rng, unsigned threads) {
  if (grid.empty()) throw ConfigError("tuning grid is empty");
  if (model != ModelKind::HorsesHorseshoe) {
    throw ConfigError("tuning over the global fusion scale is only defined for bhh");
  }
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("tuning grid values must be positive");
  }
  TuningResult result;
  result.grid.assign(grid.begin(), grid.end());
  result.scores.resize(grid.size());
  std::vector<PosteriorDraws> draws(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t g) {
    SamplerConfig local = cfg;
    local.tilde_tau2_fixed = grid[g];
    RngStream stream = rng;
    draws[g] = run_chain(model, data, local, stream);
    result.scores[g] = compute_waic(draws[g], data);
  });
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double w = result.scores[g].waic;
    const double wb = result.scores[best].waic;
    if (w < wb || (w == wb && grid[g] < grid[best])) best = g;
  }
  result.best_index = best;
  result.best = grid[best];
  result.best_draws = std::move(draws[best]);
  return result;
}

Fit fit_model(ModelKind model, const ModelData& data, std::span<const double> grid,
              const SamplerConfig& cfg, const RngStream& rng, unsigned threads) {
  Fit fit;
  if (model == ModelKind::HorsesHorseshoe && !cfg.tilde_tau2_fixed) {
    const std::vector<double> fallback = default_bhh_grid();
    fit.tuning = select_tuning(grid.empty() ? std::span<const double>(fallback) : grid, model,
                               data, cfg, rng, threads);
    fit.draws = fit.tuning->best_draws;
    return fit;
  }
  RngStream stream = rng;
  fit.draws = run_chain(model, data, cfg, stream);
  return fit;
}

LoocvResult loocv(const Dataset& data, const FoldPredictor& predictor, const RngStream& rng,
                  unsigned threads) {
  const std::size_t n = data.n();
  if (n < 2) throw ConfigError("leave-one-out needs at least 2 rows");
  LoocvResult out;
  out.fold_errors.resize(n);
  out.fold_predictions.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const Dataset train = data.without_row(i);
    const Vector x_test = data.X.row(static_cast<Eigen::Index>(i)).transpose();
    RngStream fold_rng = rng.derive(i);
    const double pred = predictor(train, x_test, i, fold_rng);
    const double err = data.y(static_cast<Eigen::Index>(i)) - pred;
    out.fold_predictions[i] = pred;
    out.fold_errors[i] = err * err;
  });
  double sum = 0.0;
  for (double e : out.fold_errors) sum += e;
  out.cv_mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double e : out.fold_errors) ss += (e - out.cv_mean) * (e - out.cv_mean);
  out.cv_sd = std::sqrt(ss / static_cast<double>(n - 1));
  return out;
}

LoocvResult loocv(ModelKind model, const Dataset& data, std::span<const double> grid,
                  const SamplerConfig& cfg, const RngStream& rng, unsigned threads) {
  cfg.validate();
  if (data.n() < 2) throw ConfigError("leave-one-out needs at least 2 rows");
  data.validate();
  const bool tuned = model == ModelKind::HorsesHorseshoe && !cfg.tilde_tau2_fixed;
  std::vector<double> tuning(tuned ? data.n() : 0);
  FoldPredictor predictor = [&](const Dataset& train, const Vector& x_test, std::size_t fold,
                                RngStream& fold_rng) {
    const StandardizedDataset sd = standardize(train);
    const ModelData md(sd);
    const Fit fit = fit_model(model, md, grid, cfg, fold_rng);
    if (tuned) tuning[fold] = fit.tuning->best;
    const Vector beta_hat = summarize(fit.draws).point;
    return sd.predict(x_test, beta_hat);
  };
  LoocvResult out = loocv(data, predictor, rng, threads);
  out.fold_tuning = std::move(tuning);
  return out;
}

}  // namespace fusedhs
