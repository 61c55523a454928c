#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "abm/fits.hpp"
#include "abm/market_series.hpp"
#include "abm/model_params.hpp"

namespace abm {

/// Everything the volume/herding calibration extracts from one index.
struct CalibrationResult {
  double volume_ratio = 1.0;
  double alpha = 1.0;
  double d_bull = 0.0;
  double d_bear = 0.0;
  double delta_r = 0.0;
  std::int64_t delta_r_model = 0;
  double alpha_p_value = 1.0;
  double delta_r_p_value = 1.0;
  std::int64_t window_count = 0;
};

/// One sampled point of the linear response between the model shift and the
/// normalized shift.
struct SlopePoint {
  std::int64_t delta_r_model = 0;
  double mean_delta_r = 0.0;
  double delta_r_stderr = 0.0;
  std::int64_t runs = 0;
};

struct SlopeSweepResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::vector<SlopePoint> points;
};

/// R(t) = ln(Y(t)/Y(t-1)); length n-1.
Eigen::VectorXd log_returns(const MarketSeries& series);

/// V+/V-: mean volume over r > 0 days divided by mean volume over r < 0
/// days. Zero-return days and zero-volume days enter neither side.
double volume_ratio(const Eigen::VectorXd& r, const Eigen::VectorXd& v);

/// alpha = 2*ratio/(1 + ratio); the bear-side multiplier is 2 - alpha.
double alpha_from_ratio(double ratio);

/// Volume-weighted mean magnitudes of normalized returns on bull and bear
/// days: d_bull = sum(v*r)/sum(v) over r > 0, d_bear = sum(v*|r|)/sum(v)
/// over r < 0. Zero-volume days are excluded.
std::pair<double, double> herding_degrees(const Eigen::VectorXd& r,
                                          const Eigen::VectorXd& v);

/// delta_r = (d_bear - d_bull)/2.
double delta_r_from_degrees(double d_bull, double d_bear);

/// Model shift from the normalized shift through the linear response,
/// rounded away from zero so a measured asymmetry never maps to 0.
std::int64_t delta_R_from_delta_r(double delta_r, double slope);

/// Measures the linear response delta_R = slope * delta_r by simulation at
/// alpha = 1: for every delta_R value, runs_per_point seeded runs, per-run
/// delta_r = (delta_R - <R>)/sigma, averaged per point, then OLS of delta_R
/// against the mean delta_r. Streams are keyed by (delta_R value, run), so
/// the result is independent of value order and of jobs.
SlopeSweepResult slope_sweep(const ModelParams& base,
                             const std::vector<std::int64_t>& delta_R_values,
                             std::int64_t runs_per_point,
                             std::uint64_t base_seed, int jobs = 1);

/// Full empirical pipeline for one index: full-series point estimates of
/// ratio, alpha, d_bull/d_bear, delta_r and delta_R (via `slope`), plus
/// two-sided one-sample t-tests of per-window alpha against 1 and per-window
/// delta_r against 0 over window_count equal non-overlapping windows, each
/// re-normalized locally and at least 250 trading days long.
CalibrationResult calibrate_index(const MarketSeries& series, double slope,
                                  std::int64_t window_count);

}  // namespace abm
