#include "abm/calibrate.hpp"

#include <algorithm>
#include <cmath>

#include "abm/engine.hpp"
#include "abm/ensemble.hpp"
#include "abm/random.hpp"
#include "abm/stats.hpp"

namespace abm {

Eigen::VectorXd log_returns(const MarketSeries& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw InsufficientDataError("log_returns needs >= 2 prices");
  if ((series.close.array() <= 0.0).any())
    throw DataError("log_returns: nonpositive closing price");
  return (series.close.tail(n - 1).array() / series.close.head(n - 1).array())
      .log();
}

namespace {

// Means of v over r > 0 and r < 0 days; zero-volume days excluded.
struct SideMeans {
  double bull_mean = 0.0;
  double bear_mean = 0.0;
};

SideMeans side_volume_means(const Eigen::VectorXd& r,
                            const Eigen::VectorXd& v) {
  if (r.size() != v.size())
    throw ParameterError("returns and volumes must align");
  double bull_sum = 0.0, bear_sum = 0.0;
  std::int64_t bull_n = 0, bear_n = 0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (v[i] <= 0.0) continue;
    if (r[i] > 0.0) {
      bull_sum += v[i];
      ++bull_n;
    } else if (r[i] < 0.0) {
      bear_sum += v[i];
      ++bear_n;
    }
  }
  if (bull_n == 0) throw InsufficientDataError("no bull days with volume");
  if (bear_n == 0) throw InsufficientDataError("no bear days with volume");
  return {bull_sum / static_cast<double>(bull_n),
          bear_sum / static_cast<double>(bear_n)};
}

}  // namespace

double volume_ratio(const Eigen::VectorXd& r, const Eigen::VectorXd& v) {
  const SideMeans m = side_volume_means(r, v);
  return m.bull_mean / m.bear_mean;
}

double alpha_from_ratio(double ratio) {
  if (!(ratio > 0.0)) throw ParameterError("volume ratio must be > 0");
  return 2.0 * ratio / (1.0 + ratio);
}

std::pair<double, double> herding_degrees(const Eigen::VectorXd& r,
                                          const Eigen::VectorXd& v) {
  if (r.size() != v.size())
    throw ParameterError("returns and volumes must align");
  double bull_num = 0.0, bull_den = 0.0, bear_num = 0.0, bear_den = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (v[i] <= 0.0) continue;
    if (r[i] > 0.0) {
      bull_num += v[i] * r[i];
      bull_den += v[i];
    } else if (r[i] < 0.0) {
      bear_num += v[i] * -r[i];
      bear_den += v[i];
    }
  }
  if (bull_den <= 0.0) throw InsufficientDataError("no bull days with volume");
  if (bear_den <= 0.0) throw InsufficientDataError("no bear days with volume");
  return {bull_num / bull_den, bear_num / bear_den};
}

double delta_r_from_degrees(double d_bull, double d_bear) {
  return (d_bear - d_bull) / 2.0;
}

std::int64_t delta_R_from_delta_r(double delta_r, double slope) {
  if (!(slope > 0.0)) throw ParameterError("slope must be > 0");
  const double shift = slope * delta_r;
  if (shift > 0.0) return static_cast<std::int64_t>(std::ceil(shift));
  if (shift < 0.0) return static_cast<std::int64_t>(std::floor(shift));
  return 0;
}

SlopeSweepResult slope_sweep(const ModelParams& base,
                             const std::vector<std::int64_t>& delta_R_values,
                             std::int64_t runs_per_point,
                             std::uint64_t base_seed, int jobs) {
  if (delta_R_values.empty())
    throw ParameterError("slope_sweep needs at least one delta_R value");
  if (runs_per_point < 1)
    throw ParameterError("slope_sweep needs runs_per_point >= 1");

  const auto n_points = static_cast<std::int64_t>(delta_R_values.size());
  Eigen::MatrixXd per_run(runs_per_point, n_points);
  parallel_for_index(n_points * runs_per_point, jobs, [&](std::int64_t task) {
    const std::int64_t point = task / runs_per_point;
    const std::int64_t run = task % runs_per_point;
    ModelParams params = base;
    params.alpha = 1.0;
    params.delta_r_model = delta_R_values[point];
    params.rng_seed = base_seed;
    // Stream keyed by the delta_R value itself, not its position, so a
    // permuted value list reproduces the same per-point results.
    const auto stream =
        (static_cast<std::uint64_t>(params.delta_r_model) << 32) ^
        static_cast<std::uint64_t>(run);
    const ReturnSeries series = simulate(params, stream);
    const Eigen::VectorXd raw = series.raw().cast<double>();
    const double sigma = std::sqrt(population_variance(raw));
    if (!(sigma > 0.0))
      throw DegenerateSeriesError("slope_sweep: degenerate simulated series");
    per_run(run, point) =
        (static_cast<double>(params.delta_r_model) - raw.mean()) / sigma;
  });

  SlopeSweepResult result;
  result.points.resize(n_points);
  for (std::int64_t j = 0; j < n_points; ++j) {
    SlopePoint& pt = result.points[j];
    pt.delta_r_model = delta_R_values[j];
    pt.runs = runs_per_point;
    pt.mean_delta_r = per_run.col(j).mean();
    if (runs_per_point > 1) {
      const double var = (per_run.col(j).array() - pt.mean_delta_r)
                             .square()
                             .sum() /
                         static_cast<double>(runs_per_point - 1);
      pt.delta_r_stderr =
          std::sqrt(var / static_cast<double>(runs_per_point));
    }
  }
  // Fit in value order so a permuted input list gives a bitwise-equal fit.
  std::sort(result.points.begin(), result.points.end(),
            [](const SlopePoint& a, const SlopePoint& b) {
              return a.delta_r_model < b.delta_r_model;
            });
  Eigen::VectorXd mean_dr(n_points), model_dr(n_points);
  for (std::int64_t j = 0; j < n_points; ++j) {
    mean_dr[j] = result.points[j].mean_delta_r;
    model_dr[j] = static_cast<double>(result.points[j].delta_r_model);
  }

  const LinearFit fit = fit_linear(mean_dr, model_dr);
  result.slope = fit.slope;
  result.intercept = fit.intercept;
  result.slope_stderr = fit.slope_stderr;
  return result;
}

namespace {

struct WindowStats {
  double alpha = 1.0;
  double delta_r = 0.0;
};

WindowStats window_stats(const Eigen::VectorXd& raw_returns,
                         const Eigen::VectorXd& volumes) {
  const Eigen::VectorXd r = normalize(raw_returns);
  WindowStats w;
  w.alpha = alpha_from_ratio(volume_ratio(r, volumes));
  const auto [d_bull, d_bear] = herding_degrees(r, volumes);
  w.delta_r = delta_r_from_degrees(d_bull, d_bear);
  return w;
}

}  // namespace

CalibrationResult calibrate_index(const MarketSeries& series, double slope,
                                  std::int64_t window_count) {
  if (!series.has_volume)
    throw DataError("volume required for calibration");
  if (window_count < 2)
    throw ParameterError("calibration needs window_count >= 2");

  const Eigen::VectorXd raw = log_returns(series);
  const Eigen::Index n = raw.size();
  // Volume on the day the return is realized.
  const Eigen::VectorXd vol = series.volume.tail(n);

  const Eigen::Index window_len = n / window_count;
  if (window_len < 250)
    throw InsufficientDataError(
        "series too short: windows shrink below 250 trading days");

  CalibrationResult result;
  result.window_count = window_count;
  const Eigen::VectorXd r = normalize(raw);
  result.volume_ratio = volume_ratio(r, vol);
  result.alpha = alpha_from_ratio(result.volume_ratio);
  const auto [d_bull, d_bear] = herding_degrees(r, vol);
  result.d_bull = d_bull;
  result.d_bear = d_bear;
  result.delta_r = delta_r_from_degrees(d_bull, d_bear);
  result.delta_r_model = delta_R_from_delta_r(result.delta_r, slope);

  Eigen::VectorXd alphas(window_count), delta_rs(window_count);
  for (std::int64_t w = 0; w < window_count; ++w) {
    const Eigen::Index start = w * window_len;
    const WindowStats stats =
        window_stats(raw.segment(start, window_len),
                     vol.segment(start, window_len));
    alphas[w] = stats.alpha;
    delta_rs[w] = stats.delta_r;
  }
  result.alpha_p_value = t_test_one_sample(alphas, 1.0).p_value;
  result.delta_r_p_value = t_test_one_sample(delta_rs, 0.0).p_value;
  return result;
}

}  // namespace abm
