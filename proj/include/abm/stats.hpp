#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

#include "abm/errors.hpp"

namespace abm {

/// Correlation values per lag. n_samples[i] records how many (t', t'+lag)
/// pairs entered the average at lags[i]; constants such as Z, L0, A0 are
/// full-series moments folded into values.
template <typename Scalar = double>
struct CorrelationCurve {
  Eigen::VectorXi lags;
  Eigen::VectorX<Scalar> values;
  Eigen::VectorX<std::int64_t> n_samples;
};

template <typename Derived>
typename Derived::Scalar population_mean(const Eigen::MatrixBase<Derived>& v) {
  return v.mean();
}

/// Divide-by-n variance, matching the time-average convention used
/// throughout the estimators.
template <typename Derived>
typename Derived::Scalar population_variance(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar mean = v.mean();
  return (v.array() - mean).square().sum() / Scalar(v.size());
}

/// r(t) = (R(t) - <R>) / sigma with population sigma. Affine-invariant for
/// positive scale: normalize(a*R + b) == normalize(R) for a > 0.
template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> normalize(
    const Eigen::MatrixBase<Derived>& raw) {
  using Scalar = typename Derived::Scalar;
  if (raw.size() < 2)
    throw InsufficientDataError("normalize needs at least 2 samples");
  const Scalar var = population_variance(raw);
  if (!(var > Scalar(0)))
    throw DegenerateSeriesError("normalize: series has zero variance");
  return (raw.array() - raw.mean()) / std::sqrt(var);
}

namespace detail {

template <typename Derived>
void check_lag_range(const Eigen::MatrixBase<Derived>& r, int max_lag) {
  if (max_lag < 1) throw ParameterError("max_lag must be >= 1");
  if (2 * static_cast<Eigen::Index>(max_lag) >= r.size())
    throw ParameterError("max_lag must be < length/2");
}

}  // namespace detail

/// Return-volatility correlation
///   L(t) = (<r(t') |r(t'+t)|^2> - L0) / Z,  L0 = <r><|r|^2>,  Z = <|r|^2>^2,
/// lags 1..max_lag. The moments in L0 and Z are full-series constants; the
/// cross moment averages over all pairs fully inside the series. Odd in r:
/// L computed on -r is exactly -L.
template <typename Derived>
CorrelationCurve<typename Derived::Scalar> return_volatility_corr(
    const Eigen::MatrixBase<Derived>& r, int max_lag) {
  using Scalar = typename Derived::Scalar;
  detail::check_lag_range(r, max_lag);
  const Eigen::Index n = r.size();
  const Scalar mean_r = r.mean();
  const Scalar mean_sq = r.array().square().sum() / Scalar(n);
  const Scalar l0 = mean_r * mean_sq;
  const Scalar z = mean_sq * mean_sq;
  if (!(z > Scalar(0)))
    throw DegenerateSeriesError("return_volatility_corr: zero <|r|^2>");

  CorrelationCurve<Scalar> curve;
  curve.lags = Eigen::VectorXi::LinSpaced(max_lag, 1, max_lag);
  curve.values.resize(max_lag);
  curve.n_samples.resize(max_lag);
  for (int t = 1; t <= max_lag; ++t) {
    const Eigen::Index m = n - t;
    const Scalar cross =
        (r.head(m).array() * r.tail(m).array().square()).sum() / Scalar(m);
    curve.values[t - 1] = (cross - l0) / z;
    curve.n_samples[t - 1] = m;
  }
  return curve;
}

/// Volatility autocorrelation
///   A(t) = (<|r(t')| |r(t'+t)|> - <|r|>^2) / A0,  A0 = <|r|^2> - <|r|>^2,
/// lags 0..max_lag, so A(0) = 1 identically. Invariant under r -> -r.
template <typename Derived>
CorrelationCurve<typename Derived::Scalar> volatility_autocorr(
    const Eigen::MatrixBase<Derived>& r, int max_lag) {
  using Scalar = typename Derived::Scalar;
  detail::check_lag_range(r, max_lag);
  const Eigen::Index n = r.size();
  const auto abs_r = r.array().abs().eval();
  const Scalar mean_abs = abs_r.sum() / Scalar(n);
  const Scalar mean_sq = abs_r.square().sum() / Scalar(n);
  const Scalar a0 = mean_sq - mean_abs * mean_abs;
  if (!(a0 > Scalar(0)))
    throw DegenerateSeriesError("volatility_autocorr: constant |r|");

  CorrelationCurve<Scalar> curve;
  curve.lags = Eigen::VectorXi::LinSpaced(max_lag + 1, 0, max_lag);
  curve.values.resize(max_lag + 1);
  curve.n_samples.resize(max_lag + 1);
  for (int t = 0; t <= max_lag; ++t) {
    const Eigen::Index m = n - t;
    const Scalar cross =
        (abs_r.head(m) * abs_r.tail(m)).sum() / Scalar(m);
    curve.values[t] = (cross - mean_abs * mean_abs) / a0;
    curve.n_samples[t] = m;
  }
  return curve;
}

/// Empirical P(|r| > x) for each threshold x; strictly greater, so a
/// threshold at max|r| maps to 0.
template <typename Derived, typename DerivedT>
Eigen::VectorX<typename Derived::Scalar> tail_distribution(
    const Eigen::MatrixBase<Derived>& r,
    const Eigen::MatrixBase<DerivedT>& thresholds) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] >= Scalar(0)))
      throw ParameterError("thresholds must be nonnegative");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
      throw ParameterError("thresholds must be increasing");
  }
  if (r.size() == 0)
    throw InsufficientDataError("tail_distribution: empty series");
  const auto abs_r = r.array().abs().eval();
  Eigen::VectorX<Scalar> probs(thresholds.size());
  for (Eigen::Index i = 0; i < thresholds.size(); ++i)
    probs[i] =
        Scalar((abs_r > Scalar(thresholds[i])).count()) / Scalar(r.size());
  return probs;
}

}  // namespace abm
