#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "abm/engine.hpp"
#include "abm/stats.hpp"

namespace abm {

/// Runs fn(i) for every i in [0, n) on up to `jobs` worker threads. Work
/// items must be independent; the first exception thrown by any item is
/// rethrown after all workers join.
void parallel_for_index(std::int64_t n, int jobs,
                        const std::function<void(std::int64_t)>& fn);

/// n_runs independent simulations of the same parameters, run i on RNG
/// stream i. Results are positioned by run index, so the output is identical
/// for any jobs count.
std::vector<ReturnSeries> simulate_ensemble(const ModelParams& params,
                                            std::int64_t n_runs, int jobs = 1);

/// Pointwise average of same-lag curves. mean.n_samples holds the number of
/// curves; std_error is the cross-curve standard error of the mean per lag
/// (zero for a single curve).
struct EnsembleCurve {
  CorrelationCurve<double> mean;
  Eigen::VectorXd std_error;
};

EnsembleCurve average_curves(const std::vector<CorrelationCurve<double>>& curves);

/// Per-run L(t) and A(t) averaged across an ensemble, plus the ensemble-mean
/// tail distribution on the given thresholds.
struct EnsembleAnalysis {
  EnsembleCurve return_volatility;
  EnsembleCurve volatility_autocorr;
  Eigen::VectorXd tail_thresholds;
  Eigen::VectorXd tail_mean;
};

EnsembleAnalysis analyze_ensemble(const std::vector<ReturnSeries>& ensemble,
                                  int max_lag,
                                  const Eigen::VectorXd& thresholds,
                                  int jobs = 1);

}  // namespace abm
