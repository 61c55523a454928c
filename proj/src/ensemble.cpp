#include "abm/ensemble.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace abm {

void parallel_for_index(std::int64_t n, int jobs,
                        const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(n, jobs < 1 ? 1 : jobs));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<ReturnSeries> simulate_ensemble(const ModelParams& params,
                                            std::int64_t n_runs, int jobs) {
  params.validate();
  std::vector<ReturnSeries> out(n_runs);
  parallel_for_index(n_runs, jobs, [&](std::int64_t i) {
    out[i] = simulate(params, static_cast<std::uint64_t>(i));
  });
  return out;
}

EnsembleCurve average_curves(
    const std::vector<CorrelationCurve<double>>& curves) {
  if (curves.empty())
    throw InsufficientDataError("average_curves: no curves given");
  const auto& lags = curves.front().lags;
  for (const auto& c : curves)
    if (c.lags.size() != lags.size() ||
        (c.lags.array() != lags.array()).any())
      throw ParameterError("average_curves: mismatched lag grids");

  const auto k = static_cast<std::int64_t>(curves.size());
  const Eigen::Index m = lags.size();
  Eigen::MatrixXd values(m, k);
  for (std::int64_t j = 0; j < k; ++j) values.col(j) = curves[j].values;

  EnsembleCurve ens;
  ens.mean.lags = lags;
  ens.mean.values = values.rowwise().mean();
  ens.mean.n_samples = Eigen::VectorX<std::int64_t>::Constant(m, k);
  ens.std_error = Eigen::VectorXd::Zero(m);
  if (k > 1) {
    const Eigen::VectorXd var =
        (values.colwise() - ens.mean.values).array().square().rowwise().sum() /
        static_cast<double>(k - 1);
    ens.std_error = (var / static_cast<double>(k)).cwiseSqrt();
  }
  return ens;
}

EnsembleAnalysis analyze_ensemble(const std::vector<ReturnSeries>& ensemble,
                                  int max_lag,
                                  const Eigen::VectorXd& thresholds,
                                  int jobs) {
  if (ensemble.empty())
    throw InsufficientDataError("analyze_ensemble: empty ensemble");
  const auto k = static_cast<std::int64_t>(ensemble.size());
  std::vector<CorrelationCurve<double>> l_curves(k), a_curves(k);
  Eigen::MatrixXd tails(thresholds.size(), k);
  parallel_for_index(k, jobs, [&](std::int64_t i) {
    const Eigen::VectorXd& r = ensemble[i].normalized();
    l_curves[i] = return_volatility_corr(r, max_lag);
    a_curves[i] = volatility_autocorr(r, max_lag);
    tails.col(i) = tail_distribution(r, thresholds);
  });

  EnsembleAnalysis out;
  out.return_volatility = average_curves(l_curves);
  out.volatility_autocorr = average_curves(a_curves);
  out.tail_thresholds = thresholds;
  out.tail_mean = tails.rowwise().mean();
  return out;
}

}  // namespace abm
