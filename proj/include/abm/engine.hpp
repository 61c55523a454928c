#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "abm/horizon_weights.hpp"
#include "abm/model_params.hpp"
#include "abm/random.hpp"
#include "abm/return_series.hpp"

namespace abm {

/// Rolling state of one simulated market day. history is a ring buffer of
/// the last M raw returns; slot `pos` holds the oldest value and is the next
/// to be overwritten. The remaining fields describe the day just computed.
struct DayState {
  Eigen::VectorXd history;
  Eigen::Index pos = 0;
  double r_prime = 0.0;
  double p_trade = 0.0;
  double herd_degree = 0.0;
  std::int64_t group_count = 1;
};

/// P_trade(t+1): 2*p*alpha after a bull signal, 2*p when the signal is zero,
/// 2*p*(2-alpha) after a bear signal.
double trade_probability(double r_prime, double p, double alpha);

/// D(t+1) = |R'(t) - delta_R| / N.
double herding_degree(double r_prime, std::int64_t delta_r_model,
                      std::int64_t n_agents);

/// Number of groups for a given herding degree: clamp(round(1/D), 1, N) for
/// D > 0; D = 0 means N independent agents (N singleton groups).
std::int64_t group_count_for(std::int64_t n_agents, double herd_degree);

/// Random division of N agents into group_count_for(N, D) groups of
/// near-equal size: N mod G groups get one extra agent, uniformly at random.
/// For D = 0 the division is N singletons. Sizes sum to N.
std::vector<std::int64_t> form_groups(std::int64_t n_agents,
                                      double herd_degree, Rng& rng);

/// One day's aggregate return given explicit group sizes: every group draws
/// a single decision with P_buy = P_sell = p_trade/2 and its members trade
/// one share each. Reference route; step() samples the same distribution
/// without materializing groups.
std::int64_t grouped_return(const std::vector<std::int64_t>& group_sizes,
                            double p_trade, Rng& rng);

/// Aggregate return of n_agents divided into group_count near-equal groups,
/// each deciding once with P_buy = P_sell = p_trade/2. Group identity is
/// exchangeable, so only the two size classes matter and the draw reduces to
/// chained binomials per class; distributionally identical to form_groups +
/// grouped_return.
std::int64_t sample_day_return(std::int64_t n_agents, std::int64_t group_count,
                               double p_trade, Rng& rng);

/// Advances state by one day and returns R(t+1). Computes the weighted
/// signal R'(t) from the history ring, derives P_trade and D, samples the
/// grouped aggregate return, and pushes it into the ring.
std::int64_t step(DayState& state, const ModelParams& params,
                  const HorizonWeights<double>& weights, Rng& rng);

/// Runs the full day loop from an all-zero history and returns the
/// total_steps - warmup_discard retained returns. Deterministic for a fixed
/// (rng_seed, stream); batch drivers key stream by run index.
ReturnSeries simulate(const ModelParams& params, std::uint64_t stream = 0);

}  // namespace abm
