#include "abm/engine.hpp"

#include <cmath>

namespace abm {

double trade_probability(double r_prime, double p, double alpha) {
  if (r_prime > 0.0) return 2.0 * p * alpha;
  if (r_prime < 0.0) return 2.0 * p * (2.0 - alpha);
  return 2.0 * p;
}

double herding_degree(double r_prime, std::int64_t delta_r_model,
                      std::int64_t n_agents) {
  return std::abs(r_prime - static_cast<double>(delta_r_model)) /
         static_cast<double>(n_agents);
}

std::int64_t group_count_for(std::int64_t n_agents, double herd_degree) {
  if (herd_degree <= 0.0) return n_agents;
  const double inv = 1.0 / herd_degree;
  if (inv >= static_cast<double>(n_agents)) return n_agents;
  const auto g = static_cast<std::int64_t>(std::llround(inv));
  return g < 1 ? 1 : g;
}

std::vector<std::int64_t> form_groups(std::int64_t n_agents,
                                      double herd_degree, Rng& rng) {
  const std::int64_t g = group_count_for(n_agents, herd_degree);
  const std::int64_t size_small = n_agents / g;
  const std::int64_t n_big = n_agents % g;
  std::vector<std::int64_t> sizes(g, size_small);
  for (std::int64_t i = 0; i < n_big; ++i) ++sizes[i];
  // Random division: which groups carry the extra agent is uniform.
  for (std::int64_t i = g - 1; i > 0; --i)
    std::swap(sizes[i], sizes[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return sizes;
}

std::int64_t grouped_return(const std::vector<std::int64_t>& group_sizes,
                            double p_trade, Rng& rng) {
  const double q = p_trade / 2.0;
  std::int64_t r = 0;
  for (const std::int64_t size : group_sizes) {
    const double u = rng.uniform01();
    if (u < q)
      r += size;
    else if (u < p_trade)
      r -= size;
  }
  return r;
}

std::int64_t sample_day_return(std::int64_t n_agents, std::int64_t group_count,
                               double p_trade, Rng& rng) {
  const double q = p_trade / 2.0;
  if (q <= 0.0) return 0;
  const double q_sell = q / (1.0 - q);

  // The partition has n_big groups of size_small + 1 and the rest of
  // size_small; independent group decisions make the buy and sell counts
  // within each size class a pair of chained binomials.
  const std::int64_t size_small = n_agents / group_count;
  const std::int64_t n_big = n_agents % group_count;
  const std::int64_t n_small = group_count - n_big;

  std::int64_t r = 0;
  if (n_big > 0) {
    const std::int64_t buys = rng.binomial(n_big, q);
    const std::int64_t sells =
        buys == n_big ? 0 : rng.binomial(n_big - buys, q_sell);
    r += (size_small + 1) * (buys - sells);
  }
  if (n_small > 0) {
    const std::int64_t buys = rng.binomial(n_small, q);
    const std::int64_t sells =
        buys == n_small ? 0 : rng.binomial(n_small - buys, q_sell);
    r += size_small * (buys - sells);
  }
  return r;
}

std::int64_t step(DayState& state, const ModelParams& params,
                  const HorizonWeights<double>& weights, Rng& rng) {
  const Eigen::Index m = state.history.size();
  // lag_coeff is newest-first; the ring holds oldest-first from pos, so pair
  // the chronological segments with the reversed coefficient segments.
  const auto& coeff = weights.lag_coeff;
  const Eigen::Index older = m - state.pos;
  double r_prime =
      state.history.segment(state.pos, older)
          .dot(coeff.tail(older).reverse());
  if (state.pos > 0)
    r_prime += state.history.head(state.pos).dot(
        coeff.head(state.pos).reverse());

  state.r_prime = r_prime;
  state.p_trade = trade_probability(r_prime, params.p, params.alpha);
  state.herd_degree =
      herding_degree(r_prime, params.delta_r_model, params.n_agents);
  state.group_count = group_count_for(params.n_agents, state.herd_degree);

  const std::int64_t r = sample_day_return(params.n_agents, state.group_count,
                                           state.p_trade, rng);
  state.history[state.pos] = static_cast<double>(r);
  state.pos = (state.pos + 1) % m;
  return r;
}

ReturnSeries simulate(const ModelParams& params, std::uint64_t stream) {
  params.validate();
  const auto weights = compute_weights(params.max_horizon, params.eta);
  Rng rng(params.rng_seed, stream);

  DayState state;
  state.history = Eigen::VectorXd::Zero(params.max_horizon);

  const std::int64_t retained = params.total_steps - params.warmup_discard;
  Eigen::VectorX<std::int64_t> out(retained);
  for (std::int64_t t = 0; t < params.total_steps; ++t) {
    const std::int64_t r = step(state, params, weights, rng);
    if (t >= params.warmup_discard) out[t - params.warmup_discard] = r;
  }
  return ReturnSeries(std::move(out));
}

}  // namespace abm
