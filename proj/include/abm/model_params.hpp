#pragma once

#include <cstdint>

#include "abm/errors.hpp"

namespace abm {

/// All simulation knobs. Defaults correspond to the calibrated market:
/// N = 10000 agents, baseline per-direction trade probability p = 0.0154,
/// horizon power-law exponent eta = 1.12, maximum horizon M = 150 days.
struct ModelParams {
  std::int64_t n_agents = 10000;
  double p = 0.0154;
  double eta = 1.12;
  std::int64_t max_horizon = 150;
  double alpha = 1.0;
  std::int64_t delta_r_model = 0;
  std::int64_t init_zero_steps = 150;
  std::int64_t total_steps = 20000;
  std::int64_t warmup_discard = 10000;
  std::uint64_t rng_seed = 0;

  /// Throws ParameterError on any violated range. p = 0 is allowed (the
  /// degenerate all-hold market); the binding constraint is that the
  /// asymmetric trade probability 2*p*max(alpha, 2-alpha) stays a valid
  /// probability.
  void validate() const {
    if (n_agents < 1) throw ParameterError("n_agents must be >= 1");
    if (!(p >= 0.0) || p > 0.5) throw ParameterError("p must lie in [0, 0.5]");
    if (!(eta > 0.0)) throw ParameterError("eta must be > 0");
    if (max_horizon < 1) throw ParameterError("max_horizon must be >= 1");
    if (!(alpha > 0.0) || !(alpha < 2.0))
      throw ParameterError("alpha must lie in (0, 2)");
    if (2.0 * p * (alpha > 1.0 ? alpha : 2.0 - alpha) > 1.0 + 1e-12)
      throw ParameterError("2*p*max(alpha, 2-alpha) must be <= 1");
    if (init_zero_steps < 0)
      throw ParameterError("init_zero_steps must be >= 0");
    if (total_steps < 1) throw ParameterError("total_steps must be >= 1");
    if (warmup_discard < 0 || warmup_discard >= total_steps)
      throw ParameterError("warmup_discard must lie in [0, total_steps)");
  }
};

}  // namespace abm
