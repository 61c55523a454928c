#pragma once

#include <Eigen/Core>
#include <cmath>

#include "abm/errors.hpp"

namespace abm {

/// Power-law investment-horizon weights gamma_i = i^-eta / sum_j j^-eta for
/// i in 1..M, plus the proportionality coefficient k that keeps the weighted
/// return on the same scale as the daily return.
///
/// lag_coeff caches the expansion of the double sum
///   R'(t) = k * sum_i gamma_i * sum_{j<i} R(t-j)
/// into a single dot product over lags: R(t-j) carries total weight
/// k * sum_{i>j} gamma_i, so R'(t) = lag_coeff.dot(history newest first).
template <typename Scalar = double>
struct HorizonWeights {
  Eigen::VectorX<Scalar> gamma;
  Scalar k_coeff = Scalar(1);
  Eigen::VectorX<Scalar> lag_coeff;
};

/// Satisfies sum(gamma) = 1 and k * sum(i * gamma_i) = 1, both to roundoff.
template <typename Scalar = double>
HorizonWeights<Scalar> compute_weights(Eigen::Index max_horizon, Scalar eta) {
  if (max_horizon < 1) throw ParameterError("max_horizon must be >= 1");
  if (!(eta > Scalar(0))) throw ParameterError("eta must be > 0");

  HorizonWeights<Scalar> w;
  w.gamma = Eigen::VectorX<Scalar>::LinSpaced(max_horizon, Scalar(1),
                                              Scalar(max_horizon))
                .array()
                .pow(-eta);
  w.gamma /= w.gamma.sum();

  // Tail sums T_m = sum_{i=m}^{M} gamma_i, accumulated smallest-first so the
  // cancellation-free partial sums stay accurate. lag_coeff[j] = k * T_{j+1}.
  Eigen::VectorX<Scalar> tail(max_horizon);
  Scalar acc = 0;
  for (Eigen::Index m = max_horizon - 1; m >= 0; --m) {
    acc += w.gamma[m];
    tail[m] = acc;
  }
  // k = 1 / sum_i i*gamma_i = 1 / sum_m T_m.
  w.k_coeff = Scalar(1) / tail.sum();
  w.lag_coeff = w.k_coeff * tail;
  return w;
}

/// Weighted average return over the last M days; history[j] = R(t-j), newest
/// first. A constant history c maps to exactly c (shift equivalence), and
/// |result| <= max|history| because the lag coefficients are positive and sum
/// to 1.
template <typename Derived, typename Scalar>
Scalar weighted_return(const Eigen::MatrixBase<Derived>& history,
                       const HorizonWeights<Scalar>& weights) {
  if (history.size() != weights.lag_coeff.size())
    throw ParameterError("history length must equal max_horizon");
  return weights.lag_coeff.dot(history.template cast<Scalar>());
}

}  // namespace abm
