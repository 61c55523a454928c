#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "abm/errors.hpp"
#include "abm/stats.hpp"

namespace abm {

/// Exponential model value(t) = c * exp(xi * t); tau = -1/xi for a decay.
struct ExpFit {
  double c = 0.0;
  double xi = 0.0;
  double residual_norm = 0.0;
};

/// Nonlinear least-squares failure; carries the best iterate reached so the
/// caller can inspect or report it.
class FitError : public Error {
 public:
  FitError(const std::string& what, const ExpFit& last)
      : Error(what), last_iterate(last) {}
  ExpFit last_iterate;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

struct TTestResult {
  double t_statistic = 0.0;
  std::int64_t dof = 0;
  double p_value = 1.0;
};

/// Ordinary least squares of y against x. slope_stderr is the usual
/// sqrt(s^2 / Sxx) with s^2 = SSR/(n-2); zero when n = 2 (exact
/// interpolation).
LinearFit fit_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Least-squares fit of c * exp(xi * t) to curve values with lags in
/// [lag_lo, lag_hi], by Levenberg-Marquardt started from a log-linear fit on
/// the sign-consistent points. All points in range enter the objective.
/// Throws InsufficientDataError for fewer than 3 usable points and FitError
/// (carrying the last iterate) on non-convergence or a degenerate flat curve.
ExpFit fit_exponential(const CorrelationCurve<double>& curve, int lag_lo,
                       int lag_hi);

/// Two-sided one-sample Student t-test of H0: mean = mu0, sample variance
/// with n-1 denominator.
TTestResult t_test_one_sample(const Eigen::VectorXd& samples, double mu0);

}  // namespace abm
