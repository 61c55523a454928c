#include "abm/fits.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "abm/special_functions.hpp"

namespace abm {

LinearFit fit_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  if (n != y.size()) throw ParameterError("fit_linear: length mismatch");
  if (n < 2) throw InsufficientDataError("fit_linear needs >= 2 points");
  const double x_mean = x.mean();
  const double sxx = (x.array() - x_mean).square().sum();
  if (!(sxx > 0.0))
    throw DegenerateSeriesError("fit_linear: all x values identical");

  LinearFit fit;
  fit.slope = (x.array() - x_mean).matrix().dot(y) / sxx;
  fit.intercept = y.mean() - fit.slope * x_mean;
  if (n > 2) {
    const double ssr =
        (y.array() - fit.intercept - fit.slope * x.array()).square().sum();
    fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

namespace {

double residual_norm_of(const Eigen::VectorXd& t, const Eigen::VectorXd& y,
                        double c, double xi) {
  return std::sqrt((c * (xi * t.array()).exp() - y.array()).square().sum());
}

}  // namespace

ExpFit fit_exponential(const CorrelationCurve<double>& curve, int lag_lo,
                       int lag_hi) {
  if (lag_lo > lag_hi) throw ParameterError("fit_exponential: empty range");
  std::vector<double> ts, ys;
  for (Eigen::Index i = 0; i < curve.lags.size(); ++i) {
    if (curve.lags[i] >= lag_lo && curve.lags[i] <= lag_hi) {
      ts.push_back(static_cast<double>(curve.lags[i]));
      ys.push_back(curve.values[i]);
    }
  }
  const auto n = static_cast<Eigen::Index>(ts.size());
  if (n < 3)
    throw InsufficientDataError("fit_exponential needs >= 3 points in range");
  const Eigen::VectorXd t = Eigen::Map<Eigen::VectorXd>(ts.data(), n);
  const Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);

  // Initialization: log-linear fit restricted to the majority-sign points.
  const Eigen::Index n_pos = (y.array() > 0.0).count();
  const Eigen::Index n_neg = (y.array() < 0.0).count();
  const double sign = n_neg > n_pos ? -1.0 : 1.0;
  std::vector<double> ti, li;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sign * y[i] > 0.0) {
      ti.push_back(t[i]);
      li.push_back(std::log(sign * y[i]));
    }
  }
  if (ti.size() < 2)
    throw FitError("fit_exponential: curve is flat at zero", ExpFit{});
  LinearFit init;
  try {
    init = fit_linear(
        Eigen::Map<Eigen::VectorXd>(ti.data(), static_cast<Eigen::Index>(ti.size())),
        Eigen::Map<Eigen::VectorXd>(li.data(), static_cast<Eigen::Index>(li.size())));
  } catch (const DegenerateSeriesError&) {
    throw FitError("fit_exponential: degenerate initialization", ExpFit{});
  }
  double c = sign * std::exp(init.intercept);
  double xi = init.slope;

  // Levenberg-Marquardt on (c, xi).
  constexpr int kMaxIter = 200;
  double lambda = 1e-3;
  double cost = residual_norm_of(t, y, c, xi);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::ArrayXd e = (xi * t.array()).exp();
    const Eigen::VectorXd r = (c * e - y.array()).matrix();
    Eigen::MatrixXd j(n, 2);
    j.col(0) = e.matrix();
    j.col(1) = (c * t.array() * e).matrix();

    const Eigen::Matrix2d jtj = j.transpose() * j;
    const Eigen::Vector2d g = j.transpose() * r;
    Eigen::Matrix2d damped = jtj;
    damped(0, 0) += lambda * (jtj(0, 0) > 0.0 ? jtj(0, 0) : 1.0);
    damped(1, 1) += lambda * (jtj(1, 1) > 0.0 ? jtj(1, 1) : 1.0);
    const Eigen::Vector2d delta = damped.ldlt().solve(-g);

    const double c_new = c + delta[0];
    const double xi_new = xi + delta[1];
    const double cost_new = residual_norm_of(t, y, c_new, xi_new);
    if (std::isfinite(cost_new) && cost_new <= cost) {
      const bool converged =
          (std::abs(delta[0]) <= 1e-11 * (1.0 + std::abs(c)) &&
           std::abs(delta[1]) <= 1e-11 * (1.0 + std::abs(xi))) ||
          cost - cost_new <= 1e-13 * (1.0 + cost);
      c = c_new;
      xi = xi_new;
      cost = cost_new;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (converged || cost <= 1e-14) return ExpFit{c, xi, cost};
    } else {
      lambda *= 10.0;
      if (lambda > 1e12)
        throw FitError("fit_exponential: step rejection limit",
                       ExpFit{c, xi, cost});
    }
  }
  throw FitError("fit_exponential: no convergence after max iterations",
                 ExpFit{c, xi, cost});
}

TTestResult t_test_one_sample(const Eigen::VectorXd& samples, double mu0) {
  const Eigen::Index n = samples.size();
  if (n < 2) throw InsufficientDataError("t-test needs >= 2 samples");
  const double mean = samples.mean();
  const double var =
      (samples.array() - mean).square().sum() / static_cast<double>(n - 1);
  if (!(var > 0.0))
    throw DegenerateSeriesError("t-test: zero sample variance");

  TTestResult result;
  result.dof = n - 1;
  result.t_statistic =
      (mean - mu0) / std::sqrt(var / static_cast<double>(n));
  result.p_value = student_t_two_sided_p(result.t_statistic, result.dof);
  return result;
}

}  // namespace abm
