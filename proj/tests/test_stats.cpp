#include <Eigen/Core>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "abm/errors.hpp"
#include "abm/random.hpp"
#include "abm/stats.hpp"
#include "test_support.hpp"

using namespace abm;
using abm::test::gaussian_vector;

namespace {

// Naive double-loop estimators, written directly from the definitions with
// no shared code paths: L(t) = (<r(t')|r(t'+t)|^2> - <r><r^2>) / <r^2>^2 and
// A(t) = (<|r(t')||r(t'+t)|> - <|r|>^2) / (<|r|^2> - <|r|>^2), full-series
// constants, per-lag pair averages.
double oracle_l(const Eigen::VectorXd& r, int lag) {
  const auto n = r.size();
  double mean = 0.0, mean_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mean += r[i];
    mean_sq += r[i] * r[i];
  }
  mean /= static_cast<double>(n);
  mean_sq /= static_cast<double>(n);
  double cross = 0.0;
  for (Eigen::Index i = 0; i + lag < n; ++i)
    cross += r[i] * r[i + lag] * r[i + lag];
  cross /= static_cast<double>(n - lag);
  return (cross - mean * mean_sq) / (mean_sq * mean_sq);
}

double oracle_a(const Eigen::VectorXd& r, int lag) {
  const auto n = r.size();
  double mean_abs = 0.0, mean_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mean_abs += std::abs(r[i]);
    mean_sq += r[i] * r[i];
  }
  mean_abs /= static_cast<double>(n);
  mean_sq /= static_cast<double>(n);
  double cross = 0.0;
  for (Eigen::Index i = 0; i + lag < n; ++i)
    cross += std::abs(r[i]) * std::abs(r[i + lag]);
  cross /= static_cast<double>(n - lag);
  return (cross - mean_abs * mean_abs) / (mean_sq - mean_abs * mean_abs);
}

}  // namespace

TEST_CASE("normalize basics") {
  Eigen::VectorXd fixed(4);
  fixed << 1, -1, 1, -1;
  const Eigen::VectorXd out = normalize(fixed);
  REQUIRE((out - fixed).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(11);
  const Eigen::VectorXd r = gaussian_vector(500, rng);
  const Eigen::VectorXd z = normalize(r);
  REQUIRE(std::abs(population_mean(z)) < 1e-9);
  REQUIRE(population_variance(z) == Catch::Approx(1.0).margin(1e-9));

  // Positive affine transforms normalize to the same vector.
  const Eigen::VectorXd affine = normalize((3.7 * r.array() + 42.0).matrix());
  REQUIRE((affine - z).cwiseAbs().maxCoeff() < 1e-9);
  // Negative scale flips the sign.
  const Eigen::VectorXd flipped = normalize((-2.0 * r.array()).matrix());
  REQUIRE((flipped + z).cwiseAbs().maxCoeff() < 1e-9);

  REQUIRE_THROWS_AS(normalize(Eigen::VectorXd::Constant(10, 3.0)),
                    DegenerateSeriesError);
  REQUIRE_THROWS_AS(normalize(Eigen::VectorXd::Constant(1, 3.0)),
                    InsufficientDataError);
}

TEST_CASE("hand-sized correlation example") {
  // r = [1,-2,3,-1,2]: mean 0.6, <r^2> = 3.8, L0 = 2.28, Z = 14.44;
  // lag-1 cross = (1*4 - 2*9 + 3*1 - 1*4)/4 = -3.75, L(1) = -6.03/14.44.
  // |r| = [1,2,3,1,2]: <|r|> = 1.8, A0 = 3.8 - 3.24 = 0.56;
  // lag-1 cross = (2+6+3+2)/4 = 3.25, A(1) = 0.01/0.56.
  Eigen::VectorXd r(5);
  r << 1, -2, 3, -1, 2;

  const auto l = return_volatility_corr(r, 1);
  REQUIRE(l.lags.size() == 1);
  REQUIRE(l.lags[0] == 1);
  REQUIRE(l.n_samples[0] == 4);
  REQUIRE(l.values[0] == Catch::Approx(-6.03 / 14.44).epsilon(1e-12));
  REQUIRE(l.values[0] == Catch::Approx(oracle_l(r, 1)).epsilon(1e-14));

  const auto a = volatility_autocorr(r, 1);
  REQUIRE(a.lags.size() == 2);
  REQUIRE(a.lags[0] == 0);
  REQUIRE(a.values[0] == 1.0);
  REQUIRE(a.n_samples[0] == 5);
  REQUIRE(a.values[1] == Catch::Approx(0.01 / 0.56).epsilon(1e-12));
  REQUIRE(a.values[1] == Catch::Approx(oracle_a(r, 1)).epsilon(1e-12));
}

TEST_CASE("estimators match the double-loop oracle on random series") {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 10 + static_cast<Eigen::Index>(rng.below(41));
    Eigen::VectorXd r = gaussian_vector(n, rng);
    // Occasional heavy-tailed entries to stress the moments.
    if (rep % 3 == 0) r[rng.below(static_cast<std::uint64_t>(n))] *= 25.0;
    const int max_lag = static_cast<int>(n / 2 - 1);
    if (max_lag < 1) continue;

    const auto l = return_volatility_corr(r, max_lag);
    const auto a = volatility_autocorr(r, max_lag);
    for (int t = 1; t <= max_lag; ++t) {
      REQUIRE(l.values[t - 1] ==
              Catch::Approx(oracle_l(r, t)).margin(1e-12).epsilon(1e-12));
      REQUIRE(a.values[t] ==
              Catch::Approx(oracle_a(r, t)).margin(1e-12).epsilon(1e-12));
    }
    REQUIRE(a.values[0] == 1.0);
  }
}

TEST_CASE("sign flip parity") {
  Rng rng(7);
  const Eigen::VectorXd r = gaussian_vector(300, rng);
  const Eigen::VectorXd neg = -r;
  const auto l_pos = return_volatility_corr(r, 30);
  const auto l_neg = return_volatility_corr(neg, 30);
  const auto a_pos = volatility_autocorr(r, 30);
  const auto a_neg = volatility_autocorr(neg, 30);
  for (int i = 0; i < 30; ++i) {
    REQUIRE(l_neg.values[i] == -l_pos.values[i]);  // exactly odd
    REQUIRE(a_neg.values[i] == a_pos.values[i]);   // exactly even
  }
}

TEST_CASE("iid sign series shows no spurious leverage") {
  const Eigen::Index n = 100000;
  Rng rng(211);
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i)
    r[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;

  const auto l = return_volatility_corr(r, 20);
  for (int t = 1; t <= 20; ++t)
    REQUIRE(std::abs(l.values[t - 1]) <
            3.0 / std::sqrt(static_cast<double>(n - t)));
}

TEST_CASE("null calibration bands") {
  // For a +/-1 series, r|r|^2 = r, so the lag estimator has unit variance
  // and the 2/sqrt(n) band is a true 2-sigma cut (expected exceedance 4.6%).
  // For a Gaussian series Var[r(t')r(t'+t)^2] = E[r^2]E[r^4] = 3, so the
  // matching band is 2*sqrt(3)/sqrt(n).
  const Eigen::Index n = 10000;
  const int max_lag = 20;
  const int n_series = 100;

  int sign_exceed = 0, gauss_exceed = 0;
  Eigen::VectorXi gauss_exceed_at = Eigen::VectorXi::Zero(max_lag);
  Rng rng(4001);
  for (int s = 0; s < n_series; ++s) {
    Eigen::VectorXd signs(n);
    for (Eigen::Index i = 0; i < n; ++i)
      signs[i] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const auto l_sign = return_volatility_corr(signs, max_lag);

    const Eigen::VectorXd gauss = normalize(gaussian_vector(n, rng));
    const auto l_gauss = return_volatility_corr(gauss, max_lag);

    const double band = 2.0 / std::sqrt(static_cast<double>(n));
    for (int t = 0; t < max_lag; ++t) {
      if (std::abs(l_sign.values[t]) > band) ++sign_exceed;
      if (std::abs(l_gauss.values[t]) > std::sqrt(3.0) * band) {
        ++gauss_exceed;
        ++gauss_exceed_at[t];
      }
    }
  }
  const double total = static_cast<double>(n_series * max_lag);
  REQUIRE(static_cast<double>(sign_exceed) / total <= 0.10);
  REQUIRE(static_cast<double>(gauss_exceed) / total <= 0.10);
  // Per-lag (fixed t) fractions across the 100 series stay under 10% too.
  for (int t : {0, 9, 19})
    REQUIRE(gauss_exceed_at[t] <= n_series / 10);
}

TEST_CASE("tail distribution on exact fractions") {
  Eigen::VectorXd r(4);
  r << 0.5, -1.5, 2.5, -3.5;
  Eigen::VectorXd thresholds(4);
  thresholds << 0.0, 1.0, 2.0, 3.0;
  const Eigen::VectorXd p = tail_distribution(r, thresholds);
  REQUIRE(p[0] == 1.0);
  REQUIRE(p[1] == 0.75);
  REQUIRE(p[2] == 0.5);
  REQUIRE(p[3] == 0.25);

  // Strict inequality: a threshold sitting on a sample excludes it.
  Eigen::VectorXd on_sample(1);
  on_sample << 1.5;
  REQUIRE(tail_distribution(r, on_sample)[0] == 0.5);
  Eigen::VectorXd at_max(1);
  at_max << 3.5;
  REQUIRE(tail_distribution(r, at_max)[0] == 0.0);
}

TEST_CASE("tail distribution is monotone and matches the Gaussian oracle") {
  Rng rng(31);
  const Eigen::VectorXd r = gaussian_vector(1000000, rng);
  const Eigen::VectorXd thresholds = Eigen::VectorXd::LinSpaced(13, 0.0, 6.0);
  const Eigen::VectorXd p = tail_distribution(r, thresholds);
  for (Eigen::Index i = 1; i < p.size(); ++i) REQUIRE(p[i] <= p[i - 1]);
  // P(|N(0,1)| > 3) = 0.002700 with sampling error ~5e-5 at n = 1e6.
  REQUIRE(p[6] == Catch::Approx(0.0027).margin(0.0005));
}

TEST_CASE("stats input validation") {
  Eigen::VectorXd r(10);
  r << 1, -2, 3, -1, 2, 1, -2, 3, -1, 2;
  REQUIRE_THROWS_AS(return_volatility_corr(r, 5), ParameterError);
  REQUIRE_THROWS_AS(return_volatility_corr(r, 0), ParameterError);
  REQUIRE_THROWS_AS(volatility_autocorr(r, 5), ParameterError);

  // Constant magnitude: A0 = 0.
  Eigen::VectorXd signs(10);
  signs << 1, -1, 1, -1, 1, -1, 1, -1, 1, -1;
  REQUIRE_THROWS_AS(volatility_autocorr(signs, 3), DegenerateSeriesError);
  // All-zero series: Z = 0.
  REQUIRE_THROWS_AS(return_volatility_corr(Eigen::VectorXd::Zero(10), 3),
                    DegenerateSeriesError);

  Eigen::VectorXd bad_thresholds(2);
  bad_thresholds << 2.0, 1.0;
  REQUIRE_THROWS_AS(tail_distribution(r, bad_thresholds), ParameterError);
  bad_thresholds << -1.0, 1.0;
  REQUIRE_THROWS_AS(tail_distribution(r, bad_thresholds), ParameterError);
  REQUIRE_THROWS_AS(
      tail_distribution(Eigen::VectorXd(), Eigen::VectorXd::Zero(1)),
      InsufficientDataError);
}
