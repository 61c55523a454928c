#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <string>

#include "abm/market_series.hpp"
#include "abm/random.hpp"

namespace abm::test {

/// Market fixture with exactly plantable calibration values. The log
/// returns cycle through {+0.2, -0.2, +1.4, -1.4} scaled by `scale`; the
/// pattern has population mean 0 and unit variance, so normalization maps
/// the returns back onto the unscaled pattern and the volume-weighted
/// statistics below are exact by arithmetic:
///   bull-day volumes 419.21 (r = +0.2) and 816.79 (r = +1.4): V+ = 618,
///     d_bull = (419.21*0.2 + 816.79*1.4)/1236 = 0.993
///   bear-day volumes 273 (r = -0.2) and 927 (r = -1.4): V- = 600,
///     d_bear = (273*0.2 + 927*1.4)/1200 = 1.127
/// giving V+/V- = 1.03, alpha = 2.06/2.03, delta_r = 0.067.
inline MarketSeries planted_market(std::int64_t n_blocks,
                                   double scale = 0.01) {
  // Block order +0.2, -1.4, -0.2, +1.4 sums to zero, keeping prices bounded.
  const double pattern[4] = {0.2, -1.4, -0.2, 1.4};
  const double volumes[4] = {419.21, 927.0, 273.0, 816.79};

  const Eigen::Index n = 4 * n_blocks + 1;
  MarketSeries series;
  series.has_volume = true;
  series.close.resize(n);
  series.volume.resize(n);
  series.dates.resize(n);
  series.close[0] = 100.0;
  series.volume[0] = 600.0;
  for (Eigen::Index t = 1; t < n; ++t) {
    const int phase = static_cast<int>((t - 1) % 4);
    series.close[t] = series.close[t - 1] * std::exp(scale * pattern[phase]);
    series.volume[t] = volumes[phase];
  }
  // Synthetic trading calendar: 2000-01-01 onward, every day a trading day.
  int y = 2000, m = 1, d = 1;
  for (Eigen::Index t = 0; t < n; ++t) {
    series.dates[t] = Date{y, m, d};
    if (++d > 28) {
      d = 1;
      if (++m > 12) {
        m = 1;
        ++y;
      }
    }
  }
  return series;
}

/// Sign-symmetric null market: i.i.d. symmetric returns, volumes drawn
/// independently of the return sign.
inline MarketSeries null_market(std::int64_t n_days, std::uint64_t seed) {
  Rng rng(seed);
  MarketSeries series;
  series.has_volume = true;
  series.close.resize(n_days);
  series.volume.resize(n_days);
  series.dates.resize(n_days);
  series.close[0] = 100.0;
  series.volume[0] = 1000.0;
  int y = 2000, m = 1, d = 1;
  for (Eigen::Index t = 0; t < n_days; ++t) {
    if (t > 0) {
      const double u1 = rng.uniform01();
      const double u2 = rng.uniform01();
      // Box-Muller normal return, scale 1%.
      const double r =
          0.01 * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
      series.close[t] = series.close[t - 1] * std::exp(r);
      series.volume[t] = 500.0 + 1000.0 * rng.uniform01();
    }
    series.dates[t] = Date{y, m, d};
    if (++d > 28) {
      d = 1;
      if (++m > 12) {
        m = 1;
        ++y;
      }
    }
  }
  return series;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    v[i] = mag * std::cos(6.283185307179586 * u2);
    if (i + 1 < n) v[i + 1] = mag * std::sin(6.283185307179586 * u2);
  }
  return v;
}

}  // namespace abm::test
