#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

#include "abm/stats.hpp"

namespace abm {

/// Daily aggregate returns R(t) in shares (buyers minus sellers), plus the
/// normalized series r(t) computed on first use.
class ReturnSeries {
 public:
  ReturnSeries() = default;
  explicit ReturnSeries(Eigen::VectorX<std::int64_t> raw)
      : raw_(std::move(raw)) {}

  const Eigen::VectorX<std::int64_t>& raw() const { return raw_; }

  /// Zero-mean unit-variance view of raw(); throws DegenerateSeriesError for
  /// a constant series.
  const Eigen::VectorXd& normalized() const {
    if (normalized_.size() == 0)
      normalized_ = normalize(raw_.cast<double>().eval());
    return normalized_;
  }

 private:
  Eigen::VectorX<std::int64_t> raw_;
  mutable Eigen::VectorXd normalized_;
};

}  // namespace abm
