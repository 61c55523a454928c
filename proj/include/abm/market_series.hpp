#pragma once

#include <Eigen/Core>
#include <compare>
#include <string>
#include <vector>

namespace abm {

/// Calendar day; no timezone, no time of day.
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
  std::string to_string() const;
};

/// Daily closing prices Y(t) and trading volumes V(t) on strictly increasing
/// dates. Zero-volume rows stay in the series for price analysis; volume
///-weighted statistics skip them. has_volume is false when the source had no
/// volume column at all.
struct MarketSeries {
  std::vector<Date> dates;
  Eigen::VectorXd close;
  Eigen::VectorXd volume;
  bool has_volume = false;

  Eigen::Index size() const { return close.size(); }
};

}  // namespace abm
