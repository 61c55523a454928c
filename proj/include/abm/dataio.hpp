#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "abm/calibrate.hpp"
#include "abm/fits.hpp"
#include "abm/market_series.hpp"
#include "abm/model_params.hpp"
#include "abm/stats.hpp"

namespace abm {

/// Accepted input layouts, auto-detected from the header row.
enum class CsvSchema {
  kAuto,         // detect from the header
  kYahoo,        // Date,Open,High,Low,Close,Adj Close,Volume
  kCloseVolume,  // Date,Close,Volume
  kCloseOnly,    // Date,Close
};

/// Parses a daily market CSV. Dates must be ISO (YYYY-MM-DD) and strictly
/// increasing; closes must be positive. Errors carry the 1-based line
/// number. Zero or missing volume entries are kept as 0 in the series.
MarketSeries read_market_csv(const std::string& path,
                             CsvSchema schema = CsvSchema::kAuto);

/// Empirical tail P(|r| > x) sampled on a threshold grid.
struct TailRecord {
  Eigen::VectorXd thresholds;
  Eigen::VectorXd probabilities;
};

/// Everything one experiment may want to persist. All maps are keyed by a
/// caller-chosen name. created_at is optional free-form metadata; the
/// bundled tools leave it unset so reruns are byte-identical.
struct ResultBundle {
  static constexpr int kSchemaVersion = 1;

  std::optional<ModelParams> params;
  std::optional<std::string> created_at;
  std::map<std::string, CorrelationCurve<double>> curves;
  std::map<std::string, Eigen::VectorXd> curve_std_errors;
  std::map<std::string, ExpFit> exp_fits;
  std::map<std::string, TailRecord> tails;
  std::map<std::string, CalibrationResult> calibrations;
  std::optional<SlopeSweepResult> slope;
  std::map<std::string, double> scalars;
};

/// JSON serialization with full double round-trip precision.
void write_results(const ResultBundle& bundle, const std::string& path);
ResultBundle read_results(const std::string& path);
std::string to_json_string(const ResultBundle& bundle);
ResultBundle from_json_string(const std::string& text);

/// Plain two-column lag/value text for external plotting.
void write_curve_text(const CorrelationCurve<double>& curve,
                      const std::string& path);

/// One integer return per line.
void write_series_text(const Eigen::VectorX<std::int64_t>& raw,
                       const std::string& path);
Eigen::VectorX<std::int64_t> read_series_text(const std::string& path);

}  // namespace abm
