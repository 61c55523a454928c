#include "abm/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace abm {

std::string Date::to_string() const {
  std::ostringstream out;
  out << std::setfill('0') << std::setw(4) << year << '-' << std::setw(2)
      << month << '-' << std::setw(2) << day;
  return out.str();
}

namespace {

using nlohmann::json;

std::string lower_trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

Date parse_date(const std::string& token, std::size_t line_no) {
  const std::string s = lower_trim(token);
  const auto all_digits = [](const std::string& t, std::size_t a,
                             std::size_t b) {
    for (std::size_t i = a; i < b; ++i)
      if (std::isdigit(static_cast<unsigned char>(t[i])) == 0) return false;
    return true;
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !all_digits(s, 0, 4) ||
      !all_digits(s, 5, 7) || !all_digits(s, 8, 10))
    line_error(line_no, "cannot parse date '" + token + "' (want YYYY-MM-DD)");
  Date d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = std::stoi(s.substr(5, 2));
  d.day = std::stoi(s.substr(8, 2));
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    line_error(line_no, "date '" + token + "' out of range");
  return d;
}

double parse_double(const std::string& token, std::size_t line_no,
                    const std::string& column) {
  const std::string s = lower_trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    line_error(line_no, "cannot parse " + column + " '" + token + "'");
  return value;
}

struct ColumnMap {
  std::size_t n_fields = 0;
  std::size_t date = 0;
  std::size_t close = 0;
  std::optional<std::size_t> volume;
};

ColumnMap detect_columns(const std::string& header_line, CsvSchema schema) {
  const std::vector<std::string> names = split_csv_line(header_line);
  ColumnMap map;
  map.n_fields = names.size();
  std::optional<std::size_t> date, close, volume;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string name = lower_trim(names[i]);
    if (name == "date") date = i;
    if (name == "close") close = i;
    if (name == "volume") volume = i;
  }
  if (!date || !close)
    throw DataError("unrecognized CSV header: need Date and Close columns");
  if (schema == CsvSchema::kYahoo && names.size() != 7)
    throw DataError("expected the 7-column Yahoo header");
  if ((schema == CsvSchema::kYahoo || schema == CsvSchema::kCloseVolume) &&
      !volume)
    throw DataError("expected a Volume column");
  if (schema == CsvSchema::kCloseOnly) volume.reset();
  map.date = *date;
  map.close = *close;
  map.volume = volume;
  return map;
}

json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const Eigen::VectorXi& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json to_json(const Eigen::VectorX<std::int64_t>& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

template <typename Vector>
Vector vector_from_json(const json& arr) {
  Vector v(arr.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = arr.at(static_cast<std::size_t>(i))
               .get<typename Vector::Scalar>();
  return v;
}

json to_json(const ModelParams& p) {
  return json{{"n_agents", p.n_agents},
              {"p", p.p},
              {"eta", p.eta},
              {"max_horizon", p.max_horizon},
              {"alpha", p.alpha},
              {"delta_r_model", p.delta_r_model},
              {"init_zero_steps", p.init_zero_steps},
              {"total_steps", p.total_steps},
              {"warmup_discard", p.warmup_discard},
              {"rng_seed", p.rng_seed}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  j.at("n_agents").get_to(p.n_agents);
  j.at("p").get_to(p.p);
  j.at("eta").get_to(p.eta);
  j.at("max_horizon").get_to(p.max_horizon);
  j.at("alpha").get_to(p.alpha);
  j.at("delta_r_model").get_to(p.delta_r_model);
  j.at("init_zero_steps").get_to(p.init_zero_steps);
  j.at("total_steps").get_to(p.total_steps);
  j.at("warmup_discard").get_to(p.warmup_discard);
  j.at("rng_seed").get_to(p.rng_seed);
  return p;
}

json to_json(const CorrelationCurve<double>& c) {
  return json{{"lags", to_json(c.lags)},
              {"values", to_json(c.values)},
              {"n_samples", to_json(c.n_samples)}};
}

CorrelationCurve<double> curve_from_json(const json& j) {
  CorrelationCurve<double> c;
  c.lags = vector_from_json<Eigen::VectorXi>(j.at("lags"));
  c.values = vector_from_json<Eigen::VectorXd>(j.at("values"));
  c.n_samples =
      vector_from_json<Eigen::VectorX<std::int64_t>>(j.at("n_samples"));
  return c;
}

json to_json(const CalibrationResult& c) {
  return json{{"volume_ratio", c.volume_ratio},
              {"alpha", c.alpha},
              {"d_bull", c.d_bull},
              {"d_bear", c.d_bear},
              {"delta_r", c.delta_r},
              {"delta_r_model", c.delta_r_model},
              {"alpha_p_value", c.alpha_p_value},
              {"delta_r_p_value", c.delta_r_p_value},
              {"window_count", c.window_count}};
}

CalibrationResult calibration_from_json(const json& j) {
  CalibrationResult c;
  j.at("volume_ratio").get_to(c.volume_ratio);
  j.at("alpha").get_to(c.alpha);
  j.at("d_bull").get_to(c.d_bull);
  j.at("d_bear").get_to(c.d_bear);
  j.at("delta_r").get_to(c.delta_r);
  j.at("delta_r_model").get_to(c.delta_r_model);
  j.at("alpha_p_value").get_to(c.alpha_p_value);
  j.at("delta_r_p_value").get_to(c.delta_r_p_value);
  j.at("window_count").get_to(c.window_count);
  return c;
}

json to_json(const SlopeSweepResult& s) {
  json points = json::array();
  for (const SlopePoint& pt : s.points)
    points.push_back(json{{"delta_r_model", pt.delta_r_model},
                          {"mean_delta_r", pt.mean_delta_r},
                          {"delta_r_stderr", pt.delta_r_stderr},
                          {"runs", pt.runs}});
  return json{{"slope", s.slope},
              {"intercept", s.intercept},
              {"slope_stderr", s.slope_stderr},
              {"points", points}};
}

SlopeSweepResult slope_from_json(const json& j) {
  SlopeSweepResult s;
  j.at("slope").get_to(s.slope);
  j.at("intercept").get_to(s.intercept);
  j.at("slope_stderr").get_to(s.slope_stderr);
  for (const json& pj : j.at("points")) {
    SlopePoint pt;
    pj.at("delta_r_model").get_to(pt.delta_r_model);
    pj.at("mean_delta_r").get_to(pt.mean_delta_r);
    pj.at("delta_r_stderr").get_to(pt.delta_r_stderr);
    pj.at("runs").get_to(pt.runs);
    s.points.push_back(pt);
  }
  return s;
}

}  // namespace

MarketSeries read_market_csv(const std::string& path, CsvSchema schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
    line.erase(0, 3);  // UTF-8 BOM
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const ColumnMap cols = detect_columns(line, schema);

  std::vector<Date> dates;
  std::vector<double> closes, volumes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != cols.n_fields)
      line_error(line_no, "expected " + std::to_string(cols.n_fields) +
                              " fields, got " +
                              std::to_string(fields.size()));

    const Date date = parse_date(fields[cols.date], line_no);
    if (!dates.empty()) {
      if (date == dates.back())
        line_error(line_no, "duplicate date " + date.to_string());
      if (date < dates.back())
        line_error(line_no, "out-of-order date " + date.to_string());
    }

    const double close = parse_double(fields[cols.close], line_no, "close");
    if (!(close > 0.0))
      line_error(line_no, "nonpositive close " + fields[cols.close]);

    double volume = 0.0;
    if (cols.volume && !lower_trim(fields[*cols.volume]).empty()) {
      volume = parse_double(fields[*cols.volume], line_no, "volume");
      if (volume < 0.0) line_error(line_no, "negative volume");
    }

    dates.push_back(date);
    closes.push_back(close);
    volumes.push_back(volume);
  }
  if (dates.empty()) throw DataError(path + ": no data rows");

  MarketSeries series;
  series.dates = std::move(dates);
  series.close = Eigen::Map<Eigen::VectorXd>(
      closes.data(), static_cast<Eigen::Index>(closes.size()));
  series.volume = Eigen::Map<Eigen::VectorXd>(
      volumes.data(), static_cast<Eigen::Index>(volumes.size()));
  series.has_volume = cols.volume.has_value();
  return series;
}

std::string to_json_string(const ResultBundle& bundle) {
  json j;
  j["schema_version"] = ResultBundle::kSchemaVersion;
  if (bundle.params) j["params"] = to_json(*bundle.params);
  if (bundle.created_at) j["created_at"] = *bundle.created_at;
  j["curves"] = json::object();
  for (const auto& [name, curve] : bundle.curves)
    j["curves"][name] = to_json(curve);
  j["curve_std_errors"] = json::object();
  for (const auto& [name, se] : bundle.curve_std_errors)
    j["curve_std_errors"][name] = to_json(se);
  j["exp_fits"] = json::object();
  for (const auto& [name, fit] : bundle.exp_fits)
    j["exp_fits"][name] = json{{"c", fit.c},
                               {"xi", fit.xi},
                               {"residual_norm", fit.residual_norm}};
  j["tails"] = json::object();
  for (const auto& [name, tail] : bundle.tails)
    j["tails"][name] = json{{"thresholds", to_json(tail.thresholds)},
                            {"probabilities", to_json(tail.probabilities)}};
  j["calibrations"] = json::object();
  for (const auto& [name, cal] : bundle.calibrations)
    j["calibrations"][name] = to_json(cal);
  if (bundle.slope) j["slope"] = to_json(*bundle.slope);
  j["scalars"] = json::object();
  for (const auto& [name, value] : bundle.scalars) j["scalars"][name] = value;
  return j.dump(2);
}

ResultBundle from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("results parse error: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != ResultBundle::kSchemaVersion)
      throw DataError("unsupported results schema version");

    ResultBundle bundle;
    if (j.contains("params")) bundle.params = params_from_json(j["params"]);
    if (j.contains("created_at"))
      bundle.created_at = j["created_at"].get<std::string>();
    for (const auto& [name, cj] : j.at("curves").items())
      bundle.curves[name] = curve_from_json(cj);
    for (const auto& [name, sj] : j.at("curve_std_errors").items())
      bundle.curve_std_errors[name] =
          vector_from_json<Eigen::VectorXd>(sj);
    for (const auto& [name, fj] : j.at("exp_fits").items())
      bundle.exp_fits[name] = ExpFit{fj.at("c").get<double>(),
                                     fj.at("xi").get<double>(),
                                     fj.at("residual_norm").get<double>()};
    for (const auto& [name, tj] : j.at("tails").items())
      bundle.tails[name] =
          TailRecord{vector_from_json<Eigen::VectorXd>(tj.at("thresholds")),
                     vector_from_json<Eigen::VectorXd>(tj.at("probabilities"))};
    for (const auto& [name, cj] : j.at("calibrations").items())
      bundle.calibrations[name] = calibration_from_json(cj);
    if (j.contains("slope")) bundle.slope = slope_from_json(j["slope"]);
    for (const auto& [name, vj] : j.at("scalars").items())
      bundle.scalars[name] = vj.get<double>();
    return bundle;
  } catch (const json::exception& e) {
    throw DataError(std::string("results structure error: ") + e.what());
  }
}

void write_results(const ResultBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << to_json_string(bundle) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

ResultBundle read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_string(buffer.str());
}

void write_curve_text(const CorrelationCurve<double>& curve,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < curve.lags.size(); ++i)
    out << curve.lags[i] << ' ' << curve.values[i] << '\n';
  if (!out) throw DataError("write failed: " + path);
}

void write_series_text(const Eigen::VectorX<std::int64_t>& raw,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < raw.size(); ++i) out << raw[i] << '\n';
  if (!out) throw DataError("write failed: " + path);
}

Eigen::VectorX<std::int64_t> read_series_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::int64_t> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string s = lower_trim(line);
    if (s.empty()) continue;
    std::int64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw DataError(path + " line " + std::to_string(line_no) +
                      ": cannot parse return '" + line + "'");
    values.push_back(value);
  }
  if (values.empty()) throw DataError(path + ": no data");
  return Eigen::Map<Eigen::VectorX<std::int64_t>>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace abm
