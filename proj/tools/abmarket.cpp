// Command-line front end: calibration from market data, the simulated
// delta_R/delta_r response, ensemble simulation, correlation analysis, the
// symmetric-control grid, and a reproduce pipeline chaining all of them.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "abm/calibrate.hpp"
#include "abm/dataio.hpp"
#include "abm/engine.hpp"
#include "abm/ensemble.hpp"
#include "abm/errors.hpp"
#include "abm/fits.hpp"

namespace {

namespace fs = std::filesystem;
using namespace abm;

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void add_model_options(CLI::App* cmd, ModelParams& params) {
  cmd->add_option("--n-agents", params.n_agents, "Number of agents N");
  cmd->add_option("--p", params.p, "Baseline per-direction trade probability");
  cmd->add_option("--eta", params.eta, "Horizon power-law exponent");
  cmd->add_option("--max-horizon", params.max_horizon,
                  "Maximum investment horizon M (days)");
  cmd->add_option("--total-steps", params.total_steps,
                  "Simulated days including warmup");
  cmd->add_option("--warmup-discard", params.warmup_discard,
                  "Leading days dropped for equilibration");
  cmd->add_option("--init-zero-steps", params.init_zero_steps,
                  "Zero-return days seeding the history window");
}

std::string cache_dir() {
  if (const char* env = std::getenv("ABMARKET_CACHE_DIR")) return env;
  return ".abmarket-cache";
}

std::string slope_cache_path(const ModelParams& params) {
  std::ostringstream name;
  name << "slope_N" << params.n_agents << "_p" << params.p << "_eta"
       << params.eta << "_M" << params.max_horizon << ".json";
  return (fs::path(cache_dir()) / name.str()).string();
}

void print_calibration(const std::string& label, const CalibrationResult& c) {
  std::cout << std::setprecision(4) << std::fixed;
  std::cout << label << ": V+/V- = " << c.volume_ratio
            << "  alpha = " << c.alpha << "  d_bull = " << c.d_bull
            << "  d_bear = " << c.d_bear << "  delta_r = " << c.delta_r
            << "  delta_R = " << c.delta_r_model << '\n';
  std::cout << std::setprecision(6) << "  p(alpha vs 1) = " << c.alpha_p_value
            << "  p(delta_r vs 0) = " << c.delta_r_p_value << "  windows = "
            << c.window_count << '\n';
  std::cout.unsetf(std::ios::fixed);
  std::cout << std::setprecision(6);
}

double resolve_slope(const std::string& slope_file, double slope_value) {
  if (slope_file.empty()) return slope_value;
  const ResultBundle bundle = read_results(slope_file);
  if (!bundle.slope)
    throw DataError(slope_file + " contains no slope record");
  return bundle.slope->slope;
}

SlopeSweepResult sweep_with_cache(const ModelParams& params,
                                  const std::vector<std::int64_t>& values,
                                  std::int64_t runs, std::uint64_t seed,
                                  int jobs, bool force) {
  const std::string path = slope_cache_path(params);
  if (!force && fs::exists(path)) {
    const ResultBundle cached = read_results(path);
    if (cached.slope) {
      std::cout << "slope: using cached sweep from " << path << '\n';
      return *cached.slope;
    }
  }
  const SlopeSweepResult sweep =
      slope_sweep(params, values, runs, seed, jobs);
  ResultBundle bundle;
  bundle.params = params;
  bundle.slope = sweep;
  fs::create_directories(fs::path(path).parent_path());
  write_results(bundle, path);
  return sweep;
}

void print_sweep(const SlopeSweepResult& sweep) {
  std::cout << "slope = " << sweep.slope << " +/- " << sweep.slope_stderr
            << ", intercept = " << sweep.intercept << '\n';
  for (const SlopePoint& pt : sweep.points)
    std::cout << "  delta_R = " << std::setw(3) << pt.delta_r_model
              << "  mean delta_r = " << std::setw(12) << pt.mean_delta_r
              << "  stderr = " << pt.delta_r_stderr << "  runs = " << pt.runs
              << '\n';
}

struct AnalyzeOutput {
  ResultBundle bundle;
  bool fit_converged = true;
};

AnalyzeOutput analyze_series_set(const std::vector<ReturnSeries>& ensemble,
                                 int max_lag, int fit_lo, int fit_hi,
                                 int jobs) {
  Eigen::VectorXd thresholds =
      Eigen::VectorXd::LinSpaced(13, 0.0, 6.0);
  const EnsembleAnalysis analysis =
      analyze_ensemble(ensemble, max_lag, thresholds, jobs);

  AnalyzeOutput out;
  out.bundle.curves["return_volatility"] = analysis.return_volatility.mean;
  out.bundle.curve_std_errors["return_volatility"] =
      analysis.return_volatility.std_error;
  out.bundle.curves["volatility_autocorr"] = analysis.volatility_autocorr.mean;
  out.bundle.curve_std_errors["volatility_autocorr"] =
      analysis.volatility_autocorr.std_error;
  out.bundle.tails["abs_return"] =
      TailRecord{thresholds, analysis.tail_mean};
  out.bundle.scalars["n_series"] =
      static_cast<double>(ensemble.size());
  if (ensemble.size() == 1)
    out.bundle.scalars["fit_low_confidence"] = 1.0;

  try {
    const ExpFit fit =
        fit_exponential(analysis.return_volatility.mean, fit_lo, fit_hi);
    out.bundle.exp_fits["return_volatility"] = fit;
  } catch (const FitError& e) {
    std::cerr << "warning: " << e.what() << '\n';
    out.bundle.exp_fits["return_volatility"] = e.last_iterate;
    out.bundle.scalars["fit_converged"] = 0.0;
    out.fit_converged = false;
  }
  return out;
}

void export_curves(const ResultBundle& bundle, const std::string& prefix) {
  for (const auto& [name, curve] : bundle.curves)
    write_curve_text(curve, prefix + name + ".txt");
}

int run(int argc, char** argv) {
  CLI::App app{"Asymmetric trading and herding market model toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "Max parallel simulation runs")
      ->capture_default_str();

  // calibrate
  auto* cal_cmd = app.add_subcommand(
      "calibrate", "Estimate alpha and delta_R from a market CSV");
  std::string cal_input, cal_output = "calibration.json", cal_slope_file;
  double cal_slope = 38.2;
  std::int64_t cal_windows = 8;
  cal_cmd->add_option("--input", cal_input, "Market CSV (needs volume)")
      ->required();
  cal_cmd->add_option("--output", cal_output, "Result bundle path")
      ->capture_default_str();
  cal_cmd->add_option("--slope", cal_slope,
                      "delta_R/delta_r response slope")
      ->capture_default_str();
  cal_cmd->add_option("--slope-file", cal_slope_file,
                      "Bundle with a slope record (overrides --slope)");
  cal_cmd->add_option("--windows", cal_windows,
                      "Non-overlapping windows for the t-tests")
      ->capture_default_str();

  // slope
  auto* slope_cmd = app.add_subcommand(
      "slope", "Measure the delta_R/delta_r response by simulation");
  ModelParams slope_params;
  add_model_options(slope_cmd, slope_params);
  std::vector<std::int64_t> slope_values = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  std::int64_t slope_runs = 100;
  std::uint64_t slope_seed = 12345;
  std::string slope_output = "slope.json";
  bool slope_force = false;
  slope_cmd->add_option("--delta-R", slope_values, "delta_R grid")
      ->capture_default_str();
  slope_cmd->add_option("--runs", slope_runs, "Runs per grid point")
      ->capture_default_str();
  slope_cmd->add_option("--seed", slope_seed, "Base RNG seed")
      ->capture_default_str();
  slope_cmd->add_option("--output", slope_output, "Result bundle path")
      ->capture_default_str();
  slope_cmd->add_flag("--force", slope_force, "Ignore the cache");

  // simulate
  auto* sim_cmd =
      app.add_subcommand("simulate", "Run a seeded simulation ensemble");
  ModelParams sim_params;
  add_model_options(sim_cmd, sim_params);
  double sim_alpha = 1.0;
  std::int64_t sim_delta_R = 0;
  std::int64_t sim_runs = 100;
  std::uint64_t sim_seed = 12345;
  std::string sim_dir = "runs";
  sim_cmd->add_option("--alpha", sim_alpha, "Trading asymmetry alpha")
      ->capture_default_str();
  sim_cmd->add_option("--delta-R", sim_delta_R, "Herding asymmetry delta_R")
      ->capture_default_str();
  sim_cmd->add_option("--runs", sim_runs, "Ensemble size")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--output-dir", sim_dir, "Directory for series files")
      ->capture_default_str();

  // analyze
  auto* an_cmd = app.add_subcommand(
      "analyze", "Correlation curves, tails and fits for series or a CSV");
  std::vector<std::string> an_series;
  std::string an_csv, an_output = "analysis.json", an_export;
  int an_max_lag = 50, an_fit_lo = 1, an_fit_hi = 40;
  an_cmd->add_option("--series", an_series, "Simulated series files");
  an_cmd->add_option("--input-csv", an_csv, "Market CSV to analyze instead");
  an_cmd->add_option("--max-lag", an_max_lag, "Largest lag (days)")
      ->capture_default_str();
  an_cmd->add_option("--fit-lo", an_fit_lo, "First lag of the fit range")
      ->capture_default_str();
  an_cmd->add_option("--fit-hi", an_fit_hi, "Last lag of the fit range")
      ->capture_default_str();
  an_cmd->add_option("--output", an_output, "Result bundle path")
      ->capture_default_str();
  an_cmd->add_option("--export-prefix", an_export,
                     "Write two-column curve files with this prefix");

  // controls
  auto* ctl_cmd = app.add_subcommand(
      "controls", "Symmetric-control grid for a calibrated market");
  ModelParams ctl_params;
  add_model_options(ctl_cmd, ctl_params);
  std::string ctl_market, ctl_output = "controls.json";
  std::int64_t ctl_runs = 100;
  std::uint64_t ctl_seed = 12345;
  int ctl_max_lag = 50;
  ctl_cmd
      ->add_option("--market", ctl_market,
                   "Market preset: sp500-like or shanghai-like")
      ->required()
      ->check(CLI::IsMember({"sp500-like", "shanghai-like"}));
  ctl_cmd->add_option("--runs", ctl_runs, "Runs per case")
      ->capture_default_str();
  ctl_cmd->add_option("--seed", ctl_seed, "RNG seed")->capture_default_str();
  ctl_cmd->add_option("--max-lag", ctl_max_lag, "Largest lag (days)")
      ->capture_default_str();
  ctl_cmd->add_option("--output", ctl_output, "Result bundle path")
      ->capture_default_str();

  // reproduce
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "Calibrate, simulate and analyze one index end to end");
  ModelParams rep_params;
  add_model_options(rep_cmd, rep_params);
  std::string rep_input, rep_dir = "reproduce-out", rep_slope_file;
  std::int64_t rep_runs = 100, rep_windows = 8;
  std::uint64_t rep_seed = 12345;
  std::string rep_alpha_mode = "gated";
  double rep_slope = 38.2;
  rep_cmd->add_option("--input", rep_input, "Market CSV (needs volume)")
      ->required();
  rep_cmd->add_option("--output-dir", rep_dir, "Report directory")
      ->capture_default_str();
  rep_cmd->add_option("--runs", rep_runs, "Ensemble size")
      ->capture_default_str();
  rep_cmd->add_option("--seed", rep_seed, "RNG seed")->capture_default_str();
  rep_cmd->add_option("--windows", rep_windows, "Calibration t-test windows")
      ->capture_default_str();
  rep_cmd
      ->add_option("--alpha-mode", rep_alpha_mode,
                   "gated: snap alpha to 1 unless significant; measured: "
                   "use the point estimate")
      ->check(CLI::IsMember({"gated", "measured"}))
      ->capture_default_str();
  rep_cmd->add_option("--slope", rep_slope, "Response slope")
      ->capture_default_str();
  rep_cmd->add_option("--slope-file", rep_slope_file,
                      "Bundle with a slope record (overrides --slope)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParameterError;
  }

  if (cal_cmd->parsed()) {
    const MarketSeries series = read_market_csv(cal_input);
    const double slope = resolve_slope(cal_slope_file, cal_slope);
    const CalibrationResult result =
        calibrate_index(series, slope, cal_windows);
    print_calibration(cal_input, result);
    ResultBundle bundle;
    bundle.calibrations["index"] = result;
    bundle.scalars["slope"] = slope;
    write_results(bundle, cal_output);
    std::cout << "wrote " << cal_output << '\n';
    return kExitOk;
  }

  if (slope_cmd->parsed()) {
    const SlopeSweepResult sweep =
        sweep_with_cache(slope_params, slope_values, slope_runs, slope_seed,
                         jobs, slope_force);
    print_sweep(sweep);
    ResultBundle bundle;
    bundle.params = slope_params;
    bundle.slope = sweep;
    write_results(bundle, slope_output);
    std::cout << "wrote " << slope_output << '\n';
    return kExitOk;
  }

  if (sim_cmd->parsed()) {
    sim_params.alpha = sim_alpha;
    sim_params.delta_r_model = sim_delta_R;
    sim_params.rng_seed = sim_seed;
    sim_params.validate();
    const std::vector<ReturnSeries> ensemble =
        simulate_ensemble(sim_params, sim_runs, jobs);
    fs::create_directories(sim_dir);
    double mean_of_means = 0.0, mean_of_sds = 0.0;
    for (std::int64_t i = 0; i < sim_runs; ++i) {
      std::ostringstream name;
      name << "run_" << std::setfill('0') << std::setw(4) << i << ".txt";
      write_series_text(ensemble[i].raw(), (fs::path(sim_dir) / name.str()).string());
      const Eigen::VectorXd raw = ensemble[i].raw().cast<double>();
      mean_of_means += raw.mean();
      mean_of_sds += std::sqrt(population_variance(raw));
    }
    mean_of_means /= static_cast<double>(sim_runs);
    mean_of_sds /= static_cast<double>(sim_runs);
    ResultBundle summary;
    summary.params = sim_params;
    summary.scalars["runs"] = static_cast<double>(sim_runs);
    summary.scalars["mean_return"] = mean_of_means;
    summary.scalars["mean_return_stddev"] = mean_of_sds;
    write_results(summary, (fs::path(sim_dir) / "summary.json").string());
    std::cout << "wrote " << sim_runs << " series to " << sim_dir
              << " (mean return " << mean_of_means << ", mean stddev "
              << mean_of_sds << ")\n";
    return kExitOk;
  }

  if (an_cmd->parsed()) {
    std::vector<ReturnSeries> ensemble;
    if (!an_csv.empty()) {
      const MarketSeries market = read_market_csv(an_csv);
      const Eigen::VectorXd r = log_returns(market);
      // Scale to integer-like units only for storage; normalization in the
      // estimators removes the scale again.
      Eigen::VectorX<std::int64_t> raw(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i)
        raw[i] = static_cast<std::int64_t>(std::llround(r[i] * 1e9));
      ensemble.emplace_back(std::move(raw));
    } else {
      if (an_series.empty())
        throw ParameterError("analyze needs --series files or --input-csv");
      for (const std::string& path : an_series)
        ensemble.emplace_back(read_series_text(path));
    }
    const AnalyzeOutput out = analyze_series_set(
        ensemble, an_max_lag, an_fit_lo, an_fit_hi, jobs);
    write_results(out.bundle, an_output);
    if (!an_export.empty()) export_curves(out.bundle, an_export);
    const ExpFit& fit = out.bundle.exp_fits.at("return_volatility");
    std::cout << "return-volatility fit: c = " << fit.c << ", xi = " << fit.xi
              << " (tau = " << (fit.xi < 0 ? -1.0 / fit.xi : 0.0) << ")\n";
    std::cout << "wrote " << an_output << '\n';
    return out.fit_converged ? kExitOk : kExitFitError;
  }

  if (ctl_cmd->parsed()) {
    struct ControlCase {
      std::string name;
      double alpha;
      std::int64_t delta_R;
    };
    std::vector<ControlCase> grid;
    if (ctl_market == "sp500-like") {
      grid = {{"full_asymmetric", 1.0, 3}, {"herding_symmetric", 1.0, 0}};
    } else {
      grid = {{"full_asymmetric", 1.1, -2},
              {"trading_symmetric", 1.0, -2},
              {"herding_symmetric", 1.1, 0},
              {"both_symmetric", 1.0, 0}};
    }
    ResultBundle bundle;
    const Eigen::VectorXd thresholds = Eigen::VectorXd::LinSpaced(13, 0.0, 6.0);
    for (const ControlCase& c : grid) {
      ModelParams params = ctl_params;
      params.alpha = c.alpha;
      params.delta_r_model = c.delta_R;
      params.rng_seed = ctl_seed;
      params.validate();
      const std::vector<ReturnSeries> ensemble =
          simulate_ensemble(params, ctl_runs, jobs);
      const EnsembleAnalysis analysis =
          analyze_ensemble(ensemble, ctl_max_lag, thresholds, jobs);
      bundle.curves[c.name] = analysis.return_volatility.mean;
      bundle.curve_std_errors[c.name] = analysis.return_volatility.std_error;
      std::cout << ctl_market << " " << c.name << " (alpha = " << c.alpha
                << ", delta_R = " << c.delta_R
                << "): L(1) = " << analysis.return_volatility.mean.values[0]
                << " +/- " << analysis.return_volatility.std_error[0] << '\n';
    }
    write_results(bundle, ctl_output);
    std::cout << "wrote " << ctl_output << '\n';
    return kExitOk;
  }

  if (rep_cmd->parsed()) {
    fs::create_directories(rep_dir);
    const MarketSeries series = read_market_csv(rep_input);
    const double slope = resolve_slope(rep_slope_file, rep_slope);
    const CalibrationResult cal =
        calibrate_index(series, slope, rep_windows);
    print_calibration(rep_input, cal);

    double alpha = cal.alpha;
    if (rep_alpha_mode == "gated" && cal.alpha_p_value >= 0.05) alpha = 1.0;
    // alpha enters the trade probability as a multiplier in (0, 2).
    alpha = std::clamp(alpha, 1e-6, 2.0 - 1e-6);
    std::cout << "simulating with alpha = " << alpha
              << ", delta_R = " << cal.delta_r_model << " (" << rep_runs
              << " runs)\n";

    ModelParams params = rep_params;
    params.alpha = alpha;
    params.delta_r_model = cal.delta_r_model;
    params.rng_seed = rep_seed;
    params.validate();
    const std::vector<ReturnSeries> ensemble =
        simulate_ensemble(params, rep_runs, jobs);
    AnalyzeOutput out = analyze_series_set(ensemble, 50, 1, 40, jobs);
    out.bundle.params = params;
    out.bundle.calibrations["index"] = cal;
    out.bundle.scalars["slope"] = slope;
    out.bundle.scalars["alpha_used"] = alpha;
    const std::string report = (fs::path(rep_dir) / "report.json").string();
    write_results(out.bundle, report);

    const ExpFit& fit = out.bundle.exp_fits.at("return_volatility");
    std::cout << "simulated return-volatility fit: c = " << fit.c
              << ", xi = " << fit.xi << '\n';
    std::cout << "wrote " << report << '\n';
    return out.fit_converged ? kExitOk : kExitFitError;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitParameterError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitFitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
