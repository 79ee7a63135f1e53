#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridshare/billing.hpp"
#include "gridshare/feeder.hpp"
#include "gridshare/fleet.hpp"
#include "gridshare/forecast.hpp"
#include "gridshare/percolation.hpp"

namespace gridshare {

struct ForecastSplit {
  int train_len = 300;
  int holdout_len = 65;
  std::string scenario = "ALL";  // label of the grid-energy series to model
  bool with_p2p = true;
};

// Everything a full run needs. Exactly one fleet source is set.
struct StudyConfig {
  std::string fleet_file;
  double fleet_interval_hours = 4.0;  // only read for file-based fleets
  std::optional<FleetSynthesisSpec> synthesis;
  std::string topology_path;
  TariffSchedule tariff;
  std::string scenario_mode = "everything";
  int trials = 1000;
  std::uint64_t seed = 0;
  ForecastSplit forecast;

  void validate() const;
};

// Accepts either a bare config object or a study manifest (which wraps the
// config under "config"), so a manifest re-runs the bundle it describes.
StudyConfig study_config_from_json_text(const std::string& text);
std::string study_config_to_json_text(const StudyConfig& config);
StudyConfig load_study_config(const std::string& path);

struct ScenarioOutcome {
  Scenario scenario;
  AnnualSummary summary;
  PercolationCurve curve_without;
  PercolationCurve curve_with;
  std::uint64_t scenario_seed = 0;
};

// Table-style pair deltas. a/b compare the members' separate trading pools
// against the merged pool (both with trading); x/y do the same for savings.
struct PairDelta {
  std::string label;
  double sum_members_grid_kwh = 0.0;   // a
  double merged_grid_kwh = 0.0;        // b  (c = a - b)
  double merged_savings = 0.0;         // x
  double sum_members_savings = 0.0;    // y  (z = x - y)
};

struct PredictionReport {
  std::string scenario;
  bool with_p2p = true;
  ArimaOrder order;
  std::vector<double> actual;
  std::vector<double> predicted;
  ScoreResult metrics;
  double predicted_window_pt = 0.0;
  double actual_window_pt = 0.0;
  double residual_skewness = 0.0;
  double residual_kurtosis = 0.0;
};

struct StudyReport {
  MicrogridPartition partitioning;
  std::vector<ScenarioOutcome> scenarios;
  std::vector<PairDelta> pairs;  // neighbor pairs, then the all-members row
  PredictionReport prediction;
};

// The full pipeline: fleet -> partition -> scenarios -> settlement ->
// grid-energy series -> percolation -> forecast. Pure apart from reading the
// configured input files; deterministic for a fixed config (thread count
// never changes the numbers).
StudyReport run_study(const StudyConfig& config, int threads = 0);

// predict_grid_energy on an explicit series (train prefix selects the order).
PredictionReport predict_grid_energy(std::span<const double> series, const ForecastSplit& split,
                                     int trials, std::uint64_t seed, int threads = 0);

// Writes report.csv/report.json, pairs.csv, per-scenario percolation curves,
// forecast.csv/forecast.json, SVG plots, and manifest.json. The directory is
// created atomically: everything lands in a temp dir that is renamed onto
// `out_dir`, which must not already exist.
void write_study_bundle(const StudyReport& report, const StudyConfig& config,
                        const std::filesystem::path& out_dir);

std::string report_csv_text(const StudyReport& report);
std::string pairs_csv_text(const StudyReport& report);
std::string forecast_csv_text(const PredictionReport& prediction);

}  // namespace gridshare
