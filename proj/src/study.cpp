#include "gridshare/study.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gridshare/rng.hpp"
#include "gridshare/svg.hpp"
#include "json.hpp"

namespace gridshare {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string money(double v) { return std::to_string(std::llround(v)); }
std::string whole_kwh(double v) { return std::to_string(std::llround(v)); }

std::string fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string slugify(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)))
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

TariffSchedule tariff_from_json(const nlohmann::json& j) {
  TariffSchedule t;
  static const char* known[] = {"peak_buy", "offpeak_buy", "peak_sell",
                                "offpeak_sell", "peak_start_hour", "peak_end_hour"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown tariff key '" + it.key() + "'");
  }
  if (j.contains("peak_buy")) t.peak_buy = j.at("peak_buy").get<double>();
  if (j.contains("offpeak_buy")) t.offpeak_buy = j.at("offpeak_buy").get<double>();
  if (j.contains("peak_sell")) t.peak_sell = j.at("peak_sell").get<double>();
  if (j.contains("offpeak_sell")) t.offpeak_sell = j.at("offpeak_sell").get<double>();
  if (j.contains("peak_start_hour")) t.peak_start_hour = j.at("peak_start_hour").get<double>();
  if (j.contains("peak_end_hour")) t.peak_end_hour = j.at("peak_end_hour").get<double>();
  t.validate();
  return t;
}

nlohmann::json tariff_to_json(const TariffSchedule& t) {
  return {{"peak_buy", t.peak_buy},           {"offpeak_buy", t.offpeak_buy},
          {"peak_sell", t.peak_sell},         {"offpeak_sell", t.offpeak_sell},
          {"peak_start_hour", t.peak_start_hour}, {"peak_end_hour", t.peak_end_hour}};
}

}  // namespace

void StudyConfig::validate() const {
  if (fleet_file.empty() == !synthesis.has_value())
    throw ConfigError("config must set exactly one of fleet.file and fleet.synthesis");
  if (synthesis) synthesis->validate();
  if (topology_path.empty()) throw ConfigError("config needs a topology path");
  tariff.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (forecast.train_len < 8) throw ConfigError("forecast train length must be >= 8");
  if (forecast.holdout_len < 1) throw ConfigError("forecast holdout length must be >= 1");
  if (forecast.scenario.empty()) throw ConfigError("forecast scenario label is empty");
  if (scenario_mode != "singles" && scenario_mode != "pairs" && scenario_mode != "all" &&
      scenario_mode != "everything")
    throw ConfigError("unknown scenario mode '" + scenario_mode + "'");
}

StudyConfig study_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("study config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("study config must be a JSON object");
  if (j.contains("config")) j = j.at("config");  // manifest wrapper

  static const char* known[] = {"fleet", "topology", "tariff", "scenarios",
                                "trials", "seed", "forecast"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown study config key '" + it.key() + "'");
  }

  StudyConfig c;
  try {
    if (!j.contains("fleet") || !j.at("fleet").is_object())
      throw ConfigError("config needs a fleet object");
    const auto& jf = j.at("fleet");
    for (auto it = jf.begin(); it != jf.end(); ++it)
      if (it.key() != "file" && it.key() != "synthesis")
        throw ConfigError("unknown fleet key '" + it.key() + "'");
    if (jf.contains("file")) c.fleet_file = jf.at("file").get<std::string>();
    if (jf.contains("synthesis"))
      c.synthesis = synthesis_spec_from_json_text(jf.at("synthesis").dump());

    c.topology_path = j.at("topology").get<std::string>();
    if (j.contains("tariff")) c.tariff = tariff_from_json(j.at("tariff"));
    if (j.contains("scenarios")) c.scenario_mode = j.at("scenarios").get<std::string>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("forecast")) {
      const auto& jf2 = j.at("forecast");
      for (auto it = jf2.begin(); it != jf2.end(); ++it)
        if (it.key() != "train" && it.key() != "holdout" && it.key() != "scenario" &&
            it.key() != "with_p2p")
          throw ConfigError("unknown forecast key '" + it.key() + "'");
      if (jf2.contains("train")) c.forecast.train_len = jf2.at("train").get<int>();
      if (jf2.contains("holdout")) c.forecast.holdout_len = jf2.at("holdout").get<int>();
      if (jf2.contains("scenario")) c.forecast.scenario = jf2.at("scenario").get<std::string>();
      if (jf2.contains("with_p2p")) c.forecast.with_p2p = jf2.at("with_p2p").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad study config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string study_config_to_json_text(const StudyConfig& config) {
  nlohmann::json j;
  if (config.synthesis)
    j["fleet"] = {{"synthesis", nlohmann::json::parse(synthesis_spec_to_json_text(*config.synthesis))}};
  else
    j["fleet"] = {{"file", config.fleet_file}};
  j["topology"] = config.topology_path;
  j["tariff"] = tariff_to_json(config.tariff);
  j["scenarios"] = config.scenario_mode;
  j["trials"] = config.trials;
  j["seed"] = config.seed;
  j["forecast"] = {{"train", config.forecast.train_len},
                   {"holdout", config.forecast.holdout_len},
                   {"scenario", config.forecast.scenario},
                   {"with_p2p", config.forecast.with_p2p}};
  return j.dump(2);
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return study_config_from_json_text(buf.str());
}

PredictionReport predict_grid_energy(std::span<const double> series, const ForecastSplit& split,
                                     int trials, std::uint64_t seed, int threads) {
  if (split.train_len + split.holdout_len > static_cast<int>(series.size()))
    throw DataError("series has " + std::to_string(series.size()) +
                    " days, forecast split needs " +
                    std::to_string(split.train_len + split.holdout_len));

  std::span<const double> train = series.subspan(0, split.train_len);
  std::span<const double> holdout = series.subspan(split.train_len, split.holdout_len);

  PredictionReport rep;
  rep.scenario = split.scenario;
  rep.with_p2p = split.with_p2p;
  rep.order = select_order(train);
  ArimaModel model = fit_arima(train, rep.order);
  rep.predicted = forecast(model, split.holdout_len);
  rep.actual.assign(holdout.begin(), holdout.end());
  rep.metrics = score(rep.actual, rep.predicted);
  rep.residual_skewness = model.residual_skewness;
  rep.residual_kurtosis = model.residual_kurtosis;
  rep.predicted_window_pt =
      resilience_of_series(rep.predicted, trials, mix_seed(seed, fnv1a("forecast"), 1), threads);
  rep.actual_window_pt =
      resilience_of_series(rep.actual, trials, mix_seed(seed, fnv1a("forecast"), 2), threads);
  return rep;
}

StudyReport run_study(const StudyConfig& config, int threads) {
  config.validate();

  std::vector<HouseProfile> fleet =
      config.synthesis ? synthesize_fleet(*config.synthesis, config.synthesis->seed)
                       : load_fleet_csv(config.fleet_file);
  FeederGraph feeder = load_topology(config.topology_path);

  StudyReport report;
  report.partitioning = partition_default(feeder);
  std::vector<std::pair<int, int>> pairs = neighboring_pairs(feeder, report.partitioning);
  std::vector<Scenario> all_scenarios = scenario_set(report.partitioning, pairs);
  std::vector<Scenario> selected = filter_scenarios(all_scenarios, config.scenario_mode);

  std::map<std::string, std::size_t> house_index;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    if (!house_index.emplace(fleet[i].id, i).second)
      throw DataError("duplicate house '" + fleet[i].id + "' in fleet");
  }

  // Settle every scenario in the full set: pair deltas need the singles even
  // when the selection hides them. Percolation runs only on selected rows.
  std::map<std::string, AnnualSummary> summaries;
  auto settle = [&](const Scenario& sc) {
    if (summaries.count(sc.label)) return;
    std::vector<HouseProfile> members;
    members.reserve(sc.house_ids.size());
    for (const std::string& id : sc.house_ids) {
      auto it = house_index.find(id);
      if (it == house_index.end())
        throw DataError("scenario " + sc.label + " references house '" + id +
                        "' absent from the fleet");
      members.push_back(fleet[it->second]);
    }
    auto by_day = aggregate_fleet_daily(members, config.tariff);
    summaries.emplace(sc.label, annual_summary(by_day, config.tariff, sc.label));
  };
  for (const Scenario& sc : all_scenarios) settle(sc);

  for (const Scenario& sc : selected) {
    ScenarioOutcome out;
    out.scenario = sc;
    out.summary = summaries.at(sc.label);
    out.scenario_seed = mix_seed(config.seed, fnv1a(sc.label));

    std::vector<HouseProfile> members;
    for (const std::string& id : sc.house_ids) members.push_back(fleet[house_index.at(id)]);
    auto by_day = aggregate_fleet_daily(members, config.tariff);
    GridEnergySeries without = grid_energy(by_day, config.tariff, false);
    GridEnergySeries with = grid_energy(by_day, config.tariff, true);

    out.curve_without = percolation_curve(build_visibility(without.daily_kwh), config.trials,
                                          mix_seed(out.scenario_seed, 0), threads);
    out.curve_with = percolation_curve(build_visibility(with.daily_kwh), config.trials,
                                       mix_seed(out.scenario_seed, 1), threads);
    report.scenarios.push_back(std::move(out));
  }

  // Pair deltas for every pair scenario in the full set, then the all-members
  // row; members' figures come from the singles' summaries.
  auto label_of = [&](int mg) { return report.partitioning.microgrids.at(mg).label; };
  for (auto [i, j] : pairs) {
    const AnnualSummary& merged = summaries.at(label_of(i) + "+" + label_of(j));
    const AnnualSummary& a = summaries.at(label_of(i));
    const AnnualSummary& b = summaries.at(label_of(j));
    PairDelta d;
    d.label = merged.scenario;
    d.sum_members_grid_kwh = a.grid_kwh_with + b.grid_kwh_with;
    d.merged_grid_kwh = merged.grid_kwh_with;
    d.merged_savings = merged.savings;
    d.sum_members_savings = a.savings + b.savings;
    report.pairs.push_back(std::move(d));
  }
  if (report.partitioning.microgrids.size() >= 2) {
    const AnnualSummary& merged = summaries.at("ALL");
    PairDelta d;
    d.label = "ALL";
    d.merged_grid_kwh = merged.grid_kwh_with;
    d.merged_savings = merged.savings;
    for (const Microgrid& mg : report.partitioning.microgrids) {
      const AnnualSummary& s = summaries.at(mg.label);
      d.sum_members_grid_kwh += s.grid_kwh_with;
      d.sum_members_savings += s.savings;
    }
    report.pairs.push_back(std::move(d));
  }

  // Forecast scenario must exist in the full set; its grid series is rebuilt
  // at the configured variant.
  const Scenario* fsc = nullptr;
  for (const Scenario& sc : all_scenarios)
    if (sc.label == config.forecast.scenario) fsc = &sc;
  if (fsc == nullptr)
    throw ConfigError("forecast scenario '" + config.forecast.scenario + "' is not a scenario label");
  {
    std::vector<HouseProfile> members;
    for (const std::string& id : fsc->house_ids) members.push_back(fleet[house_index.at(id)]);
    auto by_day = aggregate_fleet_daily(members, config.tariff);
    GridEnergySeries series = grid_energy(by_day, config.tariff, config.forecast.with_p2p);
    report.prediction =
        predict_grid_energy(series.daily_kwh, config.forecast, config.trials, config.seed, threads);
  }
  return report;
}

std::string report_csv_text(const StudyReport& report) {
  std::string out =
      "scenario,houses,cost_without_p2p,cost_with_p2p,savings,savings_pct,"
      "grid_kwh_without,grid_kwh_with,pt_without,pt_with\n";
  for (const ScenarioOutcome& sc : report.scenarios) {
    const AnnualSummary& s = sc.summary;
    long long without = std::llround(s.cost_without_p2p);
    long long with = std::llround(s.cost_with_p2p);
    out += s.scenario + "," + std::to_string(s.houses) + "," + money(s.cost_without_p2p) + "," +
           money(s.cost_with_p2p) + "," + std::to_string(without - with) + "," +
           fixed(s.savings_pct, 2) + "," + whole_kwh(s.grid_kwh_without) + "," +
           whole_kwh(s.grid_kwh_with) + "," + fixed(sc.curve_without.threshold, 5) + "," +
           fixed(sc.curve_with.threshold, 5) + "\n";
  }
  return out;
}

std::string pairs_csv_text(const StudyReport& report) {
  std::string out = "scenario,a,b,c,x,y,z\n";
  for (const PairDelta& d : report.pairs) {
    long long a = std::llround(d.sum_members_grid_kwh);
    long long b = std::llround(d.merged_grid_kwh);
    long long x = std::llround(d.merged_savings);
    long long y = std::llround(d.sum_members_savings);
    out += d.label + "," + std::to_string(a) + "," + std::to_string(b) + "," +
           std::to_string(a - b) + "," + std::to_string(x) + "," + std::to_string(y) + "," +
           std::to_string(x - y) + "\n";
  }
  return out;
}

std::string forecast_csv_text(const PredictionReport& prediction) {
  std::string out = "day_index,actual_kwh,predicted_kwh\n";
  for (std::size_t i = 0; i < prediction.actual.size(); ++i)
    out += std::to_string(i) + "," + fixed(prediction.actual[i], 3) + "," +
           fixed(prediction.predicted[i], 3) + "\n";
  out += "r2," + fixed(prediction.metrics.r2, 4) + "\n";
  out += "rmse," + fixed(prediction.metrics.rmse, 4) + "\n";
  out += "mae," + fixed(prediction.metrics.mae, 4) + "\n";
  return out;
}

void write_study_bundle(const StudyReport& report, const StudyConfig& config,
                        const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (fs::exists(out_dir)) throw ConfigError("output directory '" + out_dir.string() + "' exists");
  fs::path parent = out_dir.parent_path().empty() ? "." : out_dir.parent_path();
  fs::path tmp = parent / (out_dir.filename().string() + ".partial");
  std::error_code ec;
  fs::remove_all(tmp, ec);

  auto put = [&](const fs::path& rel, const std::string& text) {
    fs::path full = tmp / rel;
    fs::create_directories(full.parent_path());
    std::ofstream f(full, std::ios::binary);
    if (!f) throw DataError("cannot write '" + full.string() + "'");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw DataError("write failed for '" + full.string() + "'");
  };

  try {
    put("report.csv", report_csv_text(report));
    put("pairs.csv", pairs_csv_text(report));
    put("forecast.csv", forecast_csv_text(report.prediction));

    nlohmann::json jreport = nlohmann::json::array();
    for (const ScenarioOutcome& sc : report.scenarios) {
      const AnnualSummary& s = sc.summary;
      jreport.push_back({{"scenario", s.scenario},
                         {"houses", s.houses},
                         {"cost_without_p2p", s.cost_without_p2p},
                         {"cost_with_p2p", s.cost_with_p2p},
                         {"savings", s.savings},
                         {"savings_pct", s.savings_pct},
                         {"grid_kwh_without", s.grid_kwh_without},
                         {"grid_kwh_with", s.grid_kwh_with},
                         {"pt_without", sc.curve_without.threshold},
                         {"pt_with", sc.curve_with.threshold},
                         {"seed", sc.scenario_seed}});
    }
    put("report.json", jreport.dump(2) + "\n");

    nlohmann::json jforecast = {{"scenario", report.prediction.scenario},
                                {"with_p2p", report.prediction.with_p2p},
                                {"order",
                                 {{"p", report.prediction.order.p},
                                  {"d", report.prediction.order.d},
                                  {"q", report.prediction.order.q}}},
                                {"r2", report.prediction.metrics.r2},
                                {"rmse", report.prediction.metrics.rmse},
                                {"mae", report.prediction.metrics.mae},
                                {"predicted_window_pt", report.prediction.predicted_window_pt},
                                {"actual_window_pt", report.prediction.actual_window_pt},
                                {"residual_skewness", report.prediction.residual_skewness},
                                {"residual_kurtosis", report.prediction.residual_kurtosis}};
    put("forecast.json", jforecast.dump(2) + "\n");

    for (const ScenarioOutcome& sc : report.scenarios) {
      std::string slug = slugify(sc.scenario.label);
      for (bool with : {false, true}) {
        const PercolationCurve& curve = with ? sc.curve_with : sc.curve_without;
        std::ostringstream csv;
        write_curve_csv(curve, csv);
        put(fs::path("curves") / (slug + (with ? "_with.csv" : "_without.csv")), csv.str());
      }
    }

    // Plots: threshold comparison bars, forecast overlay, and the forecast
    // scenario's susceptibility/strength curves.
    {
      std::vector<std::string> cats;
      std::vector<double> without, with;
      for (const ScenarioOutcome& sc : report.scenarios) {
        cats.push_back(sc.scenario.label);
        without.push_back(sc.curve_without.threshold);
        with.push_back(sc.curve_with.threshold);
      }
      if (!cats.empty())
        put(fs::path("plots") / "thresholds.svg",
            svg_paired_bars("Percolation threshold by scenario", cats, without, "without trading",
                            with, "with trading"));

      put(fs::path("plots") / "forecast.svg",
          svg_line_chart("Holdout grid energy: actual vs predicted",
                         {{"actual", report.prediction.actual},
                          {"predicted", report.prediction.predicted}},
                         "holdout day", "kWh"));

      for (const ScenarioOutcome& sc : report.scenarios) {
        if (sc.scenario.label != report.prediction.scenario) continue;
        for (bool with_flag : {false, true}) {
          const PercolationCurve& curve = with_flag ? sc.curve_with : sc.curve_without;
          put(fs::path("plots") /
                  (slugify(sc.scenario.label) + (with_flag ? "_with_curve.svg" : "_without_curve.svg")),
              svg_line_chart(std::string("Percolation curve, ") + sc.scenario.label +
                                 (with_flag ? " with trading" : " without trading"),
                             {{"strength", curve.strength}, {"susceptibility", curve.susceptibility}},
                             "removal fraction", "normalized", true));
        }
      }
    }

    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(study_config_to_json_text(config));
    nlohmann::json seeds = nlohmann::json::object();
    for (const ScenarioOutcome& sc : report.scenarios) seeds[sc.scenario.label] = sc.scenario_seed;
    manifest["derived"] = {{"study_seed", config.seed},
                           {"scenario_seeds", seeds},
                           {"microgrids", report.partitioning.microgrids.size()},
                           {"scenario_rows", report.scenarios.size()}};
    put("manifest.json", manifest.dump(2) + "\n");

    fs::rename(tmp, out_dir);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

}  // namespace gridshare
