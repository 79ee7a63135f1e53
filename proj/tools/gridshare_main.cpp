#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "gridshare/billing.hpp"
#include "gridshare/feeder.hpp"
#include "gridshare/fleet.hpp"
#include "gridshare/forecast.hpp"
#include "gridshare/percolation.hpp"
#include "gridshare/rng.hpp"
#include "gridshare/study.hpp"
#include "gridshare/svg.hpp"
#include "json.hpp"

namespace {

using namespace gridshare;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<double> read_series_csv(const std::string& path) {
  // One value per line, or the last field of each comma-separated line;
  // a header line is skipped.
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open series '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find_last_of(',');
    std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      out.push_back(std::stod(field));
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw ParseError("bad series value '" + field + "'", lineno);
    }
  }
  if (out.empty()) throw DataError("series '" + path + "' is empty");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"prosumer coalition settlement and grid-resilience toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  // synth: fleet synthesis config -> fleet CSV
  auto* synth = app.add_subcommand("synth", "synthesize a fleet CSV from a config");
  std::string synth_config, synth_out = "-";
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", synth_config, "synthesis config JSON")->required();
  synth->add_option("--out", synth_out, "output CSV path ('-' for stdout)");
  synth->add_option("--seed", synth_seed, "override config seed");

  // partition: topology -> microgrid listing
  auto* part = app.add_subcommand("partition", "partition a feeder into microgrids");
  std::string part_topology, part_format = "csv";
  std::vector<std::string> part_open, part_close;
  part->add_option("--topology", part_topology, "topology JSON")->required();
  part->add_option("--open", part_open, "force these switches open");
  part->add_option("--close", part_close, "force these switches closed");
  part->add_option("--format", part_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  // settle: fleet + topology -> per-scenario settlement rows
  auto* settle = app.add_subcommand("settle", "settle scenarios and report costs");
  std::string settle_fleet, settle_topology, settle_scenarios = "everything",
              settle_out = "-";
  settle->add_option("--fleet", settle_fleet, "fleet CSV")->required();
  settle->add_option("--topology", settle_topology, "topology JSON")->required();
  settle->add_option("--scenarios", settle_scenarios, "singles|pairs|all|everything");
  settle->add_option("--out", settle_out, "output CSV path ('-' for stdout)");

  // resilience: series -> percolation curve
  auto* resil = app.add_subcommand("resilience", "percolation threshold of a series");
  std::string resil_series, resil_out = "-", resil_svg;
  int resil_trials = 1000;
  std::uint64_t resil_seed = 0;
  resil->add_option("--series", resil_series, "series CSV (one value per line)")->required();
  resil->add_option("--trials", resil_trials, "Monte Carlo trials");
  resil->add_option("--seed", resil_seed, "RNG seed");
  resil->add_option("--out", resil_out, "curve CSV path ('-' for stdout)");
  resil->add_option("--svg", resil_svg, "also write a curve plot here");

  // forecast: series -> holdout forecast + metrics
  auto* fore = app.add_subcommand("forecast", "fit a model and score a holdout window");
  std::string fore_series, fore_out = "-";
  int fore_train = 300, fore_holdout = 65, fore_trials = 1000;
  std::uint64_t fore_seed = 0;
  fore->add_option("--series", fore_series, "series CSV (one value per line)")->required();
  fore->add_option("--train", fore_train, "training prefix length");
  fore->add_option("--holdout", fore_holdout, "holdout length");
  fore->add_option("--trials", fore_trials, "trials for the predicted-window threshold");
  fore->add_option("--seed", fore_seed, "RNG seed");
  fore->add_option("--out", fore_out, "forecast CSV path ('-' for stdout)");

  // study: config -> full bundle
  auto* study = app.add_subcommand("study", "run the full pipeline into a bundle directory");
  std::string study_config, study_out;
  std::optional<std::uint64_t> study_seed;
  std::optional<int> study_trials;
  std::string study_scenarios, study_format = "csv";
  study->add_option("--config", study_config, "study config or manifest JSON")->required();
  study->add_option("--out", study_out, "output bundle directory")->required();
  study->add_option("--seed", study_seed, "override config seed");
  study->add_option("--trials", study_trials, "override config trials");
  study->add_option("--scenarios", study_scenarios, "override scenario selection")
      ->check(CLI::IsMember({"singles", "pairs", "all", "everything"}));
  study->add_option("--format", study_format, "csv|json (report written to stdout too)")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  auto emit = [](const std::string& target, const std::string& text) {
    if (target == "-")
      std::cout << text;
    else
      spill(target, text);
  };

  if (synth->parsed()) {
    FleetSynthesisSpec spec = synthesis_spec_from_json_text(slurp(synth_config));
    if (synth_seed) spec.seed = *synth_seed;
    std::vector<HouseProfile> fleet = synthesize_fleet(spec, spec.seed);
    std::ostringstream csv;
    emit_fleet(fleet, csv);
    emit(synth_out, csv.str());
    return 0;
  }

  if (part->parsed()) {
    FeederGraph g = load_topology(part_topology);
    MicrogridPartition p = partition(g, resolve_switch_states(g, part_open, part_close));
    auto pairs = neighboring_pairs(g, p);
    if (part_format == "json") {
      nlohmann::json j;
      for (const Microgrid& mg : p.microgrids)
        j["microgrids"].push_back(
            {{"label", mg.label}, {"nodes", mg.nodes}, {"houses", mg.house_ids}});
      for (auto [a, b] : pairs)
        j["neighboring_pairs"].push_back({p.microgrids[a].label, p.microgrids[b].label});
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "microgrid,nodes,houses\n";
      for (const Microgrid& mg : p.microgrids)
        std::cout << mg.label << "," << mg.nodes.size() << "," << mg.house_ids.size() << "\n";
      for (auto [a, b] : pairs)
        std::cout << "pair," << p.microgrids[a].label << "," << p.microgrids[b].label << "\n";
    }
    return 0;
  }

  if (settle->parsed()) {
    std::vector<HouseProfile> fleet = load_fleet_csv(settle_fleet);
    FeederGraph g = load_topology(settle_topology);
    MicrogridPartition p = partition_default(g);
    auto scenarios = filter_scenarios(scenario_set(p, neighboring_pairs(g, p)), settle_scenarios);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < fleet.size(); ++i) index[fleet[i].id] = i;

    TariffSchedule tariff = default_tariff();
    std::string out =
        "scenario,houses,cost_without_p2p,cost_with_p2p,savings,savings_pct,"
        "grid_kwh_without,grid_kwh_with,pt_without,pt_with\n";
    for (const Scenario& sc : scenarios) {
      std::vector<HouseProfile> members;
      for (const std::string& id : sc.house_ids) {
        auto it = index.find(id);
        if (it == index.end())
          throw DataError("scenario " + sc.label + " references house '" + id +
                          "' absent from the fleet");
        members.push_back(fleet[it->second]);
      }
      AnnualSummary s =
          annual_summary(aggregate_fleet_daily(members, tariff), tariff, sc.label);
      long long without = std::llround(s.cost_without_p2p);
      long long with = std::llround(s.cost_with_p2p);
      char pct[32];
      std::snprintf(pct, sizeof pct, "%.2f", s.savings_pct);
      out += s.scenario + "," + std::to_string(s.houses) + "," + std::to_string(without) + "," +
             std::to_string(with) + "," + std::to_string(without - with) + "," + pct + "," +
             std::to_string(std::llround(s.grid_kwh_without)) + "," +
             std::to_string(std::llround(s.grid_kwh_with)) + ",,\n";
    }
    emit(settle_out, out);
    return 0;
  }

  if (resil->parsed()) {
    std::vector<double> series = read_series_csv(resil_series);
    PercolationCurve curve =
        percolation_curve(build_visibility(series), resil_trials, resil_seed, threads);
    std::ostringstream csv;
    write_curve_csv(curve, csv);
    emit(resil_out, csv.str());
    if (!resil_svg.empty())
      spill(resil_svg,
            svg_line_chart("Percolation curve",
                           {{"strength", curve.strength}, {"susceptibility", curve.susceptibility}},
                           "removal fraction", "normalized", true));
    return 0;
  }

  if (fore->parsed()) {
    std::vector<double> series = read_series_csv(fore_series);
    ForecastSplit split;
    split.train_len = fore_train;
    split.holdout_len = fore_holdout;
    split.scenario = "series";
    PredictionReport rep = predict_grid_energy(series, split, fore_trials, fore_seed, threads);
    emit(fore_out, forecast_csv_text(rep));
    std::cerr << "order (p,d,q) = (" << rep.order.p << "," << rep.order.d << "," << rep.order.q
              << "), predicted-window threshold " << rep.predicted_window_pt << "\n";
    return 0;
  }

  if (study->parsed()) {
    StudyConfig config = load_study_config(study_config);
    if (study_seed) config.seed = *study_seed;
    if (study_trials) config.trials = *study_trials;
    if (!study_scenarios.empty()) config.scenario_mode = study_scenarios;
    StudyReport report = run_study(config, threads);
    write_study_bundle(report, config, study_out);
    if (study_format == "json") {
      std::cout << slurp((std::filesystem::path(study_out) / "report.json").string());
    } else {
      std::cout << report_csv_text(report);
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
