// Python face of the core library.  Thin by design: conversions and
// docstrings live here, all behavior stays in the C++ core.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gridshare/billing.hpp"
#include "gridshare/feeder.hpp"
#include "gridshare/fleet.hpp"
#include "gridshare/forecast.hpp"
#include "gridshare/percolation.hpp"
#include "gridshare/study.hpp"
#include "gridshare/visibility.hpp"

namespace py = pybind11;
using namespace gridshare;

PYBIND11_MODULE(_core, m) {
  m.doc() = "prosumer coalition settlement and grid-resilience core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<TariffSchedule>(m, "TariffSchedule")
      .def(py::init<>())
      .def_readwrite("peak_buy", &TariffSchedule::peak_buy)
      .def_readwrite("offpeak_buy", &TariffSchedule::offpeak_buy)
      .def_readwrite("peak_sell", &TariffSchedule::peak_sell)
      .def_readwrite("offpeak_sell", &TariffSchedule::offpeak_sell)
      .def_readwrite("peak_start_hour", &TariffSchedule::peak_start_hour)
      .def_readwrite("peak_end_hour", &TariffSchedule::peak_end_hour)
      .def("validate", &TariffSchedule::validate);
  m.def("default_tariff", &default_tariff);

  py::class_<DailyEnergy>(m, "DailyEnergy")
      .def(py::init<>())
      .def(py::init([](std::string id, double hh, double hl, double gh, double gl, double b) {
             DailyEnergy d;
             d.house_id = std::move(id);
             d.peak_consumption = hh;
             d.offpeak_consumption = hl;
             d.peak_generation = gh;
             d.offpeak_generation = gl;
             d.storage = b;
             return d;
           }),
           py::arg("house_id"), py::arg("peak_consumption"), py::arg("offpeak_consumption"),
           py::arg("peak_generation"), py::arg("offpeak_generation"), py::arg("storage"))
      .def_readwrite("house_id", &DailyEnergy::house_id)
      .def_readwrite("day_index", &DailyEnergy::day_index)
      .def_readwrite("peak_consumption", &DailyEnergy::peak_consumption)
      .def_readwrite("offpeak_consumption", &DailyEnergy::offpeak_consumption)
      .def_readwrite("peak_generation", &DailyEnergy::peak_generation)
      .def_readwrite("offpeak_generation", &DailyEnergy::offpeak_generation)
      .def_readwrite("storage", &DailyEnergy::storage);

  auto breakdown_dict = [](const CostBreakdown& c) {
    py::dict d;
    d["peak_purchase"] = c.peak_purchase;
    d["peak_credit"] = c.peak_credit;
    d["offpeak_purchase"] = c.offpeak_purchase;
    d["offpeak_credit"] = c.offpeak_credit;
    d["total"] = c.total;
    return d;
  };
  m.def(
      "standalone_cost",
      [breakdown_dict](const DailyEnergy& day, const TariffSchedule& tariff) {
        return breakdown_dict(standalone_cost(day, tariff));
      },
      py::arg("day"), py::arg("tariff"),
      "Net-metered daily bill for one house; returns the window breakdown.");
  m.def(
      "coalition_cost",
      [breakdown_dict](const std::vector<DailyEnergy>& day, const TariffSchedule& tariff) {
        return breakdown_dict(coalition_cost(day, tariff));
      },
      py::arg("day"), py::arg("tariff"),
      "Pooled daily bill for a coalition; returns the window breakdown.");
  m.def(
      "allocate",
      [](const std::vector<DailyEnergy>& day, const TariffSchedule& tariff) {
        AllocationResult r = allocate(day, tariff);
        return py::make_tuple(r.payments, r.total, regime_name(r.regime));
      },
      py::arg("day"), py::arg("tariff"),
      "Split the coalition's daily cost into per-house payments; returns "
      "(payments, total, regime).");
  m.def(
      "check_core",
      [](const std::vector<DailyEnergy>& day, const TariffSchedule& tariff, double tol) {
        CoreCheck c = check_core(day, tariff, tol);
        return py::make_tuple(c.in_core, c.worst_excess, c.worst_coalition);
      },
      py::arg("day"), py::arg("tariff"), py::arg("tol") = 1e-9);
  m.def(
      "check_subadditivity",
      [](const std::vector<DailyEnergy>& a, const std::vector<DailyEnergy>& b,
         const TariffSchedule& tariff) {
        SubadditivityCheck c = check_subadditivity(a, b, tariff);
        return py::make_tuple(c.holds, c.cost_a, c.cost_b, c.cost_union);
      },
      py::arg("a"), py::arg("b"), py::arg("tariff"));

  py::class_<FleetSynthesisSpec>(m, "FleetSynthesisSpec")
      .def(py::init<>())
      .def_readwrite("houses", &FleetSynthesisSpec::houses)
      .def_readwrite("days", &FleetSynthesisSpec::days)
      .def_readwrite("interval_hours", &FleetSynthesisSpec::interval_hours)
      .def_readwrite("floor_area_range", &FleetSynthesisSpec::floor_area_range)
      .def_readwrite("storage_range_kwh", &FleetSynthesisSpec::storage_range_kwh)
      .def_readwrite("load_scale", &FleetSynthesisSpec::load_scale)
      .def_readwrite("solar_scale", &FleetSynthesisSpec::solar_scale)
      .def_readwrite("panel_fraction", &FleetSynthesisSpec::panel_fraction)
      .def_readwrite("jitter", &FleetSynthesisSpec::jitter)
      .def_readwrite("seed", &FleetSynthesisSpec::seed);
  m.def("synthesize_fleet_csv",
        [](const FleetSynthesisSpec& spec) {
          std::ostringstream out;
          emit_fleet(synthesize_fleet(spec, spec.seed), out);
          return out.str();
        },
        py::arg("spec"), "Synthesize a fleet and return it as CSV text.");

  m.def(
      "build_visibility",
      [](const std::vector<double>& series) {
        VisibilityGraph g = build_visibility(series);
        return py::make_tuple(g.node_count, g.edges);
      },
      py::arg("series"),
      "Natural visibility graph of a series; returns (node_count, edge_list).");

  m.def(
      "percolation_curve",
      [](const std::vector<double>& series, int trials, std::uint64_t seed, int threads) {
        PercolationCurve c = percolation_curve(build_visibility(series), trials, seed, threads);
        py::dict d;
        d["removal_fraction"] = c.removal_fraction;
        d["strength"] = c.strength;
        d["susceptibility"] = c.susceptibility;
        d["threshold"] = c.threshold;
        return d;
      },
      py::arg("series"), py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("threads") = 0,
      "Bond-percolation curve of the series' visibility graph.");
  m.def(
      "resilience_of_series",
      [](const std::vector<double>& series, int trials, std::uint64_t seed, int threads) {
        return resilience_of_series(series, trials, seed, threads);
      },
      py::arg("series"), py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("threads") = 0,
      "Percolation threshold of the series' visibility graph.");

  m.def(
      "fit_forecast",
      [](const std::vector<double>& series, int train_len, int holdout_len) {
        if (train_len <= 0 || holdout_len <= 0 ||
            static_cast<std::size_t>(train_len) + static_cast<std::size_t>(holdout_len) >
                series.size())
          throw DataError("train/holdout split exceeds the series");
        std::vector<double> train(series.begin(), series.begin() + train_len);
        ArimaOrder order = select_order(train);
        ArimaModel model = fit_arima(train, order);
        std::vector<double> pred = forecast(model, holdout_len);
        std::vector<double> actual(series.begin() + train_len,
                                   series.begin() + train_len + holdout_len);
        ScoreResult s = score(actual, pred);
        py::dict d;
        d["order"] = py::make_tuple(order.p, order.d, order.q);
        d["predicted"] = pred;
        d["r2"] = s.r2;
        d["rmse"] = s.rmse;
        d["mae"] = s.mae;
        return d;
      },
      py::arg("series"), py::arg("train_len"), py::arg("holdout_len"),
      "Select an order, fit on the training prefix, forecast and score the holdout.");

  m.def(
      "run_study_bundle",
      [](const std::string& config_path, const std::string& out_dir, int threads) {
        StudyConfig config = load_study_config(config_path);
        StudyReport report = run_study(config, threads);
        write_study_bundle(report, config, out_dir);
        return report_csv_text(report);
      },
      py::arg("config_path"), py::arg("out_dir"), py::arg("threads") = 0,
      "Run the full pipeline from a config file into a bundle directory; "
      "returns the report CSV.");
}
