#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridshare/errors.hpp"

namespace gridshare {

// Time-of-use tariff. Buy prices (lambda) and sell prices (mu) per kWh, split
// into a daily peak window [peak_start_hour, peak_end_hour) and off-peak rest.
struct TariffSchedule {
  double peak_buy = 0.54;     // lambda_h
  double offpeak_buy = 0.22;  // lambda_l
  double peak_sell = 0.30;    // mu_h
  double offpeak_sell = 0.13; // mu_l
  double peak_start_hour = 8.0;
  double peak_end_hour = 20.0;

  // Enforces peak_buy >= peak_sell >= offpeak_buy >= offpeak_sell >= 0.
  // Everything downstream (individual rationality, subadditivity, core
  // membership) leans on that ordering.
  void validate() const;
};

TariffSchedule default_tariff();

// One house with aligned consumption/generation series on a fixed interval
// grid. t_index runs over days * samples_per_day() samples.
struct HouseProfile {
  std::string id;
  double floor_area_m2 = 0.0;
  double panel_area_m2 = 0.0;
  double storage_kwh = 0.0;
  double interval_hours = 4.0;
  std::vector<double> consumption_kwh;
  std::vector<double> generation_kwh;

  int samples_per_day() const;
  int days() const;
  void validate() const;
};

// Daily aggregate for one house: the five quantities the settlement works on.
struct DailyEnergy {
  std::string house_id;
  int day_index = 0;
  double peak_consumption = 0.0;     // H_h
  double offpeak_consumption = 0.0;  // H_l
  double peak_generation = 0.0;      // G_h
  double offpeak_generation = 0.0;   // G_l
  double storage = 0.0;              // B
};

struct FleetSynthesisSpec {
  int houses = 100;
  int days = 365;
  double interval_hours = 4.0;
  std::array<double, 2> floor_area_range = {80.0, 200.0};
  std::array<double, 2> storage_range_kwh = {3.0, 6.0};
  double load_scale = 0.156;    // kWh per m2 of floor per day, before texture
  double solar_scale = 1.75;    // kWh per m2 of panel per day, before texture
  double panel_fraction = 0.62;  // share of houses that own panels at all
  double jitter = 0.05;          // relative spread of panel sizing around 10% of floor
  std::uint64_t seed = 0;

  void validate() const;
};

// Strict schema: unknown keys are rejected, ranges must be two-element arrays.
FleetSynthesisSpec synthesis_spec_from_json_text(const std::string& text);
std::string synthesis_spec_to_json_text(const FleetSynthesisSpec& spec);

// Deterministic pure function of (spec, seed): same inputs, same fleet,
// regardless of platform or thread count.
std::vector<HouseProfile> synthesize_fleet(const FleetSynthesisSpec& spec, std::uint64_t seed);

// Long-format CSV, one row per (house, t_index), houses in given order,
// t ascending within a house. emit -> ingest -> emit is byte-identical.
void emit_fleet(const std::vector<HouseProfile>& fleet, std::ostream& out);
std::vector<HouseProfile> ingest_fleet(std::istream& in, double interval_hours = 4.0);

std::vector<HouseProfile> load_fleet_csv(const std::string& path, double interval_hours = 4.0);
void save_fleet_csv(const std::vector<HouseProfile>& fleet, const std::string& path);

// Collapses one house to per-day peak/off-peak sums under the tariff's window.
// A sample belongs to the peak window iff its start hour lies in it.
std::vector<DailyEnergy> aggregate_daily(const HouseProfile& house, const TariffSchedule& tariff);

// [day][house] layout, the shape the settlement routines consume.
// Throws DataError unless every house covers the same number of days.
std::vector<std::vector<DailyEnergy>> aggregate_fleet_daily(const std::vector<HouseProfile>& fleet,
                                                            const TariffSchedule& tariff);

}  // namespace gridshare
