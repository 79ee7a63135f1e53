#pragma once

// Random settlement instances for property tests. Kept header-only so the
// unit suites and the acceptance harness draw from the same distributions.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "gridshare/billing.hpp"
#include "gridshare/rng.hpp"

namespace testgen {

// Four sorted uniform draws give lambda_h >= mu_h >= lambda_l >= mu_l >= 0,
// which is the full validity precondition of the settlement formulas.
inline gridshare::TariffSchedule random_tariff(gridshare::Rng& rng) {
  std::array<double, 4> p{rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                          rng.uniform(0.0, 1.0)};
  std::sort(p.begin(), p.end(), std::greater<>());
  gridshare::TariffSchedule t;
  t.peak_buy = p[0];
  t.peak_sell = p[1];
  t.offpeak_buy = p[2];
  t.offpeak_sell = p[3];
  return t;
}

inline gridshare::DailyEnergy random_house(gridshare::Rng& rng, int index, int day = 0,
                                           double energy_cap = 100.0) {
  gridshare::DailyEnergy d;
  d.house_id = "r" + std::to_string(index);
  d.day_index = day;
  d.peak_consumption = rng.uniform(0.0, energy_cap);
  d.offpeak_consumption = rng.uniform(0.0, energy_cap);
  d.peak_generation = rng.uniform(0.0, energy_cap);
  d.offpeak_generation = rng.uniform(0.0, energy_cap);
  d.storage = rng.uniform(0.0, energy_cap);
  return d;
}

inline std::vector<gridshare::DailyEnergy> random_day(gridshare::Rng& rng, int houses, int day = 0,
                                                      double energy_cap = 100.0) {
  std::vector<gridshare::DailyEnergy> out;
  out.reserve(houses);
  for (int i = 0; i < houses; ++i) out.push_back(random_house(rng, i, day, energy_cap));
  return out;
}

}  // namespace testgen
