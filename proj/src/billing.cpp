#include "gridshare/billing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace gridshare {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

struct Totals {
  double peak_cons = 0.0;
  double offpeak_cons = 0.0;
  double peak_gen = 0.0;
  double offpeak_gen = 0.0;
  double storage = 0.0;

  void add(const DailyEnergy& e) {
    peak_cons += e.peak_consumption;
    offpeak_cons += e.offpeak_consumption;
    peak_gen += e.peak_generation;
    offpeak_gen += e.offpeak_generation;
    storage += e.storage;
  }
};

CostBreakdown cost_of(const Totals& t, const TariffSchedule& tariff) {
  CostBreakdown c;
  c.peak_purchase = tariff.peak_buy * pos(t.peak_cons - t.storage - t.peak_gen);
  c.peak_credit = tariff.peak_sell * pos(t.storage + t.peak_gen - t.peak_cons);
  c.offpeak_purchase = tariff.offpeak_buy * pos(t.offpeak_cons + t.storage - t.offpeak_gen);
  c.offpeak_credit = tariff.offpeak_sell * pos(t.offpeak_gen - t.offpeak_cons - t.storage);
  c.total = c.peak_purchase - c.peak_credit + c.offpeak_purchase - c.offpeak_credit;
  return c;
}

void check_day(const std::vector<DailyEnergy>& day) {
  if (day.empty()) throw DataError("settlement needs at least one house");
  for (const DailyEnergy& e : day)
    if (e.day_index != day.front().day_index)
      throw DataError("settlement entries span different days (" +
                      std::to_string(day.front().day_index) + " vs " +
                      std::to_string(e.day_index) + ")");
}

}  // namespace

const char* regime_name(SettlementRegime r) {
  switch (r) {
    case SettlementRegime::import_import: return "import_import";
    case SettlementRegime::export_import: return "export_import";
    case SettlementRegime::import_export: return "import_export";
    case SettlementRegime::export_export: return "export_export";
  }
  return "?";
}

double GridEnergySeries::total() const {
  return std::accumulate(daily_kwh.begin(), daily_kwh.end(), 0.0);
}

CostBreakdown standalone_cost(const DailyEnergy& house, const TariffSchedule& tariff) {
  tariff.validate();
  Totals t;
  t.add(house);
  return cost_of(t, tariff);
}

CostBreakdown coalition_cost(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff) {
  tariff.validate();
  check_day(day);
  Totals t;
  for (const DailyEnergy& e : day) t.add(e);
  return cost_of(t, tariff);
}

AllocationResult allocate(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff) {
  tariff.validate();
  check_day(day);
  Totals t;
  for (const DailyEnergy& e : day) t.add(e);

  bool peak_imports = t.peak_cons >= t.storage + t.peak_gen;
  bool offpeak_imports = t.offpeak_cons + t.storage >= t.offpeak_gen;

  AllocationResult r;
  r.regime = peak_imports
                 ? (offpeak_imports ? SettlementRegime::import_import : SettlementRegime::import_export)
                 : (offpeak_imports ? SettlementRegime::export_import : SettlementRegime::export_export);
  double peak_rate = peak_imports ? tariff.peak_buy : tariff.peak_sell;
  double offpeak_rate = offpeak_imports ? tariff.offpeak_buy : tariff.offpeak_sell;

  r.payments.reserve(day.size());
  double sum = 0.0;
  for (const DailyEnergy& e : day) {
    double pay = peak_rate * (e.peak_consumption - e.storage - e.peak_generation) +
                 offpeak_rate * (e.offpeak_consumption + e.storage - e.offpeak_generation);
    r.payments.push_back(pay);
    sum += pay;
  }
  r.total = sum;
  return r;
}

CoreCheck check_core(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff,
                     double tolerance) {
  check_day(day);
  int n = static_cast<int>(day.size());
  if (n > 16)
    throw CapabilityError("exhaustive core check is capped at 16 houses, got " + std::to_string(n));

  AllocationResult alloc = allocate(day, tariff);

  CoreCheck verdict;
  verdict.worst_excess = -std::numeric_limits<double>::infinity();
  unsigned full = (1u << n) - 1u;
  for (unsigned mask = 1; mask <= full; ++mask) {
    Totals t;
    double paid = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        t.add(day[i]);
        paid += alloc.payments[i];
      }
    }
    double excess = paid - cost_of(t, tariff).total;
    if (excess > verdict.worst_excess) {
      verdict.worst_excess = excess;
      verdict.worst_coalition.clear();
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) verdict.worst_coalition.push_back(i);
    }
  }
  verdict.in_core = verdict.worst_excess <= tolerance;
  return verdict;
}

SubadditivityCheck check_subadditivity(const std::vector<DailyEnergy>& a,
                                       const std::vector<DailyEnergy>& b,
                                       const TariffSchedule& tariff, double tolerance) {
  std::set<std::string> seen;
  for (const DailyEnergy& d : a) seen.insert(d.house_id);
  for (const DailyEnergy& d : b)
    if (!seen.insert(d.house_id).second)
      throw DataError("subadditivity check requires disjoint pools; house '" + d.house_id +
                      "' appears on both sides");

  SubadditivityCheck verdict;
  verdict.cost_a = a.empty() ? 0.0 : coalition_cost(a, tariff).total;
  verdict.cost_b = b.empty() ? 0.0 : coalition_cost(b, tariff).total;
  std::vector<DailyEnergy> merged = a;
  merged.insert(merged.end(), b.begin(), b.end());
  verdict.cost_union = merged.empty() ? 0.0 : coalition_cost(merged, tariff).total;
  verdict.holds = verdict.cost_a + verdict.cost_b >= verdict.cost_union - tolerance;
  return verdict;
}

GridEnergySeries grid_energy(const std::vector<std::vector<DailyEnergy>>& by_day,
                             const TariffSchedule& tariff, bool with_trading) {
  tariff.validate();
  GridEnergySeries s;
  s.daily_kwh.reserve(by_day.size());
  for (const auto& day : by_day) {
    check_day(day);
    double drawn = 0.0;
    if (with_trading) {
      Totals t;
      for (const DailyEnergy& e : day) t.add(e);
      drawn = pos(t.peak_cons - t.storage - t.peak_gen) +
              pos(t.offpeak_cons + t.storage - t.offpeak_gen);
    } else {
      for (const DailyEnergy& e : day)
        drawn += pos(e.peak_consumption - e.storage - e.peak_generation) +
                 pos(e.offpeak_consumption + e.storage - e.offpeak_generation);
    }
    s.daily_kwh.push_back(drawn);
  }
  return s;
}

AnnualSummary annual_summary(const std::vector<std::vector<DailyEnergy>>& by_day,
                             const TariffSchedule& tariff, const std::string& scenario_label) {
  if (by_day.empty()) throw DataError("summary needs at least one day");
  const auto& first = by_day.front();
  check_day(first);

  AnnualSummary s;
  s.scenario = scenario_label;
  s.houses = static_cast<int>(first.size());
  s.house_payments.reserve(first.size());
  for (const DailyEnergy& e : first) s.house_payments.emplace_back(e.house_id, 0.0);

  for (const auto& day : by_day) {
    if (day.size() != first.size()) throw DataError("day with mismatched house count in summary input");
    for (std::size_t i = 0; i < day.size(); ++i)
      if (day[i].house_id != s.house_payments[i].first)
        throw DataError("house order changes between days in summary input");

    for (const DailyEnergy& e : day) s.cost_without_p2p += standalone_cost(e, tariff).total;
    AllocationResult alloc = allocate(day, tariff);
    s.cost_with_p2p += alloc.total;
    for (std::size_t i = 0; i < day.size(); ++i) s.house_payments[i].second += alloc.payments[i];
  }

  s.savings = s.cost_without_p2p - s.cost_with_p2p;
  s.savings_pct = s.cost_without_p2p != 0.0 ? 100.0 * s.savings / s.cost_without_p2p : 0.0;
  s.grid_kwh_without = grid_energy(by_day, tariff, false).total();
  s.grid_kwh_with = grid_energy(by_day, tariff, true).total();
  return s;
}

}  // namespace gridshare
