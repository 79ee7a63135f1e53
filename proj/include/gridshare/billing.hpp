#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridshare/fleet.hpp"

namespace gridshare {

// Daily bill under a two-window tariff. Purchases are billed at buy prices,
// surplus exports are credited at sell prices; total = purchases - credits.
struct CostBreakdown {
  double peak_purchase = 0.0;
  double peak_credit = 0.0;
  double offpeak_purchase = 0.0;
  double offpeak_credit = 0.0;
  double total = 0.0;
};

// Which side of the meter the pool ends up on in each window. Payments are
// linear in each house's quantities once the regime is fixed, so the split of
// the pool bill is decided entirely by these two aggregate signs.
enum class SettlementRegime {
  import_import,  // buys peak, buys off-peak
  export_import,  // sells peak surplus, buys off-peak
  import_export,  // buys peak, sells off-peak surplus
  export_export,  // sells in both windows
};

const char* regime_name(SettlementRegime r);

struct AllocationResult {
  std::vector<double> payments;  // one per house, input order; sums to total
  double total = 0.0;            // pooled bill for the day
  SettlementRegime regime = SettlementRegime::import_import;
};

struct CoreCheck {
  bool in_core = true;
  double worst_excess = 0.0;          // max over coalitions of paid - standalone
  std::vector<int> worst_coalition;   // indices into the input day
};

struct GridEnergySeries {
  std::vector<double> daily_kwh;
  double total() const;
};

// Bill for one house settling alone. Storage is charged off-peak and spent
// against peak demand, so B enters peak as supply and off-peak as load.
CostBreakdown standalone_cost(const DailyEnergy& house, const TariffSchedule& tariff);

// Bill for a pool of houses settling as one meter: same formula on the sums.
// Every entry must describe the same day.
CostBreakdown coalition_cost(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff);

// Splits the pooled bill across members. Each window is priced at the pool's
// marginal rate for that window (buy when the pool imports, sell when it
// exports, imports winning ties), applied to each member's own net position.
AllocationResult allocate(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff);

// Exhaustive stability check of the allocation: no subset of houses can do
// better by settling separately. Cost is 2^N, so N is capped at 16
// (CapabilityError beyond). tolerance absorbs float noise in the comparisons.
CoreCheck check_core(const std::vector<DailyEnergy>& day, const TariffSchedule& tariff,
                     double tolerance = 1e-9);

struct SubadditivityCheck {
  bool holds = true;
  double cost_a = 0.0;
  double cost_b = 0.0;
  double cost_union = 0.0;
};

// Merging two disjoint pools (no shared house id) never increases the bill.
// Either side may be empty (costing zero, so the check degenerates to
// equality); a shared id is a DataError.
SubadditivityCheck check_subadditivity(const std::vector<DailyEnergy>& a,
                                       const std::vector<DailyEnergy>& b,
                                       const TariffSchedule& tariff, double tolerance = 1e-9);

// Daily energy drawn from the feeder. Pooled settlement nets members against
// each other before rectifying; standalone settlement rectifies per house.
GridEnergySeries grid_energy(const std::vector<std::vector<DailyEnergy>>& by_day,
                             const TariffSchedule& tariff, bool with_trading);

struct AnnualSummary {
  std::string scenario;
  int houses = 0;
  double cost_without_p2p = 0.0;
  double cost_with_p2p = 0.0;
  double savings = 0.0;
  double savings_pct = 0.0;
  double grid_kwh_without = 0.0;
  double grid_kwh_with = 0.0;
  // Per-house allocated totals over the whole span, input order.
  std::vector<std::pair<std::string, double>> house_payments;
};

// Full-span roll-up of both settlement modes for one scenario.
AnnualSummary annual_summary(const std::vector<std::vector<DailyEnergy>>& by_day,
                             const TariffSchedule& tariff, const std::string& scenario_label);

}  // namespace gridshare
