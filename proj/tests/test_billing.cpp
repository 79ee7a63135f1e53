#include <cmath>
#include <vector>

#include "doctest.h"
#include "gridshare/billing.hpp"
#include "gridshare/rng.hpp"
#include "support/random_instances.hpp"

using namespace gridshare;

namespace {

DailyEnergy de(std::string id, double peak_cons, double peak_gen, double storage,
               double offpeak_cons, double offpeak_gen, int day = 0) {
  DailyEnergy d;
  d.house_id = std::move(id);
  d.day_index = day;
  d.peak_consumption = peak_cons;
  d.peak_generation = peak_gen;
  d.storage = storage;
  d.offpeak_consumption = offpeak_cons;
  d.offpeak_generation = offpeak_gen;
  return d;
}

// The three documented example houses. X pairs with Y in the grid-energy and
// subadditivity narrative; Y pairs with Z in the allocation one.
const DailyEnergy kHouseX = de("x", 10, 4, 2, 5, 3);
const DailyEnergy kHouseY = de("y", 5, 10, 1, 4, 0);
const DailyEnergy kHouseZ = de("z", 10, 2, 1, 2, 0);

double plus_part(double v) { return v > 0.0 ? v : 0.0; }

// Straight-line transcription of the daily cost formula, independent of the
// library's breakdown bookkeeping.
double cost_oracle(const DailyEnergy& d, const TariffSchedule& t) {
  return t.peak_buy * plus_part(d.peak_consumption - d.storage - d.peak_generation) -
         t.peak_sell * plus_part(d.storage + d.peak_generation - d.peak_consumption) +
         t.offpeak_buy * plus_part(d.offpeak_consumption + d.storage - d.offpeak_generation) -
         t.offpeak_sell * plus_part(d.offpeak_generation - d.offpeak_consumption - d.storage);
}

DailyEnergy sum_of(const std::vector<DailyEnergy>& day) {
  DailyEnergy t;
  t.house_id = "pool";
  t.day_index = day.empty() ? 0 : day.front().day_index;
  for (const DailyEnergy& d : day) {
    t.peak_consumption += d.peak_consumption;
    t.peak_generation += d.peak_generation;
    t.storage += d.storage;
    t.offpeak_consumption += d.offpeak_consumption;
    t.offpeak_generation += d.offpeak_generation;
  }
  return t;
}

}  // namespace

TEST_SUITE("billing") {

TEST_CASE("null house costs zero") {
  CostBreakdown c = standalone_cost(DailyEnergy{}, default_tariff());
  CHECK(c.total == 0.0);
  CHECK(c.peak_purchase == 0.0);
  CHECK(c.peak_credit == 0.0);
  CHECK(c.offpeak_purchase == 0.0);
  CHECK(c.offpeak_credit == 0.0);
}

TEST_CASE("worked standalone examples") {
  TariffSchedule t = default_tariff();

  CostBreakdown x = standalone_cost(kHouseX, t);
  CHECK(x.total == doctest::Approx(3.04).epsilon(1e-12));
  CHECK(x.peak_purchase == doctest::Approx(0.54 * 4).epsilon(1e-12));
  CHECK(x.offpeak_purchase == doctest::Approx(0.22 * 4).epsilon(1e-12));
  CHECK(x.peak_credit == 0.0);
  CHECK(x.offpeak_credit == 0.0);

  CostBreakdown y = standalone_cost(kHouseY, t);
  CHECK(y.total == doctest::Approx(-0.70).epsilon(1e-12));
  CHECK(y.peak_credit == doctest::Approx(0.30 * 6).epsilon(1e-12));
  CHECK(y.offpeak_purchase == doctest::Approx(0.22 * 5).epsilon(1e-12));

  CostBreakdown z = standalone_cost(kHouseZ, t);
  CHECK(z.total == doctest::Approx(4.44).epsilon(1e-12));
}

TEST_CASE("breakdown invariants hold on random instances") {
  Rng rng(0xB111u);
  for (int trial = 0; trial < 1000; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    DailyEnergy d = testgen::random_house(rng, trial);
    CostBreakdown c = standalone_cost(d, t);
    CHECK(c.total ==
          doctest::Approx(c.peak_purchase - c.peak_credit + c.offpeak_purchase - c.offpeak_credit)
              .epsilon(1e-12));
    CHECK((c.peak_purchase == 0.0 || c.peak_credit == 0.0));
    CHECK((c.offpeak_purchase == 0.0 || c.offpeak_credit == 0.0));
    CHECK(c.total == doctest::Approx(cost_oracle(d, t)).epsilon(1e-9));
  }
}

TEST_CASE("singleton coalition equals standalone") {
  Rng rng(0xC0A1u);
  for (int trial = 0; trial < 200; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    DailyEnergy d = testgen::random_house(rng, trial);
    CHECK(coalition_cost({d}, t).total ==
          doctest::Approx(standalone_cost(d, t).total).epsilon(1e-12));
  }
}

TEST_CASE("worked coalition cost") {
  TariffSchedule t = default_tariff();
  CostBreakdown c = coalition_cost({kHouseY, kHouseZ}, t);
  // Aggregates (15, 12, 2, 6, 0): one surplus kWh short at peak, eight spare at
  // off-peak.
  CHECK(c.total == doctest::Approx(2.30).epsilon(1e-12));
  CHECK(c.peak_purchase == doctest::Approx(0.54 * 1).epsilon(1e-12));
  CHECK(c.offpeak_purchase == doctest::Approx(0.22 * 8).epsilon(1e-12));
  CHECK(c.peak_credit == 0.0);
  CHECK(c.offpeak_credit == 0.0);

  // Coalition cost is the standalone formula on the aggregate house.
  Rng rng(0xC0A2u);
  for (int trial = 0; trial < 200; ++trial) {
    TariffSchedule rt = testgen::random_tariff(rng);
    std::vector<DailyEnergy> day = testgen::random_day(rng, 1 + (trial % 7));
    CHECK(coalition_cost(day, rt).total ==
          doctest::Approx(standalone_cost(sum_of(day), rt).total).epsilon(1e-9));
  }
}

TEST_CASE("coalition rejects mixed days and empty pools") {
  TariffSchedule t = default_tariff();
  CHECK_THROWS_AS(coalition_cost({}, t), DataError);
  DailyEnergy other = kHouseZ;
  other.day_index = 3;
  CHECK_THROWS_AS(coalition_cost({kHouseY, other}, t), DataError);
  CHECK_THROWS_AS(allocate({kHouseY, other}, t), DataError);
}

TEST_CASE("worked allocation lands on the peak-import, offpeak-import branch") {
  AllocationResult r = allocate({kHouseY, kHouseZ}, default_tariff());
  CHECK(r.regime == SettlementRegime::import_import);
  CHECK(regime_name(r.regime) == std::string("import_import"));
  REQUIRE(r.payments.size() == 2);
  CHECK(r.payments[0] == doctest::Approx(-2.14).epsilon(1e-12));
  CHECK(r.payments[1] == doctest::Approx(4.44).epsilon(1e-12));
  CHECK(r.total == doctest::Approx(2.30).epsilon(1e-12));
  CHECK(r.payments[0] + r.payments[1] == doctest::Approx(r.total).epsilon(1e-12));
}

TEST_CASE("singleton allocation equals standalone on every branch") {
  TariffSchedule t = default_tariff();
  struct Case {
    DailyEnergy d;
    SettlementRegime regime;
  };
  // One instance per aggregate sign pattern.
  std::vector<Case> cases = {
      {de("a", 10, 1, 1, 5, 1), SettlementRegime::import_import},
      {de("b", 1, 10, 1, 5, 1), SettlementRegime::export_import},
      {de("c", 10, 1, 1, 1, 10), SettlementRegime::import_export},
      {de("d", 1, 10, 1, 1, 10), SettlementRegime::export_export},
  };
  for (const Case& c : cases) {
    AllocationResult r = allocate({c.d}, t);
    CHECK(r.regime == c.regime);
    REQUIRE(r.payments.size() == 1);
    CHECK(r.payments[0] ==
          doctest::Approx(standalone_cost(c.d, t).total).epsilon(1e-12));
  }
}

TEST_CASE("identical houses pay identical shares") {
  std::vector<DailyEnergy> day;
  for (int i = 0; i < 5; ++i) {
    DailyEnergy d = kHouseX;
    d.house_id = "c" + std::to_string(i);
    day.push_back(d);
  }
  AllocationResult r = allocate(day, default_tariff());
  for (double pay : r.payments)
    CHECK(pay == doctest::Approx(r.payments[0]).epsilon(1e-12));
}

TEST_CASE("budget balance, rationality, and regime signs over random instances") {
  Rng rng(0xA110Cu);
  for (int trial = 0; trial < 2000; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    std::vector<DailyEnergy> day = testgen::random_day(rng, 1 + static_cast<int>(rng.below(8)));
    AllocationResult r = allocate(day, t);

    double sum = 0.0;
    for (double p : r.payments) sum += p;
    CHECK(std::abs(sum - r.total) <= 1e-9);
    CHECK(r.total == doctest::Approx(coalition_cost(day, t).total).epsilon(1e-9));

    for (std::size_t i = 0; i < day.size(); ++i)
      CHECK(r.payments[i] <= standalone_cost(day[i], t).total + 1e-9);

    DailyEnergy agg = sum_of(day);
    bool peak_imports = agg.peak_consumption >= agg.storage + agg.peak_generation;
    bool offpeak_imports = agg.offpeak_consumption + agg.storage >= agg.offpeak_generation;
    SettlementRegime expected =
        peak_imports ? (offpeak_imports ? SettlementRegime::import_import
                                        : SettlementRegime::import_export)
                     : (offpeak_imports ? SettlementRegime::export_import
                                        : SettlementRegime::export_export);
    CHECK(r.regime == expected);
  }
}

TEST_CASE("allocation scales linearly with the instance") {
  Rng rng(0x5CA1Eu);
  TariffSchedule t = testgen::random_tariff(rng);
  std::vector<DailyEnergy> day = testgen::random_day(rng, 6);
  AllocationResult base = allocate(day, t);

  double k = 3.7;
  std::vector<DailyEnergy> scaled = day;
  for (DailyEnergy& d : scaled) {
    d.peak_consumption *= k;
    d.offpeak_consumption *= k;
    d.peak_generation *= k;
    d.offpeak_generation *= k;
    d.storage *= k;
  }
  AllocationResult big = allocate(scaled, t);
  CHECK(big.total == doctest::Approx(k * base.total).epsilon(1e-9));
  for (std::size_t i = 0; i < day.size(); ++i)
    CHECK(big.payments[i] == doctest::Approx(k * base.payments[i]).epsilon(1e-9));
}

TEST_CASE("aggregate ties settle as imports") {
  // Peak side exactly balanced: zero net either way, but the branch label must
  // read as an import.
  AllocationResult r = allocate({de("t", 5, 5, 0, 1, 0)}, default_tariff());
  CHECK(r.regime == SettlementRegime::import_import);
  CHECK(r.total == doctest::Approx(0.22 * 1).epsilon(1e-12));

  // Both windows balanced.
  AllocationResult r2 = allocate({de("t2", 5, 5, 0, 3, 3)}, default_tariff());
  CHECK(r2.regime == SettlementRegime::import_import);
  CHECK(r2.total == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("worked instance is in the core") {
  CoreCheck v = check_core({kHouseY, kHouseZ}, default_tariff());
  CHECK(v.in_core);
  // The {z} coalition pays exactly its standalone cost, so the worst excess
  // sits at zero.
  CHECK(v.worst_excess == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("random five-house instances stay in the core") {
  Rng rng(0xC03Eu);
  for (int trial = 0; trial < 200; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    std::vector<DailyEnergy> day = testgen::random_day(rng, 5);
    CoreCheck v = check_core(day, t);
    CHECK(v.in_core);
    CHECK(v.worst_excess <= 1e-9);
  }
}

TEST_CASE("core check caps the pool size at 16") {
  Rng rng(0xCAFEu);
  TariffSchedule t = testgen::random_tariff(rng);
  std::vector<DailyEnergy> sixteen = testgen::random_day(rng, 16);
  CHECK(check_core(sixteen, t).in_core);
  std::vector<DailyEnergy> seventeen = testgen::random_day(rng, 17);
  CHECK_THROWS_AS(check_core(seventeen, t), CapabilityError);
}

TEST_CASE("subadditivity on the worked split") {
  SubadditivityCheck v = check_subadditivity({kHouseX}, {kHouseY}, default_tariff());
  CHECK(v.holds);
  CHECK(v.cost_a == doctest::Approx(3.04).epsilon(1e-12));
  CHECK(v.cost_b == doctest::Approx(-0.70).epsilon(1e-12));
  CHECK(v.cost_union == doctest::Approx(1.38).epsilon(1e-12));

  SubadditivityCheck v2 = check_subadditivity({kHouseY}, {kHouseZ}, default_tariff());
  CHECK(v2.holds);
  CHECK(v2.cost_union == doctest::Approx(2.30).epsilon(1e-12));
}

TEST_CASE("subadditivity with an empty side degenerates to equality") {
  SubadditivityCheck v = check_subadditivity({}, {kHouseY, kHouseZ}, default_tariff());
  CHECK(v.holds);
  CHECK(v.cost_a == 0.0);
  CHECK(v.cost_b == doctest::Approx(v.cost_union).epsilon(1e-12));
}

TEST_CASE("subadditivity requires disjoint pools") {
  CHECK_THROWS_AS(check_subadditivity({kHouseY}, {kHouseY}, default_tariff()), DataError);
}

TEST_CASE("random disjoint splits never violate subadditivity") {
  Rng rng(0x5AB5u);
  for (int trial = 0; trial < 1000; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    std::vector<DailyEnergy> day = testgen::random_day(rng, 2 + static_cast<int>(rng.below(10)));
    std::vector<DailyEnergy> a, b;
    for (const DailyEnergy& d : day) (rng.below(2) ? a : b).push_back(d);
    CHECK(check_subadditivity(a, b, t).holds);
  }
}

TEST_CASE("worked grid energy") {
  TariffSchedule t = default_tariff();

  GridEnergySeries without_xy = grid_energy({{kHouseX, kHouseY}}, t, false);
  GridEnergySeries with_xy = grid_energy({{kHouseX, kHouseY}}, t, true);
  REQUIRE(without_xy.daily_kwh.size() == 1);
  CHECK(without_xy.daily_kwh[0] == doctest::Approx(13.0).epsilon(1e-12));
  CHECK(with_xy.daily_kwh[0] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(without_xy.total() == doctest::Approx(13.0).epsilon(1e-12));

  GridEnergySeries without_yz = grid_energy({{kHouseY, kHouseZ}}, t, false);
  GridEnergySeries with_yz = grid_energy({{kHouseY, kHouseZ}}, t, true);
  CHECK(without_yz.daily_kwh[0] == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(with_yz.daily_kwh[0] == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("pooling never draws more than settling alone") {
  Rng rng(0x62D1u);
  for (int trial = 0; trial < 300; ++trial) {
    TariffSchedule t = testgen::random_tariff(rng);
    std::vector<std::vector<DailyEnergy>> by_day;
    int houses = 1 + static_cast<int>(rng.below(6));
    for (int day = 0; day < 4; ++day) by_day.push_back(testgen::random_day(rng, houses, day));
    GridEnergySeries with = grid_energy(by_day, t, true);
    GridEnergySeries without = grid_energy(by_day, t, false);
    for (std::size_t d = 0; d < by_day.size(); ++d) {
      CHECK(with.daily_kwh[d] >= 0.0);
      CHECK(with.daily_kwh[d] <= without.daily_kwh[d] + 1e-9);
    }
  }

  // No generation or storage anywhere: pooling cannot help.
  std::vector<DailyEnergy> day = {de("a", 4, 0, 0, 2, 0), de("b", 7, 0, 0, 1, 0)};
  CHECK(grid_energy({day}, default_tariff(), true).daily_kwh[0] ==
        doctest::Approx(grid_energy({day}, default_tariff(), false).daily_kwh[0])
            .epsilon(1e-12));
}

TEST_CASE("annual summary identities") {
  Rng rng(0xA22Au);
  TariffSchedule t = testgen::random_tariff(rng);
  std::vector<std::vector<DailyEnergy>> by_day;
  for (int day = 0; day < 5; ++day) by_day.push_back(testgen::random_day(rng, 3, day));

  AnnualSummary s = annual_summary(by_day, t, "POOL");
  CHECK(s.scenario == "POOL");
  CHECK(s.houses == 3);

  double standalone = 0.0, pooled = 0.0;
  for (const auto& day : by_day) {
    for (const DailyEnergy& d : day) standalone += standalone_cost(d, t).total;
    pooled += coalition_cost(day, t).total;
  }
  CHECK(s.cost_without_p2p == doctest::Approx(standalone).epsilon(1e-9));
  CHECK(s.cost_with_p2p == doctest::Approx(pooled).epsilon(1e-9));
  CHECK(s.savings == doctest::Approx(standalone - pooled).epsilon(1e-9));
  CHECK(s.savings_pct ==
        doctest::Approx(100.0 * (standalone - pooled) / standalone).epsilon(1e-6));
  CHECK(s.savings >= -1e-9);

  double paid = 0.0;
  REQUIRE(s.house_payments.size() == 3);
  for (const auto& [id, total] : s.house_payments) paid += total;
  CHECK(paid == doctest::Approx(pooled).epsilon(1e-9));

  CHECK(s.grid_kwh_without ==
        doctest::Approx(grid_energy(by_day, t, false).total()).epsilon(1e-9));
  CHECK(s.grid_kwh_with ==
        doctest::Approx(grid_energy(by_day, t, true).total()).epsilon(1e-9));
}

TEST_CASE("annual summary rejects an empty ledger") {
  CHECK_THROWS_AS(annual_summary({}, default_tariff(), "X"), DataError);
}

}  // TEST_SUITE
