#include <string>
#include <vector>

#include "doctest.h"
#include "gridshare/feeder.hpp"

using namespace gridshare;

namespace {

// Two stub feeders joined by one normally-open tie switch.
const char* kTieTopology = R"({
  "nodes": ["a1", "a2", "b1", "b2"],
  "edges": [
    {"a": "a1", "b": "a2", "kind": "line"},
    {"a": "b1", "b": "b2", "kind": "line"},
    {"a": "a2", "b": "b1", "kind": "switch", "switch_id": "s1"}
  ],
  "houses": {"h1": "a1", "h2": "b1", "h3": "b2"},
  "default_open": ["s1"]
})";

}  // namespace

TEST_SUITE("feeder") {

TEST_CASE("topology round trips through JSON") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  FeederGraph back = topology_from_json_text(topology_to_json_text(g));
  CHECK(back.nodes == g.nodes);
  CHECK(back.default_open == g.default_open);
  CHECK(back.house_to_node == g.house_to_node);
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(back.edges[i].a == g.edges[i].a);
    CHECK(back.edges[i].b == g.edges[i].b);
    CHECK(back.edges[i].switch_id == g.edges[i].switch_id);
  }
}

TEST_CASE("topology validation") {
  CHECK_THROWS_AS(topology_from_json_text("nope"), DataError);
  CHECK_THROWS_AS(topology_from_json_text(R"({"nodes": [], "edges": [], "houses": {}})"),
                  DataError);
  // Unknown node in an edge.
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a"], "edges": [{"a": "a", "b": "zz", "kind": "line"}], "houses": {}})"),
                  DataError);
  // House on an unknown node.
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a"], "edges": [], "houses": {"h": "zz"}})"),
                  DataError);
  // default_open naming a nonexistent switch.
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a", "b"], "edges": [{"a": "a", "b": "b", "kind": "line"}],
    "houses": {"h": "a"}, "default_open": ["s9"]})"),
                  DataError);
  // A switch edge must carry an id, a line must not.
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a", "b"], "edges": [{"a": "a", "b": "b", "kind": "switch"}], "houses": {}})"),
                  DataError);
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a", "b"],
    "edges": [{"a": "a", "b": "b", "kind": "line", "switch_id": "s1"}], "houses": {}})"),
                  DataError);
  // The closed-everything graph must be one piece.
  CHECK_THROWS_AS(topology_from_json_text(R"({
    "nodes": ["a", "b"], "edges": [], "houses": {"h": "a"}})"),
                  DataError);
}

TEST_CASE("default partition islands on open switches") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  MicrogridPartition part = partition_default(g);
  REQUIRE(part.microgrids.size() == 2);
  CHECK(part.microgrids[0].label == "MG-I");
  CHECK(part.microgrids[0].nodes == std::vector<std::string>{"a1", "a2"});
  CHECK(part.microgrids[0].house_ids == std::vector<std::string>{"h1"});
  CHECK(part.microgrids[1].label == "MG-II");
  CHECK(part.microgrids[1].house_ids == std::vector<std::string>{"h2", "h3"});
  CHECK(part.switch_states.at("s1") == SwitchState::open);
}

TEST_CASE("closing the tie merges the islands") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  MicrogridPartition part = partition(g, resolve_switch_states(g, {}, {"s1"}));
  REQUIRE(part.microgrids.size() == 1);
  CHECK(part.microgrids[0].label == "MG-I");
  CHECK(part.microgrids[0].house_ids == std::vector<std::string>{"h1", "h2", "h3"});
}

TEST_CASE("switch state resolution rejects unknown ids") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  CHECK_THROWS_AS(resolve_switch_states(g, {"zz"}, {}), ConfigError);
  CHECK_THROWS_AS(resolve_switch_states(g, {}, {"zz"}), ConfigError);
}

TEST_CASE("houseless islands are not microgrids") {
  FeederGraph g = topology_from_json_text(R"({
    "nodes": ["a1", "a2", "c1"],
    "edges": [
      {"a": "a1", "b": "a2", "kind": "line"},
      {"a": "a2", "b": "c1", "kind": "switch", "switch_id": "s1"}
    ],
    "houses": {"h1": "a1"},
    "default_open": ["s1"]
  })");
  MicrogridPartition part = partition_default(g);
  REQUIRE(part.microgrids.size() == 1);
  CHECK(part.microgrids[0].nodes == std::vector<std::string>{"a1", "a2"});

  // Closing the switch folds the bare node into the housed island.
  MicrogridPartition closed = partition(g, resolve_switch_states(g, {}, {"s1"}));
  REQUIRE(closed.microgrids.size() == 1);
  CHECK(closed.microgrids[0].nodes.size() == 3);
}

TEST_CASE("neighboring pairs track open tie switches") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  MicrogridPartition part = partition_default(g);
  std::vector<std::pair<int, int>> pairs = neighboring_pairs(g, part);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>{0, 1});

  MicrogridPartition merged = partition(g, resolve_switch_states(g, {}, {"s1"}));
  CHECK(neighboring_pairs(g, merged).empty());
}

TEST_CASE("scenario set and filters") {
  FeederGraph g = topology_from_json_text(kTieTopology);
  MicrogridPartition part = partition_default(g);
  std::vector<Scenario> all = scenario_set(part, neighboring_pairs(g, part));
  REQUIRE(all.size() == 4);  // two singles, one pair, ALL
  CHECK(all[0].label == "MG-I");
  CHECK(all[1].label == "MG-II");
  CHECK(all[2].label == "MG-I+MG-II");
  CHECK(all[2].kind == Scenario::Kind::pair);
  CHECK(all[3].label == "ALL");
  CHECK(all[3].house_ids.size() == 3);

  CHECK(filter_scenarios(all, "singles").size() == 2);
  CHECK(filter_scenarios(all, "pairs").size() == 1);
  CHECK(filter_scenarios(all, "all").size() == 1);
  CHECK(filter_scenarios(all, "everything").size() == 4);
  CHECK_THROWS_AS(filter_scenarios(all, "some"), ConfigError);

  // One island: singles only, no ALL row to compare against.
  MicrogridPartition merged = partition(g, resolve_switch_states(g, {}, {"s1"}));
  std::vector<Scenario> single = scenario_set(merged, {});
  REQUIRE(single.size() == 1);
  CHECK(single[0].kind == Scenario::Kind::single);
}

TEST_CASE("roman numerals") {
  CHECK(roman_numeral(1) == "I");
  CHECK(roman_numeral(4) == "IV");
  CHECK(roman_numeral(9) == "IX");
  CHECK(roman_numeral(14) == "XIV");
  CHECK(roman_numeral(40) == "XL");
  CHECK(roman_numeral(90) == "XC");
  CHECK(roman_numeral(400) == "CD");
  CHECK(roman_numeral(1999) == "MCMXCIX");
  CHECK(roman_numeral(3999) == "MMMCMXCIX");
  CHECK_THROWS_AS(roman_numeral(0), ConfigError);
  CHECK_THROWS_AS(roman_numeral(4000), ConfigError);
}

TEST_CASE("bundled five-microgrid feeder") {
  FeederGraph g = load_topology("data/ieee123_5mg.json");
  MicrogridPartition part = partition_default(g);
  REQUIRE(part.microgrids.size() == 5);
  CHECK(part.microgrids[0].house_ids.size() == 113);
  CHECK(part.microgrids[1].house_ids.size() == 106);
  CHECK(part.microgrids[2].house_ids.size() == 161);
  CHECK(part.microgrids[3].house_ids.size() == 88);
  CHECK(part.microgrids[4].house_ids.size() == 48);

  std::vector<std::pair<int, int>> pairs = neighboring_pairs(g, part);
  CHECK(pairs.size() == 6);
  std::vector<Scenario> all = scenario_set(part, pairs);
  CHECK(all.size() == 12);  // 5 singles + 6 pairs + ALL

  int total = 0;
  for (const Microgrid& mg : part.microgrids) total += static_cast<int>(mg.house_ids.size());
  CHECK(total == 516);
}

}  // TEST_SUITE
