#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridshare/errors.hpp"

namespace gridshare {

// One feeder segment. Plain lines are always conducting; switch segments
// conduct only while closed and carry a unique switch_id.
struct FeederEdge {
  std::string a;
  std::string b;
  std::string switch_id;  // empty for plain lines

  bool is_switch() const { return !switch_id.empty(); }
};

struct FeederGraph {
  std::vector<std::string> nodes;
  std::vector<FeederEdge> edges;
  std::map<std::string, std::string> house_to_node;
  std::vector<std::string> default_open;  // switch ids open in the base configuration

  void validate() const;
};

FeederGraph topology_from_json_text(const std::string& text);
FeederGraph load_topology(const std::string& path);
std::string topology_to_json_text(const FeederGraph& g);

enum class SwitchState { open, closed };
using SwitchStates = std::map<std::string, SwitchState>;

// File's default_open set, with optional per-switch overrides on top.
// Unknown switch ids in either list are a ConfigError.
SwitchStates resolve_switch_states(const FeederGraph& g,
                                   const std::vector<std::string>& force_open = {},
                                   const std::vector<std::string>& force_closed = {});

// A microgrid is a connected island of the conducting subgraph that hosts at
// least one house. Labels run MG-I, MG-II, ... ordered by each island's
// smallest node id.
struct Microgrid {
  std::string label;
  std::vector<std::string> nodes;
  std::vector<std::string> house_ids;
};

struct MicrogridPartition {
  std::vector<Microgrid> microgrids;
  SwitchStates switch_states;
};

MicrogridPartition partition(const FeederGraph& g, const SwitchStates& states);
MicrogridPartition partition_default(const FeederGraph& g);

// Microgrid index pairs joined by at least one open switch edge.
std::vector<std::pair<int, int>> neighboring_pairs(const FeederGraph& g,
                                                   const MicrogridPartition& part);

struct Scenario {
  enum class Kind { single, pair, all };
  Kind kind = Kind::single;
  std::string label;
  std::vector<std::string> house_ids;
};

// Singles for every microgrid, one pair scenario per neighboring pair, and an
// ALL scenario when the partition has at least two microgrids.
std::vector<Scenario> scenario_set(const MicrogridPartition& part,
                                   const std::vector<std::pair<int, int>>& pairs);

// "singles" | "pairs" | "all" | "everything" (ConfigError otherwise).
std::vector<Scenario> filter_scenarios(const std::vector<Scenario>& scenarios,
                                       const std::string& mode);

std::string roman_numeral(int value);

}  // namespace gridshare
