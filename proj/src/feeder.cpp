#include "gridshare/feeder.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gridshare {

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

void FeederGraph::validate() const {
  if (nodes.empty()) throw DataError("topology has no nodes");
  std::set<std::string> node_set;
  for (const std::string& n : nodes) {
    if (n.empty()) throw DataError("empty node id");
    if (!node_set.insert(n).second) throw DataError("duplicate node id '" + n + "'");
  }
  std::set<std::string> switch_ids;
  for (const FeederEdge& e : edges) {
    if (!node_set.count(e.a) || !node_set.count(e.b))
      throw DataError("edge " + e.a + "-" + e.b + " references an unknown node");
    if (e.a == e.b) throw DataError("self-loop at node '" + e.a + "'");
    if (e.is_switch() && !switch_ids.insert(e.switch_id).second)
      throw DataError("duplicate switch id '" + e.switch_id + "'");
  }
  for (const auto& [house, node] : house_to_node) {
    if (house.empty()) throw DataError("empty house id in topology");
    if (!node_set.count(node))
      throw DataError("house '" + house + "' sits on unknown node '" + node + "'");
  }
  for (const std::string& sw : default_open)
    if (!switch_ids.count(sw))
      throw DataError("default_open lists unknown switch '" + sw + "'");

  // The feeder must be one piece when every switch is closed.
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<int>(i);
  std::vector<int> parent(nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  for (const FeederEdge& e : edges) {
    int ra = find_root(parent, index.at(e.a));
    int rb = find_root(parent, index.at(e.b));
    if (ra != rb) parent[rb] = ra;
  }
  int root0 = find_root(parent, 0);
  for (std::size_t i = 1; i < parent.size(); ++i)
    if (find_root(parent, static_cast<int>(i)) != root0)
      throw DataError("feeder splits apart even with every switch closed (node '" + nodes[i] + "')");
}

FeederGraph topology_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("topology is not valid JSON: ") + e.what());
  }
  FeederGraph g;
  try {
    if (!j.is_object()) throw DataError("topology must be a JSON object");
    g.nodes = j.at("nodes").get<std::vector<std::string>>();
    for (const auto& je : j.at("edges")) {
      FeederEdge e;
      e.a = je.at("a").get<std::string>();
      e.b = je.at("b").get<std::string>();
      std::string kind = je.at("kind").get<std::string>();
      if (kind == "switch") {
        e.switch_id = je.at("switch_id").get<std::string>();
        if (e.switch_id.empty()) throw DataError("switch edge with empty switch_id");
      } else if (kind == "line") {
        if (je.contains("switch_id")) throw DataError("line edge must not carry a switch_id");
      } else {
        throw DataError("unknown edge kind '" + kind + "'");
      }
      g.edges.push_back(std::move(e));
    }
    if (j.contains("houses"))
      g.house_to_node = j.at("houses").get<std::map<std::string, std::string>>();
    if (j.contains("default_open"))
      g.default_open = j.at("default_open").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad topology value: ") + e.what());
  }
  g.validate();
  return g;
}

FeederGraph load_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open topology '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return topology_from_json_text(buf.str());
}

std::string topology_to_json_text(const FeederGraph& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes;
  j["edges"] = nlohmann::json::array();
  for (const FeederEdge& e : g.edges) {
    nlohmann::json je{{"a", e.a}, {"b", e.b}};
    if (e.is_switch()) {
      je["kind"] = "switch";
      je["switch_id"] = e.switch_id;
    } else {
      je["kind"] = "line";
    }
    j["edges"].push_back(std::move(je));
  }
  j["houses"] = g.house_to_node;
  j["default_open"] = g.default_open;
  return j.dump(2);
}

SwitchStates resolve_switch_states(const FeederGraph& g, const std::vector<std::string>& force_open,
                                   const std::vector<std::string>& force_closed) {
  g.validate();
  SwitchStates states;
  for (const FeederEdge& e : g.edges)
    if (e.is_switch()) states[e.switch_id] = SwitchState::closed;
  for (const std::string& sw : g.default_open) states[sw] = SwitchState::open;

  auto apply = [&](const std::vector<std::string>& ids, SwitchState s) {
    for (const std::string& id : ids) {
      auto it = states.find(id);
      if (it == states.end()) throw ConfigError("unknown switch '" + id + "'");
      it->second = s;
    }
  };
  apply(force_open, SwitchState::open);
  apply(force_closed, SwitchState::closed);
  return states;
}

MicrogridPartition partition(const FeederGraph& g, const SwitchStates& states) {
  g.validate();
  for (const FeederEdge& e : g.edges)
    if (e.is_switch() && !states.count(e.switch_id))
      throw ConfigError("switch '" + e.switch_id + "' has no state");

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i]] = static_cast<int>(i);

  std::vector<int> parent(g.nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  for (const FeederEdge& e : g.edges) {
    bool conducting = !e.is_switch() || states.at(e.switch_id) == SwitchState::closed;
    if (!conducting) continue;
    int ra = find_root(parent, index.at(e.a));
    int rb = find_root(parent, index.at(e.b));
    if (ra != rb) parent[rb] = ra;
  }

  // Group nodes by island; islands keyed (and later ordered) by their
  // smallest member node id. Node ids are kept sorted within an island.
  std::map<std::string, std::vector<std::string>> islands_by_min;
  {
    std::map<int, std::vector<std::string>> by_root;
    for (const std::string& n : g.nodes) by_root[find_root(parent, index.at(n))].push_back(n);
    for (auto& [root, members] : by_root) {
      std::sort(members.begin(), members.end());
      islands_by_min[members.front()] = std::move(members);
    }
  }

  std::map<std::string, std::vector<std::string>> houses_by_node;
  for (const auto& [house, node] : g.house_to_node) houses_by_node[node].push_back(house);

  MicrogridPartition part;
  part.switch_states = states;
  for (auto& [min_node, members] : islands_by_min) {
    Microgrid mg;
    mg.nodes = members;
    for (const std::string& n : members) {
      auto it = houses_by_node.find(n);
      if (it != houses_by_node.end())
        mg.house_ids.insert(mg.house_ids.end(), it->second.begin(), it->second.end());
    }
    if (mg.house_ids.empty()) continue;  // bare backbone island, not a microgrid
    std::sort(mg.house_ids.begin(), mg.house_ids.end());
    part.microgrids.push_back(std::move(mg));
  }
  if (part.microgrids.empty()) throw DataError("no microgrid contains a house");
  for (std::size_t i = 0; i < part.microgrids.size(); ++i)
    part.microgrids[i].label = "MG-" + roman_numeral(static_cast<int>(i) + 1);
  return part;
}

MicrogridPartition partition_default(const FeederGraph& g) {
  return partition(g, resolve_switch_states(g));
}

std::vector<std::pair<int, int>> neighboring_pairs(const FeederGraph& g,
                                                   const MicrogridPartition& part) {
  std::map<std::string, int> node_to_mg;
  for (std::size_t i = 0; i < part.microgrids.size(); ++i)
    for (const std::string& n : part.microgrids[i].nodes)
      node_to_mg[n] = static_cast<int>(i);

  std::set<std::pair<int, int>> found;
  for (const FeederEdge& e : g.edges) {
    if (!e.is_switch() || part.switch_states.at(e.switch_id) != SwitchState::open) continue;
    auto ia = node_to_mg.find(e.a);
    auto ib = node_to_mg.find(e.b);
    if (ia == node_to_mg.end() || ib == node_to_mg.end() || ia->second == ib->second) continue;
    found.emplace(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
  }
  return {found.begin(), found.end()};
}

std::vector<Scenario> scenario_set(const MicrogridPartition& part,
                                   const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Scenario> out;
  for (const Microgrid& mg : part.microgrids)
    out.push_back({Scenario::Kind::single, mg.label, mg.house_ids});
  for (auto [i, j] : pairs) {
    const Microgrid& a = part.microgrids.at(i);
    const Microgrid& b = part.microgrids.at(j);
    Scenario s;
    s.kind = Scenario::Kind::pair;
    s.label = a.label + "+" + b.label;
    s.house_ids = a.house_ids;
    s.house_ids.insert(s.house_ids.end(), b.house_ids.begin(), b.house_ids.end());
    std::sort(s.house_ids.begin(), s.house_ids.end());
    out.push_back(std::move(s));
  }
  if (part.microgrids.size() >= 2) {
    Scenario s;
    s.kind = Scenario::Kind::all;
    s.label = "ALL";
    for (const Microgrid& mg : part.microgrids)
      s.house_ids.insert(s.house_ids.end(), mg.house_ids.begin(), mg.house_ids.end());
    std::sort(s.house_ids.begin(), s.house_ids.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scenario> filter_scenarios(const std::vector<Scenario>& scenarios,
                                       const std::string& mode) {
  auto keep = [&](Scenario::Kind k) {
    if (mode == "everything") return true;
    if (mode == "singles") return k == Scenario::Kind::single;
    if (mode == "pairs") return k == Scenario::Kind::pair;
    if (mode == "all") return k == Scenario::Kind::all;
    throw ConfigError("unknown scenario mode '" + mode + "'");
  };
  std::vector<Scenario> out;
  for (const Scenario& s : scenarios)
    if (keep(s.kind)) out.push_back(s);
  if (out.empty()) throw ConfigError("scenario mode '" + mode + "' selects nothing");
  return out;
}

std::string roman_numeral(int value) {
  if (value <= 0 || value > 3999) throw ConfigError("roman numeral out of range");
  static const std::pair<int, const char*> steps[] = {
      {1000, "M"}, {900, "CM"}, {500, "D"}, {400, "CD"}, {100, "C"}, {90, "XC"}, {50, "L"},
      {40, "XL"},  {10, "X"},   {9, "IX"},  {5, "V"},    {4, "IV"},  {1, "I"}};
  std::string out;
  for (auto [v, s] : steps)
    while (value >= v) {
      out += s;
      value -= v;
    }
  return out;
}

}  // namespace gridshare
