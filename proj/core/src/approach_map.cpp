#include "dt/approach_map.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace dt::mining {

PreparedGraph prepare(const InteractionNetwork& net) {
  PreparedGraph p;
  std::vector<std::size_t> index(net.nodes.size(), kNoRegion);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (net.nodes[i].start || net.nodes[i].goal) continue;
    index[i] = p.nodes.size();
    p.nodes.push_back(i);
  }
  p.graph = graph::Graph(p.nodes.size());
  for (const auto& e : net.edges) {
    if (e.from == e.to || index[e.from] == kNoRegion || index[e.to] == kNoRegion) continue;
    const double w = static_cast<double>(e.frequency[0] + e.frequency[1] + e.frequency[2]);
    p.graph.add_edge(index[e.from], index[e.to], w);
  }
  return p;
}

Clustering cluster_network(const InteractionNetwork& net) {
  const PreparedGraph p = prepare(net);
  Clustering c;
  c.region.assign(net.nodes.size(), kNoRegion);
  graph::Partition partition;
  if (p.graph.edges().empty()) {
    partition = graph::connected_components(p.graph);
  } else {
    auto gn = graph::girvan_newman(p.graph);
    partition = gn.partition;
    c.modularity = gn.modularity;
    for (auto [u, v] : gn.removed) c.removed.emplace_back(p.nodes[u], p.nodes[v]);
  }
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    c.region[p.nodes[i]] = partition[i];
    c.region_count = std::max(c.region_count, partition[i] + 1);
  }
  return c;
}

const Region* ApproachMap::region(const std::string& name) const {
  for (const auto& r : regions)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

constexpr std::size_t kStart = static_cast<std::size_t>(-2);
constexpr std::size_t kGoal = static_cast<std::size_t>(-3);

std::vector<std::string> added(const StateKey& before, const StateKey& after) {
  std::vector<std::string> out;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(out));
  return out;
}

// Operands of an action label "Rule(a, b)"; formulas never contain ", ".
std::vector<std::string> operands_of(const std::string& action) {
  const auto open = action.find('(');
  if (open == std::string::npos || action.back() != ')') return {};
  std::vector<std::string> out;
  std::string body = action.substr(open + 1, action.size() - open - 2);
  std::size_t pos = 0;
  while (true) {
    const auto comma = body.find(", ", pos);
    out.push_back(body.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 2;
  }
  return out;
}

}  // namespace

ApproachMap build_approach_map(const InteractionNetwork& net, const Clustering& clustering) {
  auto place = [&](std::size_t node) {
    if (net.nodes[node].start) return kStart;
    if (net.nodes[node].goal) return kGoal;
    return clustering.region[node];
  };

  // Loop-erased place sequence per completed trace.
  std::map<std::vector<std::size_t>, GroupCounts> sequences;
  std::vector<std::vector<std::size_t>> trace_sequence(net.traces.size());
  for (std::size_t t = 0; t < net.traces.size(); ++t) {
    const auto& tr = net.traces[t];
    if (!tr.complete) continue;
    std::vector<std::size_t> seq;
    for (std::size_t node : tr.nodes) {
      const std::size_t p = place(node);
      auto it = std::find(seq.begin(), seq.end(), p);
      if (it != seq.end()) seq.erase(it + 1, seq.end());
      else seq.push_back(p);
    }
    sequences[seq][index_of(tr.group)]++;
    trace_sequence[t] = std::move(seq);
  }
  if (sequences.empty()) throw std::invalid_argument("no trace of " + net.problem + " reached the goal");

  std::vector<std::pair<std::vector<std::size_t>, GroupCounts>> ordered(sequences.begin(), sequences.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    const auto ta = a.second[0] + a.second[1] + a.second[2];
    const auto tb = b.second[0] + b.second[1] + b.second[2];
    return ta > tb;
  });

  // Region names by first appearance along the ordered approaches.
  std::map<std::size_t, std::string> name;
  name[kStart] = "Start";
  name[kGoal] = "Goal";
  std::size_t next = 1;
  for (const auto& [seq, counts] : ordered)
    for (std::size_t p : seq)
      if (!name.contains(p)) name[p] = "R" + std::to_string(next++);

  ApproachMap map;
  map.problem = net.problem;
  map.modularity = clustering.modularity;
  for (const auto& [seq, counts] : ordered) {
    Approach a;
    for (std::size_t p : seq) a.path.push_back(name.at(p));
    a.frequency = counts;
    map.approaches.push_back(std::move(a));
  }

  // Regions on some approach: members, labels, chains.
  std::map<std::size_t, Region> regions;
  for (const auto& [p, n] : name)
    if (p != kStart && p != kGoal) regions[p].name = n;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    auto it = regions.find(place(i));
    if (it == regions.end()) continue;
    it->second.states.push_back(i);
    for (std::size_t g = 0; g < 3; ++g) it->second.visits[g] += net.nodes[i].visits[g];
  }
  std::map<std::size_t, std::map<std::string, std::size_t>> in_degree, out_degree, chain_weight;
  std::map<std::size_t, std::set<std::string>> backward_added;
  for (const auto& e : net.edges) {
    if (e.from == e.to) continue;
    const std::size_t a = place(e.from), b = place(e.to);
    const std::size_t w = e.frequency[0] + e.frequency[1] + e.frequency[2];
    const auto fresh = added(net.nodes[e.from].key, net.nodes[e.to].key);
    if (regions.contains(b)) {
      for (const auto& f : fresh) {
        chain_weight[b][f] += w;
        if (a != b) in_degree[b][f] += w;
        if (e.backward) backward_added[b].insert(f);
      }
    }
    if (a != b && regions.contains(a)) {
      const auto& inside = net.nodes[e.from].key;
      const auto& start_key = net.nodes[net.start].key;
      for (const auto& f : operands_of(e.action))
        if (std::binary_search(inside.begin(), inside.end(), f) &&
            !std::binary_search(start_key.begin(), start_key.end(), f))
          out_degree[a][f] += w;
    }
  }
  auto maximizers = [](const std::map<std::string, std::size_t>& m) {
    std::vector<std::string> out;
    std::size_t best = 0;
    for (const auto& [f, w] : m) best = std::max(best, w);
    for (const auto& [f, w] : m)
      if (w == best && best > 0) out.push_back(f);
    return out;
  };
  for (auto& [p, r] : regions) {
    std::set<std::string> label;
    for (const auto& f : maximizers(in_degree[p])) label.insert(f);
    for (const auto& f : maximizers(out_degree[p])) label.insert(f);
    std::vector<std::pair<std::string, std::size_t>> chain(chain_weight[p].begin(), chain_weight[p].end());
    std::stable_sort(chain.begin(), chain.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    for (const auto& [f, w] : chain) r.chain.push_back(f);
    if (label.empty() && !r.chain.empty()) label.insert(r.chain.front());
    std::vector<Formula> ordered_label;
    for (const auto& f : label) ordered_label.push_back(parse(f));
    std::sort(ordered_label.begin(), ordered_label.end());
    for (const auto& f : ordered_label) {
      r.label.push_back(f.text());
      if (backward_added[p].contains(f.text())) r.subgoals.push_back(f.text());
    }
  }
  std::vector<Region> region_list;
  for (auto& [p, r] : regions) region_list.push_back(std::move(r));
  std::sort(region_list.begin(), region_list.end(), [](const Region& a, const Region& b) {
    return std::stoul(a.name.substr(1)) < std::stoul(b.name.substr(1));
  });
  map.regions = std::move(region_list);

  // Edges along approaches, merged per (from, to).
  std::map<std::pair<std::string, std::string>, MapEdge> edges;
  for (const auto& a : map.approaches)
    for (std::size_t i = 0; i + 1 < a.path.size(); ++i) {
      auto& e = edges[{a.path[i], a.path[i + 1]}];
      e.from = a.path[i];
      e.to = a.path[i + 1];
      for (std::size_t g = 0; g < 3; ++g) e.frequency[g] += a.frequency[g];
    }
  std::map<std::pair<std::string, std::string>, std::set<std::string>> actions;
  for (std::size_t t = 0; t < net.traces.size(); ++t) {
    const auto& tr = net.traces[t];
    if (!tr.complete) continue;
    const auto& seq = trace_sequence[t];
    for (std::size_t i = 0; i < tr.edges.size(); ++i) {
      const auto& e = net.edges[tr.edges[i]];
      const std::size_t a = place(e.from), b = place(e.to);
      if (a == b) continue;
      // only crossings that survive loop erasure
      auto ia = std::find(seq.begin(), seq.end(), a);
      if (ia == seq.end() || ia + 1 == seq.end() || *(ia + 1) != b) continue;
      auto key = std::pair{name.at(a), name.at(b)};
      actions[key].insert(e.action);
      if (e.backward) edges[key].backward[index_of(tr.group)]++;
    }
  }
  for (auto& [key, e] : edges) {
    e.actions.assign(actions[key].begin(), actions[key].end());
    map.edges.push_back(std::move(e));
  }
  return map;
}

namespace {

nlohmann::json counts_json(const GroupCounts& c) { return nlohmann::json::array({c[0], c[1], c[2]}); }
GroupCounts counts_from(const nlohmann::json& j) {
  return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>(), j.at(2).get<std::size_t>()};
}

std::string counts_text(const GroupCounts& c) {
  return "[" + std::to_string(c[0]) + ", " + std::to_string(c[1]) + ", " + std::to_string(c[2]) + "]";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + xs[i];
  return s;
}

}  // namespace

nlohmann::json ApproachMap::to_json() const {
  nlohmann::json jr = nlohmann::json::array(), je = nlohmann::json::array(), ja = nlohmann::json::array();
  for (const auto& r : regions)
    jr.push_back({{"name", r.name},
                  {"label", r.label},
                  {"chain", r.chain},
                  {"subgoals", r.subgoals},
                  {"states", r.states},
                  {"visits", counts_json(r.visits)}});
  for (const auto& e : edges)
    je.push_back({{"from", e.from},
                  {"to", e.to},
                  {"actions", e.actions},
                  {"frequency", counts_json(e.frequency)},
                  {"backward", counts_json(e.backward)}});
  for (const auto& a : approaches) ja.push_back({{"path", a.path}, {"frequency", counts_json(a.frequency)}});
  return {{"format", "deepthought-approach-map"},
          {"version", 1},
          {"problem", problem},
          {"modularity", modularity},
          {"regions", jr},
          {"edges", je},
          {"approaches", ja}};
}

ApproachMap ApproachMap::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "deepthought-approach-map")
    throw std::invalid_argument("not an approach map file");
  ApproachMap m;
  m.problem = j.at("problem").get<std::string>();
  m.modularity = j.at("modularity").get<double>();
  for (const auto& r : j.at("regions"))
    m.regions.push_back(Region{r.at("name").get<std::string>(), r.at("label").get<std::vector<std::string>>(),
                               r.at("chain").get<std::vector<std::string>>(),
                               r.at("subgoals").get<std::vector<std::string>>(),
                               r.at("states").get<std::vector<std::size_t>>(), counts_from(r.at("visits"))});
  for (const auto& e : j.at("edges"))
    m.edges.push_back(MapEdge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                              e.at("actions").get<std::vector<std::string>>(), counts_from(e.at("frequency")),
                              counts_from(e.at("backward"))});
  for (const auto& a : j.at("approaches"))
    m.approaches.push_back(Approach{a.at("path").get<std::vector<std::string>>(), counts_from(a.at("frequency"))});
  return m;
}

std::string to_dot(const ApproachMap& map) {
  std::ostringstream os;
  os << "digraph approach_map {\n";
  if (map.regions.empty() && map.edges.empty()) {
    os << "}\n";
    return os.str();
  }
  os << "  label=\"" << escape(map.problem) << "\";\n  rankdir=TB;\n  node [shape=box];\n";
  os << "  \"Start\" [shape=ellipse];\n  \"Goal\" [shape=doublecircle];\n";
  for (const auto& r : map.regions) {
    // Subgoal propositions are shown in blue.
    os << "  \"" << r.name << "\" [label=<" << r.name;
    for (const auto& f : r.label) {
      const bool blue = std::find(r.subgoals.begin(), r.subgoals.end(), f) != r.subgoals.end();
      os << "<br/>" << (blue ? "<font color=\"blue\">" : "") << f << (blue ? "</font>" : "");
    }
    os << ">];\n";
  }
  std::size_t max_total = 1;
  for (const auto& e : map.edges) max_total = std::max(max_total, e.frequency[0] + e.frequency[1] + e.frequency[2]);
  for (const auto& e : map.edges) {
    const std::size_t total = e.frequency[0] + e.frequency[1] + e.frequency[2];
    const int width = 1 + static_cast<int>(3 * total / max_total);  // frequency class 1..4
    const bool bw = e.backward[0] + e.backward[1] + e.backward[2] > 0;
    os << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << counts_text(e.frequency);
    if (bw) os << "\\nBW " << counts_text(e.backward);
    os << "\\n" << escape(join(e.actions, "\\n")) << "\", penwidth=" << width;
    os << ", color=\"" << (bw ? "blue:red" : "black") << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const InteractionNetwork& net) {
  std::ostringstream os;
  os << "digraph interaction_network {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& n = net.nodes[i];
    os << "  n" << i << " [label=\"" << escape(key_text(n.key)) << "\\n" << counts_text(n.visits) << "\"";
    if (n.start) os << ", shape=ellipse";
    if (n.goal) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& e : net.edges)
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << escape(e.action) << "\\n" << counts_text(e.frequency)
       << "\"" << (e.backward ? ", color=blue" : "") << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace dt::mining
