#include "dt/network.hpp"

#include <algorithm>
#include <set>

#include "dt/replay.hpp"

namespace dt::mining {

StateKey state_key(const ProofState& state) {
  std::vector<Formula> fs;
  for (const auto& [id, n] : state.nodes())
    if (id != state.goal_id() || n.justified()) fs.push_back(n.formula);
  std::sort(fs.begin(), fs.end());
  StateKey key;
  for (const auto& f : fs) key.push_back(f.text());
  return key;
}

std::string key_text(const StateKey& key) {
  std::string out = "{";
  for (std::size_t i = 0; i < key.size(); ++i) out += (i ? ", " : "") + key[i];
  return out + "}";
}

std::optional<std::size_t> InteractionNetwork::find(const StateKey& key) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].key == key) return i;
  return std::nullopt;
}

std::vector<std::string> InteractionNetwork::contributing_union() const {
  std::set<std::string> all;
  for (const auto& t : traces) all.insert(t.contributing.begin(), t.contributing.end());
  return {all.begin(), all.end()};
}

namespace {

bool is_proof_action(EventKind k) {
  return k == EventKind::DeriveForward || k == EventKind::DeriveBackward || k == EventKind::Delete ||
         k == EventKind::Restart;
}

std::string action_label(const InteractionEvent& e) {
  auto join = [](const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s;
  };
  auto abbrev = [&] {
    const Rule* r = RuleCatalog::standard().find(e.rule);
    return r ? r->abbreviation() : e.rule;
  };
  switch (e.kind) {
    case EventKind::DeriveForward: return abbrev() + "(" + join(e.operands) + ")";
    case EventKind::DeriveBackward: return "BW " + abbrev() + "(" + join(e.operands) + ")";
    case EventKind::Delete: return "Delete(" + join(e.operands) + ")";
    case EventKind::Restart: return "Restart";
    default: return to_string(e.kind);
  }
}

class Builder {
 public:
  explicit Builder(InteractionNetwork& net) : net_(net) {}

  std::size_t node(const StateKey& key) {
    auto [it, inserted] = index_.try_emplace(key, net_.nodes.size());
    if (inserted) {
      NetworkNode n;
      n.key = key;
      net_.nodes.push_back(std::move(n));
    }
    return it->second;
  }

  std::size_t edge(std::size_t from, std::size_t to, const std::string& action, bool backward) {
    auto [it, inserted] = edge_index_.try_emplace({from, to, action}, net_.edges.size());
    if (inserted) {
      NetworkEdge e;
      e.from = from;
      e.to = to;
      e.action = action;
      e.backward = backward;
      net_.edges.push_back(std::move(e));
    }
    return it->second;
  }

 private:
  InteractionNetwork& net_;
  std::map<StateKey, std::size_t> index_;
  std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> edge_index_;
};

}  // namespace

InteractionNetwork build_network(const std::vector<InteractionEvent>& events, const ProblemSpec& problem,
                                 const NetworkOptions& options) {
  InteractionNetwork net;
  net.problem = problem.id;
  Builder b(net);
  ProblemSpec spec = problem;
  spec.type = ProofType::PS;
  net.start = b.node(state_key(new_state(spec)));
  net.nodes[net.start].start = true;
  const auto gap = static_cast<TimestampMs>(options.session_gap_minutes * 60'000.0);

  for (const auto& e : events)
    if (e.problem != problem.id)
      throw std::invalid_argument("event for problem " + e.problem + " in a network for " + problem.id);

  for (const auto& [who, trace] : split_attempts(events)) {
    if (std::none_of(trace.begin(), trace.end(), [](const auto& e) { return is_proof_action(e.kind); })) continue;
    ProofState state = new_state(spec, Direction::Both, trace.front().timestamp);
    TraceRecord rec;
    rec.student = who.first;
    rec.group = trace.front().group;
    const std::size_t g = index_of(rec.group);
    std::size_t current = net.start;
    rec.nodes.push_back(current);
    net.nodes[current].visits[g]++;
    net.nodes[current].steps_so_far.push_back(0);

    TimestampMs active = 0, arrived = 0;
    std::size_t steps = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto& e = trace[i];
      if (i > 0) {
        const TimestampMs dt = e.timestamp - trace[i - 1].timestamp;
        if (dt < 0) throw std::invalid_argument("trace timestamps go backwards");
        if (dt <= gap && e.kind != EventKind::Login) active += dt;
      }
      if (!is_proof_action(e.kind)) {
        apply_event(state, e);
        continue;
      }
      const auto before_ids = state.nodes();
      apply_event(state, e);
      const std::size_t next = b.node(state_key(state));
      const std::size_t ei = b.edge(current, next, action_label(e), e.kind == EventKind::DeriveBackward);
      const double since = static_cast<double>(active - arrived) / 1000.0;
      net.edges[ei].frequency[g]++;
      net.edges[ei].seconds_before.push_back(since);
      net.nodes[current].dwell_seconds.push_back(since);

      if (e.is_derivation() && e.success && !e.duplicate) {
        const double minutes = static_cast<double>(active) / 60'000.0;
        for (const auto& [id, n] : state.nodes())
          if (!before_ids.contains(id))
            rec.derivations.push_back(Derivation{n.formula.text(), minutes, steps, e.kind == EventKind::DeriveBackward});
        ++steps;
      }
      net.nodes[next].visits[g]++;
      net.nodes[next].steps_so_far.push_back(steps);
      if (is_complete(state)) net.nodes[next].goal = true;
      rec.nodes.push_back(next);
      rec.edges.push_back(ei);
      current = next;
      arrived = active;
    }
    rec.complete = is_complete(state);
    if (rec.complete) {
      std::set<std::string> texts;
      for (NodeId id : contributing_set(state)) texts.insert(state.node(id).formula.text());
      rec.contributing.assign(texts.begin(), texts.end());
    }
    net.traces.push_back(std::move(rec));
  }
  return net;
}

namespace {

nlohmann::json counts_json(const GroupCounts& c) { return nlohmann::json::array({c[0], c[1], c[2]}); }
GroupCounts counts_from(const nlohmann::json& j) {
  return {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>(), j.at(2).get<std::size_t>()};
}

}  // namespace

nlohmann::json InteractionNetwork::to_json() const {
  nlohmann::json jn = nlohmann::json::array(), je = nlohmann::json::array(), jt = nlohmann::json::array();
  for (const auto& n : nodes)
    jn.push_back({{"key", n.key},
                  {"visits", counts_json(n.visits)},
                  {"dwell_seconds", n.dwell_seconds},
                  {"steps_so_far", n.steps_so_far},
                  {"start", n.start},
                  {"goal", n.goal}});
  for (const auto& e : edges)
    je.push_back({{"from", e.from},
                  {"to", e.to},
                  {"action", e.action},
                  {"backward", e.backward},
                  {"frequency", counts_json(e.frequency)},
                  {"seconds_before", e.seconds_before}});
  for (const auto& t : traces) {
    nlohmann::json jd = nlohmann::json::array();
    for (const auto& d : t.derivations)
      jd.push_back({{"formula", d.formula},
                    {"active_minutes", d.active_minutes},
                    {"steps_before", d.steps_before},
                    {"backward", d.backward}});
    jt.push_back({{"student", t.student},
                  {"group", to_string(t.group)},
                  {"complete", t.complete},
                  {"nodes", t.nodes},
                  {"edges", t.edges},
                  {"derivations", jd},
                  {"contributing", t.contributing}});
  }
  return {{"format", "deepthought-network"}, {"version", 1}, {"problem", problem}, {"start", start},
          {"nodes", jn},                      {"edges", je},  {"traces", jt}};
}

InteractionNetwork InteractionNetwork::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "deepthought-network") throw std::invalid_argument("not a network file");
  InteractionNetwork net;
  net.problem = j.at("problem").get<std::string>();
  net.start = j.at("start").get<std::size_t>();
  for (const auto& n : j.at("nodes"))
    net.nodes.push_back(NetworkNode{n.at("key").get<StateKey>(), counts_from(n.at("visits")),
                                    n.at("dwell_seconds").get<std::vector<double>>(),
                                    n.at("steps_so_far").get<std::vector<std::size_t>>(), n.at("start").get<bool>(),
                                    n.at("goal").get<bool>()});
  for (const auto& e : j.at("edges"))
    net.edges.push_back(NetworkEdge{e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>(),
                                    e.at("action").get<std::string>(), e.at("backward").get<bool>(),
                                    counts_from(e.at("frequency")), e.at("seconds_before").get<std::vector<double>>()});
  for (const auto& t : j.at("traces")) {
    TraceRecord r;
    r.student = t.at("student").get<std::string>();
    r.group = group_from_string(t.at("group").get<std::string>());
    r.complete = t.at("complete").get<bool>();
    r.nodes = t.at("nodes").get<std::vector<std::size_t>>();
    r.edges = t.at("edges").get<std::vector<std::size_t>>();
    for (const auto& d : t.at("derivations"))
      r.derivations.push_back(Derivation{d.at("formula").get<std::string>(), d.at("active_minutes").get<double>(),
                                         d.at("steps_before").get<std::size_t>(), d.at("backward").get<bool>()});
    r.contributing = t.at("contributing").get<std::vector<std::string>>();
    net.traces.push_back(std::move(r));
  }
  for (const auto& e : net.edges)
    if (e.from >= net.nodes.size() || e.to >= net.nodes.size()) throw std::invalid_argument("edge out of range");
  return net;
}

}  // namespace dt::mining
