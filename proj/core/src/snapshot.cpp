#include "dt/snapshot.hpp"

namespace dt {

namespace {

OriginKind origin_from_string(const std::string& s) {
  for (auto k : {OriginKind::Premise, OriginKind::Forward, OriginKind::BackwardSubgoal, OriginKind::Goal})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown origin '" + s + "'");
}

std::vector<std::string> texts(const std::vector<Formula>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.text());
  return out;
}

}  // namespace

nlohmann::json to_json(const ProblemSpec& p) {
  return {{"id", p.id},
          {"premises", texts(p.premises)},
          {"conclusion", p.conclusion.text()},
          {"type", to_string(p.type)},
          {"help_allowed", p.help_allowed}};
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
  ProblemSpec p;
  p.id = j.at("id").get<std::string>();
  for (const auto& t : j.at("premises")) p.premises.push_back(parse(t.get<std::string>()));
  p.conclusion = parse(j.at("conclusion").get<std::string>());
  p.type = proof_type_from_string(j.value("type", std::string("PS")));
  p.help_allowed = j.value("help_allowed", true);
  p.validate();
  return p;
}

nlohmann::json to_json(const Binding& b) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : b) j[std::string(1, k)] = v.text();
  return j;
}

Binding binding_from_json(const nlohmann::json& j) {
  Binding b;
  for (const auto& [k, v] : j.items()) {
    if (k.size() != 1 || k[0] < 'a' || k[0] > 'z') throw std::invalid_argument("bad metavariable '" + k + "'");
    b.emplace(k[0], parse(v.get<std::string>()));
  }
  return b;
}

nlohmann::json to_json(const ProofState& s) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& [id, n] : s.nodes()) {
    nlohmann::json origin{{"kind", to_string(n.origin.kind)}};
    if (!n.origin.rule.empty()) origin["rule"] = n.origin.rule;
    if (!n.origin.parents.empty()) origin["parents"] = n.origin.parents;
    if (n.origin.child) origin["child"] = *n.origin.child;
    if (!n.origin.consumed.empty()) origin["consumed"] = n.origin.consumed;
    nlohmann::json node{{"id", id},
                        {"formula", n.formula.text()},
                        {"status", to_string(n.status)},
                        {"origin", origin},
                        {"created_at_ms", n.created_at}};
    if (n.justification) {
      node["justification"] = {{"rule", n.justification->rule},
                               {"parents", n.justification->parents},
                               {"choice", to_json(n.justification->choice)},
                               {"backward", n.justification->backward}};
    }
    nodes.push_back(std::move(node));
  }
  return {{"problem", to_json(s.problem())},
          {"direction", to_string(s.direction())},
          {"goal", s.goal_id()},
          {"next_id", s.next_id()},
          {"complete", is_complete(s)},
          {"counters",
           {{"actions", s.action_count()}, {"failed", s.failed_count()}, {"restarts", s.restart_count()}}},
          {"nodes", nodes}};
}

ProofState state_from_json(const nlohmann::json& j) {
  std::map<NodeId, ProofNode> nodes;
  for (const auto& jn : j.at("nodes")) {
    ProofNode n;
    n.id = jn.at("id").get<NodeId>();
    n.formula = parse(jn.at("formula").get<std::string>());
    n.status = jn.at("status").get<std::string>() == "justified" ? NodeStatus::Justified : NodeStatus::Unjustified;
    const auto& o = jn.at("origin");
    n.origin.kind = origin_from_string(o.at("kind").get<std::string>());
    n.origin.rule = o.value("rule", std::string{});
    n.origin.parents = o.value("parents", std::vector<NodeId>{});
    if (o.contains("child")) n.origin.child = o["child"].get<NodeId>();
    n.origin.consumed = o.value("consumed", std::vector<NodeId>{});
    n.created_at = jn.at("created_at_ms").get<TimestampMs>();
    if (jn.contains("justification")) {
      const auto& jj = jn["justification"];
      n.justification = Justification{jj.at("rule").get<std::string>(), jj.at("parents").get<std::vector<NodeId>>(),
                                      binding_from_json(jj.value("choice", nlohmann::json::object())),
                                      jj.value("backward", false)};
    }
    const NodeId id = n.id;
    if (!nodes.emplace(id, std::move(n)).second) throw std::invalid_argument("duplicate node id");
  }
  const auto& c = j.at("counters");
  const std::string dir = j.at("direction").get<std::string>();
  return ProofState::from_parts(problem_from_json(j.at("problem")),
                                dir == "backward-only" ? Direction::BackwardOnly : Direction::Both, std::move(nodes),
                                j.at("goal").get<NodeId>(), j.at("next_id").get<NodeId>(),
                                c.at("actions").get<std::uint32_t>(), c.at("failed").get<std::uint32_t>(),
                                c.at("restarts").get<std::uint32_t>());
}

nlohmann::json to_json(const StepResult& r) {
  nlohmann::json j{{"status", to_string(r.status)}, {"created", r.created}};
  if (r.node) j["node"] = *r.node;
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

nlohmann::json to_json(const ProofStep& s) {
  nlohmann::json j{{"rule", s.rule}, {"premises", texts(s.premises)}, {"conclusion", s.conclusion.text()}};
  if (!s.choice.empty()) j["choice"] = to_json(s.choice);
  return j;
}

nlohmann::json to_json(const HintAction& h) {
  nlohmann::json j{{"direction", h.backward ? "backward" : "forward"},
                   {"rule", h.rule},
                   {"result", h.result.text()},
                   {"premises", texts(h.premises)},
                   {"binding", to_json(h.binding)},
                   {"remaining", h.remaining}};
  if (!h.parents.empty()) j["parents"] = h.parents;
  if (h.target) j["target"] = *h.target;
  return j;
}

}  // namespace dt
