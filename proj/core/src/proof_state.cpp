#include "dt/proof.hpp"

#include <algorithm>
#include <unordered_set>

namespace dt {

std::string to_string(ProofType t) {
  switch (t) {
    case ProofType::WE: return "WE";
    case ProofType::PS: return "PS";
    case ProofType::BWE: return "BWE";
    case ProofType::BPS: return "BPS";
  }
  return "?";
}

ProofType proof_type_from_string(std::string_view s) {
  if (s == "WE") return ProofType::WE;
  if (s == "PS") return ProofType::PS;
  if (s == "BWE") return ProofType::BWE;
  if (s == "BPS") return ProofType::BPS;
  throw std::invalid_argument("unknown proof type '" + std::string(s) + "'");
}

std::string to_string(NodeStatus s) { return s == NodeStatus::Justified ? "justified" : "unjustified"; }

std::string to_string(OriginKind k) {
  switch (k) {
    case OriginKind::Premise: return "premise";
    case OriginKind::Forward: return "forward";
    case OriginKind::BackwardSubgoal: return "backward-subgoal";
    case OriginKind::Goal: return "goal";
  }
  return "?";
}

std::string to_string(Direction d) { return d == Direction::Both ? "both" : "backward-only"; }

std::string to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Applied: return "applied";
    case StepStatus::Duplicate: return "duplicate";
    case StepStatus::Failed: return "failed";
  }
  return "?";
}

void ProblemSpec::validate() const {
  if (premises.empty()) throw std::invalid_argument("problem " + id + ": no premises");
  std::unordered_set<Formula> seen;
  for (const auto& p : premises)
    if (!seen.insert(p).second) throw std::invalid_argument("problem " + id + ": duplicate premise " + p.text());
  if (seen.contains(conclusion))
    throw std::invalid_argument("problem " + id + ": conclusion " + conclusion.text() + " is a premise");
}

const ProofNode& ProofState::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("unknown node id " + std::to_string(id));
  return it->second;
}

std::optional<NodeId> ProofState::find(const Formula& f) const {
  auto it = by_formula_.find(f);
  if (it == by_formula_.end()) return std::nullopt;
  return it->second;
}

std::vector<Formula> ProofState::justified_formulas() const {
  std::vector<Formula> out;
  for (const auto& [id, n] : nodes_)
    if (n.justified()) out.push_back(n.formula);
  return out;
}

bool operator==(const ProofState& a, const ProofState& b) {
  return a.problem_ == b.problem_ && a.direction_ == b.direction_ && a.nodes_ == b.nodes_ && a.goal_id_ == b.goal_id_ &&
         a.next_id_ == b.next_id_ && a.action_count_ == b.action_count_ && a.failed_count_ == b.failed_count_ &&
         a.restart_count_ == b.restart_count_;
}

NodeId ProofState::add_node(Formula f, NodeStatus status, Origin origin, std::optional<Justification> j,
                            TimestampMs at) {
  const NodeId id = next_id_++;
  by_formula_.emplace(f, id);
  nodes_.emplace(id, ProofNode{id, std::move(f), status, std::move(origin), std::move(j), at});
  return id;
}

void ProofState::reindex() {
  by_formula_.clear();
  for (const auto& [id, n] : nodes_)
    if (!by_formula_.emplace(n.formula, id).second)
      throw std::invalid_argument("two nodes share formula " + n.formula.text());
}

ProofState ProofState::from_parts(ProblemSpec problem, Direction direction, std::map<NodeId, ProofNode> nodes,
                                  NodeId goal_id, NodeId next_id, std::uint32_t actions, std::uint32_t failed,
                                  std::uint32_t restarts) {
  ProofState s;
  s.problem_ = std::move(problem);
  s.direction_ = direction;
  s.nodes_ = std::move(nodes);
  s.goal_id_ = goal_id;
  s.next_id_ = next_id;
  s.action_count_ = actions;
  s.failed_count_ = failed;
  s.restart_count_ = restarts;
  s.reindex();
  auto live = [&](NodeId id) { return s.nodes_.contains(id); };
  if (!live(goal_id)) throw std::invalid_argument("goal node missing");
  for (const auto& [id, n] : s.nodes_) {
    if (id != n.id || id >= next_id) throw std::invalid_argument("bad node id " + std::to_string(id));
    auto check = [&](const std::vector<NodeId>& ids) {
      for (NodeId r : ids)
        if (!live(r)) throw std::invalid_argument("node " + std::to_string(id) + " references a missing node");
    };
    check(n.origin.parents);
    check(n.origin.consumed);
    if (n.origin.child && !live(*n.origin.child))
      throw std::invalid_argument("node " + std::to_string(id) + " references a missing node");
    if (n.justification) check(n.justification->parents);
  }
  return s;
}

ProofState new_state(const ProblemSpec& problem, Direction direction, TimestampMs at) {
  problem.validate();
  ProofState s;
  s.problem_ = problem;
  s.direction_ = direction;
  for (const auto& p : problem.premises) s.add_node(p, NodeStatus::Justified, Origin{}, std::nullopt, at);
  s.goal_id_ = s.add_node(problem.conclusion, NodeStatus::Unjustified, Origin{OriginKind::Goal, {}, {}, {}, {}},
                          std::nullopt, at);
  return s;
}

namespace {

struct Matched {
  std::vector<NodeId> parents;
  Formula conclusion;
  Binding free;
};

std::optional<Matched> match_forward(const ProofState& s, const Rule& rule, std::vector<NodeId> order,
                                     const ForwardChoice& choice) {
  // Try the given order first, then the remaining permutations in id order.
  std::vector<NodeId> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<NodeId>> orders{order};
  do {
    if (sorted != order) orders.push_back(sorted);
  } while (std::next_permutation(sorted.begin(), sorted.end()));

  for (const auto& o : orders) {
    std::vector<Formula> premises;
    for (NodeId id : o) premises.push_back(s.node(id).formula);
    const ForwardResult r = apply_forward(rule, premises, choice.free);
    if (!choice.result) {
      if (!r.conclusions.empty()) return Matched{o, r.conclusions.front(), choice.free};
      continue;
    }
    if (std::find(r.conclusions.begin(), r.conclusions.end(), *choice.result) != r.conclusions.end())
      return Matched{o, *choice.result, choice.free};
    // A requested result can also fix a free metavariable (Addition's disjunct).
    for (const auto& t : r.templates)
      if (auto b = match_pattern(Pattern(t), *choice.result)) return Matched{o, *choice.result, *b};
  }
  return std::nullopt;
}

}  // namespace

StepResult step_forward(ProofState& s, const Rule& rule, const std::vector<NodeId>& parents,
                        const ForwardChoice& choice, TimestampMs at) {
  if (s.direction_ == Direction::BackwardOnly) throw DirectionError("forward derivations are disabled for this problem");
  for (NodeId id : parents)
    if (!s.node(id).justified()) throw std::invalid_argument("node " + std::to_string(id) + " is not justified");
  {
    std::vector<NodeId> distinct = parents;
    std::sort(distinct.begin(), distinct.end());
    if (std::adjacent_find(distinct.begin(), distinct.end()) != distinct.end())
      throw std::invalid_argument("a node is selected twice");
  }
  if (parents.size() != rule.arity())
    throw std::invalid_argument(rule.name() + " takes " + std::to_string(rule.arity()) + " premise(s)");
  if (rule.introduces_free_variable() && choice.free.empty() && !choice.result)
    throw std::invalid_argument(rule.name() + " needs a formula for its free metavariable");

  ++s.action_count_;
  const auto m = match_forward(s, rule, parents, choice);
  if (!m) {
    ++s.failed_count_;
    return {StepStatus::Failed, std::nullopt, {}, rule.name() + " does not apply to the selected propositions"};
  }

  Justification j{rule.name(), m->parents, m->free, false};
  if (auto existing = s.find(m->conclusion)) {
    ProofNode& n = s.nodes_.at(*existing);
    if (n.justified()) return {StepStatus::Duplicate, *existing, {}, m->conclusion.text() + " is already derived"};
    // Forward derivation meets an open subgoal: the subgoal is now justified.
    n.justification = std::move(j);
    justify_closure(s);
    return {StepStatus::Applied, *existing, {}, {}};
  }
  const NodeId id = s.add_node(m->conclusion, NodeStatus::Justified,
                               Origin{OriginKind::Forward, rule.name(), m->parents, {}, {}}, std::move(j), at);
  justify_closure(s);
  return {StepStatus::Applied, id, {id}, {}};
}

StepResult step_backward(ProofState& s, const Rule& rule, NodeId target, const BackwardSelector& selector,
                         TimestampMs at) {
  const ProofNode& t = s.node(target);
  if (t.justified()) throw std::invalid_argument("node " + std::to_string(target) + " is already justified");

  const auto justified = s.justified_formulas();
  const FormulaPool pool(justified);
  std::optional<SubgoalOption> option;
  if (const auto* index = std::get_if<std::size_t>(&selector)) {
    auto options = apply_backward(rule, t.formula, pool);
    if (!options.empty() && *index >= options.size())
      throw std::out_of_range("option " + std::to_string(*index) + " out of " + std::to_string(options.size()));
    if (!options.empty()) option = std::move(options[*index]);
  } else {
    option = refine_with_binding(rule, t.formula, std::get<Binding>(selector), pool);
  }
  ++s.action_count_;
  if (!option) {
    ++s.failed_count_;
    return {StepStatus::Failed, target, {}, rule.name() + " cannot refine " + t.formula.text()};
  }

  std::vector<NodeId> links;
  std::vector<NodeId> consumed;
  std::vector<Formula> fresh;
  for (const auto& premise : option->premises) {
    if (auto existing = s.find(premise)) {
      links.push_back(*existing);
      if (s.node(*existing).justified()) consumed.push_back(*existing);
    } else {
      links.push_back(-1);
      fresh.push_back(premise);
    }
  }

  Justification j{rule.name(), {}, option->binding, true};
  std::vector<NodeId> created;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i] == -1) {
      if (auto again = s.find(option->premises[i])) {  // same premise twice in one form
        links[i] = *again;
        continue;
      }
      links[i] = s.add_node(option->premises[i], NodeStatus::Unjustified,
                            Origin{OriginKind::BackwardSubgoal, rule.name(), {}, target, consumed}, std::nullopt, at);
      created.push_back(links[i]);
    }
  }
  j.parents = links;

  ProofNode& tn = s.nodes_.at(target);
  if (created.empty() && tn.justification == j)
    return {StepStatus::Duplicate, target, {}, "this refinement is already in place"};
  tn.justification = std::move(j);
  justify_closure(s);
  return {StepStatus::Applied, target, std::move(created), {}};
}

void justify_closure(ProofState& s) {
  std::unordered_set<NodeId> justified;
  for (const auto& [id, n] : s.nodes_)
    if (n.origin.kind == OriginKind::Premise) justified.insert(id);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [id, n] : s.nodes_) {
      if (justified.contains(id) || !n.justification) continue;
      const auto& ps = n.justification->parents;
      if (std::all_of(ps.begin(), ps.end(), [&](NodeId p) { return justified.contains(p); })) {
        justified.insert(id);
        changed = true;
      }
    }
  }
  for (auto& [id, n] : s.nodes_) n.status = justified.contains(id) ? NodeStatus::Justified : NodeStatus::Unjustified;
}

StepResult delete_node(ProofState& s, NodeId id) {
  const ProofNode& victim = s.node(id);
  if (victim.origin.kind == OriginKind::Premise) throw std::invalid_argument("premises cannot be deleted");
  if (victim.origin.kind == OriginKind::Goal) throw std::invalid_argument("the goal cannot be deleted");

  ++s.action_count_;
  s.by_formula_.erase(victim.formula);
  s.nodes_.erase(id);
  auto scrub = [id](std::vector<NodeId>& v) { v.erase(std::remove(v.begin(), v.end(), id), v.end()); };
  for (auto& [other, n] : s.nodes_) {
    scrub(n.origin.parents);
    scrub(n.origin.consumed);
    if (n.origin.child == id) n.origin.child.reset();
    if (n.justification) {
      const auto& ps = n.justification->parents;
      if (std::find(ps.begin(), ps.end(), id) != ps.end()) n.justification.reset();
    }
  }
  justify_closure(s);
  return {StepStatus::Applied, std::nullopt, {}, {}};
}

void restart(ProofState& s, TimestampMs at) {
  const std::uint32_t restarts = s.restart_count_ + 1;
  s = new_state(s.problem_, s.direction_, at);
  s.restart_count_ = restarts;
}

bool is_complete(const ProofState& s) { return s.node(s.goal_id()).justified(); }

std::set<NodeId> contributing_set(const ProofState& s) {
  if (!is_complete(s)) throw std::logic_error("proof is not complete");
  std::set<NodeId> out;
  std::vector<NodeId> stack{s.goal_id()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (!out.insert(id).second) continue;
    const ProofNode& n = s.node(id);
    if (n.origin.kind == OriginKind::Premise || !n.justification) continue;
    for (NodeId p : n.justification->parents) stack.push_back(p);
  }
  return out;
}

}  // namespace dt
