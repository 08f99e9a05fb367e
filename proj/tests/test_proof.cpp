#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dt/problems.hpp"
#include "dt/proof.hpp"
#include "dt/search.hpp"
#include "oracles.hpp"

using dt::Formula;
using dt::NodeId;
using dt::parse;

namespace {

const dt::Rule& rule(const char* name) { return dt::RuleCatalog::standard().at(name); }

dt::ProblemSpec problem(std::initializer_list<const char*> premises, const char* goal) {
  dt::ProblemSpec p;
  p.id = "t";
  for (auto t : premises) p.premises.push_back(parse(t));
  p.conclusion = parse(goal);
  return p;
}

const dt::ProblemSpec& bank(const char* id) { return dt::ProblemBank::standard().at(id); }

NodeId id_of(const dt::ProofState& s, const char* text) {
  auto id = s.find(parse(text));
  REQUIRE(id);
  return *id;
}

dt::StepResult fwd(dt::ProofState& s, const char* r, std::initializer_list<const char*> parents,
                   const char* result = nullptr) {
  std::vector<NodeId> ids;
  for (auto p : parents) ids.push_back(id_of(s, p));
  dt::ForwardChoice c;
  if (result) c.result = parse(result);
  return dt::step_forward(s, rule(r), ids, c);
}

// Repeated single passes: a node becomes justified when every parent was
// justified after the previous pass.
std::map<NodeId, bool> naive_status(const dt::ProofState& s) {
  std::map<NodeId, bool> ok;
  for (const auto& [id, n] : s.nodes()) ok[id] = n.origin.kind == dt::OriginKind::Premise;
  for (;;) {
    auto next = ok;
    for (const auto& [id, n] : s.nodes()) {
      if (ok[id] || !n.justification) continue;
      bool all = true;
      for (NodeId p : n.justification->parents) all = all && s.nodes().contains(p) && ok[p];
      next[id] = all;
    }
    if (next == ok) return ok;
    ok = next;
  }
}

std::map<NodeId, bool> status_of(const dt::ProofState& s) {
  std::map<NodeId, bool> out;
  for (const auto& [id, n] : s.nodes()) out[id] = n.justified();
  return out;
}

std::set<NodeId> ancestors(const dt::ProofState& s, NodeId from) {
  std::set<NodeId> seen;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    if (!seen.insert(id).second) return;
    const auto& n = s.node(id);
    if (n.origin.kind != dt::OriginKind::Premise && n.justification)
      for (NodeId p : n.justification->parents) walk(p);
  };
  walk(from);
  return seen;
}

void solve_2_4(dt::ProofState& s) {
  REQUIRE(fwd(s, "Simplification", {"D∧¬(A⇒¬C)"}, "¬(A⇒¬C)").ok());
  REQUIRE(fwd(s, "Disjunctive Syllogism", {"B∨(A⇒¬C)", "¬(A⇒¬C)"}).ok());
  REQUIRE(fwd(s, "Modus Ponens", {"B", "B⇒(A⇒J)"}).ok());
  REQUIRE(fwd(s, "Hypothetical Syllogism", {"A⇒J", "J⇒¬C"}).ok());
}

}  // namespace

TEST_CASE("new_state") {
  auto s = dt::new_state(bank("5.4"));
  REQUIRE(s.nodes().size() == 4);
  std::size_t justified = 0;
  for (const auto& [id, n] : s.nodes())
    if (n.justified()) ++justified;
  CHECK(justified == 3);
  CHECK(s.node(s.goal_id()).formula == parse("¬J"));
  CHECK_FALSE(s.node(s.goal_id()).justified());
  CHECK(s.node(s.goal_id()).origin.kind == dt::OriginKind::Goal);

  auto s24 = dt::new_state(bank("2.4"));
  CHECK(s24.nodes().size() == 5);
  CHECK(s24.node(s24.goal_id()).formula == parse("A⇒¬C"));

  CHECK_THROWS_AS(dt::new_state(problem({"A"}, "A")), std::invalid_argument);
  CHECK_THROWS_AS(dt::new_state(problem({"A", "A"}, "B")), std::invalid_argument);
  CHECK_THROWS_AS(dt::new_state(problem({}, "B")), std::invalid_argument);
}

TEST_CASE("step_forward") {
  SUBCASE("DeMorgan from the 5.4 start state") {
    auto s = dt::new_state(bank("5.4"));
    auto r = fwd(s, "DeMorgan", {"¬(K∧M)"});
    REQUIRE(r.status == dt::StepStatus::Applied);
    CHECK(s.node(*r.node).formula == parse("¬K∨¬M"));
    CHECK(s.node(*r.node).justified());
    CHECK(s.action_count() == 1);
  }
  SUBCASE("a mismatch leaves the state alone apart from the counters") {
    auto s = dt::new_state(problem({"A", "B⇒C"}, "C"));
    auto before = s.nodes();
    auto r = fwd(s, "Modus Ponens", {"A", "B⇒C"});
    CHECK(r.status == dt::StepStatus::Failed);
    CHECK(s.nodes() == before);
    CHECK(s.action_count() == 1);
    CHECK(s.failed_count() == 1);
  }
  SUBCASE("Hypothetical Syllogism") {
    auto s = dt::new_state(problem({"K⇒¬E", "¬E⇒¬A"}, "¬K∨¬A"));
    auto r = fwd(s, "Hypothetical Syllogism", {"K⇒¬E", "¬E⇒¬A"});
    REQUIRE(r.ok());
    CHECK(s.node(*r.node).formula == parse("K⇒¬A"));
  }
  SUBCASE("parents in either order") {
    auto s = dt::new_state(problem({"A⇒B", "A"}, "B"));
    auto r = fwd(s, "Modus Ponens", {"A⇒B", "A"});
    REQUIRE(r.ok());
    CHECK(is_complete(s));
    const auto& j = *s.node(s.goal_id()).justification;
    CHECK(s.node(j.parents[0]).formula == parse("A"));
  }
  SUBCASE("duplicates add nothing") {
    auto s = dt::new_state(bank("2.4"));
    REQUIRE(fwd(s, "Simplification", {"D∧¬(A⇒¬C)"}, "D").status == dt::StepStatus::Applied);
    auto n = s.nodes().size();
    CHECK(fwd(s, "Simplification", {"D∧¬(A⇒¬C)"}, "D").status == dt::StepStatus::Duplicate);
    CHECK(s.nodes().size() == n);
  }
  SUBCASE("errors") {
    auto s = dt::new_state(bank("2.4"));
    CHECK_THROWS_AS(dt::step_forward(s, rule("Modus Ponens"), {999, 1}), std::out_of_range);
    CHECK_THROWS_AS(dt::step_forward(s, rule("Modus Ponens"), {1}), std::invalid_argument);
    CHECK_THROWS_AS(dt::step_forward(s, rule("Modus Ponens"), {1, s.goal_id()}), std::invalid_argument);
    auto b = dt::new_state(bank("2.4"), dt::Direction::BackwardOnly);
    CHECK_THROWS_AS(fwd(b, "Simplification", {"D∧¬(A⇒¬C)"}), dt::DirectionError);
    CHECK(b.action_count() == 0);
  }
}

TEST_CASE("step_backward") {
  SUBCASE("Hypothetical Syllogism toward A⇒¬C") {
    auto s = dt::new_state(bank("2.4"), dt::Direction::BackwardOnly);
    auto r = dt::step_backward(s, rule("Hypothetical Syllogism"), s.goal_id(),
                               dt::Binding{{'x', parse("A")}, {'y', parse("J")}, {'z', parse("¬C")}});
    REQUIRE(r.status == dt::StepStatus::Applied);
    REQUIRE(r.created.size() == 1);
    const auto& sub = s.node(r.created[0]);
    CHECK(sub.formula == parse("A⇒J"));
    CHECK_FALSE(sub.justified());
    CHECK(sub.origin.kind == dt::OriginKind::BackwardSubgoal);
    CHECK(sub.origin.child == s.goal_id());
    CHECK(sub.origin.consumed == std::vector<NodeId>{id_of(s, "J⇒¬C")});
  }
  SUBCASE("Modus Tollens with H⇒(K∧A) given") {
    auto s = dt::new_state(bank("7.3"), dt::Direction::BackwardOnly);
    auto options = dt::apply_backward(rule("Modus Tollens"), parse("¬H"), dt::FormulaPool(s.justified_formulas()));
    auto it = std::find_if(options.begin(), options.end(),
                           [](const auto& o) { return o.subgoals() == std::vector{parse("¬(K∧A)")}; });
    REQUIRE(it != options.end());
    auto r = dt::step_backward(s, rule("Modus Tollens"), s.goal_id(),
                               static_cast<std::size_t>(it - options.begin()));
    REQUIRE(r.ok());
    CHECK(s.node(id_of(s, "¬(K∧A)")).status == dt::NodeStatus::Unjustified);
    CHECK(s.action_count() == 1);
  }
  SUBCASE("a subgoal equal to a premise links to it") {
    auto s = dt::new_state(problem({"L⇒M", "¬(K∧M)"}, "J⇒M"));
    auto r = dt::step_backward(s, rule("Hypothetical Syllogism"), s.goal_id(),
                               dt::Binding{{'x', parse("J")}, {'y', parse("L")}, {'z', parse("M")}});
    REQUIRE(r.ok());
    CHECK(r.created.size() == 1);
    const auto& j = *s.node(s.goal_id()).justification;
    CHECK(j.parents[1] == id_of(s, "L⇒M"));
    CHECK(s.node(j.parents[1]).justified());
    CHECK_FALSE(is_complete(s));
  }
  SUBCASE("refinement whose premises all exist completes the goal") {
    auto s = dt::new_state(problem({"A", "A⇒B"}, "B"), dt::Direction::BackwardOnly);
    auto r = dt::step_backward(s, rule("Modus Ponens"), s.goal_id(), std::size_t{0});
    REQUIRE(r.ok());
    CHECK(r.created.empty());
    CHECK(is_complete(s));
  }
  SUBCASE("errors") {
    auto s = dt::new_state(bank("2.4"));
    CHECK_THROWS_AS(dt::step_backward(s, rule("Modus Ponens"), id_of(s, "J⇒¬C"), std::size_t{0}),
                    std::invalid_argument);
    auto before = s;
    CHECK_THROWS_AS(dt::step_backward(s, rule("Hypothetical Syllogism"), s.goal_id(), std::size_t{999}),
                    std::out_of_range);
    CHECK(s == before);
    auto r = dt::step_backward(s, rule("Conjunction"), s.goal_id(), std::size_t{0});
    CHECK(r.status == dt::StepStatus::Failed);
    CHECK(s.failed_count() == 1);
  }
}

TEST_CASE("justify_closure") {
  // D ⇐ C ⇐ B ⇐ A through three backward Modus Ponens refinements.
  auto s = dt::new_state(problem({"A", "A⇒B", "B⇒C", "C⇒D"}, "D"), dt::Direction::BackwardOnly);
  auto mp = [&](const char* x, const char* y) {
    auto target = id_of(s, y);
    return dt::step_backward(s, rule("Modus Ponens"), target, dt::Binding{{'x', parse(x)}, {'y', parse(y)}});
  };
  REQUIRE(mp("C", "D").ok());
  REQUIRE(mp("B", "C").ok());
  CHECK_FALSE(is_complete(s));
  REQUIRE(mp("A", "B").ok());
  CHECK(is_complete(s));

  std::map<NodeId, dt::ProofNode> nodes = s.nodes();
  for (auto& [id, n] : nodes)
    if (n.origin.kind != dt::OriginKind::Premise) n.status = dt::NodeStatus::Unjustified;
  auto raw = dt::ProofState::from_parts(s.problem(), s.direction(), nodes, s.goal_id(), s.next_id(),
                                        s.action_count(), s.failed_count(), s.restart_count());
  auto expected = naive_status(raw);
  dt::justify_closure(raw);
  CHECK(status_of(raw) == expected);
  CHECK(raw == s);

  auto again = raw;
  dt::justify_closure(again);
  CHECK(again == raw);

  auto fresh = dt::new_state(bank("2.4"));
  auto copy = fresh;
  dt::justify_closure(copy);
  CHECK(copy == fresh);
}

TEST_CASE("delete_node and restart") {
  auto s = dt::new_state(problem({"A", "A⇒B", "B⇒C", "C⇒D"}, "D"));
  REQUIRE(fwd(s, "Modus Ponens", {"A", "A⇒B"}).ok());
  REQUIRE(fwd(s, "Modus Ponens", {"B", "B⇒C"}).ok());
  REQUIRE(fwd(s, "Material Implication", {"C⇒D"}).ok());

  SUBCASE("leaf") {
    auto leaf = id_of(s, "¬C∨D");
    REQUIRE(dt::delete_node(s, leaf).ok());
    CHECK_FALSE(s.find(parse("¬C∨D")));
    CHECK(s.node(id_of(s, "C")).justified());
  }
  SUBCASE("dependents fall back to unjustified") {
    REQUIRE(dt::delete_node(s, id_of(s, "B")).ok());
    CHECK_FALSE(s.find(parse("B")));
    CHECK(status_of(s) == naive_status(s));
    CHECK_FALSE(s.node(id_of(s, "C")).justification);
    CHECK_FALSE(s.node(id_of(s, "C")).justified());
  }
  SUBCASE("premises and the goal stay") {
    CHECK_THROWS_AS(dt::delete_node(s, id_of(s, "A")), std::invalid_argument);
    CHECK_THROWS_AS(dt::delete_node(s, s.goal_id()), std::invalid_argument);
  }
  SUBCASE("restart") {
    auto fresh = dt::new_state(s.problem());
    auto f2 = fresh;
    dt::restart(f2);
    CHECK(f2.nodes() == fresh.nodes());
    CHECK(f2.restart_count() == 1);
    dt::restart(s);
    CHECK(s.nodes() == fresh.nodes());
    CHECK(s.restart_count() == 1);
  }
}

TEST_CASE("completion and the contributing set") {
  auto fresh = dt::new_state(bank("2.4"));
  CHECK_FALSE(is_complete(fresh));
  CHECK_THROWS_AS(dt::contributing_set(fresh), std::logic_error);

  auto s = fresh;
  REQUIRE(fwd(s, "Material Implication", {"J⇒¬C"}).ok());
  REQUIRE(fwd(s, "DeMorgan", {"¬J∨¬C"}).ok());
  REQUIRE(fwd(s, "Simplification", {"D∧¬(A⇒¬C)"}, "D").ok());
  CHECK_FALSE(is_complete(s));
  solve_2_4(s);
  REQUIRE(is_complete(s));

  auto set = dt::contributing_set(s);
  CHECK(set == ancestors(s, s.goal_id()));
  std::size_t derived = 0;
  for (NodeId id : set)
    if (s.node(id).origin.kind != dt::OriginKind::Premise) ++derived;
  CHECK(derived == 4);
  CHECK_FALSE(set.contains(id_of(s, "¬(J∧C)")));
  CHECK_FALSE(set.contains(id_of(s, "D")));
  for (const char* f : {"¬(A⇒¬C)", "B", "A⇒J", "A⇒¬C"}) CHECK(set.contains(id_of(s, f)));
}

TEST_CASE("search_proof on 2.4") {
  auto proof = dt::search_proof(bank("2.4"));
  REQUIRE(proof);
  REQUIRE(proof->size() == 4);
  CHECK_FALSE(dt::proof_exists(bank("2.4"), 3));
  std::vector<std::string> got;
  for (const auto& step : *proof) got.push_back(step.rule + " " + step.conclusion.text());
  CHECK(got == std::vector<std::string>{"Simplification ¬(A⇒¬C)", "Disjunctive Syllogism B", "Modus Ponens A⇒J",
                                        "Hypothetical Syllogism A⇒¬C"});
}

TEST_CASE("search_proof on 7.3 stays within eight derivations and is minimal") {
  auto proof = dt::search_proof(bank("7.3"));
  REQUIRE(proof);
  CHECK(proof->size() <= 8);
  CHECK_FALSE(dt::proof_exists(bank("7.3"), proof->size() - 1));
}

TEST_CASE("search_from with the goal already known") {
  std::vector<Formula> known{parse("A"), parse("B")};
  auto p = dt::search_from(known, parse("A"));
  REQUIRE(p);
  CHECK(p->empty());
  CHECK_FALSE(dt::search_from(known, parse("C")));
}

TEST_CASE("every bank problem has a proof that replays and is sound") {
  for (const auto& problem : dt::ProblemBank::standard().problems()) {
    INFO(problem.id);
    auto proof = dt::search_proof(problem);
    REQUIRE(proof);
    auto s = dt::new_state(problem);
    for (const auto& step : *proof) {
      CHECK(oracle::entails(step.premises, step.conclusion));
      std::vector<NodeId> ids;
      for (const auto& p : step.premises) {
        auto id = s.find(p);
        REQUIRE(id);
        ids.push_back(*id);
      }
      auto r = dt::step_forward(s, dt::RuleCatalog::standard().at(step.rule), ids, {step.choice, step.conclusion});
      CHECK(r.status == dt::StepStatus::Applied);
    }
    CHECK(is_complete(s));
  }
}

TEST_CASE("next_step_hint") {
  SUBCASE("fresh 5.4: first step of the shortest proof") {
    auto proof = dt::search_proof(bank("5.4"));
    REQUIRE(proof);
    auto h = dt::next_step_hint(dt::new_state(bank("5.4")));
    CHECK_FALSE(h.backward);
    CHECK(h.rule == proof->front().rule);
    CHECK(h.result == proof->front().conclusion);
    CHECK(h.premises == proof->front().premises);
    CHECK(h.remaining == proof->size());
  }
  SUBCASE("non-contributing derivations do not change the hint") {
    auto s = dt::new_state(bank("2.4"));
    REQUIRE(fwd(s, "Simplification", {"D∧¬(A⇒¬C)"}, "D").ok());
    auto a = dt::next_step_hint(s);
    auto b = dt::next_step_hint(dt::new_state(bank("2.4")));
    CHECK(a.rule == b.rule);
    CHECK(a.result == b.result);
    CHECK(a.premises == b.premises);
  }
  SUBCASE("backward-only: refine the goal with the proof's last step") {
    auto s = dt::new_state(bank("2.4"), dt::Direction::BackwardOnly);
    auto h = dt::next_step_hint(s);
    CHECK(h.backward);
    CHECK(h.rule == "Hypothetical Syllogism");
    CHECK(h.target == s.goal_id());
    CHECK(std::find(h.premises.begin(), h.premises.end(), parse("A⇒J")) != h.premises.end());
  }
  SUBCASE("complete or help disallowed") {
    auto s = dt::new_state(bank("2.4"));
    solve_2_4(s);
    CHECK_THROWS_AS(dt::next_step_hint(s), dt::HintUnavailable);
    auto p = bank("2.4");
    p.help_allowed = false;
    CHECK_THROWS_AS(dt::next_step_hint(dt::new_state(p)), dt::HintUnavailable);
    CHECK_NOTHROW(dt::plan_step(dt::new_state(p), false));
  }
}
