#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dt/proof.hpp"
#include "dt/rules.hpp"

namespace dt {

/// One forward derivation. `premises` follow the rule form's premise order;
/// `choice` carries the instantiation of free metavariables (Addition).
struct ProofStep {
  std::string rule;
  std::vector<Formula> premises;
  Formula conclusion;
  Binding choice;
  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

struct SearchOptions {
  std::size_t max_derivations = 12;
  /// Intermediate formulas may exceed the largest premise/goal by this many nodes.
  std::size_t size_slack = 4;
  const RuleCatalog* catalog = nullptr;  // standard catalog when null
};

/// Shortest forward proof of `goal` from `known`, as an ordered list of
/// steps, or nullopt if none exists within the bound.
///
/// Goal-directed iterative deepening: candidate steps come from backward
/// refinement of the goal, with free metavariables bound against the forward
/// closure of `known` (Conjunction and Addition excluded from the closure).
/// Steps are emitted in dependency order; ties go to the lower derivation
/// height, then canonical text.
std::optional<std::vector<ProofStep>> search_from(std::span<const Formula> known, const Formula& goal,
                                                  const SearchOptions& options = {});

std::optional<std::vector<ProofStep>> search_proof(const ProblemSpec& problem, const SearchOptions& options = {});

/// Lower-bound check used by tests: true iff a proof with at most
/// `max_derivations` steps exists.
bool proof_exists(const ProblemSpec& problem, std::size_t max_derivations, const SearchOptions& options = {});

class HintUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HintAction {
  bool backward = false;
  std::string rule;
  /// Forward: parent node ids in rule order. Backward: empty.
  std::vector<NodeId> parents;
  /// Backward: the node to refine.
  std::optional<NodeId> target;
  /// Forward: the conclusion. Backward: the refined target's formula.
  Formula result = Formula::atom('A');
  /// Backward: the instantiated rule premises (the new subgoals plus reused
  /// justified formulas). Forward: parent formulas.
  std::vector<Formula> premises;
  Binding binding;
  /// Steps left in the continuation, this one included.
  std::size_t remaining = 0;
};

/// Next step of the shortest continuation from the current justified set.
/// In backward-only mode this is a refinement of the open subgoal with the
/// shortest continuation. Throws HintUnavailable when help is disallowed, the
/// proof is complete, or no continuation exists within the bound.
HintAction next_step_hint(const ProofState& state, const SearchOptions& options = {});

/// The step a hint would suggest, without the help-allowed check. Forward: the
/// first step of the shortest continuation. Backward: among the open nodes the
/// goal is waiting on (leaves first, then any), the one with the shortest
/// continuation, refined by that continuation's last step. Backward planning
/// works in either direction mode.
HintAction plan_step(const ProofState& state, bool backward, const SearchOptions& options = {});

}  // namespace dt
