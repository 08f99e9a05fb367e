#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dt/formula.hpp"
#include "dt/rules.hpp"

namespace dt {

using NodeId = std::int64_t;
using TimestampMs = std::int64_t;

enum class ProofType { WE, PS, BWE, BPS };

std::string to_string(ProofType t);
ProofType proof_type_from_string(std::string_view s);

struct ProblemSpec {
  std::string id;
  std::vector<Formula> premises;
  Formula conclusion = Formula::atom('A');
  ProofType type = ProofType::PS;
  bool help_allowed = true;

  /// Throws std::invalid_argument on empty or duplicate premises, or a
  /// conclusion that is already a premise.
  void validate() const;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

enum class NodeStatus { Justified, Unjustified };
enum class OriginKind { Premise, Forward, BackwardSubgoal, Goal };
enum class Direction { Both, BackwardOnly };

std::string to_string(NodeStatus s);
std::string to_string(OriginKind k);
std::string to_string(Direction d);

/// How a node came to exist. Ids of deleted nodes are scrubbed from it.
struct Origin {
  OriginKind kind = OriginKind::Premise;
  std::string rule;
  std::vector<NodeId> parents;   // forward
  std::optional<NodeId> child;   // backward-subgoal: the refined target
  std::vector<NodeId> consumed;  // backward-subgoal: justified premises reused
  friend bool operator==(const Origin&, const Origin&) = default;
};

/// Rule application that justifies (or, while parents are open, would
/// justify) a node. Parents are ordered as the rule form's premises.
struct Justification {
  std::string rule;
  std::vector<NodeId> parents;
  Binding choice;
  bool backward = false;
  friend bool operator==(const Justification&, const Justification&) = default;
};

struct ProofNode {
  NodeId id = 0;
  Formula formula = Formula::atom('A');
  NodeStatus status = NodeStatus::Unjustified;
  Origin origin;
  std::optional<Justification> justification;
  TimestampMs created_at = 0;

  bool justified() const noexcept { return status == NodeStatus::Justified; }
  friend bool operator==(const ProofNode&, const ProofNode&) = default;
};

enum class StepStatus { Applied, Duplicate, Failed };
std::string to_string(StepStatus s);

struct StepResult {
  StepStatus status = StepStatus::Failed;
  /// Node holding the derived formula (forward) or the refined target (backward).
  std::optional<NodeId> node;
  std::vector<NodeId> created;
  std::string message;

  bool ok() const noexcept { return status != StepStatus::Failed; }
};

/// Caller input for forward steps. `free` binds free conclusion metavariables
/// (Addition's disjunct as {'y', F}); `result` picks one conclusion when a rule
/// yields several. Without `result` the first conclusion in canonical order wins.
struct ForwardChoice {
  Binding free;
  std::optional<Formula> result;
};

/// Which backward option to materialize: an index into apply_backward's list,
/// or an explicit metavariable binding.
using BackwardSelector = std::variant<std::size_t, Binding>;

class DirectionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ProofState {
 public:
  ProofState() = default;

  const ProblemSpec& problem() const noexcept { return problem_; }
  Direction direction() const noexcept { return direction_; }
  const std::map<NodeId, ProofNode>& nodes() const noexcept { return nodes_; }
  const ProofNode& node(NodeId id) const;
  std::optional<NodeId> find(const Formula& f) const;
  NodeId goal_id() const noexcept { return goal_id_; }
  NodeId next_id() const noexcept { return next_id_; }

  std::uint32_t action_count() const noexcept { return action_count_; }
  std::uint32_t failed_count() const noexcept { return failed_count_; }
  std::uint32_t restart_count() const noexcept { return restart_count_; }

  std::vector<Formula> justified_formulas() const;

  friend bool operator==(const ProofState& a, const ProofState& b);

  // Raw constructor for snapshot loading. Validates id references.
  static ProofState from_parts(ProblemSpec problem, Direction direction, std::map<NodeId, ProofNode> nodes,
                               NodeId goal_id, NodeId next_id, std::uint32_t actions, std::uint32_t failed,
                               std::uint32_t restarts);

 private:
  friend ProofState new_state(const ProblemSpec&, Direction, TimestampMs);
  friend StepResult step_forward(ProofState&, const Rule&, const std::vector<NodeId>&, const ForwardChoice&,
                                 TimestampMs);
  friend StepResult step_backward(ProofState&, const Rule&, NodeId, const BackwardSelector&, TimestampMs);
  friend void justify_closure(ProofState&);
  friend StepResult delete_node(ProofState&, NodeId);
  friend void restart(ProofState&, TimestampMs);

  NodeId add_node(Formula f, NodeStatus status, Origin origin, std::optional<Justification> j, TimestampMs at);
  void reindex();

  ProblemSpec problem_;
  Direction direction_ = Direction::Both;
  std::map<NodeId, ProofNode> nodes_;
  std::unordered_map<Formula, NodeId> by_formula_;
  NodeId goal_id_ = 0;
  NodeId next_id_ = 1;
  std::uint32_t action_count_ = 0;
  std::uint32_t failed_count_ = 0;
  std::uint32_t restart_count_ = 0;
};

/// One justified node per premise, then the unjustified goal node.
ProofState new_state(const ProblemSpec& problem, Direction direction = Direction::Both, TimestampMs at = 0);

/// Parents may be given in any order; each permutation is tried, starting
/// with the given one, and the matched order is recorded. Throws on unknown or
/// unjustified parents and in backward-only mode. A rule mismatch returns
/// Failed and leaves the state unchanged apart from the action counters.
StepResult step_forward(ProofState& state, const Rule& rule, const std::vector<NodeId>& parents,
                        const ForwardChoice& choice = {}, TimestampMs at = 0);

/// Refines an unjustified target. Subgoals equal to existing nodes are linked
/// instead of created. Re-refining a target replaces its pending
/// justification. Throws on a justified target or an out-of-range index.
StepResult step_backward(ProofState& state, const Rule& rule, NodeId target, const BackwardSelector& selector,
                         TimestampMs at = 0);

/// Recomputes every status as the least fixpoint: premises are justified, and
/// so is any node whose justification's parents are all justified.
void justify_closure(ProofState& state);

/// Removes a derived node. Justifications that reference it are dropped, so
/// dependents fall back to unjustified. Throws for premises and the goal.
StepResult delete_node(ProofState& state, NodeId id);

/// Fresh state for the same problem with the restart counter incremented.
void restart(ProofState& state, TimestampMs at = 0);

bool is_complete(const ProofState& state);

/// Justification ancestors of the goal, premises and goal included. Throws
/// std::logic_error if the proof is incomplete.
std::set<NodeId> contributing_set(const ProofState& state);

}  // namespace dt
