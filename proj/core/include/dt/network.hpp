#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/eventlog.hpp"
#include "dt/group.hpp"
#include "dt/proof.hpp"

namespace dt::mining {

/// Canonical texts of the nodes in a state, in formula order: premises,
/// derivations and backward subgoals, justified or not. The goal enters once
/// it is justified.
using StateKey = std::vector<std::string>;

StateKey state_key(const ProofState& state);
/// "{A, A⇒B, B}"
std::string key_text(const StateKey& key);

using GroupCounts = std::array<std::size_t, 3>;

struct NetworkNode {
  StateKey key;
  GroupCounts visits{};
  std::vector<double> dwell_seconds;    // active time spent before leaving
  std::vector<std::size_t> steps_so_far;  // derivations made on arrival
  bool start = false;
  bool goal = false;
  friend bool operator==(const NetworkNode&, const NetworkNode&) = default;
};

struct NetworkEdge {
  std::size_t from = 0, to = 0;
  std::string action;  // e.g. "DeM(¬(K∧M))", "BW HS(A⇒¬C)", "Delete(B)"
  bool backward = false;
  GroupCounts frequency{};
  std::vector<double> seconds_before;  // active time since the previous action
  friend bool operator==(const NetworkEdge&, const NetworkEdge&) = default;
};

/// A formula the student added to the proof (forward result or new backward subgoal).
struct Derivation {
  std::string formula;
  double active_minutes = 0;  // since the start of the attempt
  std::size_t steps_before = 0;
  bool backward = false;
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct TraceRecord {
  std::string student;
  Group group = Group::C;
  bool complete = false;
  std::vector<std::size_t> nodes;  // visited states, start first
  std::vector<std::size_t> edges;  // edges[i] leads from nodes[i] to nodes[i+1]
  std::vector<Derivation> derivations;
  /// Formulas in the final contributing set (complete traces only).
  std::vector<std::string> contributing;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// State-action multigraph of every attempt at one problem.
struct InteractionNetwork {
  std::string problem;
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;
  std::size_t start = 0;
  std::vector<TraceRecord> traces;

  std::optional<std::size_t> find(const StateKey& key) const;
  /// Formulas contributing to at least one completed trace.
  std::vector<std::string> contributing_union() const;

  nlohmann::json to_json() const;
  static InteractionNetwork from_json(const nlohmann::json& j);
  friend bool operator==(const InteractionNetwork&, const InteractionNetwork&) = default;
};

struct NetworkOptions {
  double session_gap_minutes = 30.0;
};

/// Replays every attempt in `events` (all for `problem`) and merges the
/// resulting interactions. Attempts without a single proof action (viewed
/// worked examples, empty logins) are skipped. Throws std::invalid_argument
/// for events of another problem and ReplayError for corrupt traces.
InteractionNetwork build_network(const std::vector<InteractionEvent>& events, const ProblemSpec& problem,
                                 const NetworkOptions& options = {});

}  // namespace dt::mining
