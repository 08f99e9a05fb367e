#pragma once

#include <string>
#include <vector>

#include "dt/eventlog.hpp"
#include "dt/proof.hpp"
#include "dt/search.hpp"

namespace dt {

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// BWE and BPS problems run in backward-only mode.
Direction direction_for(ProofType type);

/// Rebuilds the proof state of one attempt by re-applying its events in seq
/// order, starting at the first event's timestamp. Nodes are located by formula text. Throws ReplayError when an event
/// does not reproduce (missing node, success flag mismatch, wrong result).
ProofState replay(const ProblemSpec& problem, const std::vector<InteractionEvent>& events);

/// Applies a single event to `state`; the building block of replay().
void apply_event(ProofState& state, const InteractionEvent& event);

/// Drives a ProofState and records every action as an InteractionEvent, so
/// the log always replays to the live state. Shared by the tutor service and
/// the simulated cohort. Construction logs the opening login, whose timestamp
/// replay() uses as the attempt start.
class AttemptRecorder {
 public:
  AttemptRecorder(std::string student, Group group, const ProblemSpec& problem, TimestampMs start);

  const ProofState& state() const noexcept { return state_; }
  const std::vector<InteractionEvent>& events() const noexcept { return events_; }
  const ProblemSpec& problem() const noexcept { return state_.problem(); }
  bool complete() const { return is_complete(state_); }

  void login(TimestampMs at);
  StepResult forward(const Rule& rule, const std::vector<NodeId>& parents, const ForwardChoice& choice, TimestampMs at);
  StepResult backward(const Rule& rule, NodeId target, const BackwardSelector& selector, TimestampMs at);
  StepResult remove(NodeId id, TimestampMs at);
  void restart(TimestampMs at);
  /// Logs hint-request, then hint-shown on success. Rethrows HintUnavailable.
  HintAction hint(TimestampMs at, const SearchOptions& options = {});
  /// Records a worked-example view (no derivations of the student's own).
  void viewed_example(TimestampMs at);

 private:
  InteractionEvent make(EventKind kind, TimestampMs at);
  void after_step(const StepResult& r, TimestampMs at);

  std::string student_;
  Group group_;
  ProofState state_;
  std::vector<InteractionEvent> events_;
  std::uint64_t seq_ = 0;
  bool completed_logged_ = false;
};

}  // namespace dt
