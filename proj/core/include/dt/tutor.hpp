#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dt/eventlog.hpp"
#include "dt/proof.hpp"
#include "dt/search.hpp"

namespace dt {

struct ScoreConfig {
  double w_optimality = 0.4;
  double w_accuracy = 0.3;
  double w_time = 0.3;
  double reference_minutes = 10.0;
  double session_gap_minutes = 30.0;
};

/// Active time of a trace: events split into sessions at gaps longer than the
/// threshold and at every login; the sum of within-session spans.
/// Throws std::invalid_argument if timestamps go backwards.
TimestampMs active_time_ms(const std::vector<InteractionEvent>& trace, double session_gap_minutes = 30.0);
std::size_t session_count(const std::vector<InteractionEvent>& trace, double session_gap_minutes = 30.0);

struct ScoreBreakdown {
  double optimality = 0;
  double accuracy = 0;
  double time_efficiency = 0;
  std::size_t derivations = 0;    // D: successful, non-duplicate derivations
  std::size_t applications = 0;   // all derivation attempts
  std::size_t successful = 0;
  double active_minutes = 0;
  int score = 0;
};

/// Score in [0, 100] for a completed attempt:
///   100 * (w_o * L_opt / max(L_opt, D) + w_a * successful / applications
///          + w_t * min(1, T_ref / T_active)), rounded half up.
/// Throws std::invalid_argument if the trace does not reach completion.
ScoreBreakdown score_breakdown(const std::vector<InteractionEvent>& trace, const ProblemSpec& problem,
                               std::size_t optimal_length, const ScoreConfig& config = {});
/// As above, with L_opt from search_proof.
int score_problem(const std::vector<InteractionEvent>& trace, const ProblemSpec& problem,
                  const ScoreConfig& config = {});

struct Metrics {
  double step_time_minutes = 0;     // problem time / derived propositions
  double problem_time_minutes = 0;  // active time
  std::size_t step_count = 0;       // successful, non-duplicate derivations
  std::size_t restart_count = 0;
  std::size_t session_count = 0;
  std::size_t backward_actions = 0;  // backward attempts, failed ones included
  std::size_t incorrect_applications = 0;
  std::size_t hint_requests = 0;
};

Metrics compute_metrics(const std::vector<InteractionEvent>& trace, double session_gap_minutes = 30.0);

enum class PlaybackStrategy { Forward, Backward };

struct PlaybackStep {
  bool backward = false;
  std::string rule;
  std::vector<Formula> premises;
  Formula conclusion = Formula::atom('A');
  Binding binding;
  TimestampMs delay_ms = 0;
};

/// Worked example script. Forward replays the shortest proof; Backward
/// presents the same steps in reverse, each refining its conclusion.
/// Throws HintUnavailable when no proof exists within the bound.
std::vector<PlaybackStep> playback_script(const ProblemSpec& problem, PlaybackStrategy strategy,
                                          TimestampMs step_delay_ms = 1500, const SearchOptions& options = {});

}  // namespace dt
