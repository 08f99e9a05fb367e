#include "dt/tutor.hpp"

#include <cmath>

#include "dt/replay.hpp"

namespace dt {

namespace {

template <typename F>
void for_each_session(const std::vector<InteractionEvent>& trace, double gap_minutes, F&& on_session) {
  const auto gap = static_cast<TimestampMs>(gap_minutes * 60'000.0);
  std::size_t begin = 0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i > 0) {
      if (trace[i].timestamp < trace[i - 1].timestamp)
        throw std::invalid_argument("trace timestamps go backwards at seq " + std::to_string(trace[i].seq));
      const bool split = trace[i].timestamp - trace[i - 1].timestamp > gap || trace[i].kind == EventKind::Login;
      if (split) {
        on_session(trace[begin].timestamp, trace[i - 1].timestamp);
        begin = i;
      }
    }
  }
  if (!trace.empty()) on_session(trace[begin].timestamp, trace.back().timestamp);
}

bool counts_as_derivation(const InteractionEvent& e) { return e.is_derivation() && e.success && !e.duplicate; }

}  // namespace

TimestampMs active_time_ms(const std::vector<InteractionEvent>& trace, double session_gap_minutes) {
  TimestampMs total = 0;
  for_each_session(trace, session_gap_minutes, [&](TimestampMs a, TimestampMs b) { total += b - a; });
  return total;
}

std::size_t session_count(const std::vector<InteractionEvent>& trace, double session_gap_minutes) {
  std::size_t n = 0;
  for_each_session(trace, session_gap_minutes, [&](TimestampMs, TimestampMs) { ++n; });
  return n;
}

ScoreBreakdown score_breakdown(const std::vector<InteractionEvent>& trace, const ProblemSpec& problem,
                               std::size_t optimal_length, const ScoreConfig& config) {
  const ProofState final_state = replay(problem, trace);
  if (!is_complete(final_state)) throw std::invalid_argument("cannot score an incomplete attempt");
  ScoreBreakdown b;
  for (const auto& e : trace) {
    if (!e.is_derivation()) continue;
    ++b.applications;
    if (e.success) ++b.successful;
    if (counts_as_derivation(e)) ++b.derivations;
  }
  const double l_opt = static_cast<double>(optimal_length);
  const double d = static_cast<double>(b.derivations);
  b.optimality = std::max(l_opt, d) == 0 ? 1.0 : l_opt / std::max(l_opt, d);
  b.accuracy = b.applications == 0 ? 1.0 : static_cast<double>(b.successful) / static_cast<double>(b.applications);
  b.active_minutes = static_cast<double>(active_time_ms(trace, config.session_gap_minutes)) / 60'000.0;
  b.time_efficiency = b.active_minutes <= 0 ? 1.0 : std::min(1.0, config.reference_minutes / b.active_minutes);
  const double raw =
      100.0 * (config.w_optimality * b.optimality + config.w_accuracy * b.accuracy + config.w_time * b.time_efficiency);
  // Half up, with a little slack for binary fractions such as 59.999999.
  b.score = static_cast<int>(std::floor(raw + 0.5 + 1e-9));
  return b;
}

int score_problem(const std::vector<InteractionEvent>& trace, const ProblemSpec& problem,
                  const ScoreConfig& config) {
  auto proof = search_proof(problem);
  if (!proof) throw std::invalid_argument("problem " + problem.id + " has no proof within the search bound");
  return score_breakdown(trace, problem, proof->size(), config).score;
}

Metrics compute_metrics(const std::vector<InteractionEvent>& trace, double session_gap_minutes) {
  Metrics m;
  for (const auto& e : trace) {
    if (counts_as_derivation(e)) ++m.step_count;
    if (e.is_derivation() && !e.success) ++m.incorrect_applications;
    if (e.kind == EventKind::DeriveBackward) ++m.backward_actions;
    if (e.kind == EventKind::Restart) ++m.restart_count;
    if (e.kind == EventKind::HintRequest) ++m.hint_requests;
  }
  m.problem_time_minutes = static_cast<double>(active_time_ms(trace, session_gap_minutes)) / 60'000.0;
  m.session_count = session_count(trace, session_gap_minutes);
  m.step_time_minutes = m.step_count == 0 ? 0.0 : m.problem_time_minutes / static_cast<double>(m.step_count);
  return m;
}

}  // namespace dt
