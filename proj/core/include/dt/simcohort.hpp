#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/eventlog.hpp"
#include "dt/problems.hpp"
#include "dt/search.hpp"

namespace dt::sim {

enum class Strategy { ForwardGreedy, ForwardRandom, BackwardChainer, Mixed };

std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

/// Agent behaviour.
///   forward-greedy   follows the shortest continuation
///   forward-random   half the time takes a random applicable forward step
///   backward-chainer refines open subgoals
///   mixed            backward with probability p_backward, else greedy
/// Any strategy makes an error (a random rule on random operands) with
/// probability error_rate. BPS problems force backward moves.
struct AgentPolicy {
  Strategy strategy = Strategy::ForwardGreedy;
  double p_backward = 0.5;
  double error_rate = 0.1;
  double latency_mean_s = 30.0;  // lognormal mean, clamped to [5 s, 20 min]
  double latency_jitter = 0.5;   // lognormal sigma
  double restart_propensity = 0.0;
  double hint_rate = 0.0;  // chance of asking for a hint first, where allowed
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
  static AgentPolicy from_json(const nlohmann::json& j);
};

struct SimulationOptions {
  /// Actions per try: after the first cap the agent restarts once, after the
  /// second it abandons the problem.
  std::size_t give_up_actions = 60;
  TimestampMs example_step_ms = 1500;
  SearchOptions search;
};

/// One attempt. RNG stream derived from (policy.seed, student, problem id),
/// so identical inputs give identical traces. WE and BWE problems produce a
/// login and a completion after the playback time.
std::vector<InteractionEvent> simulate(const ProblemSpec& problem, const AgentPolicy& policy,
                                       const std::string& student, Group group, TimestampMs start,
                                       const SimulationOptions& options = {});

/// C forward-greedy; T1 and T2 mixed with p_backward 0.3 and 0.5. Error rate
/// 0.15, restarts 0.01, hints 0.05 throughout.
std::array<AgentPolicy, 3> default_policies();

struct CohortConfig {
  std::size_t per_group = 20;
  std::uint64_t seed = 42;
  std::array<AgentPolicy, 3> policies = default_policies();
  TimestampMs start_ms = 1'700'000'000'000;
  std::size_t threads = 0;  // 0 = hardware concurrency
  SimulationOptions simulation;

  /// JSON object, or the flat TOML subset (see parse_cohort_config).
  static CohortConfig from_json(const nlohmann::json& j);
};

/// Reads a cohort file: JSON, or TOML limited to tables, strings, numbers,
/// booleans and arrays of those.
CohortConfig parse_cohort_config(std::string_view text);
nlohmann::json parse_toml_subset(std::string_view text);

struct StudentLog {
  std::string student;
  Group group = Group::C;
  std::vector<InteractionEvent> events;
};

/// Students S001... are assigned round-robin C, T1, T2 and run through their
/// treatment's curriculum. Agent seeds are derived from the cohort seed.
std::vector<StudentLog> generate_cohort(const CohortConfig& config, const ProblemBank& bank = ProblemBank::standard());

/// Writes one <student>.jsonl per student plus cohort.json to `dir`.
void write_cohort(const std::vector<StudentLog>& logs, const CohortConfig& config, const std::filesystem::path& dir);

}  // namespace dt::sim
