#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/group.hpp"
#include "dt/proof.hpp"

namespace dt {

enum class EventKind { Login, DeriveForward, DeriveBackward, Delete, Restart, HintRequest, HintShown, Complete };

std::string to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

/// One log record. Formulas are canonical text.
///
///   derive-forward   operands = selected parents, result = conclusion
///   derive-backward  operands = [target], premises = instantiated rule
///                    premises, choice = metavariable binding
///   delete           operands = [deleted formula]
///   hint-shown       rule/operands/result describe the suggested step
struct InteractionEvent {
  std::string student;
  Group group = Group::C;
  std::string problem;
  std::uint64_t seq = 0;
  TimestampMs timestamp = 0;
  EventKind kind = EventKind::Login;
  std::string rule;
  std::vector<std::string> operands;
  std::optional<std::string> result;
  bool success = true;
  /// Successful derivation that added nothing (formula already present).
  bool duplicate = false;
  std::vector<std::string> premises;
  std::map<std::string, std::string> choice;

  bool is_derivation() const noexcept {
    return kind == EventKind::DeriveForward || kind == EventKind::DeriveBackward;
  }
  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

/// Checks the per-record invariants; throws std::invalid_argument.
void validate(const InteractionEvent& e);

nlohmann::json to_json(const InteractionEvent& e);
InteractionEvent event_from_json(const nlohmann::json& j);

inline constexpr std::string_view kLogFormat = "deepthought-events";
inline constexpr int kLogVersion = 1;

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only JSON Lines writer. The first line of every file is a header
/// naming the format and version. Rejects seq regressions per
/// (student, problem), including across reopenings of the same file.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);

  void append(const InteractionEvent& e);
  void append(const std::vector<InteractionEvent>& events);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::map<std::pair<std::string, std::string>, std::uint64_t> last_seq_;
};

/// Reads a JSON Lines stream; records come back in (student, problem, seq)
/// order. Empty input yields no events. Throws LogError with the line number
/// on malformed records, duplicate seq numbers or an unsupported header.
std::vector<InteractionEvent> read_events(std::istream& in);
std::vector<InteractionEvent> load(const std::filesystem::path& path);
/// Every `*.jsonl` file in a directory, merged and ordered.
std::vector<InteractionEvent> load_dir(const std::filesystem::path& dir);

void write_events(std::ostream& out, const std::vector<InteractionEvent>& events);

void sort_events(std::vector<InteractionEvent>& events);

/// Events grouped per (student, problem) attempt, in order.
std::map<std::pair<std::string, std::string>, std::vector<InteractionEvent>> split_attempts(
    const std::vector<InteractionEvent>& events);

}  // namespace dt
