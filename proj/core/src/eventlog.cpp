#include "dt/eventlog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dt {

std::string to_string(Group g) {
  switch (g) {
    case Group::C: return "C";
    case Group::T1: return "T1";
    case Group::T2: return "T2";
  }
  return "?";
}

Group group_from_string(std::string_view s) {
  if (s == "C") return Group::C;
  if (s == "T1") return Group::T1;
  if (s == "T2") return Group::T2;
  throw std::invalid_argument("unknown group '" + std::string(s) + "'");
}

namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::Login, "login"},
    {EventKind::DeriveForward, "derive-forward"},
    {EventKind::DeriveBackward, "derive-backward"},
    {EventKind::Delete, "delete"},
    {EventKind::Restart, "restart"},
    {EventKind::HintRequest, "hint-request"},
    {EventKind::HintShown, "hint-shown"},
    {EventKind::Complete, "complete"},
};

}  // namespace

std::string to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return std::string(name);
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  throw std::invalid_argument("unknown event kind '" + std::string(s) + "'");
}

void validate(const InteractionEvent& e) {
  if (e.student.empty()) throw std::invalid_argument("event without student id");
  if (e.problem.empty()) throw std::invalid_argument("event without problem id");
  if (e.is_derivation()) {
    if (e.rule.empty()) throw std::invalid_argument("derivation without rule");
    if (e.operands.empty()) throw std::invalid_argument("derivation without operands");
    if (!e.success && e.result) throw std::invalid_argument("failed derivation carries a result");
    if (e.kind == EventKind::DeriveForward && e.success && !e.result)
      throw std::invalid_argument("successful forward derivation without result");
  }
  if (e.kind == EventKind::Delete && e.operands.size() != 1)
    throw std::invalid_argument("delete needs exactly one operand");
}

nlohmann::json to_json(const InteractionEvent& e) {
  nlohmann::json j{{"student", e.student},   {"group", to_string(e.group)}, {"problem", e.problem},
                   {"seq", e.seq},           {"timestamp_ms", e.timestamp}, {"kind", to_string(e.kind)},
                   {"success", e.success}};
  if (!e.rule.empty()) j["rule"] = e.rule;
  if (!e.operands.empty()) j["operands"] = e.operands;
  if (e.result) j["result"] = *e.result;
  if (e.duplicate) j["duplicate"] = true;
  if (!e.premises.empty()) j["premises"] = e.premises;
  if (!e.choice.empty()) j["choice"] = e.choice;
  return j;
}

InteractionEvent event_from_json(const nlohmann::json& j) {
  InteractionEvent e;
  e.student = j.at("student").get<std::string>();
  e.group = group_from_string(j.at("group").get<std::string>());
  e.problem = j.at("problem").get<std::string>();
  e.seq = j.at("seq").get<std::uint64_t>();
  e.timestamp = j.at("timestamp_ms").get<TimestampMs>();
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.success = j.at("success").get<bool>();
  e.rule = j.value("rule", std::string{});
  e.operands = j.value("operands", std::vector<std::string>{});
  if (j.contains("result") && !j["result"].is_null()) e.result = j["result"].get<std::string>();
  e.duplicate = j.value("duplicate", false);
  e.premises = j.value("premises", std::vector<std::string>{});
  e.choice = j.value("choice", std::map<std::string, std::string>{});
  validate(e);
  return e;
}

namespace {

nlohmann::json header() { return {{"format", kLogFormat}, {"version", kLogVersion}}; }

void check_header(const nlohmann::json& j, std::size_t line) {
  if (j.value("format", std::string{}) != kLogFormat)
    throw LogError("line " + std::to_string(line) + ": not an event log header");
  if (j.value("version", 0) != kLogVersion)
    throw LogError("line " + std::to_string(line) + ": unsupported log version");
}

}  // namespace

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0) {
    for (const auto& e : load(path_)) {
      auto& last = last_seq_[{e.student, e.problem}];
      last = std::max(last, e.seq);
    }
    return;
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) throw LogError("cannot open " + path_.string());
  out << header().dump() << '\n';
}

void EventLog::append(const InteractionEvent& e) { append(std::vector<InteractionEvent>{e}); }

void EventLog::append(const std::vector<InteractionEvent>& events) {
  auto seen = last_seq_;
  for (const auto& e : events) {
    validate(e);
    auto key = std::make_pair(e.student, e.problem);
    auto it = seen.find(key);
    if (it != seen.end() && e.seq <= it->second)
      throw LogError("seq regression for " + e.student + "/" + e.problem + ": " + std::to_string(e.seq) +
                     " after " + std::to_string(it->second));
    seen[key] = e.seq;
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) throw LogError("cannot open " + path_.string());
  for (const auto& e : events) out << to_json(e).dump() << '\n';
  out.flush();
  if (!out) throw LogError("write failed for " + path_.string());
  last_seq_ = std::move(seen);
}

void sort_events(std::vector<InteractionEvent>& events) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return std::tie(a.student, a.problem, a.seq) < std::tie(b.student, b.problem, b.seq);
  });
}

std::vector<InteractionEvent> read_events(std::istream& in) {
  std::vector<InteractionEvent> events;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw LogError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (first) {
      first = false;
      if (j.contains("format")) {
        check_header(j, line_no);
        continue;
      }
      throw LogError("line " + std::to_string(line_no) + ": missing header");
    }
    try {
      events.push_back(event_from_json(j));
    } catch (const std::exception& e) {
      throw LogError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  sort_events(events);
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& a = events[i - 1];
    const auto& b = events[i];
    if (a.student == b.student && a.problem == b.problem && a.seq == b.seq)
      throw LogError("duplicate seq " + std::to_string(b.seq) + " for " + b.student + "/" + b.problem);
  }
  return events;
}

std::vector<InteractionEvent> load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LogError("cannot open " + path.string());
  return read_events(in);
}

std::vector<InteractionEvent> load_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<InteractionEvent> all;
  for (const auto& f : files) {
    auto events = load(f);
    all.insert(all.end(), std::make_move_iterator(events.begin()), std::make_move_iterator(events.end()));
  }
  sort_events(all);
  return all;
}

void write_events(std::ostream& out, const std::vector<InteractionEvent>& events) {
  out << header().dump() << '\n';
  for (const auto& e : events) out << to_json(e).dump() << '\n';
}

std::map<std::pair<std::string, std::string>, std::vector<InteractionEvent>> split_attempts(
    const std::vector<InteractionEvent>& events) {
  std::map<std::pair<std::string, std::string>, std::vector<InteractionEvent>> out;
  for (const auto& e : events) out[{e.student, e.problem}].push_back(e);
  for (auto& [key, v] : out) sort_events(v);
  return out;
}

}  // namespace dt
