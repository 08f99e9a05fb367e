#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/curriculum.hpp"
#include "dt/problems.hpp"
#include "dt/replay.hpp"
#include "dt/tutor.hpp"

namespace dt {

struct ServiceConfig {
  /// One <student>.jsonl event log per student; empty disables logging.
  std::filesystem::path log_dir;
  /// <session>.json state snapshot after every action; empty disables.
  std::filesystem::path snapshot_dir;
  SearchOptions search;
  ScoreConfig score;
  TimestampMs playback_step_ms = 1500;
  /// Milliseconds since the epoch; system clock when unset.
  std::function<TimestampMs()> clock;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// The tutor's session-facing API, independent of any HTTP library.
///
///   POST /students                        register      {"id"?}
///   POST /students/{id}/pretest-complete  assign group  {"scores"?: [..]}
///   GET  /students/{id}/next-problem      open or resume the next slot
///   POST /sessions/{id}/actions           forward | backward | delete |
///                                         restart | hint-request | viewed-example
///   GET  /sessions/{id}/state             snapshot
///   GET  /sessions/{id}/playback          WE/BWE script
///
/// Errors come back as {"error": message} with 400 (bad request), 403
/// (action not allowed for this problem), 404 (unknown id) or 409 (wrong
/// moment, e.g. next problem before the current one is finished).
class TutorService {
 public:
  explicit TutorService(ServiceConfig config = {}, const ProblemBank& bank = ProblemBank::standard());

  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  /// Current roster, for inspection.
  std::vector<RosterEntry> roster() const;

 private:
  struct Session {
    std::string id;
    std::string student;
    Slot slot;
    AttemptRecorder recorder;
    std::size_t persisted = 0;
    std::mutex mutex;
    Session(std::string id_, std::string student_, Slot slot_, AttemptRecorder rec)
        : id(std::move(id_)), student(std::move(student_)), slot(std::move(slot_)), recorder(std::move(rec)) {}
  };
  struct Student {
    std::string id;
    std::optional<Group> group;
    std::size_t next_slot = 0;
    std::vector<double> pretest_scores;
    std::optional<double> pretest_mean;
    std::map<std::string, int> scores;  // problem id -> score
    std::shared_ptr<Session> current;
  };

  HttpResponse register_student(const nlohmann::json& body);
  HttpResponse pretest_complete(const std::string& id, const nlohmann::json& body);
  HttpResponse next_problem(const std::string& id);
  HttpResponse act(const std::string& id, const nlohmann::json& body);
  HttpResponse state(const std::string& id);
  HttpResponse playback(const std::string& id);

  std::shared_ptr<Session> session(const std::string& id);
  static bool finished(const Session& s);
  nlohmann::json session_json(Session& s) const;
  void persist(Session& s);
  TimestampMs now(const Session* s) const;

  ServiceConfig config_;
  const ProblemBank& bank_;
  mutable std::mutex mutex_;  // students_, sessions_, roster_
  std::map<std::string, Student> students_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::vector<RosterEntry> roster_;
  std::size_t next_session_ = 1;
  std::size_t next_student_ = 1;
  std::mutex log_mutex_;
};

}  // namespace dt
