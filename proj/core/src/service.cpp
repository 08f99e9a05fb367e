#include "dt/service.hpp"

#include <chrono>
#include <fstream>
#include <numeric>

#include "dt/snapshot.hpp"

namespace dt {

namespace {

HttpResponse error(int status, const std::string& message) { return {status, {{"error", message}}}; }

std::vector<std::string> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    const auto end = path.find('/', pos);
    parts.emplace_back(path.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end;
  }
  return parts;
}

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') return false;
  return true;
}

nlohmann::json slot_json(const Slot& s) {
  return {{"level", s.level},
          {"index", s.index},
          {"problem", s.problem},
          {"type", to_string(s.type)},
          {"help_allowed", s.help_allowed},
          {"pretest", s.pretest()}};
}

NodeId node_ref(const ProofState& state, const nlohmann::json& j) {
  if (j.is_number_integer()) {
    const auto id = j.get<NodeId>();
    state.node(id);  // throws std::out_of_range for unknown ids
    return id;
  }
  if (j.is_string()) {
    if (auto id = state.find(parse(j.get<std::string>()))) return *id;
    throw std::out_of_range("no node for " + j.get<std::string>());
  }
  throw std::invalid_argument("node references are ids or formula texts");
}

}  // namespace

TutorService::TutorService(ServiceConfig config, const ProblemBank& bank) : config_(std::move(config)), bank_(bank) {
  if (!config_.log_dir.empty()) std::filesystem::create_directories(config_.log_dir);
  if (!config_.snapshot_dir.empty()) std::filesystem::create_directories(config_.snapshot_dir);
}

std::vector<RosterEntry> TutorService::roster() const {
  std::lock_guard lock(mutex_);
  return roster_;
}

TimestampMs TutorService::now(const Session* s) const {
  TimestampMs t = config_.clock ? config_.clock()
                                : std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count();
  if (s && !s->recorder.events().empty()) t = std::max(t, s->recorder.events().back().timestamp);
  return t;
}

HttpResponse TutorService::handle(std::string_view method, std::string_view path, std::string_view body) {
  nlohmann::json j = nlohmann::json::object();
  if (method == "POST" && !body.empty()) {
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      return error(400, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) return error(400, "request body must be a JSON object");
  }
  const auto parts = split_path(path);
  try {
    if (parts.size() == 1 && parts[0] == "students" && method == "POST") return register_student(j);
    if (parts.size() == 3 && parts[0] == "students") {
      if (parts[2] == "pretest-complete" && method == "POST") return pretest_complete(parts[1], j);
      if (parts[2] == "next-problem" && method == "GET") return next_problem(parts[1]);
    }
    if (parts.size() == 3 && parts[0] == "sessions") {
      if (parts[2] == "actions" && method == "POST") return act(parts[1], j);
      if (parts[2] == "state" && method == "GET") return state(parts[1]);
      if (parts[2] == "playback" && method == "GET") return playback(parts[1]);
    }
    return error(404, "no route for " + std::string(method) + " " + std::string(path));
  } catch (const DirectionError& e) {
    return error(403, e.what());
  } catch (const HintUnavailable& e) {
    return error(403, e.what());
  } catch (const std::out_of_range& e) {
    return error(404, e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const ParseError& e) {
    return error(400, e.what());
  } catch (const nlohmann::json::exception& e) {
    return error(400, e.what());
  } catch (const std::logic_error& e) {
    return error(409, e.what());
  }
}

HttpResponse TutorService::register_student(const nlohmann::json& body) {
  std::lock_guard lock(mutex_);
  std::string id;
  if (body.contains("id")) {
    id = body["id"].get<std::string>();
    if (!valid_id(id)) return error(400, "student ids use letters, digits, '-', '_' and '.'");
    if (students_.contains(id)) return error(409, "student " + id + " already exists");
  } else {
    do id = "u" + std::to_string(next_student_++);
    while (students_.contains(id));
  }
  students_[id].id = id;
  return {201, {{"id", id}, {"pretest", bank_.curriculum().pretest_slots().size()}}};
}

HttpResponse TutorService::pretest_complete(const std::string& id, const nlohmann::json& body) {
  std::lock_guard lock(mutex_);
  auto it = students_.find(id);
  if (it == students_.end()) return error(404, "unknown student " + id);
  Student& st = it->second;
  if (st.group) return error(409, "student " + id + " is already in group " + to_string(*st.group));
  std::vector<double> scores;
  if (body.contains("scores")) {
    scores = body["scores"].get<std::vector<double>>();
    if (scores.empty()) return error(400, "scores must not be empty");
    for (double s : scores)
      if (s < 0 || s > 100) return error(400, "scores lie in [0, 100]");
  } else {
    const std::size_t pretest = bank_.curriculum().pretest_slots().size();
    const bool open = st.current && !finished(*st.current);
    if (st.next_slot < pretest || open) return error(409, "the pretest is not finished");
    scores = st.pretest_scores;
    if (scores.empty()) return error(409, "no scored pretest problems");
  }
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  const Group g = assign_group(mean, roster_);
  roster_.push_back({g, mean});
  st.group = g;
  st.pretest_mean = mean;
  st.next_slot = std::max(st.next_slot, bank_.curriculum().pretest_slots().size());
  return {200, {{"id", id}, {"group", to_string(g)}, {"pretest_mean", mean}}};
}

HttpResponse TutorService::next_problem(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = students_.find(id);
  if (it == students_.end()) return error(404, "unknown student " + id);
  Student& st = it->second;
  if (st.current) {
    std::lock_guard session_lock(st.current->mutex);
    if (!finished(*st.current)) return {200, session_json(*st.current)};
  }
  const std::size_t pretest = bank_.curriculum().pretest_slots().size();
  std::vector<Slot> slots = st.group ? bank_.curriculum().slots(*st.group) : bank_.curriculum().pretest_slots();
  if (!st.group && st.next_slot >= pretest)
    return error(409, "pretest finished; POST /students/" + id + "/pretest-complete first");
  if (st.next_slot >= slots.size()) return {200, {{"done", true}, {"scores", st.scores}}};
  const Slot slot = slots[st.next_slot++];
  const std::string sid = "s" + std::to_string(next_session_++);
  const ProblemSpec problem = bank_.problem_for(slot);
  auto s = std::make_shared<Session>(sid, id, slot,
                                     AttemptRecorder(id, st.group.value_or(Group::C), problem, now(nullptr)));
  std::lock_guard session_lock(s->mutex);
  persist(*s);
  sessions_[sid] = s;
  st.current = s;
  return {200, session_json(*s)};
}

bool TutorService::finished(const Session& s) {
  const auto& events = s.recorder.events();
  return s.recorder.complete() || (!events.empty() && events.back().kind == EventKind::Complete);
}

std::shared_ptr<TutorService::Session> TutorService::session(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw std::out_of_range("unknown session " + id);
  return it->second;
}

nlohmann::json TutorService::session_json(Session& s) const {
  const auto& st = s.recorder.state();
  return {{"session", s.id},
          {"student", s.student},
          {"slot", slot_json(s.slot)},
          {"complete", finished(s)},
          {"state", to_json(st)}};
}

void TutorService::persist(Session& s) {
  const auto& events = s.recorder.events();
  if (!config_.log_dir.empty() && s.persisted < events.size()) {
    std::lock_guard lock(log_mutex_);
    EventLog log(config_.log_dir / (s.student + ".jsonl"));
    log.append(std::vector<InteractionEvent>(events.begin() + static_cast<std::ptrdiff_t>(s.persisted), events.end()));
  }
  s.persisted = events.size();
  if (!config_.snapshot_dir.empty()) {
    std::ofstream out(config_.snapshot_dir / (s.id + ".json"), std::ios::trunc);
    out << nlohmann::json{{"session", s.id}, {"student", s.student}, {"state", to_json(s.recorder.state())}}.dump()
        << '\n';
  }
}

HttpResponse TutorService::act(const std::string& id, const nlohmann::json& body) {
  auto s = session(id);
  std::optional<int> score;
  HttpResponse response;
  {
    std::lock_guard lock(s->mutex);
    auto& rec = s->recorder;
    const bool example = s->slot.type == ProofType::WE || s->slot.type == ProofType::BWE;
    if (finished(*s)) return error(409, "this problem is already finished");
    const std::string kind = body.at("kind").get<std::string>();
    const TimestampMs t = now(s.get());
    const RuleCatalog& catalog = config_.search.catalog ? *config_.search.catalog : RuleCatalog::standard();
    nlohmann::json out;
    if (example && kind != "viewed-example") return error(403, "worked examples are watched, not solved");
    if (kind == "hint-request" && !s->slot.help_allowed) return error(403, "no help on this problem");
    if (kind == "forward") {
      const Rule& rule = catalog.at(body.at("rule").get<std::string>());
      std::vector<NodeId> parents;
      for (const auto& p : body.at("parents")) parents.push_back(node_ref(rec.state(), p));
      ForwardChoice choice;
      if (body.contains("free")) choice.free = binding_from_json(body["free"]);
      if (body.contains("result")) choice.result = parse(body["result"].get<std::string>());
      out["result"] = to_json(rec.forward(rule, parents, choice, t));
    } else if (kind == "backward") {
      const Rule& rule = catalog.at(body.at("rule").get<std::string>());
      const NodeId target = node_ref(rec.state(), body.at("target"));
      BackwardSelector selector = body.contains("binding") ? BackwardSelector(binding_from_json(body["binding"]))
                                                           : BackwardSelector(body.value("option", std::size_t{0}));
      out["result"] = to_json(rec.backward(rule, target, selector, t));
    } else if (kind == "delete") {
      out["result"] = to_json(rec.remove(node_ref(rec.state(), body.at("node")), t));
    } else if (kind == "restart") {
      rec.restart(t);
      out["result"] = {{"status", "applied"}};
    } else if (kind == "hint-request") {
      out["hint"] = to_json(rec.hint(t, config_.search));
      out["result"] = {{"status", "applied"}};
    } else if (kind == "viewed-example") {
      if (!example) return error(403, "only worked examples can be marked as viewed");
      rec.viewed_example(t);
      out["result"] = {{"status", "applied"}};
    } else {
      return error(400, "unknown action kind '" + kind + "'");
    }
    persist(*s);
    if (!example && rec.complete()) {
      auto proof = search_proof(rec.problem(), config_.search);
      if (proof) score = score_breakdown(rec.events(), rec.problem(), proof->size(), config_.score).score;
    }
    auto j = session_json(*s);
    j["result"] = out["result"];
    if (out.contains("hint")) j["hint"] = out["hint"];
    if (score) j["score"] = *score;
    response = {200, std::move(j)};
  }
  if (score) {
    std::lock_guard lock(mutex_);
    Student& st = students_.at(s->student);
    st.scores[s->slot.problem] = *score;
    if (s->slot.pretest()) st.pretest_scores.push_back(*score);
  }
  return response;
}

HttpResponse TutorService::state(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  return {200, session_json(*s)};
}

HttpResponse TutorService::playback(const std::string& id) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  if (s->slot.type != ProofType::WE && s->slot.type != ProofType::BWE)
    return error(409, "playback is only available for worked examples");
  const auto strategy = s->slot.type == ProofType::BWE ? PlaybackStrategy::Backward : PlaybackStrategy::Forward;
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& p : playback_script(s->recorder.problem(), strategy, config_.playback_step_ms, config_.search)) {
    nlohmann::json premises = nlohmann::json::array();
    for (const auto& f : p.premises) premises.push_back(f.text());
    steps.push_back({{"direction", p.backward ? "backward" : "forward"},
                     {"rule", p.rule},
                     {"premises", premises},
                     {"conclusion", p.conclusion.text()},
                     {"binding", to_json(p.binding)},
                     {"delay_ms", p.delay_ms}});
  }
  return {200, {{"session", s->id}, {"problem", s->slot.problem}, {"type", to_string(s->slot.type)}, {"steps", steps}}};
}

}  // namespace dt
