#include "dt/replay.hpp"

namespace dt {

Direction direction_for(ProofType type) {
  return type == ProofType::BPS || type == ProofType::BWE ? Direction::BackwardOnly : Direction::Both;
}

namespace {

constexpr const char* kResultKey = "result";

NodeId locate(const ProofState& s, const std::string& text, const InteractionEvent& e) {
  Formula f = [&] {
    try {
      return parse(text);
    } catch (const ParseError& err) {
      throw ReplayError("seq " + std::to_string(e.seq) + ": bad formula '" + text + "': " + err.what());
    }
  }();
  if (auto id = s.find(f)) return *id;
  throw ReplayError("seq " + std::to_string(e.seq) + ": no node for " + text);
}

Binding binding_from(const std::map<std::string, std::string>& choice) {
  Binding b;
  for (const auto& [k, v] : choice)
    if (k.size() == 1 && k[0] >= 'a' && k[0] <= 'z') b.emplace(k[0], parse(v));
  return b;
}

std::map<std::string, std::string> choice_map(const Binding& b) {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : b) out.emplace(std::string(1, k), v.text());
  return out;
}

void expect(bool ok, const InteractionEvent& e, const std::string& what) {
  if (!ok) throw ReplayError("seq " + std::to_string(e.seq) + " (" + to_string(e.kind) + "): " + what);
}

}  // namespace

void apply_event(ProofState& s, const InteractionEvent& e) {
  const RuleCatalog& catalog = RuleCatalog::standard();
  switch (e.kind) {
    case EventKind::Login:
    case EventKind::HintRequest:
    case EventKind::HintShown:
      return;
    case EventKind::Complete:
      if (s.problem().type == ProofType::WE || s.problem().type == ProofType::BWE) return;
      expect(is_complete(s), e, "log claims completion but the goal is open");
      return;
    case EventKind::Restart:
      restart(s, e.timestamp);
      return;
    case EventKind::Delete: {
      const NodeId id = locate(s, e.operands.at(0), e);
      delete_node(s, id);
      return;
    }
    case EventKind::DeriveForward: {
      const Rule* rule = catalog.find(e.rule);
      expect(rule != nullptr, e, "unknown rule " + e.rule);
      std::vector<NodeId> parents;
      for (const auto& op : e.operands) parents.push_back(locate(s, op, e));
      ForwardChoice choice{binding_from(e.choice), std::nullopt};
      if (auto it = e.choice.find(kResultKey); it != e.choice.end()) choice.result = parse(it->second);
      else if (e.result) choice.result = parse(*e.result);
      StepResult r;
      try {
        r = step_forward(s, *rule, parents, choice, e.timestamp);
      } catch (const std::exception& err) {
        throw ReplayError("seq " + std::to_string(e.seq) + ": " + err.what());
      }
      expect(r.ok() == e.success, e, "success flag does not reproduce");
      expect((r.status == StepStatus::Duplicate) == e.duplicate, e, "duplicate flag does not reproduce");
      if (r.ok()) expect(s.node(*r.node).formula.text() == *e.result, e, "result does not reproduce");
      return;
    }
    case EventKind::DeriveBackward: {
      const Rule* rule = catalog.find(e.rule);
      expect(rule != nullptr, e, "unknown rule " + e.rule);
      const NodeId target = locate(s, e.operands.at(0), e);
      StepResult r;
      try {
        r = step_backward(s, *rule, target, binding_from(e.choice), e.timestamp);
      } catch (const std::exception& err) {
        throw ReplayError("seq " + std::to_string(e.seq) + ": " + err.what());
      }
      expect(r.ok() == e.success, e, "success flag does not reproduce");
      expect((r.status == StepStatus::Duplicate) == e.duplicate, e, "duplicate flag does not reproduce");
      if (r.ok()) {
        const auto& j = s.node(target).justification;
        expect(j.has_value() && j->parents.size() == e.premises.size(), e, "premises do not reproduce");
        for (std::size_t i = 0; i < e.premises.size(); ++i)
          expect(s.node(j->parents[i]).formula.text() == e.premises[i], e, "premises do not reproduce");
      }
      return;
    }
  }
}

ProofState replay(const ProblemSpec& problem, const std::vector<InteractionEvent>& events) {
  const TimestampMs start = events.empty() ? 0 : events.front().timestamp;
  ProofState s = new_state(problem, direction_for(problem.type), start);
  std::uint64_t last = 0;
  bool first = true;
  for (const auto& e : events) {
    if (e.problem != problem.id) throw ReplayError("event for problem " + e.problem + " in a " + problem.id + " replay");
    if (!first && e.seq <= last) throw ReplayError("events out of order at seq " + std::to_string(e.seq));
    first = false;
    last = e.seq;
    apply_event(s, e);
  }
  return s;
}

AttemptRecorder::AttemptRecorder(std::string student, Group group, const ProblemSpec& problem, TimestampMs start)
    : student_(std::move(student)), group_(group), state_(new_state(problem, direction_for(problem.type), start)) {
  login(start);
}

InteractionEvent AttemptRecorder::make(EventKind kind, TimestampMs at) {
  if (completed_logged_) throw std::logic_error("attempt already complete");
  if (!events_.empty() && at < events_.back().timestamp) throw std::invalid_argument("timestamps must not go back");
  InteractionEvent e;
  e.student = student_;
  e.group = group_;
  e.problem = state_.problem().id;
  e.seq = ++seq_;
  e.timestamp = at;
  e.kind = kind;
  return e;
}

void AttemptRecorder::after_step(const StepResult& r, TimestampMs at) {
  if (r.ok() && is_complete(state_)) {
    events_.push_back(make(EventKind::Complete, at));
    completed_logged_ = true;
  }
}

void AttemptRecorder::login(TimestampMs at) { events_.push_back(make(EventKind::Login, at)); }

StepResult AttemptRecorder::forward(const Rule& rule, const std::vector<NodeId>& parents, const ForwardChoice& choice,
                                    TimestampMs at) {
  InteractionEvent e = make(EventKind::DeriveForward, at);
  for (NodeId p : parents) e.operands.push_back(state_.node(p).formula.text());
  StepResult r = step_forward(state_, rule, parents, choice, at);
  e.rule = rule.name();
  e.success = r.ok();
  e.duplicate = r.status == StepStatus::Duplicate;
  e.choice = choice_map(choice.free);
  if (choice.result) e.choice.emplace(kResultKey, choice.result->text());
  if (r.ok()) {
    e.result = state_.node(*r.node).formula.text();
    const auto& j = state_.node(*r.node).justification;
    if (r.status == StepStatus::Applied && j)
      for (const auto& [k, v] : choice_map(j->choice)) e.choice.insert_or_assign(k, v);
  }
  events_.push_back(std::move(e));
  after_step(r, at);
  return r;
}

StepResult AttemptRecorder::backward(const Rule& rule, NodeId target, const BackwardSelector& selector,
                                     TimestampMs at) {
  InteractionEvent e = make(EventKind::DeriveBackward, at);
  e.operands.push_back(state_.node(target).formula.text());
  StepResult r = step_backward(state_, rule, target, selector, at);
  e.rule = rule.name();
  e.success = r.ok();
  e.duplicate = r.status == StepStatus::Duplicate;
  if (r.ok()) {
    const Justification& j = *state_.node(target).justification;
    for (NodeId p : j.parents) e.premises.push_back(state_.node(p).formula.text());
    e.choice = choice_map(j.choice);
  } else if (const auto* b = std::get_if<Binding>(&selector)) {
    e.choice = choice_map(*b);
  }
  events_.push_back(std::move(e));
  after_step(r, at);
  return r;
}

StepResult AttemptRecorder::remove(NodeId id, TimestampMs at) {
  InteractionEvent e = make(EventKind::Delete, at);
  e.operands.push_back(state_.node(id).formula.text());
  StepResult r = delete_node(state_, id);
  events_.push_back(std::move(e));
  return r;
}

void AttemptRecorder::restart(TimestampMs at) {
  events_.push_back(make(EventKind::Restart, at));
  dt::restart(state_, at);
}

HintAction AttemptRecorder::hint(TimestampMs at, const SearchOptions& options) {
  events_.push_back(make(EventKind::HintRequest, at));
  HintAction h = next_step_hint(state_, options);
  InteractionEvent e = make(EventKind::HintShown, at);
  e.rule = h.rule;
  if (h.backward) {
    e.operands.push_back(h.result.text());
    for (const auto& p : h.premises) e.premises.push_back(p.text());
  } else {
    for (const auto& p : h.premises) e.operands.push_back(p.text());
    e.result = h.result.text();
  }
  e.choice = choice_map(h.binding);
  events_.push_back(std::move(e));
  return h;
}

void AttemptRecorder::viewed_example(TimestampMs at) {
  events_.push_back(make(EventKind::Complete, at));
  completed_logged_ = true;
}

}  // namespace dt
