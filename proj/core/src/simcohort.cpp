#include "dt/simcohort.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "dt/replay.hpp"
#include "dt/tutor.hpp"

namespace dt::sim {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::ForwardGreedy: return "forward-greedy";
    case Strategy::ForwardRandom: return "forward-random";
    case Strategy::BackwardChainer: return "backward-chainer";
    case Strategy::Mixed: return "mixed";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  for (auto st : {Strategy::ForwardGreedy, Strategy::ForwardRandom, Strategy::BackwardChainer, Strategy::Mixed})
    if (to_string(st) == s) return st;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

nlohmann::json AgentPolicy::to_json() const {
  return {{"strategy", to_string(strategy)},   {"p_backward", p_backward},
          {"error_rate", error_rate},           {"latency_mean_s", latency_mean_s},
          {"latency_jitter", latency_jitter},   {"restart_propensity", restart_propensity},
          {"hint_rate", hint_rate},             {"seed", seed}};
}

AgentPolicy AgentPolicy::from_json(const nlohmann::json& j) {
  AgentPolicy p;
  p.strategy = strategy_from_string(j.value("strategy", to_string(p.strategy)));
  p.p_backward = j.value("p_backward", p.p_backward);
  p.error_rate = j.value("error_rate", p.error_rate);
  p.latency_mean_s = j.value("latency_mean_s", p.latency_mean_s);
  p.latency_jitter = j.value("latency_jitter", p.latency_jitter);
  p.restart_propensity = j.value("restart_propensity", p.restart_propensity);
  p.hint_rate = j.value("hint_rate", p.hint_rate);
  p.seed = j.value("seed", p.seed);
  for (double x : {p.p_backward, p.error_rate, p.restart_propensity, p.hint_rate})
    if (x < 0 || x > 1) throw std::invalid_argument("policy probabilities must lie in [0, 1]");
  if (p.latency_mean_s <= 0 || p.latency_jitter < 0) throw std::invalid_argument("bad latency parameters");
  return p;
}

std::array<AgentPolicy, 3> default_policies() {
  AgentPolicy c{Strategy::ForwardGreedy, 0.0, 0.15, 30, 0.5, 0.01, 0.05, 1};
  AgentPolicy t1{Strategy::Mixed, 0.3, 0.15, 30, 0.5, 0.01, 0.05, 2};
  AgentPolicy t2{Strategy::Mixed, 0.5, 0.15, 30, 0.5, 0.01, 0.05, 3};
  return {c, t1, t2};
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::string_view student, std::string_view problem) {
  const std::uint64_t a = fnv1a(student), b = fnv1a(problem);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

class Agent {
 public:
  Agent(const ProblemSpec& problem, const AgentPolicy& policy, const std::string& student, Group group,
        TimestampMs start, const SimulationOptions& options)
      : policy_(policy),
        options_(options),
        rng_(make_rng(policy.seed, student, problem.id)),
        recorder_(student, group, problem, start),
        now_(start),
        catalog_(options.search.catalog ? *options.search.catalog : RuleCatalog::standard()) {
    const double sigma = policy.latency_jitter;
    latency_ = std::lognormal_distribution<double>(std::log(policy.latency_mean_s) - sigma * sigma / 2, sigma);
    for (const auto& p : problem.premises)
      for (const auto& sub : subformulas(p))
        if (sub.is_atom()) atoms_.insert(sub);
  }

  std::vector<InteractionEvent> run() {
    const ProofType type = recorder_.problem().type;
    if (type == ProofType::WE || type == ProofType::BWE) {
      const auto script = playback_script(recorder_.problem(),
                                          type == ProofType::BWE ? PlaybackStrategy::Backward : PlaybackStrategy::Forward,
                                          options_.example_step_ms, options_.search);
      advance();
      now_ += static_cast<TimestampMs>(script.size()) * options_.example_step_ms;
      recorder_.viewed_example(now_);
      return recorder_.events();
    }
    const bool backward_only = recorder_.state().direction() == Direction::BackwardOnly;
    bool restarted = false;
    std::size_t actions = 0;
    while (!recorder_.complete()) {
      if (actions >= options_.give_up_actions) {
        if (restarted) break;
        advance();
        recorder_.restart(now_);
        restarted = true;
        actions = 0;
        continue;
      }
      advance();
      ++actions;
      if (actions > 2 && chance(policy_.restart_propensity)) {
        recorder_.restart(now_);
        continue;
      }
      if (chance(policy_.error_rate)) {
        backward_only ? backward_error() : forward_error();
        continue;
      }
      bool backward = backward_only;
      if (!backward) {
        switch (policy_.strategy) {
          case Strategy::BackwardChainer: backward = true; break;
          case Strategy::Mixed: backward = chance(policy_.p_backward); break;
          default: break;
        }
      }
      if (recorder_.problem().help_allowed && chance(policy_.hint_rate)) {
        try {
          recorder_.hint(now_, options_.search);
        } catch (const HintUnavailable&) {
        }
        advance();
      }
      if (!backward && policy_.strategy == Strategy::ForwardRandom && chance(0.5) && random_forward()) continue;
      if (!guided(backward)) actions = options_.give_up_actions;  // stuck: give up this try
    }
    return recorder_.events();
  }

 private:
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng_)];
  }

  void advance() {
    const double s = std::clamp(latency_(rng_), 5.0, 1200.0);
    now_ += static_cast<TimestampMs>(std::llround(s * 1000.0));
  }

  std::vector<NodeId> justified_ids() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : recorder_.state().nodes())
      if (n.justified()) out.push_back(id);
    return out;
  }

  // Re-plans only when the cached plan no longer fits the state. A suffix of
  // a shortest proof is itself shortest, so following it step by step is as
  // good as searching again.
  bool plan_valid() const {
    if (plan_.empty()) return false;
    const auto& state = recorder_.state();
    std::set<Formula> have;
    for (const auto& f : state.justified_formulas()) have.insert(f);
    for (const auto& step : plan_) {
      if (have.contains(step.conclusion)) continue;
      for (const auto& p : step.premises)
        if (!have.contains(p)) return false;
      have.insert(step.conclusion);
    }
    return have.contains(state.node(state.goal_id()).formula);
  }

  bool replan() {
    if (plan_valid()) return true;
    const auto& state = recorder_.state();
    auto proof = search_from(state.justified_formulas(), state.node(state.goal_id()).formula, options_.search);
    if (!proof || proof->empty()) return false;
    plan_ = std::move(*proof);
    return true;
  }

  bool guided(bool backward) {
    if (!replan()) return false;
    const auto& state = recorder_.state();
    if (!backward) {
      for (const auto& step : plan_) {
        auto id = state.find(step.conclusion);
        if (id && state.node(*id).justified()) continue;
        std::vector<NodeId> parents;
        for (const auto& p : step.premises) parents.push_back(*state.find(p));
        const Rule& rule = catalog_.at(step.rule);
        recorder_.forward(rule, parents, ForwardChoice{step.choice, step.conclusion}, now_);
        return true;
      }
      return false;
    }
    // Backward: the latest planned step whose conclusion is an open leaf.
    for (auto it = plan_.rbegin(); it != plan_.rend(); ++it) {
      auto id = state.find(it->conclusion);
      if (!id || state.node(*id).justified() || state.node(*id).justification) continue;
      const Rule& rule = catalog_.at(it->rule);
      auto m = match_step(rule, it->premises, it->conclusion);
      recorder_.backward(rule, *id, m->second, now_);
      return true;
    }
    HintAction h;
    try {
      h = plan_step(state, true, options_.search);
    } catch (const HintUnavailable&) {
      return false;
    }
    recorder_.backward(catalog_.at(h.rule), *h.target, h.binding, now_);
    return true;
  }

  static std::vector<char> free_variables(const Rule& rule) {
    std::set<char> vs;
    for (const auto& f : rule.forms()) vs.insert(f.free_variables.begin(), f.free_variables.end());
    return {vs.begin(), vs.end()};
  }

  Binding random_free(const Rule& rule) {
    Binding b;
    std::vector<Formula> atoms(atoms_.begin(), atoms_.end());
    for (char v : free_variables(rule)) b.emplace(v, pick(atoms));
    return b;
  }

  std::vector<NodeId> random_parents(std::size_t arity) {
    auto ids = justified_ids();
    std::shuffle(ids.begin(), ids.end(), rng_);
    if (ids.size() > arity) ids.resize(arity);
    return ids;
  }

  void forward_error() {
    const Rule& rule = pick(catalog_.rules());
    auto parents = random_parents(rule.arity());
    if (parents.size() != rule.arity()) return;
    recorder_.forward(rule, parents, ForwardChoice{random_free(rule), std::nullopt}, now_);
  }

  void backward_error() {
    const Rule& rule = pick(catalog_.rules());
    std::vector<NodeId> open;
    for (const auto& [id, n] : recorder_.state().nodes())
      if (!n.justified()) open.push_back(id);
    const NodeId target = pick(open);
    const FormulaPool pool(recorder_.state().justified_formulas());
    const auto options = apply_backward(rule, recorder_.state().node(target).formula, pool);
    const std::size_t index =
        options.empty() ? 0 : std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng_);
    recorder_.backward(rule, target, index, now_);
  }

  // A random successful forward step that adds a new formula; false if none.
  bool random_forward() {
    struct Candidate {
      const Rule* rule;
      std::vector<NodeId> parents;
      Formula result;
    };
    std::vector<Candidate> candidates;
    const auto ids = justified_ids();
    const auto& state = recorder_.state();
    for (const auto& rule : catalog_.rules()) {
      if (rule.introduces_free_variable()) continue;
      auto consider = [&](std::vector<NodeId> parents) {
        std::vector<Formula> fs;
        for (NodeId p : parents) fs.push_back(state.node(p).formula);
        for (const auto& c : apply_forward(rule, fs).conclusions)
          if (!state.find(c)) candidates.push_back(Candidate{&rule, parents, c});
      };
      if (rule.arity() == 1)
        for (NodeId a : ids) consider({a});
      else if (rule.arity() == 2)
        for (NodeId a : ids)
          for (NodeId b : ids)
            if (a != b) consider({a, b});
    }
    if (candidates.empty()) return false;
    const auto& c = pick(candidates);
    recorder_.forward(*c.rule, c.parents, ForwardChoice{{}, c.result}, now_);
    return true;
  }

  const AgentPolicy& policy_;
  const SimulationOptions& options_;
  std::mt19937_64 rng_;
  AttemptRecorder recorder_;
  TimestampMs now_;
  const RuleCatalog& catalog_;
  std::lognormal_distribution<double> latency_;
  std::set<Formula> atoms_;
  std::vector<ProofStep> plan_;
};

}  // namespace

std::vector<InteractionEvent> simulate(const ProblemSpec& problem, const AgentPolicy& policy,
                                       const std::string& student, Group group, TimestampMs start,
                                       const SimulationOptions& options) {
  return Agent(problem, policy, student, group, start, options).run();
}

CohortConfig CohortConfig::from_json(const nlohmann::json& j) {
  CohortConfig c;
  c.per_group = j.value("per_group", c.per_group);
  if (c.per_group == 0) throw std::invalid_argument("per_group must be at least 1");
  c.seed = j.value("seed", c.seed);
  c.start_ms = j.value("start_ms", c.start_ms);
  c.threads = j.value("threads", c.threads);
  c.simulation.give_up_actions = j.value("give_up_actions", c.simulation.give_up_actions);
  c.simulation.search.max_derivations = j.value("max_derivations", c.simulation.search.max_derivations);
  if (j.contains("policy"))
    for (auto& p : c.policies) p = AgentPolicy::from_json(j["policy"]);
  if (j.contains("policies")) {
    const auto& jp = j["policies"];
    for (const auto& [name, value] : jp.items()) (void)group_from_string(name);
    for (Group g : kGroups)
      if (jp.contains(to_string(g))) c.policies[index_of(g)] = AgentPolicy::from_json(jp[to_string(g)]);
  }
  return c;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

nlohmann::json toml_value(const std::string& v, std::size_t line) {
  if (v.empty()) throw std::invalid_argument("line " + std::to_string(line) + ": missing value");
  if (v.front() == '"' || v.front() == '[' || v == "true" || v == "false") {
    try {
      return nlohmann::json::parse(v);  // basic strings and flat arrays share JSON syntax
    } catch (const nlohmann::json::parse_error&) {
      throw std::invalid_argument("line " + std::to_string(line) + ": bad value " + v);
    }
  }
  std::string num;
  for (char c : v)
    if (c != '_') num += c;
  std::size_t used = 0;
  try {
    if (num.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(num, &used);
      if (used == num.size()) return i;
    } else {
      const double d = std::stod(num, &used);
      if (used == num.size()) return d;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("line " + std::to_string(line) + ": unsupported value " + v);
}

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    // strip comments outside strings
    std::string line;
    bool in_string = false;
    for (char c : raw) {
      if (c == '"') in_string = !in_string;
      if (c == '#' && !in_string) break;
      line += c;
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("line " + std::to_string(line_no) + ": bad table header");
      table = &root;
      std::string path = trim(std::string_view(line).substr(1, line.size() - 2));
      std::size_t start = 0;
      while (true) {
        const auto dot = path.find('.', start);
        std::string key = trim(path.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
        if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
        if (key.empty()) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty table name");
        table = &(*table)[key];
        if (table->is_null()) *table = nlohmann::json::object();
        if (dot == std::string::npos) break;
        start = dot + 1;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    (*table)[key] = toml_value(trim(std::string_view(line).substr(eq + 1)), line_no);
  }
  return root;
}

CohortConfig parse_cohort_config(std::string_view text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return CohortConfig::from_json(nlohmann::json::parse(t));
  return CohortConfig::from_json(parse_toml_subset(text));
}

std::vector<StudentLog> generate_cohort(const CohortConfig& config, const ProblemBank& bank) {
  if (config.per_group == 0) throw std::invalid_argument("per_group must be at least 1");
  const std::size_t n = config.per_group * 3;
  std::vector<StudentLog> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "S%03zu", i + 1);
    logs[i].student = id;
    logs[i].group = kGroups[i % 3];
  }

  auto run_student = [&](std::size_t i) {
    StudentLog& log = logs[i];
    AgentPolicy policy = config.policies[index_of(log.group)];
    policy.seed = config.seed * 0x9E3779B97F4A7C15ULL + policy.seed;
    // one day per student, problems back to back with short breaks
    TimestampMs t = config.start_ms + static_cast<TimestampMs>(i) * 86'400'000;
    std::mt19937_64 breaks = make_rng(policy.seed, log.student, "breaks");
    for (const auto& slot : bank.curriculum().slots(log.group)) {
      auto events = simulate(bank.problem_for(slot), policy, log.student, log.group, t, config.simulation);
      t = events.back().timestamp + std::uniform_int_distribution<TimestampMs>(30'000, 300'000)(breaks);
      log.events.insert(log.events.end(), events.begin(), events.end());
    }
  };

  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) run_student(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = n;
      }
    });
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return logs;
}

void write_cohort(const std::vector<StudentLog>& logs, const CohortConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json students = nlohmann::json::array();
  for (const auto& log : logs) {
    std::ofstream out(dir / (log.student + ".jsonl"), std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write to " + dir.string());
    write_events(out, log.events);
    students.push_back({{"id", log.student}, {"group", to_string(log.group)}});
  }
  nlohmann::json policies = nlohmann::json::object();
  for (Group g : kGroups) policies[to_string(g)] = config.policies[index_of(g)].to_json();
  nlohmann::json manifest{{"per_group", config.per_group}, {"seed", config.seed},
                          {"start_ms", config.start_ms},   {"give_up_actions", config.simulation.give_up_actions},
                          {"policies", policies},          {"students", students}};
  std::ofstream(dir / "cohort.json", std::ios::trunc) << manifest.dump(2) << '\n';
}

}  // namespace dt::sim
