#include "dt/search.hpp"

#include <algorithm>
#include <functional>
#include <cstdint>
#include <limits>
#include <mutex>
#include <string>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace dt {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 2;

/// Formulas reachable from `known` by the non-introducing rules, bounded by
/// size and by `rounds` levels of derivation. Used only to bind metavariables
/// during backward refinement, never as a source of justified facts.
std::vector<Formula> forward_closure(const RuleCatalog& catalog, std::span<const Formula> known, std::size_t cap,
                                     std::size_t rounds) {
  std::unordered_set<Formula> seen(known.begin(), known.end());
  std::vector<Formula> all(known.begin(), known.end());
  FormulaPool pool(known);
  std::vector<Formula> fresh = all;

  for (std::size_t round = 0; round < rounds && !fresh.empty(); ++round) {
    const std::unordered_set<Formula> fresh_set(fresh.begin(), fresh.end());
    std::vector<Formula> next;
    auto emit = [&](Formula f) {
      if (f.size() > cap || seen.contains(f)) return;
      seen.insert(f);
      next.push_back(std::move(f));
    };
    for (const auto& rule : catalog.rules()) {
      for (const auto& form : rule.forms()) {
        if (!form.free_variables.empty()) continue;
        if (form.premises.size() == 1) {
          for (const auto& f : fresh)
            if (auto b = match_pattern(form.premises[0], f)) emit(form.conclusion.instantiate(*b));
          continue;
        }
        if (form.premises.size() != 2) continue;
        // Both premises free metavariables (Conjunction) would pair everything.
        if (form.premises[0].is_variable() && form.premises[1].is_variable()) continue;
        const std::size_t first = form.premises[0].is_variable() ? 1 : 0;
        const Pattern& p0 = form.premises[first];
        const Pattern& p1 = form.premises[1 - first];
        for (const auto& a : pool.with_kind(p0.shape().kind())) {
          auto b = match_pattern(p0, a);
          if (!b) continue;
          const bool a_fresh = fresh_set.contains(a);
          if (p1.is_ground(*b)) {
            const Formula other = p1.instantiate(*b);
            if (other != a && pool.contains(other) && (a_fresh || fresh_set.contains(other)))
              emit(form.conclusion.instantiate(*b));
            continue;
          }
          for (const auto& c : pool.with_kind(p1.shape().kind())) {
            if (c == a || (!a_fresh && !fresh_set.contains(c))) continue;
            if (auto b2 = match_pattern(p1, c, *b)) emit(form.conclusion.instantiate(*b2));
          }
        }
      }
    }
    for (const auto& f : next) {
      pool.insert(f);
      all.push_back(f);
    }
    fresh = std::move(next);
  }
  return all;
}

struct Option {
  std::size_t rule;  // catalog index
  std::size_t form;
  std::vector<int> premises;
};

class Searcher {
 public:
  Searcher(const RuleCatalog& catalog, std::span<const Formula> known, const Formula& goal, const SearchOptions& opt)
      : catalog_(catalog), max_(opt.max_derivations) {
    std::size_t largest = goal.size();
    for (const auto& k : known) largest = std::max(largest, k.size());
    cap_ = largest + opt.size_slack;
    pool_ = FormulaPool(forward_closure(catalog, known, cap_, max_));
    for (const auto& k : known) known_ids_.insert(intern(k));
    goal_ = intern(goal);
    depth_[goal_] = 0;
    frontier_ = {goal_};
  }

  std::optional<std::vector<ProofStep>> run() {
    if (known_ids_.contains(goal_)) return std::vector<ProofStep>{};
    for (std::size_t bound = 1; bound <= max_; ++bound) {
      grow(static_cast<int>(bound) - 1);
      compute_heights();
      if (height_[goal_] > static_cast<int>(bound)) continue;
      failed_.clear();
      bound_ = static_cast<int>(bound);
      chosen_.clear();
      if (dfs({{goal_, 0}})) return extract();
    }
    return std::nullopt;
  }

 private:
  int intern(const Formula& f) {
    auto [it, inserted] = ids_.try_emplace(f, static_cast<int>(formulas_.size()));
    if (inserted) {
      formulas_.push_back(f);
      options_.emplace_back();
      expanded_.push_back(false);
      depth_.push_back(kInf);
    }
    return it->second;
  }

  bool known(int id) const { return known_ids_.contains(id); }

  /// Expands the backward-relevant set breadth-first down to `depth`.
  void grow(int depth) {
    while (level_ < depth && !frontier_.empty()) {
      std::vector<int> next;
      for (int f : frontier_) {
        if (known(f) || expanded_[f]) continue;
        expanded_[f] = true;
        for (std::size_t ri = 0; ri < catalog_.rules().size(); ++ri) {
          const Rule& rule = catalog_.rules()[ri];
          for (auto& o : apply_backward(rule, formulas_[f], pool_)) {
            if (std::any_of(o.premises.begin(), o.premises.end(), [&](const Formula& p) { return p.size() > cap_; }))
              continue;
            Option opt{ri, o.form, {}};
            for (const auto& p : o.premises) {
              const int id = intern(p);
              opt.premises.push_back(id);
              if (depth_[id] == kInf) {
                depth_[id] = level_ + 1;
                next.push_back(id);
              }
            }
            options_[f].push_back(std::move(opt));
          }
        }
      }
      frontier_ = std::move(next);
      ++level_;
    }
  }

  /// Admissible lower bound on the steps needed for each formula: derivation
  /// tree height over the expanded hypergraph. Unexpanded formulas get 1.
  void compute_heights() {
    height_.assign(formulas_.size(), kInf);
    for (std::size_t f = 0; f < formulas_.size(); ++f) {
      if (known(static_cast<int>(f))) height_[f] = 0;
      else if (!expanded_[f]) height_[f] = 1;
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t f = 0; f < formulas_.size(); ++f) {
        if (!expanded_[f] || known(static_cast<int>(f))) continue;
        int best = height_[f];
        for (const auto& o : options_[f]) {
          int h = 0;
          for (int p : o.premises) h = std::max(h, height_[p]);
          if (h < kInf) best = std::min(best, h + 1);
        }
        if (best < height_[f]) {
          height_[f] = best;
          changed = true;
        }
      }
    }
  }

  /// True if `from` reaches `to` through chosen justifications.
  bool reaches(int from, int to) const {
    std::vector<int> stack{from};
    std::unordered_set<int> seen;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      if (!seen.insert(u).second) continue;
      auto it = chosen_.find(u);
      if (it == chosen_.end()) continue;
      for (int p : options_[u][it->second].premises) stack.push_back(p);
    }
    return false;
  }

  std::string memo_key(const std::vector<std::pair<int, int>>& open) const {
    std::vector<std::pair<int, int>> c;
    c.reserve(chosen_.size());
    for (const auto& [f, o] : chosen_) c.emplace_back(f, static_cast<int>(o));
    std::sort(c.begin(), c.end());
    auto o = open;
    std::sort(o.begin(), o.end());
    std::string key;
    key.reserve((2 * c.size() + 2 * o.size() + 1) * sizeof(int));
    auto put = [&](int v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
    for (const auto& [f, oi] : c) {
      put(f);
      put(oi);
    }
    put(-1);
    for (const auto& [f, d] : o) {
      put(f);
      put(d);
    }
    return key;
  }

  bool dfs(std::vector<std::pair<int, int>> open) {
    if (open.empty()) return true;
    std::string key = memo_key(open);
    if (failed_.contains(key)) return false;

    // Refine the open formula that comes first in canonical order.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < open.size(); ++i)
      if (formulas_[open[i].first] < formulas_[open[pick].first]) pick = i;
    const auto [f, fdepth] = open[pick];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

    const int used = static_cast<int>(chosen_.size()) + 1;
    for (std::size_t oi = 0; oi < options_[f].size(); ++oi) {
      const Option& o = options_[f][oi];
      bool ok = true;
      auto next = open;
      for (int p : o.premises) {
        if (known(p)) continue;
        if (chosen_.contains(p)) {
          if (reaches(p, f)) {
            ok = false;
            break;
          }
          continue;
        }
        if (height_[p] >= kInf || fdepth + 1 + height_[p] > bound_) {
          ok = false;
          break;
        }
        auto it = std::find_if(next.begin(), next.end(), [p](const auto& e) { return e.first == p; });
        if (it == next.end()) next.emplace_back(p, fdepth + 1);
        else it->second = std::max(it->second, fdepth + 1);
      }
      if (!ok || used + static_cast<int>(next.size()) > bound_) continue;
      chosen_.emplace(f, oi);
      if (dfs(std::move(next))) return true;
      chosen_.erase(f);
    }
    failed_.insert(std::move(key));
    return false;
  }

  std::vector<ProofStep> extract() const {
    std::unordered_map<int, int> tree_height;
    std::function<int(int)> th = [&](int f) -> int {
      if (known(f)) return 0;
      if (auto it = tree_height.find(f); it != tree_height.end()) return it->second;
      int h = 0;
      for (int p : options_[f][chosen_.at(f)].premises) h = std::max(h, th(p));
      return tree_height[f] = h + 1;
    };

    std::vector<int> pending;
    for (const auto& [f, o] : chosen_) pending.push_back(f);
    std::unordered_set<int> done;
    std::vector<ProofStep> steps;
    while (!pending.empty()) {
      std::size_t best = pending.size();
      for (std::size_t i = 0; i < pending.size(); ++i) {
        const auto& ps = options_[pending[i]][chosen_.at(pending[i])].premises;
        const bool ready = std::all_of(ps.begin(), ps.end(), [&](int p) { return known(p) || done.contains(p); });
        if (!ready) continue;
        if (best == pending.size()) {
          best = i;
          continue;
        }
        const int hi = th(pending[i]);
        const int hb = th(pending[best]);
        if (hi < hb || (hi == hb && formulas_[pending[i]] < formulas_[pending[best]])) best = i;
      }
      const int f = pending[best];
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
      done.insert(f);

      const Option& o = options_[f][chosen_.at(f)];
      const Rule& rule = catalog_.rules()[o.rule];
      ProofStep step{rule.name(), {}, formulas_[f], {}};
      for (int p : o.premises) step.premises.push_back(formulas_[p]);
      const RuleForm& form = rule.forms()[o.form];
      if (!form.free_variables.empty()) {
        auto m = match_step(rule, step.premises, step.conclusion);
        for (char v : form.free_variables) step.choice.emplace(v, m->second.at(v));
      }
      steps.push_back(std::move(step));
    }
    return steps;
  }

  const RuleCatalog& catalog_;
  std::size_t max_;
  std::size_t cap_ = 0;
  FormulaPool pool_;

  std::vector<Formula> formulas_;
  std::unordered_map<Formula, int> ids_;
  std::vector<std::vector<Option>> options_;
  std::vector<bool> expanded_;
  std::vector<int> depth_;
  std::vector<int> height_;
  std::unordered_set<int> known_ids_;
  int goal_ = 0;

  std::vector<int> frontier_;
  int level_ = 0;

  int bound_ = 0;
  std::unordered_map<int, std::size_t> chosen_;
  std::unordered_set<std::string> failed_;
};

const RuleCatalog& catalog_of(const SearchOptions& o) { return o.catalog ? *o.catalog : RuleCatalog::standard(); }

}  // namespace

namespace {

// Results are pure functions of (catalog, known set, goal, bounds); agents and
// hint requests revisit the same states a lot.
class SearchCache {
 public:
  using Result = std::optional<std::vector<ProofStep>>;

  std::optional<Result> get(const std::string& key) {
    std::lock_guard lock(mutex_);
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(const std::string& key, const Result& r) {
    std::lock_guard lock(mutex_);
    if (map_.size() >= kCapacity) map_.clear();
    map_.emplace(key, r);
  }

 private:
  static constexpr std::size_t kCapacity = 50'000;
  std::mutex mutex_;
  std::unordered_map<std::string, Result> map_;
};

SearchCache& cache() {
  static SearchCache c;
  return c;
}

}  // namespace

std::optional<std::vector<ProofStep>> search_from(std::span<const Formula> known, const Formula& goal,
                                                  const SearchOptions& options) {
  // Canonical order so the answer never depends on how `known` was listed.
  std::vector<Formula> sorted(known.begin(), known.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(&catalog_of(options))) + '|' +
                    std::to_string(options.max_derivations) + '|' + std::to_string(options.size_slack) + '|' +
                    goal.text();
  for (const auto& f : sorted) key += '|' + f.text();
  if (auto hit = cache().get(key)) return *hit;
  auto result = Searcher(catalog_of(options), sorted, goal, options).run();
  cache().put(key, result);
  return result;
}

std::optional<std::vector<ProofStep>> search_proof(const ProblemSpec& problem, const SearchOptions& options) {
  return search_from(problem.premises, problem.conclusion, options);
}

bool proof_exists(const ProblemSpec& problem, std::size_t max_derivations, const SearchOptions& options) {
  SearchOptions o = options;
  o.max_derivations = max_derivations;
  return search_proof(problem, o).has_value();
}

namespace {
HintAction plan_backward(const ProofState& state, const SearchOptions& options);
}

HintAction next_step_hint(const ProofState& state, const SearchOptions& options) {
  if (!state.problem().help_allowed) throw HintUnavailable("hints are not available for this problem");
  return plan_step(state, state.direction() == Direction::BackwardOnly, options);
}

HintAction plan_step(const ProofState& state, bool backward, const SearchOptions& options) {
  if (is_complete(state)) throw HintUnavailable("the proof is already complete");
  if (backward) return plan_backward(state, options);
  const auto known = state.justified_formulas();
  auto proof = search_from(known, state.node(state.goal_id()).formula, options);
  if (!proof || proof->empty()) throw HintUnavailable("no proof found within the search bound");
  const ProofStep& first = proof->front();
  HintAction h{false, first.rule, {}, std::nullopt, first.conclusion, first.premises, first.choice, proof->size()};
  for (const auto& p : first.premises) h.parents.push_back(*state.find(p));
  return h;
}

namespace {

HintAction plan_backward(const ProofState& state, const SearchOptions& options) {
  const auto known = state.justified_formulas();
  const RuleCatalog& catalog = catalog_of(options);

  // Open nodes the goal is waiting on, following pending justifications.
  std::vector<NodeId> open;
  std::set<NodeId> seen{state.goal_id()};
  std::vector<NodeId> stack{state.goal_id()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const ProofNode& n = state.node(id);
    if (n.justified()) continue;
    open.push_back(id);
    if (n.justification)
      for (NodeId p : n.justification->parents)
        if (seen.insert(p).second) stack.push_back(p);
  }
  std::sort(open.begin(), open.end());

  auto best_for = [&](bool leaves_only) -> std::optional<HintAction> {
    std::optional<HintAction> best;
    for (NodeId id : open) {
      const ProofNode& n = state.node(id);
      if (leaves_only && n.justification) continue;
      auto proof = search_from(known, n.formula, options);
      if (!proof || proof->empty()) continue;
      if (best && best->remaining <= proof->size()) continue;
      const ProofStep& last = proof->back();
      auto m = match_step(catalog.at(last.rule), last.premises, last.conclusion);
      best = HintAction{true, last.rule, {}, id, n.formula, last.premises, m->second, proof->size()};
    }
    return best;
  };
  if (auto h = best_for(true)) return *h;
  if (auto h = best_for(false)) return *h;
  throw HintUnavailable("no proof found within the search bound");
}

}  // namespace

}  // namespace dt
