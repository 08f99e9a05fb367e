#include "dt/curriculum.hpp"

#include <algorithm>

#include "dt/stats.hpp"

namespace dt {

Curriculum Curriculum::from_json(const nlohmann::json& j) {
  Curriculum c;
  for (const auto& jl : j.at("levels")) {
    Level l;
    l.level = jl.at("level").get<int>();
    l.problems = jl.at("problems").get<std::vector<std::string>>();
    l.help = jl.value("help", std::vector<bool>(l.problems.size(), true));
    if (l.help.size() != l.problems.size())
      throw std::invalid_argument("level " + std::to_string(l.level) + ": help flags do not match problems");
    if (!c.levels_.empty() && l.level <= c.levels_.back().level)
      throw std::invalid_argument("levels must be listed in increasing order");
    c.levels_.push_back(std::move(l));
  }
  if (c.levels_.size() < 2) throw std::invalid_argument("curriculum needs a pretest and a posttest level");
  const auto& types = j.at("types");
  for (Group g : kGroups) {
    auto& per_level = c.types_[index_of(g)];
    const auto& jg = types.at(to_string(g));
    for (const auto& l : c.levels_) {
      std::vector<ProofType> row;
      const auto key = std::to_string(l.level);
      if (jg.contains(key)) {
        for (const auto& t : jg[key]) row.push_back(proof_type_from_string(t.get<std::string>()));
      } else {
        row.assign(l.problems.size(), ProofType::PS);
      }
      if (row.size() != l.problems.size())
        throw std::invalid_argument(to_string(g) + " level " + key + ": type count does not match problems");
      if (l.level == c.levels_.front().level || l.level == c.levels_.back().level)
        for (ProofType t : row)
          if (t != ProofType::PS) throw std::invalid_argument("pretest and posttest problems must be PS");
      per_level.push_back(std::move(row));
    }
  }
  return c;
}

nlohmann::json Curriculum::to_json() const {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : levels_) levels.push_back({{"level", l.level}, {"problems", l.problems}, {"help", l.help}});
  nlohmann::json types = nlohmann::json::object();
  for (Group g : kGroups) {
    nlohmann::json jg = nlohmann::json::object();
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      std::vector<std::string> row;
      for (ProofType t : types_[index_of(g)][i]) row.push_back(to_string(t));
      jg[std::to_string(levels_[i].level)] = row;
    }
    types[to_string(g)] = jg;
  }
  return {{"levels", levels}, {"types", types}};
}

std::vector<Slot> Curriculum::slots(Group g) const {
  std::vector<Slot> out;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& l = levels_[i];
    for (std::size_t k = 0; k < l.problems.size(); ++k)
      out.push_back(Slot{l.level, k, l.problems[k], types_[index_of(g)][i][k], l.help[k]});
  }
  return out;
}

std::vector<Slot> Curriculum::pretest_slots() const {
  auto all = slots(Group::C);
  std::erase_if(all, [&](const Slot& s) { return s.level != levels_.front().level; });
  return all;
}

std::size_t Curriculum::size() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.problems.size();
  return n;
}

Group assign_group(double pretest_mean, const std::vector<RosterEntry>& roster) {
  std::vector<std::vector<double>> means(3);
  for (const auto& e : roster) means[index_of(e.group)].push_back(e.pretest_mean);
  const std::size_t min_size = std::min({means[0].size(), means[1].size(), means[2].size()});
  Group best = Group::C;
  double best_h = 0;
  bool have = false;
  for (Group g : kGroups) {
    if (means[index_of(g)].size() != min_size) continue;
    auto trial = means;
    trial[index_of(g)].push_back(pretest_mean);
    const double h = stats::kruskal_h(trial);
    if (!have || h < best_h - 1e-12) {
      best = g;
      best_h = h;
      have = true;
    }
  }
  return best;
}

bool proactive_hint_trigger(const ProofState& state, double idle_seconds, int recent_failures,
                            const HintTriggerConfig& config) {
  if (!state.problem().help_allowed || is_complete(state)) return false;
  return idle_seconds >= config.idle_seconds || recent_failures >= config.failures;
}

}  // namespace dt
