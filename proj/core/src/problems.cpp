#include "dt/problems.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dt {

namespace detail {
extern const std::string_view kProblemBankText;
}

ProblemBank ProblemBank::parse(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported problem bank version");
  ProblemBank bank;
  std::set<std::string> ids;
  for (const auto& jp : j.at("problems")) {
    ProblemSpec p;
    p.id = jp.at("id").get<std::string>();
    for (const auto& t : jp.at("premises")) p.premises.push_back(dt::parse(t.get<std::string>()));
    p.conclusion = dt::parse(jp.at("conclusion").get<std::string>());
    p.validate();
    if (!ids.insert(p.id).second) throw std::invalid_argument("duplicate problem id " + p.id);
    bank.problems_.push_back(std::move(p));
  }
  bank.curriculum_ = Curriculum::from_json(j.at("curriculum"));
  for (const auto& level : bank.curriculum_.levels())
    for (const auto& id : level.problems)
      if (!ids.contains(id)) throw std::invalid_argument("curriculum names unknown problem " + id);
  return bank;
}

ProblemBank ProblemBank::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ProblemBank& ProblemBank::standard() {
  static const ProblemBank bank = parse(detail::kProblemBankText);
  return bank;
}

const ProblemSpec* ProblemBank::find(std::string_view id) const noexcept {
  for (const auto& p : problems_)
    if (p.id == id) return &p;
  return nullptr;
}

const ProblemSpec& ProblemBank::at(std::string_view id) const {
  if (const auto* p = find(id)) return *p;
  throw std::out_of_range("unknown problem " + std::string(id));
}

ProblemSpec ProblemBank::problem_for(const Slot& slot) const {
  ProblemSpec p = at(slot.problem);
  p.type = slot.type;
  p.help_allowed = slot.help_allowed;
  return p;
}

}  // namespace dt
