#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dt/curriculum.hpp"
#include "dt/proof.hpp"

namespace dt {

/// Problem bank plus curriculum, loaded from the JSON config
/// (core/data/problems.json format).
class ProblemBank {
 public:
  static ProblemBank parse(std::string_view json_text);
  static ProblemBank load(const std::string& path);
  /// The compiled-in bank.
  static const ProblemBank& standard();

  const std::vector<ProblemSpec>& problems() const noexcept { return problems_; }
  const ProblemSpec* find(std::string_view id) const noexcept;
  const ProblemSpec& at(std::string_view id) const;
  const Curriculum& curriculum() const noexcept { return curriculum_; }

  /// The problem as presented in a slot (type and help flag applied).
  ProblemSpec problem_for(const Slot& slot) const;

 private:
  std::vector<ProblemSpec> problems_;
  Curriculum curriculum_;
};

}  // namespace dt
