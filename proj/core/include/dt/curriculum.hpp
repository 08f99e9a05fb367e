#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/group.hpp"
#include "dt/proof.hpp"

namespace dt {

/// One problem position in a treatment's sequence.
struct Slot {
  int level = 0;
  std::size_t index = 0;  // 0-based within the level
  std::string problem;
  ProofType type = ProofType::PS;
  bool help_allowed = true;

  bool pretest() const noexcept { return level == 1; }
  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Level 1 is the pretest, the last level the posttest, the rest training.
/// Problem ids and help flags are shared by all treatments; presentation types
/// differ per treatment.
class Curriculum {
 public:
  struct Level {
    int level = 0;
    std::vector<std::string> problems;
    std::vector<bool> help;
  };

  static Curriculum from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::vector<Level>& levels() const noexcept { return levels_; }
  /// All slots for a treatment, in presentation order.
  std::vector<Slot> slots(Group g) const;
  std::vector<Slot> pretest_slots() const;
  std::size_t size() const;

 private:
  std::vector<Level> levels_;
  // types_[group][level position][slot]
  std::vector<std::vector<ProofType>> types_[3];
};

/// Next treatment for a student who finished the pretest. Candidates are the
/// groups of minimal size; among them, the one whose insertion minimises the
/// Kruskal-Wallis H of the groups' pretest means. Ties go to C, then T1.
struct RosterEntry {
  Group group;
  double pretest_mean;
};
Group assign_group(double pretest_mean, const std::vector<RosterEntry>& roster);

struct HintTriggerConfig {
  double idle_seconds = 120;
  int failures = 3;
};

/// Stand-in for the proactive hint model: fires when the student has been
/// idle long enough or has failed several applications in a row.
bool proactive_hint_trigger(const ProofState& state, double idle_seconds, int recent_failures,
                            const HintTriggerConfig& config = {});

}  // namespace dt
