#pragma once

#include <nlohmann/json.hpp>

#include "dt/proof.hpp"
#include "dt/search.hpp"

namespace dt {

nlohmann::json to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Binding& b);
Binding binding_from_json(const nlohmann::json& j);

/// Node table with canonical formulas plus counters. from_json(to_json(s)) == s.
nlohmann::json to_json(const ProofState& s);
ProofState state_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StepResult& r);
nlohmann::json to_json(const ProofStep& s);
nlohmann::json to_json(const HintAction& h);

}  // namespace dt
