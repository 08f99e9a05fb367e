#include "dt/tutor.hpp"

#include <algorithm>

namespace dt {

std::vector<PlaybackStep> playback_script(const ProblemSpec& problem, PlaybackStrategy strategy,
                                          TimestampMs step_delay_ms, const SearchOptions& options) {
  auto proof = search_proof(problem, options);
  if (!proof) throw HintUnavailable("no proof of " + problem.id + " within the search bound");
  const RuleCatalog& catalog = options.catalog ? *options.catalog : RuleCatalog::standard();
  std::vector<PlaybackStep> out;
  for (const auto& s : *proof) {
    PlaybackStep p{strategy == PlaybackStrategy::Backward, s.rule, s.premises, s.conclusion, s.choice,
                   step_delay_ms};
    if (p.backward) {
      // backward refinement needs every metavariable, not just the free ones
      if (auto m = match_step(catalog.at(s.rule), s.premises, s.conclusion)) p.binding = m->second;
    }
    out.push_back(std::move(p));
  }
  if (strategy == PlaybackStrategy::Backward) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace dt
