#include "dt/compare.hpp"

#include <set>

namespace dt::mining {

std::string to_string(AnnotationMetric m) {
  switch (m) {
    case AnnotationMetric::TimeToDerive: return "time-to-derive";
    case AnnotationMetric::StepsBefore: return "steps-before";
    case AnnotationMetric::UnnecessaryCount: return "unnecessary-count";
  }
  return "?";
}

AnnotationMetric annotation_metric_from_string(std::string_view s) {
  if (s == "time" || s == "time-to-derive") return AnnotationMetric::TimeToDerive;
  if (s == "steps" || s == "steps-before") return AnnotationMetric::StepsBefore;
  if (s == "unnecessary" || s == "unnecessary-count") return AnnotationMetric::UnnecessaryCount;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

std::array<std::vector<double>, 3> annotation_samples(const InteractionNetwork& net, const Formula& formula,
                                                      AnnotationMetric metric) {
  const auto fallback = net.contributing_union();
  const std::set<std::string> fallback_set(fallback.begin(), fallback.end());
  std::array<std::vector<double>, 3> out;
  for (const auto& t : net.traces) {
    const std::set<std::string> own(t.contributing.begin(), t.contributing.end());
    const auto& needed = t.complete ? own : fallback_set;
    std::size_t unnecessary = 0;
    for (const auto& d : t.derivations) {
      if (d.formula == formula.text()) {
        double v = 0;
        switch (metric) {
          case AnnotationMetric::TimeToDerive: v = d.active_minutes; break;
          case AnnotationMetric::StepsBefore: v = static_cast<double>(d.steps_before); break;
          case AnnotationMetric::UnnecessaryCount: v = static_cast<double>(unnecessary); break;
        }
        out[index_of(t.group)].push_back(v);
        break;
      }
      if (!needed.contains(d.formula)) ++unnecessary;
    }
  }
  return out;
}

std::vector<stats::TestReport> compare_on_annotation(const InteractionNetwork& net, const Formula& formula,
                                                     AnnotationMetric metric, double alpha) {
  auto samples = annotation_samples(net, formula, metric);
  if (samples[0].empty() && samples[1].empty() && samples[2].empty())
    throw std::invalid_argument("no trace derived " + formula.text());
  for (Group g : kGroups)
    if (samples[index_of(g)].empty())
      throw std::invalid_argument("group " + to_string(g) + " never derived " + formula.text());
  return stats::pairwise_battery(samples, alpha);
}

}  // namespace dt::mining
