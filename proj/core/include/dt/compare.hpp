#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "dt/network.hpp"
#include "dt/stats.hpp"

namespace dt::mining {

enum class AnnotationMetric { TimeToDerive, StepsBefore, UnnecessaryCount };

std::string to_string(AnnotationMetric m);
/// Accepts "time", "time-to-derive", "steps", "steps-before", "unnecessary", "unnecessary-count".
AnnotationMetric annotation_metric_from_string(std::string_view s);

/// Per-group samples, one per trace that derived `formula`, taken at its first
/// derivation: active minutes since the start, derivations made before it, or
/// how many of those were unnecessary. Unnecessary means outside the trace's
/// final contributing set; for unfinished traces, outside the union of
/// contributing sets of all finished ones.
std::array<std::vector<double>, 3> annotation_samples(const InteractionNetwork& net, const Formula& formula,
                                                      AnnotationMetric metric);

/// pairwise_battery over annotation_samples. Throws std::invalid_argument if
/// nobody derived the formula or some group has no sample.
std::vector<stats::TestReport> compare_on_annotation(const InteractionNetwork& net, const Formula& formula,
                                                     AnnotationMetric metric, double alpha = 0.05);

}  // namespace dt::mining
