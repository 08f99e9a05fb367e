#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace dt::stats {

enum class Alternative { TwoSided, Greater, Less };
std::string to_string(Alternative a);

struct TestReport {
  std::string test;   // "kruskal-wallis" or "mann-whitney"
  std::string label;  // e.g. "C,T1,T2" or "T1<C"
  std::vector<double> group_means;
  double statistic = 0;  // H or U (of the first sample)
  double p_value = 1;
  Alternative alternative = Alternative::TwoSided;
  double threshold = 0.05;
  bool decision = false;
  bool exact = false;

  /// Threshold truncated (not rounded) to three decimals: 0.05/3 -> "0.016".
  std::string display_threshold() const;
};

/// Mid-ranks (1-based) of the pooled values.
std::vector<double> midranks(std::span<const double> values);

/// Tie-corrected H. Empty groups are skipped; fewer than two non-empty
/// groups, or all values tied, gives 0.
double kruskal_h(const std::vector<std::vector<double>>& groups);

/// Throws std::invalid_argument for fewer than two groups or an empty group.
TestReport kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha = 0.05);

/// U counts pairs with a > b (ties count one half). Greater means a tends to
/// exceed b. Exact p when min(n_a, n_b) <= 8 and there are no ties; otherwise
/// the normal approximation with continuity and tie correction.
TestReport mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alt = Alternative::TwoSided, double alpha = 0.05);

/// Exact null distribution p-value of U for tie-free samples.
double mwu_exact_p(double u, std::size_t n_a, std::size_t n_b, Alternative alt);
/// Normal-approximation p-value. `tie_term` is sum(t^3 - t) over tie groups.
double mwu_normal_p(double u, std::size_t n_a, std::size_t n_b, Alternative alt, double tie_term = 0,
                    bool continuity = true);

double bonferroni(double alpha, std::size_t k);

/// Kruskal-Wallis on the three groups at `alpha`, then the three pairwise
/// two-sided Mann-Whitney tests (T1 vs C, T2 vs C, T2 vs T1) at alpha/3.
/// Labels name the direction of the observed difference, e.g. "T2>C".
std::vector<TestReport> pairwise_battery(const std::array<std::vector<double>, 3>& groups, double alpha = 0.05);

/// CSV with header test,label,statistic,p_value,alternative,threshold,decision,means.
std::string to_csv(const std::vector<TestReport>& reports);

}  // namespace dt::stats
