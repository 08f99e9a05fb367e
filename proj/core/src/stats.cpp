#include "dt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dt::stats {

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::TwoSided: return "two-sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
  }
  return "?";
}

std::string TestReport::display_threshold() const {
  const double t = std::floor(threshold * 1000.0 + 1e-9) / 1000.0;
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << t;
  return os.str();
}

namespace {

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// sum(t^3 - t) over groups of tied values
double tie_term(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double kruskal_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    pooled.insert(pooled.end(), g.begin(), g.end());
    sizes.push_back(g.size());
  }
  if (sizes.size() < 2) return 0.0;
  const double n = static_cast<double>(pooled.size());
  const double ties = tie_term(pooled);
  const double correction = 1.0 - ties / (n * n * n - n);
  if (correction <= 0) return 0.0;
  const auto ranks = midranks(pooled);
  double sum = 0;
  std::size_t offset = 0;
  for (std::size_t size : sizes) {
    const double r = std::accumulate(ranks.begin() + offset, ranks.begin() + offset + size, 0.0);
    sum += r * r / static_cast<double>(size);
    offset += size;
  }
  const double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  return std::max(0.0, h);
}

TestReport kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha) {
  if (groups.size() < 2) throw std::invalid_argument("kruskal_wallis needs at least two groups");
  TestReport r;
  r.test = "kruskal-wallis";
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("kruskal_wallis: empty group");
    r.group_means.push_back(mean(g));
  }
  r.statistic = kruskal_h(groups);
  const double df = static_cast<double>(groups.size() - 1);
  r.p_value = r.statistic <= 0 ? 1.0 : clamp_p(boost::math::gamma_q(df / 2.0, r.statistic / 2.0));
  r.threshold = alpha;
  r.decision = r.p_value < alpha;
  return r;
}

double mwu_exact_p(double u, std::size_t n_a, std::size_t n_b, Alternative alt) {
  // f(m, n, u) = f(m-1, n, u-n) + f(m, n-1, u): the largest value belongs
  // either to a (beating all n b-values) or to b.
  const std::size_t max_u = n_a * n_b;
  std::vector<std::vector<double>> prev(n_a + 1), cur(n_a + 1);
  for (std::size_t m = 0; m <= n_a; ++m) {
    prev[m].assign(max_u + 1, 0.0);
    prev[m][0] = 1.0;  // n = 0: only U = 0
  }
  for (std::size_t n = 1; n <= n_b; ++n) {
    cur[0].assign(max_u + 1, 0.0);
    cur[0][0] = 1.0;
    for (std::size_t m = 1; m <= n_a; ++m) {
      cur[m].assign(max_u + 1, 0.0);
      for (std::size_t v = 0; v <= max_u; ++v) {
        double c = prev[m][v];
        if (v >= n) c += cur[m - 1][v - n];
        cur[m][v] = c;
      }
    }
    std::swap(prev, cur);
  }
  const auto& dist = prev[n_a];
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  const auto ui = static_cast<std::size_t>(std::llround(u));
  double le = 0, ge = 0;
  for (std::size_t v = 0; v <= max_u; ++v) {
    if (v <= ui) le += dist[v];
    if (v >= ui) ge += dist[v];
  }
  le /= total;
  ge /= total;
  switch (alt) {
    case Alternative::Greater: return clamp_p(ge);
    case Alternative::Less: return clamp_p(le);
    case Alternative::TwoSided: return clamp_p(2.0 * std::min(le, ge));
  }
  return 1.0;
}

double mwu_normal_p(double u, std::size_t n_a, std::size_t n_b, Alternative alt, double tie_term_sum,
                    bool continuity) {
  const double na = static_cast<double>(n_a), nb = static_cast<double>(n_b), n = na + nb;
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term_sum / (n * (n - 1.0)));
  if (var <= 0) return 1.0;
  const double sd = std::sqrt(var);
  const double cc = continuity ? 0.5 : 0.0;
  const boost::math::normal norm;
  switch (alt) {
    case Alternative::Greater: return clamp_p(boost::math::cdf(boost::math::complement(norm, (u - mu - cc) / sd)));
    case Alternative::Less: return clamp_p(boost::math::cdf(norm, (u - mu + cc) / sd));
    case Alternative::TwoSided: {
      const double z = std::max(0.0, std::abs(u - mu) - cc) / sd;
      return clamp_p(2.0 * boost::math::cdf(boost::math::complement(norm, z)));
    }
  }
  return 1.0;
}

TestReport mann_whitney_u(std::span<const double> a, std::span<const double> b, Alternative alt, double alpha) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  TestReport r;
  r.test = "mann-whitney";
  r.alternative = alt;
  r.group_means = {mean(a), mean(b)};
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  r.statistic = u;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double ties = tie_term(pooled);
  if (std::min(a.size(), b.size()) <= 8 && ties == 0) {
    r.p_value = mwu_exact_p(u, a.size(), b.size(), alt);
    r.exact = true;
  } else {
    r.p_value = mwu_normal_p(u, a.size(), b.size(), alt, ties);
  }
  r.threshold = alpha;
  r.decision = r.p_value < alpha;
  return r;
}

double bonferroni(double alpha, std::size_t k) {
  if (k == 0) throw std::invalid_argument("bonferroni: k must be at least 1");
  return alpha / static_cast<double>(k);
}

std::vector<TestReport> pairwise_battery(const std::array<std::vector<double>, 3>& groups, double alpha) {
  static constexpr const char* kNames[] = {"C", "T1", "T2"};
  std::vector<TestReport> out;
  auto kw = kruskal_wallis({groups[0], groups[1], groups[2]}, alpha);
  kw.label = "C,T1,T2";
  out.push_back(std::move(kw));
  const double threshold = bonferroni(alpha, 3);
  for (auto [x, y] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}}) {
    auto r = mann_whitney_u(groups[x], groups[y], Alternative::TwoSided, threshold);
    const double half = static_cast<double>(groups[x].size() * groups[y].size()) / 2.0;
    const char* op = r.statistic > half ? ">" : (r.statistic < half ? "<" : "=");
    r.label = std::string(kNames[x]) + op + kNames[y];
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + '"';
}

}  // namespace

std::string to_csv(const std::vector<TestReport>& reports) {
  std::ostringstream os;
  os << "test,label,statistic,p_value,alternative,threshold,decision,means\n";
  os.precision(10);
  for (const auto& r : reports) {
    os << r.test << ',' << csv_field(r.label) << ',' << r.statistic << ',' << r.p_value << ',' << to_string(r.alternative)
       << ',' << r.display_threshold() << ',' << (r.decision ? "significant" : "ns") << ',';
    for (std::size_t i = 0; i < r.group_means.size(); ++i) os << (i ? ";" : "") << r.group_means[i];
    os << '\n';
  }
  return os.str();
}

}  // namespace dt::stats
