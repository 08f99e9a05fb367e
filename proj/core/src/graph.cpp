#include "dt/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace dt::graph {

void Graph::add_edge(std::size_t u, std::size_t v, double weight) {
  if (u >= n_ || v >= n_) throw std::out_of_range("edge endpoint out of range");
  if (u == v) return;
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{u, v},
                             [](const Edge& e, const auto& key) { return std::pair{e.u, e.v} < key; });
  if (it != edges_.end() && it->u == u && it->v == v) {
    it->weight += weight;
    return;
  }
  edges_.insert(it, Edge{u, v, weight});
}

void Graph::remove_edge(std::size_t index) { edges_.erase(edges_.begin() + static_cast<std::ptrdiff_t>(index)); }

std::vector<std::vector<std::size_t>> Graph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(n_);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    adj[edges_[i].u].push_back(i);
    adj[edges_[i].v].push_back(i);
  }
  return adj;
}

std::vector<double> edge_betweenness(const Graph& g) {
  const std::size_t n = g.node_count();
  const auto& edges = g.edges();
  const auto adj = g.adjacency();
  std::vector<double> eb(edges.size(), 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1;
    dist[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (std::size_t ei : adj[v]) {
        const std::size_t w = edges[ei].u == v ? edges[ei].v : edges[ei].u;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t ei : adj[w]) {
        const std::size_t v = edges[ei].u == w ? edges[ei].v : edges[ei].u;
        if (dist[v] == dist[w] - 1) {
          const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
          eb[ei] += c;
          delta[v] += c;
        }
      }
    }
  }
  for (double& x : eb) x /= 2.0;  // every pair was counted from both ends
  return eb;
}

Partition connected_components(const Graph& g) {
  const std::size_t n = g.node_count();
  const auto adj = g.adjacency();
  const std::size_t unset = static_cast<std::size_t>(-1);
  Partition label(n, unset);
  std::size_t next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t ei : adj[v]) {
        const auto& e = g.edges()[ei];
        const std::size_t w = e.u == v ? e.v : e.u;
        if (label[w] == unset) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

double modularity(const Graph& g, const Partition& partition) {
  if (partition.size() != g.node_count()) throw std::invalid_argument("partition does not cover the graph");
  double m = 0;
  for (const auto& e : g.edges()) m += e.weight;
  if (m <= 0) throw std::invalid_argument("modularity of a graph without edges");
  std::size_t k = 0;
  for (std::size_t c : partition) k = std::max(k, c + 1);
  std::vector<double> internal(k, 0.0), degree(k, 0.0);
  for (const auto& e : g.edges()) {
    degree[partition[e.u]] += e.weight;
    degree[partition[e.v]] += e.weight;
    if (partition[e.u] == partition[e.v]) internal[partition[e.u]] += e.weight;
  }
  double q = 0;
  for (std::size_t c = 0; c < k; ++c) q += internal[c] / m - (degree[c] / (2 * m)) * (degree[c] / (2 * m));
  return q;
}

GirvanNewmanResult girvan_newman(const Graph& g) {
  if (g.edges().empty()) throw std::invalid_argument("girvan_newman on a graph without edges");
  GirvanNewmanResult best;
  best.partition = connected_components(g);
  best.modularity = modularity(g, best.partition);
  Graph work = g;
  std::size_t iteration = 0;
  while (!work.edges().empty()) {
    const auto eb = edge_betweenness(work);
    std::size_t pick = 0;
    for (std::size_t i = 1; i < eb.size(); ++i)
      if (eb[i] > eb[pick] + 1e-9) pick = i;  // edges are key-ordered, so ties keep the lowest key
    best.removed.emplace_back(work.edges()[pick].u, work.edges()[pick].v);
    work.remove_edge(pick);
    ++iteration;
    auto partition = connected_components(work);
    const double q = modularity(g, partition);
    if (q > best.modularity + 1e-12) {
      best.modularity = q;
      best.partition = std::move(partition);
      best.best_iteration = iteration;
    }
  }
  return best;
}

}  // namespace dt::graph
