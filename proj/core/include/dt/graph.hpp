#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace dt::graph {

/// Undirected weighted simple graph on nodes 0..n-1. Edges are stored with
/// u < v; the edge key used for tie-breaking is (u, v).
class Graph {
 public:
  struct Edge {
    std::size_t u = 0, v = 0;
    double weight = 1.0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  explicit Graph(std::size_t n = 0) : n_(n) {}

  /// Adds weight to edge {u, v}. Self-loops are ignored.
  void add_edge(std::size_t u, std::size_t v, double weight = 1.0);
  void remove_edge(std::size_t index);

  std::size_t node_count() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::vector<std::vector<std::size_t>> adjacency() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;  // sorted by (u, v)
};

/// Edge betweenness on the unweighted graph (Brandes). Each unordered node
/// pair contributes one unit split evenly over its shortest paths.
std::vector<double> edge_betweenness(const Graph& g);

/// Community label per node, 0-based, numbered by lowest member.
using Partition = std::vector<std::size_t>;

Partition connected_components(const Graph& g);

/// Newman weighted modularity. Throws std::invalid_argument on a graph
/// without edge weight or a partition of the wrong size.
double modularity(const Graph& g, const Partition& partition);

struct GirvanNewmanResult {
  Partition partition;
  double modularity = 0;
  std::size_t best_iteration = 0;                        // removals made before the best split
  std::vector<std::pair<std::size_t, std::size_t>> removed;  // in removal order
};

/// Removes the highest-betweenness edge (lowest key on ties) until no edges
/// remain, scoring the component partition against the original weighted
/// graph after each removal. Returns the first partition with maximal Q.
GirvanNewmanResult girvan_newman(const Graph& g);

}  // namespace dt::graph
