#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dt/graph.hpp"
#include "dt/network.hpp"

namespace dt::mining {

inline constexpr std::size_t kNoRegion = static_cast<std::size_t>(-1);

struct Clustering {
  /// Region per network node; kNoRegion for the start and goal states.
  std::vector<std::size_t> region;
  std::size_t region_count = 0;
  double modularity = 0;
  /// Network node pairs in GN removal order.
  std::vector<std::pair<std::size_t, std::size_t>> removed;
};

/// The clustering graph: start/goal states and self-loops dropped, direction
/// ignored, edge weight = summed visit frequency of both directions.
/// `nodes[i]` is the network node behind graph node i.
struct PreparedGraph {
  graph::Graph graph;
  std::vector<std::size_t> nodes;
};
PreparedGraph prepare(const InteractionNetwork& net);

/// Girvan-Newman on the prepared graph. When it has no edges every state is
/// its own region.
Clustering cluster_network(const InteractionNetwork& net);

struct Region {
  std::string name;                 // "R1", "R2", ...
  std::vector<std::string> label;   // key propositions
  std::vector<std::string> chain;   // propositions derived on the way in and inside
  std::vector<std::string> subgoals;  // label entries that arrived as backward subgoals
  std::vector<std::size_t> states;  // network node ids
  GroupCounts visits{};
  friend bool operator==(const Region&, const Region&) = default;
};

struct MapEdge {
  std::string from, to;
  std::vector<std::string> actions;  // composite label of the merged parallel edges
  GroupCounts frequency{};
  GroupCounts backward{};  // traversals made by a backward derivation
  friend bool operator==(const MapEdge&, const MapEdge&) = default;
};

struct Approach {
  std::vector<std::string> path;  // "Start", region names..., "Goal"
  GroupCounts frequency{};
  std::size_t total() const noexcept { return frequency[0] + frequency[1] + frequency[2]; }
  friend bool operator==(const Approach&, const Approach&) = default;
};

struct ApproachMap {
  std::string problem;
  double modularity = 0;
  std::vector<Region> regions;
  std::vector<MapEdge> edges;
  /// Most frequent first.
  std::vector<Approach> approaches;

  const Region* region(const std::string& name) const;
  nlohmann::json to_json() const;
  static ApproachMap from_json(const nlohmann::json& j);
  friend bool operator==(const ApproachMap&, const ApproachMap&) = default;
};

/// Collapses regions, keeps one path per distinct (loop-erased) region
/// sequence of a completed trace and merges parallel edges. Regions are
/// numbered in order of appearance along the approaches, most frequent first.
/// Throws std::invalid_argument when no trace reached the goal.
ApproachMap build_approach_map(const InteractionNetwork& net, const Clustering& clustering);

std::string to_dot(const ApproachMap& map);
std::string to_dot(const InteractionNetwork& net);

}  // namespace dt::mining
