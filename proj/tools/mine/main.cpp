// mine: interaction networks, clustering, approach maps and group comparisons
// from tutor event logs.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dt/approach_map.hpp"
#include "dt/compare.hpp"
#include "dt/eventlog.hpp"
#include "dt/network.hpp"
#include "dt/problems.hpp"

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::json clustering_json(const dt::mining::Clustering& c) {
  nlohmann::json region = nlohmann::json::array();
  for (auto r : c.region) region.push_back(r == dt::mining::kNoRegion ? nlohmann::json(nullptr) : nlohmann::json(r));
  return {{"format", "deepthought-clustering"},
          {"region", region},
          {"region_count", c.region_count},
          {"modularity", c.modularity},
          {"removed", c.removed}};
}

dt::mining::Clustering clustering_from(const nlohmann::json& j) {
  dt::mining::Clustering c;
  for (const auto& r : j.at("region")) c.region.push_back(r.is_null() ? dt::mining::kNoRegion : r.get<std::size_t>());
  c.region_count = j.at("region_count").get<std::size_t>();
  c.modularity = j.at("modularity").get<double>();
  c.removed = j.at("removed").get<std::vector<std::pair<std::size_t, std::size_t>>>();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine tutor logs: interaction networks, Girvan-Newman regions, approach maps"};
  app.require_subcommand(1);

  std::string logs, problem, out = "network.json", bank_path;
  auto* build = app.add_subcommand("build", "Build the interaction network of one problem");
  build->add_option("--logs", logs, "Directory of *.jsonl event logs")->required()->check(CLI::ExistingDirectory);
  build->add_option("--problem", problem, "Problem id, e.g. 2.4")->required();
  build->add_option("--out", out, "Network JSON output ('-' for stdout)");
  build->add_option("--bank", bank_path, "Problem bank JSON (defaults to the built-in bank)");

  std::string network = "network.json", clusters_out = "clusters.json";
  auto* cluster = app.add_subcommand("cluster", "Girvan-Newman regions of a network");
  cluster->add_option("--network", network, "Network JSON")->check(CLI::ExistingFile);
  cluster->add_option("--out", clusters_out, "Clustering JSON output");

  std::string clusters_in, dot, map_out = "map.json";
  auto* map = app.add_subcommand("map", "Approach map of a network");
  map->add_option("--network", network, "Network JSON")->check(CLI::ExistingFile);
  map->add_option("--clusters", clusters_in, "Clustering JSON (computed when omitted)")->check(CLI::ExistingFile);
  map->add_option("--dot", dot, "Write the map as Graphviz DOT");
  map->add_option("--out", map_out, "Approach map JSON output");

  std::string node, metric = "time", csv;
  double alpha = 0.05;
  auto* compare = app.add_subcommand("compare", "Compare groups on a proposition's annotation");
  compare->add_option("--network", network, "Network JSON")->check(CLI::ExistingFile);
  compare->add_option("--node", node, "Proposition, e.g. \"¬(A⇒¬C)\"")->required();
  compare->add_option("--metric", metric, "time | steps | unnecessary")
      ->check(CLI::IsMember({"time", "time-to-derive", "steps", "steps-before", "unnecessary", "unnecessary-count"}));
  compare->add_option("--alpha", alpha, "Family-wise significance level");
  compare->add_option("--csv", csv, "Also write the reports as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      const dt::ProblemBank bank = bank_path.empty() ? dt::ProblemBank::standard() : dt::ProblemBank::load(bank_path);
      auto events = dt::load_dir(logs);
      std::erase_if(events, [&](const auto& e) { return e.problem != problem; });
      const auto net = dt::mining::build_network(events, bank.at(problem));
      write_text(out, net.to_json().dump() + "\n");
      std::cerr << "network " << problem << ": " << net.nodes.size() << " states, " << net.edges.size()
                << " edges, " << net.traces.size() << " attempts\n";
    } else if (*cluster) {
      const auto net = dt::mining::InteractionNetwork::from_json(read_json(network));
      const auto c = dt::mining::cluster_network(net);
      write_text(clusters_out, clustering_json(c).dump() + "\n");
      std::cerr << c.region_count << " regions, Q = " << c.modularity << "\n";
    } else if (*map) {
      const auto net = dt::mining::InteractionNetwork::from_json(read_json(network));
      const auto c = clusters_in.empty() ? dt::mining::cluster_network(net) : clustering_from(read_json(clusters_in));
      const auto m = dt::mining::build_approach_map(net, c);
      write_text(map_out, m.to_json().dump(2) + "\n");
      if (!dot.empty()) write_text(dot, dt::mining::to_dot(m));
      for (const auto& a : m.approaches) {
        std::cerr << "[" << a.frequency[0] << ", " << a.frequency[1] << ", " << a.frequency[2] << "]";
        for (const auto& p : a.path) std::cerr << ' ' << p;
        std::cerr << '\n';
      }
    } else if (*compare) {
      const auto net = dt::mining::InteractionNetwork::from_json(read_json(network));
      const auto reports = dt::mining::compare_on_annotation(net, dt::parse(node),
                                                             dt::mining::annotation_metric_from_string(metric), alpha);
      const std::string table = dt::stats::to_csv(reports);
      std::cout << table;
      if (!csv.empty()) write_text(csv, table);
    }
  } catch (const std::exception& e) {
    std::cerr << "mine: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
