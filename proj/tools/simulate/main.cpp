// simulate: generate a simulated student cohort's event logs.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dt/simcohort.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulated student cohorts for the tutor"};
  app.require_subcommand(1);

  std::string config_path, out = "logs";
  std::size_t per_group = 0, threads = 0;
  std::uint64_t seed = 0;
  auto* cohort = app.add_subcommand("cohort", "Run agents through each treatment's curriculum");
  cohort->add_option("--config", config_path, "Cohort config (TOML or JSON)")->check(CLI::ExistingFile);
  cohort->add_option("--out", out, "Output directory for <student>.jsonl logs");
  cohort->add_option("--per-group", per_group, "Override students per group");
  cohort->add_option("--seed", seed, "Override the cohort seed");
  cohort->add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    dt::sim::CohortConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      config = dt::sim::parse_cohort_config(ss.str());
    }
    if (per_group) config.per_group = per_group;
    if (cohort->count("--seed")) config.seed = seed;
    if (threads) config.threads = threads;
    const auto logs = dt::sim::generate_cohort(config);
    dt::sim::write_cohort(logs, config, out);
    std::size_t events = 0;
    for (const auto& l : logs) events += l.events.size();
    std::cerr << logs.size() << " students, " << events << " events written to " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
