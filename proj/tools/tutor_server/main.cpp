// tutor-server: HTTP JSON API for the proof tutor.
#include <iostream>

#include <CLI11.hpp>

#include "http_binding.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Proof tutor HTTP service"};
  std::string host = "127.0.0.1", logs = "tutor-logs", snapshots, bank_path;
  int port = 8080;
  app.add_option("--host", host, "Listen address");
  app.add_option("--port", port, "Listen port");
  app.add_option("--logs", logs, "Directory for per-student event logs");
  app.add_option("--snapshots", snapshots, "Directory for per-session state snapshots");
  app.add_option("--bank", bank_path, "Problem bank JSON (defaults to the built-in bank)");
  CLI11_PARSE(app, argc, argv);

  try {
    static const dt::ProblemBank bank =
        bank_path.empty() ? dt::ProblemBank::standard() : dt::ProblemBank::load(bank_path);
    dt::ServiceConfig config;
    config.log_dir = logs;
    config.snapshot_dir = snapshots;
    dt::TutorService service(config, bank);
    httplib::Server server;
    dt::bind(server, service);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "tutor-server: cannot listen on " << host << ':' << port << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "tutor-server: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
