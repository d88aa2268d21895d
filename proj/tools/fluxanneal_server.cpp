// Standalone solve server speaking the JSON/HTTP subproblem protocol.
// Wraps the local exact or simulated-annealing backend; intended as a
// loopback stand-in for a real annealing service.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fluxanneal/remote.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Loopback Ising solve server (POST /solve)"};
  std::string host = "127.0.0.1";
  int port = 8753;
  fluxanneal::SolveServer::Options options;
  long sa_sweeps = 1000;
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port");
  app.add_option("--backend", options.backend, "brute | sa")
      ->check(CLI::IsMember({"brute", "sa"}));
  app.add_option("--max-n", options.max_n, "largest accepted subproblem");
  app.add_option("--sa-sweeps", sa_sweeps, "sweeps per SA read");
  app.add_option("--token", options.required_token, "require this bearer token");
  app.add_option("--delay", options.artificial_delay_s, "artificial response delay in seconds");

  CLI11_PARSE(app, argc, argv);
  options.sa.sweeps = sa_sweeps;

  fluxanneal::SolveServer server(std::move(options));
  std::cout << "listening on " << host << ":" << port << std::endl;
  if (!server.serve(host, port)) {
    std::cerr << "failed to bind " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
