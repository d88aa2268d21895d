#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/ising.hpp"
#include "fluxanneal/subsolvers.hpp"

namespace fluxanneal {

using nlohmann::json;

struct RemoteParams {
  std::string endpoint;     // e.g. http://127.0.0.1:8080
  double timeout_s = 10.0;  // connection + read budget
  int num_reads = 1;
  bool local_descent = false;  // greedy single-flip polish of the returned sample
};

/// Request body for POST /solve. Couplings travel as (i, j, value) rows with
/// i < j; doubles survive the JSON round trip exactly.
inline json solve_request(const IsingProblem& problem, int num_reads, double timeout_s) {
  json j_entries = json::array();
  problem.for_each_coupling(
      [&](int i, int j, double v) { j_entries.push_back(json::array({i, j, v})); });
  return json{{"n", problem.n_sites()},
              {"J", std::move(j_entries)},
              {"h", problem.fields()},
              {"num_reads", num_reads},
              {"timeout_ms", static_cast<long>(timeout_s * 1000.0)}};
}

inline IsingProblem problem_from_request(const json& body) {
  if (!body.contains("n") || !body["n"].is_number_integer())
    throw ContractViolation("solve request: missing n");
  int n = body["n"].get<int>();
  std::vector<Triplet> triplets;
  if (body.contains("J")) {
    for (const auto& row : body["J"]) {
      if (!row.is_array() || row.size() != 3)
        throw ContractViolation("solve request: malformed J row");
      triplets.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
    }
  }
  std::vector<double> fields;
  if (body.contains("h")) fields = body["h"].get<std::vector<double>>();
  return IsingProblem(n, std::move(triplets), std::move(fields));
}

namespace detail {

/// Best-improvement single-flip descent to the nearest local minimum.
inline void greedy_descent(const IsingProblem& problem, SpinConfig& s) {
  const int n = problem.n_sites();
  std::vector<double> sd(s.begin(), s.end());
  std::vector<double> lf;
  problem.multiply(sd, lf);
  const auto& h = problem.fields();
  for (;;) {
    int best = -1;
    double best_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      double delta = -2.0 * sd[i] * (lf[i] + h[i]);
      if (delta < best_delta) {
        best = i;
        best_delta = delta;
      }
    }
    if (best < 0) return;
    double si = sd[best];
    s[best] = static_cast<std::int8_t>(-s[best]);
    sd[best] = -si;
    problem.add_scaled_row(best, -2.0 * si, lf);
  }
}

inline SpinConfig parse_remote_spins(const json& body, int expected_n) {
  if (!body.is_object() || !body.contains("spins") || !body["spins"].is_array())
    throw MalformedResponseError("remote response: missing spins array");
  const auto& arr = body["spins"];
  if (static_cast<int>(arr.size()) != expected_n)
    throw MalformedResponseError("remote response: spins length " + std::to_string(arr.size()) +
                                 " != n " + std::to_string(expected_n));
  SpinConfig spins;
  spins.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number())
      throw MalformedResponseError("remote response: non-numeric spin entry");
    double x = v.get<double>();
    if (x != 1.0 && x != -1.0)
      throw MalformedResponseError("remote response: spin entry not +-1");
    spins.push_back(static_cast<std::int8_t>(x));
  }
  return spins;
}

}  // namespace detail

/// Sends the subproblem to a remote annealer over the JSON/HTTP protocol and
/// returns its best sample, subject to the same never-worse-than-warm-start
/// rule as the local backends. FLUXANNEAL_REMOTE_TOKEN, when set, is
/// forwarded as a bearer header. Failures map to the four remote error
/// kinds: transport, timeout, malformed response, capacity.
inline SubsolverResult remote_solve(const IsingProblem& problem, const RemoteParams& params,
                                    const std::optional<SpinConfig>& warm = std::nullopt) {
  auto t0 = detail::Clock::now();
  if (warm) validate_spins(problem, *warm);

  httplib::Client client(params.endpoint);
  long timeout_usec_total = static_cast<long>(params.timeout_s * 1e6);
  time_t sec = timeout_usec_total / 1000000;
  time_t usec = timeout_usec_total % 1000000;
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
  if (const char* token = std::getenv("FLUXANNEAL_REMOTE_TOKEN"); token && *token)
    client.set_bearer_token_auth(token);

  std::string body = solve_request(problem, params.num_reads, params.timeout_s).dump();
  httplib::Result res = client.Post("/solve", body, "application/json");

  if (!res) {
    double elapsed = detail::seconds_since(t0);
    switch (res.error()) {
      case httplib::Error::ConnectionTimeout:
        throw TimeoutError("remote solve timed out connecting to " + params.endpoint);
      case httplib::Error::Read:
      case httplib::Error::Write:
        // httplib reports an expired read budget as a plain read failure, so
        // use the elapsed time to tell a timeout from a dropped connection.
        if (elapsed >= 0.9 * params.timeout_s)
          throw TimeoutError("remote solve timed out after " + std::to_string(elapsed) + " s");
        throw TransportError("remote solve transport failure: " +
                             httplib::to_string(res.error()));
      default:
        throw TransportError("remote solve transport failure: " +
                             httplib::to_string(res.error()));
    }
  }

  if (res->status != 200) {
    json err;
    try {
      err = json::parse(res->body);
    } catch (const json::exception&) {
      throw MalformedResponseError("remote returned status " + std::to_string(res->status) +
                                   " with unparseable body");
    }
    std::string kind = err.value("error", "");
    if (kind == "capacity")
      throw RemoteCapacityError("remote capacity exceeded: " + err.value("message", ""));
    throw TransportError("remote returned status " + std::to_string(res->status) + ": " +
                         (kind.empty() ? res->body : kind));
  }

  json parsed;
  try {
    parsed = json::parse(res->body);
  } catch (const json::exception& e) {
    throw MalformedResponseError(std::string("remote response is not JSON: ") + e.what());
  }
  SpinConfig spins = detail::parse_remote_spins(parsed, problem.n_sites());
  if (!parsed.contains("energy") || !parsed["energy"].is_number())
    throw MalformedResponseError("remote response: missing energy");
  double claimed = parsed["energy"].get<double>();
  double actual = energy(problem, spins);
  if (!(std::abs(claimed - actual) <= 1e-9 * std::max(1.0, std::abs(actual))))
    throw MalformedResponseError("remote response: reported energy " + std::to_string(claimed) +
                                 " does not match its spins (" + std::to_string(actual) + ")");
  if (params.local_descent) detail::greedy_descent(problem, spins);

  SubsolverResult result = detail::finish(problem, "remote", std::move(spins), warm, 0, t0);
  if (parsed.contains("reads_used") && parsed["reads_used"].is_number_integer())
    result.flips = parsed["reads_used"].get<std::int64_t>();
  return result;
}

/// In-process solve server implementing the wire protocol over the local
/// backends; used by the integration tests and the standalone server tool.
class SolveServer {
 public:
  struct Options {
    std::string backend = "brute";  // "brute" or "sa"
    SaParams sa;
    int max_n = 26;
    std::string required_token;  // empty accepts anything
    double artificial_delay_s = 0.0;
  };

  explicit SolveServer(Options options) : options_(std::move(options)) {
    server_.Post("/solve", [this](const httplib::Request& req, httplib::Response& res) {
      handle_solve(req, res);
    });
  }

  ~SolveServer() { stop(); }

  /// Binds to an ephemeral localhost port and serves in a background thread.
  /// Returns the chosen port.
  int start_local() {
    int port = server_.bind_to_any_port("127.0.0.1");
    if (port <= 0) throw std::runtime_error("SolveServer: could not bind a local port");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  /// Blocking serve on an explicit host/port (the standalone tool).
  bool serve(const std::string& host, int port) { return server_.listen(host, port); }

  void stop() {
    if (server_.is_running()) server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void handle_solve(const httplib::Request& req, httplib::Response& res) {
    if (!options_.required_token.empty()) {
      auto auth = req.get_header_value("Authorization");
      if (auth != "Bearer " + options_.required_token) {
        res.status = 401;
        res.set_content(json{{"error", "unauthorized"}}.dump(), "application/json");
        return;
      }
    }
    if (options_.artificial_delay_s > 0.0)
      std::this_thread::sleep_for(std::chrono::duration<double>(options_.artificial_delay_s));

    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content(json{{"error", "bad_request"}, {"message", "body is not JSON"}}.dump(),
                      "application/json");
      return;
    }
    try {
      if (body.value("n", 0) > options_.max_n) {
        res.status = 422;
        res.set_content(json{{"error", "capacity"},
                             {"message", "n exceeds max_n"},
                             {"max_n", options_.max_n}}
                            .dump(),
                        "application/json");
        return;
      }
      IsingProblem problem = problem_from_request(body);
      int num_reads = std::max(1, body.value("num_reads", 1));
      SubsolverResult best;
      int reads_used = 1;
      if (options_.backend == "sa") {
        for (int read = 0; read < num_reads; ++read) {
          SaParams params = options_.sa;
          params.seed = derive_seed(options_.sa.seed, static_cast<std::uint64_t>(read));
          SubsolverResult r = simulated_annealing(problem, params);
          if (read == 0 || r.energy < best.energy) best = std::move(r);
        }
        reads_used = num_reads;
      } else {
        best = brute_force(problem);
      }
      res.set_content(json{{"spins", std::vector<int>(best.spins.begin(), best.spins.end())},
                           {"energy", best.energy},
                           {"reads_used", reads_used}}
                          .dump(),
                      "application/json");
    } catch (const CapacityError& e) {
      res.status = 422;
      res.set_content(json{{"error", "capacity"}, {"message", e.what()}}.dump(),
                      "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", "bad_request"}, {"message", e.what()}}.dump(),
                      "application/json");
    }
  }

  Options options_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace fluxanneal
