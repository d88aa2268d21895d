#include <catch2/catch.hpp>

#include <cstdlib>

#include <httplib.h>

#include "fluxanneal/remote.hpp"
#include "test_support.hpp"

using namespace fluxanneal;
namespace ts = testsupport;

namespace {

/// Raw server returning a canned body for protocol-abuse tests.
class CannedServer {
 public:
  CannedServer(std::string body, int status = 200) {
    server_.Post("/solve", [body = std::move(body), status](const httplib::Request&,
                                                            httplib::Response& res) {
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CannedServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

RemoteParams params_for(const std::string& endpoint, double timeout = 5.0) {
  return {endpoint, timeout, 1};
}

}  // namespace

TEST_CASE("request serialization carries the full subproblem", "[wire]") {
  IsingProblem p(3, {{0, 2, -0.5}, {0, 1, 1.25}}, {0.0, 0.5, 0.0});
  nlohmann::json req = solve_request(p, 7, 1.5);
  CHECK(req["n"] == 3);
  CHECK(req["J"] == nlohmann::json::array({{0, 1, 1.25}, {0, 2, -0.5}}));
  CHECK(req["h"] == nlohmann::json::array({0.0, 0.5, 0.0}));
  CHECK(req["num_reads"] == 7);
  CHECK(req["timeout_ms"] == 1500);

  IsingProblem back = problem_from_request(req);
  CHECK(back.n_sites() == 3);
  CHECK(back.coupling(0, 2) == -0.5);
  CHECK(back.coupling(1, 0) == 1.25);
  CHECK(back.fields() == p.fields());
}

TEST_CASE("loopback round trip equals local brute force bit for bit", "[remote]") {
  SolveServer server({});
  int port = server.start_local();
  RemoteParams params = params_for("http://127.0.0.1:" + std::to_string(port));
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    int n = 6 + static_cast<int>(trial % 11);  // sizes 6..16
    IsingProblem p = gen_uniform_spinglass(n, 4000 + trial);
    SubsolverResult local = brute_force(p);
    SubsolverResult remote = remote_solve(p, params);
    CHECK(remote.spins == local.spins);
    CHECK(remote.energy == local.energy);
    CHECK(remote.backend == "remote");
  }
}

TEST_CASE("a worse-than-warm-start sample is replaced by the warm start", "[remote]") {
  IsingProblem p(3, {{0, 1, -1.0}, {1, 2, -1.0}}, {});
  SpinConfig bad{1, -1, 1};  // energy +2
  CannedServer server(nlohmann::json{{"spins", {1, -1, 1}},
                                     {"energy", energy(p, bad)},
                                     {"reads_used", 1}}
                          .dump());
  SpinConfig warm{1, 1, 1};  // energy -2
  SubsolverResult result = remote_solve(p, params_for(server.endpoint()), warm);
  CHECK(result.spins == warm);
  CHECK(result.energy == -2.0);
  CHECK(result.warm_start_used);
}

TEST_CASE("malformed responses raise the designated error", "[remote][errors]") {
  IsingProblem p(3, {{0, 1, -1.0}, {1, 2, -1.0}}, {});
  SECTION("wrong spin count") {
    CannedServer server(R"({"spins": [1, -1], "energy": 0.0, "reads_used": 1})");
    CHECK_THROWS_AS(remote_solve(p, params_for(server.endpoint())), MalformedResponseError);
  }
  SECTION("non-spin entries") {
    CannedServer server(R"({"spins": [1, 0.5, -1], "energy": 0.0, "reads_used": 1})");
    CHECK_THROWS_AS(remote_solve(p, params_for(server.endpoint())), MalformedResponseError);
  }
  SECTION("missing energy") {
    CannedServer server(R"({"spins": [1, 1, 1]})");
    CHECK_THROWS_AS(remote_solve(p, params_for(server.endpoint())), MalformedResponseError);
  }
  SECTION("inconsistent energy") {
    CannedServer server(R"({"spins": [1, 1, 1], "energy": 40.0, "reads_used": 1})");
    CHECK_THROWS_AS(remote_solve(p, params_for(server.endpoint())), MalformedResponseError);
  }
  SECTION("not json at all") {
    CannedServer server("it is full of stars");
    CHECK_THROWS_AS(remote_solve(p, params_for(server.endpoint())), MalformedResponseError);
  }
}

TEST_CASE("slow servers raise timeouts", "[remote][errors]") {
  SolveServer::Options options;
  options.artificial_delay_s = 1.5;
  SolveServer server(options);
  int port = server.start_local();
  IsingProblem p(2, {{0, 1, 1.0}}, {});
  CHECK_THROWS_AS(
      remote_solve(p, params_for("http://127.0.0.1:" + std::to_string(port), 0.3)),
      TimeoutError);
}

TEST_CASE("unreachable endpoints raise transport errors", "[remote][errors]") {
  IsingProblem p(2, {{0, 1, 1.0}}, {});
  // The discard port has no listener here; connection is refused outright.
  CHECK_THROWS_AS(remote_solve(p, params_for("http://127.0.0.1:9", 0.5)), TransportError);
}

TEST_CASE("remote capacity is a distinct error", "[remote][errors]") {
  SolveServer::Options options;
  options.max_n = 5;
  SolveServer server(options);
  int port = server.start_local();
  IsingProblem p = gen_uniform_spinglass(8, 1);
  CHECK_THROWS_AS(remote_solve(p, params_for("http://127.0.0.1:" + std::to_string(port))),
                  RemoteCapacityError);
}

TEST_CASE("bearer token is forwarded from the environment", "[remote][auth]") {
  SolveServer::Options options;
  options.required_token = "sekrit";
  SolveServer server(options);
  int port = server.start_local();
  RemoteParams params = params_for("http://127.0.0.1:" + std::to_string(port));
  IsingProblem p(2, {{0, 1, -1.0}}, {});

  unsetenv("FLUXANNEAL_REMOTE_TOKEN");
  CHECK_THROWS_AS(remote_solve(p, params), RemoteError);

  setenv("FLUXANNEAL_REMOTE_TOKEN", "sekrit", 1);
  SubsolverResult result = remote_solve(p, params);
  CHECK(result.energy == -1.0);
  unsetenv("FLUXANNEAL_REMOTE_TOKEN");
}

TEST_CASE("optional local descent polishes the returned sample", "[remote]") {
  IsingProblem p(3, {{0, 1, -1.0}, {1, 2, -1.0}}, {});
  SpinConfig rough{1, -1, 1};
  CannedServer server(nlohmann::json{{"spins", {1, -1, 1}},
                                     {"energy", energy(p, rough)},
                                     {"reads_used", 1}}
                          .dump());
  RemoteParams plain = params_for(server.endpoint());
  CHECK(remote_solve(p, plain).energy == 2.0);
  RemoteParams polished = plain;
  polished.local_descent = true;
  SubsolverResult result = remote_solve(p, polished);
  CHECK(result.energy == -2.0);
  CHECK(result.spins == SpinConfig{1, 1, 1});
}

TEST_CASE("sa-backed server reports its reads", "[remote]") {
  SolveServer::Options options;
  options.backend = "sa";
  options.sa.sweeps = 200;
  SolveServer server(options);
  int port = server.start_local();
  RemoteParams params = params_for("http://127.0.0.1:" + std::to_string(port));
  params.num_reads = 3;
  IsingProblem p = gen_uniform_spinglass(9, 77);
  SubsolverResult result = remote_solve(p, params);
  CHECK(result.flips == 3);  // reads_used reported by the server
  CHECK(result.energy == energy(p, result.spins));
  CHECK(result.energy >= brute_force(p).energy - 1e-12);
}
