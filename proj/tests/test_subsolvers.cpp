#include <catch2/catch.hpp>

#include <cmath>

#include "fluxanneal/subsolvers.hpp"
#include "test_support.hpp"

using namespace fluxanneal;
namespace ts = testsupport;

TEST_CASE("brute force on the two-spin ferromagnet honors the tie rule", "[brute]") {
  IsingProblem p(2, {{0, 1, -1.0}}, {});
  SubsolverResult result = brute_force(p);
  CHECK(result.energy == -1.0);
  CHECK(result.spins == SpinConfig{1, 1});  // lexicographic winner among the two ground states
  CHECK(result.flips == 3);
}

TEST_CASE("brute force on a single biased site", "[brute]") {
  IsingProblem p(1, {}, {0.5});
  SubsolverResult result = brute_force(p);
  CHECK(result.spins == SpinConfig{-1});
  CHECK(result.energy == -0.5);
}

TEST_CASE("brute force equals the exhaustive oracle on a fixed instance", "[brute][oracle]") {
  IsingProblem p = gen_uniform_spinglass(12, 7);
  auto [j, h] = ts::dense_view(p);
  ts::GroundTruth truth = ts::oracle_ground_state(j, h);
  SubsolverResult result = brute_force(p);
  CHECK(result.energy == Approx(truth.energy).epsilon(1e-12));
  CHECK(energy(p, result.spins) == result.energy);
}

TEST_CASE("brute force guards its capacity and the empty problem", "[brute]") {
  CHECK_THROWS_AS(brute_force(IsingProblem(27, {}, {})), CapacityError);
  SubsolverResult empty = brute_force(IsingProblem(0, {}, {}));
  CHECK(empty.energy == 0.0);
  CHECK(empty.spins.empty());
}

TEST_CASE("sa solves the uncoupled problem exactly", "[sa]") {
  std::vector<double> h{0.5, -1.0, 2.0, -0.7, 1.4, -0.6, 0.9, -1.8};
  IsingProblem p(8, {}, std::vector<double>(h));
  SubsolverResult result = simulated_annealing(p, SaParams{});
  double expected = 0.0;
  for (int i = 0; i < 8; ++i) {
    CHECK(result.spins[i] == (h[i] > 0 ? -1 : 1));
    expected -= std::abs(h[i]);
  }
  CHECK(result.energy == Approx(expected).epsilon(1e-12));
  CHECK(result.flips == 1000L * 8);
}

TEST_CASE("sa finds the N=10 ground state on most seeds", "[sa][golden]") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    IsingProblem p = gen_uniform_spinglass(10, seed);
    SubsolverResult exact = brute_force(p);
    SaParams params;
    params.seed = seed;
    SubsolverResult sa = simulated_annealing(p, params);
    if (std::abs(sa.energy - exact.energy) <= 1e-9) ++hits;
    CHECK(sa.energy >= exact.energy - 1e-12);
  }
  CHECK(hits >= 90);
  CHECK(hits == ts::load_golden().at("sa_ground_rate_n10").get<int>());
}

TEST_CASE("sa never returns worse than its warm start", "[sa]") {
  IsingProblem p = gen_uniform_spinglass(14, 23);
  SubsolverResult exact = brute_force(p);
  SaParams params;
  params.seed = 5;
  params.sweeps = 3;  // deliberately weak anneal
  SubsolverResult warm_run = simulated_annealing(p, params, exact.spins);
  CHECK(warm_run.energy == exact.energy);
  CHECK(warm_run.warm_start_used);
  for (std::uint64_t k = 0; k < 10; ++k) {
    SpinConfig warm = ts::random_spins(14, 60 + k);
    SubsolverResult run = simulated_annealing(p, params, warm);
    CHECK(run.energy <= energy(p, warm));
    CHECK(run.energy == energy(p, run.spins));
  }
}

TEST_CASE("sa is deterministic per seed and validates params", "[sa]") {
  IsingProblem p = gen_uniform_spinglass(12, 3);
  SaParams params;
  params.seed = 11;
  SubsolverResult a = simulated_annealing(p, params);
  SubsolverResult b = simulated_annealing(p, params);
  CHECK(a.spins == b.spins);
  CHECK(a.energy == b.energy);
  CHECK_THROWS_AS(simulated_annealing(p, SaParams{0, 0.01, 1.0, 0}), ContractViolation);
  CHECK_THROWS_AS(simulated_annealing(p, SaParams{10, 1.0, 0.5, 0}), ContractViolation);
  CHECK_THROWS_AS(simulated_annealing(p, SaParams{10, -1.0, 1.0, 0}), ContractViolation);
}

TEST_CASE("tabu solves the uncoupled problem in one pass", "[tabu]") {
  std::vector<double> h{1.5, -0.25, 0.75, -2.0, 0.3, -0.9};
  IsingProblem p(6, {}, std::vector<double>(h));
  SubsolverResult result = tabu_search(p, TabuParams{});
  for (int i = 0; i < 6; ++i) CHECK(result.spins[i] == (h[i] > 0 ? -1 : 1));
}

TEST_CASE("tabu finds small ground states on most seeds", "[tabu][golden]") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    int n = 8 + static_cast<int>(seed % 9);  // sizes 8..16
    IsingProblem p = gen_uniform_spinglass(n, 3000 + seed);
    SubsolverResult exact = brute_force(p);
    TabuParams params;
    params.seed = seed;
    SubsolverResult tabu = tabu_search(p, params);
    if (std::abs(tabu.energy - exact.energy) <= 1e-9) ++hits;
    CHECK(tabu.energy >= exact.energy - 1e-12);
  }
  CHECK(hits >= 90);
  CHECK(hits == ts::load_golden().at("tabu_ground_rate_n8_16").get<int>());
}

TEST_CASE("tabu warm start contract and determinism", "[tabu]") {
  IsingProblem p = gen_uniform_spinglass(13, 31);
  SubsolverResult exact = brute_force(p);
  TabuParams weak;
  weak.max_iterations = 2;
  SubsolverResult warm_run = tabu_search(p, weak, exact.spins);
  CHECK(warm_run.energy == exact.energy);
  for (std::uint64_t k = 0; k < 10; ++k) {
    SpinConfig warm = ts::random_spins(13, 70 + k);
    SubsolverResult run = tabu_search(p, weak, warm);
    CHECK(run.energy <= energy(p, warm));
  }
  TabuParams params;
  params.seed = 2;
  SubsolverResult a = tabu_search(p, params);
  SubsolverResult b = tabu_search(p, params);
  CHECK(a.spins == b.spins);
  CHECK_THROWS_AS(tabu_search(p, TabuParams{0, 0, 0, 0}), ContractViolation);
}

TEST_CASE("tabu keeps moving when every site is tabu", "[tabu]") {
  // n < tenure forces the all-tabu fallback path.
  IsingProblem p = gen_uniform_spinglass(5, 8);
  TabuParams params;
  params.tenure = 20;
  params.max_iterations = 200;
  params.stall_limit = 100;
  SubsolverResult result = tabu_search(p, params);
  SubsolverResult exact = brute_force(p);
  CHECK(result.energy >= exact.energy - 1e-12);
  CHECK(result.energy == energy(p, result.spins));
}

TEST_CASE("the oracle never loses to the heuristics", "[invariants]") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    IsingProblem p = gen_uniform_spinglass(11, seed);
    SubsolverResult exact = brute_force(p);
    SaParams sa_params;
    sa_params.seed = seed;
    sa_params.sweeps = 50;
    TabuParams tabu_params;
    tabu_params.seed = seed;
    SubsolverResult sa = simulated_annealing(p, sa_params);
    SubsolverResult tabu = tabu_search(p, tabu_params);
    CHECK(exact.energy <= sa.energy + 1e-12);
    CHECK(exact.energy <= tabu.energy + 1e-12);
    CHECK(sa.energy == energy(p, sa.spins));
    CHECK(tabu.energy == energy(p, tabu.spins));
    CHECK(exact.energy == energy(p, exact.spins));
  }
}
