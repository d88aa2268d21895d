#pragma once

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/ising.hpp"
#include "fluxanneal/rng.hpp"

namespace fluxanneal {

struct SubsolverResult {
  SpinConfig spins;
  double energy = 0.0;
  std::string backend;
  double elapsed_s = 0.0;
  bool warm_start_used = false;  // the returned spins are the provided warm start
  std::int64_t flips = 0;        // candidate single-spin moves evaluated
};

struct SaParams {
  long sweeps = 1000;
  double beta_initial = 0.01;
  double beta_final = 1.0;
  std::uint64_t seed = 0;
};

struct TabuParams {
  int tenure = 20;
  long max_iterations = 0;  // 0 picks the default 50*n
  long stall_limit = 0;     // 0 picks the default 5*n
  std::uint64_t seed = 0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::vector<double> local_fields(const IsingProblem& problem, const SpinConfig& s) {
  std::vector<double> sd(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) sd[i] = static_cast<double>(s[i]);
  std::vector<double> lf;
  problem.multiply(sd, lf);
  return lf;
}

inline SpinConfig random_spins(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SpinConfig s(static_cast<std::size_t>(n));
  for (auto& v : s) v = static_cast<std::int8_t>(rng.next_sign());
  return s;
}

/// Recomputes the exact energy of the candidate and applies the never-worse
/// rule: when a warm start is given and beats the candidate, the warm start
/// is returned instead. Every backend funnels through here, so the rule
/// holds uniformly.
inline SubsolverResult finish(const IsingProblem& problem, std::string backend,
                              SpinConfig candidate, const std::optional<SpinConfig>& warm,
                              std::int64_t flips, Clock::time_point t0) {
  SubsolverResult result;
  result.backend = std::move(backend);
  result.flips = flips;
  result.spins = std::move(candidate);
  result.energy = energy(problem, result.spins);
  if (warm) {
    double warm_energy = energy(problem, *warm);
    if (warm_energy < result.energy) {
      result.spins = *warm;
      result.energy = warm_energy;
    }
    result.warm_start_used = result.spins == *warm;
  }
  result.elapsed_s = seconds_since(t0);
  return result;
}

/// True when `a` precedes `b` with +1 ordered before -1 site by site.
inline bool lex_before(const SpinConfig& a, const SpinConfig& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

}  // namespace detail

/// Exhaustive minimization over all 2^n configurations (n <= 26). Ties are
/// broken toward the configuration that is lexicographically first with +1
/// ordered before -1. Serves as the exactness oracle for everything else.
inline SubsolverResult brute_force(const IsingProblem& problem) {
  const int n = problem.n_sites();
  if (n > 26) throw CapacityError("brute_force: n > 26 would enumerate 2^" + std::to_string(n));
  auto t0 = detail::Clock::now();
  if (n == 0) return detail::finish(problem, "brute", {}, std::nullopt, 0, t0);

  SpinConfig s(static_cast<std::size_t>(n), 1);
  std::vector<double> sd(static_cast<std::size_t>(n), 1.0);
  std::vector<double> lf = detail::local_fields(problem, s);
  double e = energy(problem, s);
  SpinConfig best = s;
  double best_e = e;

  const auto& h = problem.fields();
  const std::uint64_t total = 1ULL << n;
  for (std::uint64_t m = 1; m < total; ++m) {
    // Gray-code walk: one flip per configuration.
    int k = std::countr_zero(m);
    double sk = sd[k];
    e += -2.0 * sk * (lf[k] + h[k]);
    s[k] = static_cast<std::int8_t>(-s[k]);
    sd[k] = -sk;
    problem.add_scaled_row(k, -2.0 * sk, lf);
    if ((m & 0xFFFULL) == 0) {
      // Periodic resync stops incremental rounding from drifting over long
      // enumerations.
      problem.multiply(sd, lf);
      e = energy(problem, s);
    }
    if (e < best_e) {
      best_e = e;
      best = s;
    } else if (e == best_e && detail::lex_before(s, best)) {
      best = s;
    }
  }
  return detail::finish(problem, "brute", std::move(best), std::nullopt,
                        static_cast<std::int64_t>(total - 1), t0);
}

/// Single-spin-flip Metropolis with a geometric inverse-temperature ladder:
/// one sweep proposes every site in fixed 0..n-1 order, then beta is scaled
/// by (beta_final/beta_initial)^(1/(sweeps-1)). Returns the best-seen
/// configuration, never worse than the warm start.
inline SubsolverResult simulated_annealing(const IsingProblem& problem, const SaParams& params,
                                           const std::optional<SpinConfig>& warm = std::nullopt) {
  if (params.sweeps < 1) throw ContractViolation("SaParams: sweeps must be >= 1");
  if (!(params.beta_initial > 0.0) || !(params.beta_initial < params.beta_final))
    throw ContractViolation("SaParams: need 0 < beta_initial < beta_final");
  auto t0 = detail::Clock::now();
  const int n = problem.n_sites();
  if (n == 0) return detail::finish(problem, "sa", {}, std::nullopt, 0, t0);
  if (warm) validate_spins(problem, *warm);

  SplitMix64 rng(params.seed);
  SpinConfig s = warm ? *warm : detail::random_spins(n, params.seed);
  std::vector<double> sd(s.begin(), s.end());
  std::vector<double> lf = detail::local_fields(problem, s);
  double e = energy(problem, s);
  SpinConfig best = s;
  double best_e = e;

  const auto& h = problem.fields();
  double beta = params.beta_initial;
  const double ratio = params.sweeps > 1
                           ? std::pow(params.beta_final / params.beta_initial,
                                      1.0 / static_cast<double>(params.sweeps - 1))
                           : 1.0;
  for (long sweep = 0; sweep < params.sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      double delta = -2.0 * sd[i] * (lf[i] + h[i]);
      if (delta <= 0.0 || rng.next_unit() < std::exp(-beta * delta)) {
        double si = sd[i];
        e += delta;
        s[i] = static_cast<std::int8_t>(-s[i]);
        sd[i] = -si;
        problem.add_scaled_row(i, -2.0 * si, lf);
        if (e < best_e) {
          best_e = e;
          best = s;
        }
      }
    }
    beta *= ratio;
  }
  return detail::finish(problem, "sa", std::move(best), warm,
                        static_cast<std::int64_t>(params.sweeps) * n, t0);
}

/// Best-improvement single-flip tabu search with a recency tenure and the
/// aspiration rule that a tabu flip is allowed when it beats the incumbent.
/// Stops after max_iterations flips or stall_limit non-improving ones.
inline SubsolverResult tabu_search(const IsingProblem& problem, const TabuParams& params,
                                   const std::optional<SpinConfig>& warm = std::nullopt) {
  if (params.tenure < 1) throw ContractViolation("TabuParams: tenure must be >= 1");
  auto t0 = detail::Clock::now();
  const int n = problem.n_sites();
  if (n == 0) return detail::finish(problem, "tabu", {}, std::nullopt, 0, t0);
  if (warm) validate_spins(problem, *warm);
  const long max_iterations = params.max_iterations > 0 ? params.max_iterations : 50L * n;
  const long stall_limit = params.stall_limit > 0 ? params.stall_limit : 5L * n;

  SpinConfig s = warm ? *warm : detail::random_spins(n, params.seed);
  std::vector<double> sd(s.begin(), s.end());
  std::vector<double> lf = detail::local_fields(problem, s);
  double e = energy(problem, s);
  SpinConfig best = s;
  double best_e = e;

  const auto& h = problem.fields();
  std::vector<long> tabu_expires(static_cast<std::size_t>(n), -1);
  long stall = 0;
  std::int64_t scanned = 0;
  for (long iter = 0; iter < max_iterations; ++iter) {
    int chosen = -1;
    double chosen_delta = 0.0;
    int fallback = -1;
    double fallback_delta = 0.0;
    for (int i = 0; i < n; ++i) {
      double delta = -2.0 * sd[i] * (lf[i] + h[i]);
      bool admissible = iter > tabu_expires[i] || e + delta < best_e;
      if (admissible && (chosen < 0 || delta < chosen_delta)) {
        chosen = i;
        chosen_delta = delta;
      }
      if (fallback < 0 || delta < fallback_delta) {
        fallback = i;
        fallback_delta = delta;
      }
    }
    scanned += n;
    if (chosen < 0) {
      // Everything is tabu and nothing aspirates; take the best move anyway
      // rather than stopping dead (possible when n <= tenure).
      chosen = fallback;
      chosen_delta = fallback_delta;
    }
    double si = sd[chosen];
    e += chosen_delta;
    s[chosen] = static_cast<std::int8_t>(-s[chosen]);
    sd[chosen] = -si;
    problem.add_scaled_row(chosen, -2.0 * si, lf);
    tabu_expires[chosen] = iter + params.tenure;
    if (e < best_e) {
      best_e = e;
      best = s;
      stall = 0;
    } else if (++stall >= stall_limit) {
      break;
    }
  }
  return detail::finish(problem, "tabu", std::move(best), warm, scanned, t0);
}

}  // namespace fluxanneal
