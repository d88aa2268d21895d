#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/ising.hpp"
#include "fluxanneal/parallel.hpp"
#include "fluxanneal/rng.hpp"
#include "fluxanneal/schedule.hpp"

namespace fluxanneal {

/// Knobs for one MD evolution. `steps` is (delta tau)^-1; the update
/// equations absorb the step because the coupling g is identified with
/// delta tau. `time_scale` multiplies both update lines and exists to break
/// that identification for integrator studies; 1 is the production value.
struct MdConfig {
  long steps = 50000;
  int potential_power = 6;   // M in V(phi) = phi^M, even, >= 4
  long window_steps = 100;   // trailing-average window in units of steps
  std::uint64_t seed = 0;
  long record_stride = 0;    // trajectory samples every this many steps; 0 = off
  double time_scale = 1.0;
  long divergence_check_interval = 1000;
  long energy_stride = 0;    // synchronized H_MD samples every this many steps; 0 = off
  int threads = 1;           // site-parallel workers for the coupling product
};

/// Flux variables phi with conjugate momenta. During leapfrog evolution the
/// momenta live at half-step times (tau - delta_tau/2); use
/// synchronize_for_measurement before evaluating the Hamiltonian.
struct FluxState {
  std::vector<double> phi;
  std::vector<double> mom;
  double tau = 0.0;
};

/// Trailing window average of phi at tau = 1 (window in tau units).
struct TimeAveragedFlux {
  std::vector<double> phibar;
  double window = 0.0;
};

struct TrajectorySample {
  double tau;
  std::vector<double> phi;
  std::vector<double> phibar;
};

struct EnergySample {
  double tau;
  double hamiltonian;
};

struct MdResult {
  FluxState state;          // phi at tau = 1, mom trailing by half a step
  TimeAveragedFlux average;
  std::vector<TrajectorySample> samples;
  std::vector<EnergySample> energies;
  long steps = 0;
};

namespace detail {

inline double pow_int(double x, int exponent) {
  double acc = 1.0;
  for (int k = 0; k < exponent; ++k) acc *= x;
  return acc;
}

inline void validate_md_config(const MdConfig& config) {
  if (config.steps < 1) throw ContractViolation("MdConfig: steps must be >= 1");
  if (config.potential_power < 4 || config.potential_power % 2 != 0)
    throw ContractViolation("MdConfig: potential_power must be even and >= 4");
  if (config.window_steps < 1 || config.window_steps > config.steps)
    throw ContractViolation("MdConfig: window_steps must be in [1, steps]");
  if (config.record_stride < 0) throw ContractViolation("MdConfig: record_stride must be >= 0");
  if (!(config.time_scale > 0.0)) throw ContractViolation("MdConfig: time_scale must be > 0");
  if (config.divergence_check_interval < 1)
    throw ContractViolation("MdConfig: divergence_check_interval must be >= 1");
  if (config.energy_stride < 0) throw ContractViolation("MdConfig: energy_stride must be >= 0");
}

/// Ring buffer holding the last `capacity` phi vectors; phibar is their
/// arithmetic mean, the Riemann sum of the trailing-window integral at the
/// native step.
class TrailingWindow {
 public:
  TrailingWindow(long capacity, int n)
      : capacity_(capacity), n_(n), data_(static_cast<std::size_t>(capacity) * n) {}

  void push(const std::vector<double>& phi) {
    double* slot = data_.data() + static_cast<std::size_t>(next_) * n_;
    for (int i = 0; i < n_; ++i) slot[i] = phi[i];
    next_ = (next_ + 1) % capacity_;
    if (count_ < capacity_) ++count_;
  }

  long count() const { return count_; }

  std::vector<double> mean() const {
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    if (count_ == 0) return out;
    // Oldest-first accumulation keeps the sum independent of the ring phase.
    long start = (next_ - count_ + capacity_) % capacity_;
    for (long k = 0; k < count_; ++k) {
      const double* slot = data_.data() + static_cast<std::size_t>((start + k) % capacity_) * n_;
      for (int i = 0; i < n_; ++i) out[i] += slot[i];
    }
    double inv = 1.0 / static_cast<double>(count_);
    for (int i = 0; i < n_; ++i) out[i] *= inv;
    return out;
  }

 private:
  long capacity_;
  int n_;
  std::vector<double> data_;
  long next_ = 0;
  long count_ = 0;
};

inline void check_finite(const std::vector<double>& phi, const std::vector<double>& mom,
                         long step) {
  for (double v : phi)
    if (!std::isfinite(v))
      throw DivergenceError(step, "MD diverged at step " + std::to_string(step) +
                                      ": non-finite flux (reduce delta tau or fix the schedule)");
  for (double v : mom)
    if (!std::isfinite(v))
      throw DivergenceError(step, "MD diverged at step " + std::to_string(step) +
                                      ": non-finite momentum (reduce delta tau or fix the schedule)");
}

}  // namespace detail

/// Momentum increment per unit step:
///   f_i = -alpha*M*phi_i^(M-1) - 2*beta*( (1/2)*(J phi)_i + h_i*|phi_i| )
/// This is the exact negative potential gradient of the MD Hamiltonian; the
/// field term uses |phi| directly, so it stays continuous through phi = 0.
inline std::vector<double> force(const IsingProblem& problem, const std::vector<double>& phi,
                                 double alpha, double beta, int potential_power) {
  if (static_cast<int>(phi.size()) != problem.n_sites())
    throw ContractViolation("force: phi length != n_sites");
  std::vector<double> jphi;
  problem.multiply(phi, jphi);
  const auto& h = problem.fields();
  std::vector<double> out(phi.size());
  double m = static_cast<double>(potential_power);
  for (int i = 0; i < problem.n_sites(); ++i) {
    double grad_v = m * detail::pow_int(phi[i], potential_power - 1);
    out[i] = -alpha * grad_v - 2.0 * beta * (0.5 * jphi[i] + h[i] * std::abs(phi[i]));
  }
  return out;
}

/// H_MD = alpha(tau) * sum(p^2/2 + phi^M)
///      + beta(tau) * ( 1/2 sum_{i != j} J phi phi + sum h |phi| phi ).
/// The state must carry momenta at the same time as phi.
inline double md_hamiltonian(const IsingProblem& problem, const FluxState& state,
                             const Schedule& schedule, int potential_power) {
  if (static_cast<int>(state.phi.size()) != problem.n_sites() ||
      state.mom.size() != state.phi.size())
    throw ContractViolation("md_hamiltonian: state dimensions do not match problem");
  auto [alpha, beta] = schedule.eval(state.tau);
  double kinetic = 0.0;
  for (std::size_t i = 0; i < state.phi.size(); ++i) {
    kinetic += 0.5 * state.mom[i] * state.mom[i] +
               detail::pow_int(state.phi[i], potential_power);
  }
  double coupling = 0.0;
  problem.for_each_coupling(
      [&](int i, int j, double v) { coupling += v * state.phi[i] * state.phi[j]; });
  double field = 0.0;
  const auto& h = problem.fields();
  for (int i = 0; i < problem.n_sites(); ++i)
    field += h[i] * std::abs(state.phi[i]) * state.phi[i];
  return alpha * kinetic + beta * (coupling + field);
}

/// Returns a copy of the half-step state with momenta advanced by half a
/// kick, i.e. synchronized to state.tau for measurement.
inline FluxState synchronize_for_measurement(const IsingProblem& problem, const FluxState& state,
                                             const Schedule& schedule, int potential_power,
                                             double time_scale = 1.0) {
  auto [alpha, beta] = schedule.eval(state.tau);
  std::vector<double> f = force(problem, state.phi, alpha, beta, potential_power);
  FluxState out = state;
  for (std::size_t i = 0; i < f.size(); ++i) out.mom[i] += 0.5 * time_scale * f[i];
  return out;
}

/// Leapfrog evolution of the flux variables from tau = 0 to tau = 1.
///
/// Initial fluxes are zero; momenta are the given p0 (entries +-1) or drawn
/// +-1 equiprobably from config.seed. The recursion follows the kick-drift
/// pattern with schedules evaluated at integer steps for kicks and half steps
/// for drifts, starting with a half kick at tau = 0.
inline MdResult leapfrog_run(const IsingProblem& problem, const Schedule& schedule,
                             const MdConfig& config,
                             const std::optional<std::vector<double>>& p0 = std::nullopt) {
  detail::validate_md_config(config);
  const int n = problem.n_sites();
  const long steps = config.steps;
  const double dt = 1.0 / static_cast<double>(steps);
  const double ts = config.time_scale;
  const int m_pow = config.potential_power;
  const double m = static_cast<double>(m_pow);

  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  std::vector<double> mom(static_cast<std::size_t>(n));
  if (p0) {
    if (static_cast<int>(p0->size()) != n)
      throw ContractViolation("leapfrog_run: p0 length != n_sites");
    for (double v : *p0)
      if (v != 1.0 && v != -1.0)
        throw ContractViolation("leapfrog_run: p0 entries must be +1 or -1");
    mom = *p0;
  } else {
    SplitMix64 rng(config.seed);
    for (auto& v : mom) v = static_cast<double>(rng.next_sign());
  }

  detail::TrailingWindow window(config.window_steps, n);
  MdResult result;
  result.steps = steps;

  std::vector<double> jphi(static_cast<std::size_t>(n), 0.0);
  const auto& h = problem.fields();
  WorkerTeam team(config.threads);
  auto apply_coupling_product = [&] {
    team.run(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
      problem.multiply_rows(phi.data(), jphi.data(), static_cast<int>(lo), static_cast<int>(hi));
    });
  };

  auto record_sample = [&](long step_index) {
    double tau = static_cast<double>(step_index) * dt;
    result.samples.push_back({tau, phi, window.mean()});
  };
  auto record_energy = [&](long step_index) {
    double tau = static_cast<double>(step_index) * dt;
    FluxState snapshot{phi, mom, tau};
    FluxState synced = step_index == 0
                           ? snapshot
                           : synchronize_for_measurement(problem, snapshot, schedule, m_pow, ts);
    result.energies.push_back({tau, md_hamiltonian(problem, synced, schedule, m_pow)});
  };

  if (config.energy_stride > 0) record_energy(0);

  auto after_drift = [&](long landed) {
    window.push(phi);
    if (landed % config.divergence_check_interval == 0 || landed == steps)
      detail::check_finite(phi, mom, landed);
    if (config.record_stride > 0 && (landed % config.record_stride == 0 || landed == steps))
      record_sample(landed);
    if (config.energy_stride > 0 && (landed % config.energy_stride == 0 || landed == steps))
      record_energy(landed);
  };

  // Half kick at tau = 0, then the first drift with alpha at dt/2. The half
  // kick scales the whole bracket by 1/2, which matches the written initial
  // step term by term (its beta coefficient is half of the 2*beta kick).
  {
    auto [alpha0, beta0] = schedule.eval(0.0);
    apply_coupling_product();
    for (int i = 0; i < n; ++i) {
      double grad_v = m * detail::pow_int(phi[i], m_pow - 1);
      double f = -alpha0 * grad_v - 2.0 * beta0 * (0.5 * jphi[i] + h[i] * std::abs(phi[i]));
      mom[i] += 0.5 * ts * f;
    }
    double alpha_half = schedule.eval(0.5 * dt).alpha;
    for (int i = 0; i < n; ++i) phi[i] += ts * alpha_half * mom[i];
  }
  after_drift(1);

  for (long step = 1; step < steps; ++step) {
    // Full kick with schedules at tau = step*dt; drift with alpha at the
    // following half step. phi lands at (step+1)*dt.
    double tau_kick = static_cast<double>(step) * dt;
    auto [alpha, beta] = schedule.eval(tau_kick);
    apply_coupling_product();
    for (int i = 0; i < n; ++i) {
      double grad_v = m * detail::pow_int(phi[i], m_pow - 1);
      double f = -alpha * grad_v - 2.0 * beta * (0.5 * jphi[i] + h[i] * std::abs(phi[i]));
      mom[i] += ts * f;
    }
    double alpha_half = schedule.eval((static_cast<double>(step) + 0.5) * dt).alpha;
    for (int i = 0; i < n; ++i) phi[i] += ts * alpha_half * mom[i];
    after_drift(step + 1);
  }

  result.state = {std::move(phi), std::move(mom), 1.0};
  result.average = {window.mean(), static_cast<double>(window.count()) * dt};
  return result;
}

/// H_MD at tau = 1 with momenta synchronized; the standard end-of-run
/// adiabaticity measurement.
inline double final_md_hamiltonian(const IsingProblem& problem, const MdResult& result,
                                   const Schedule& schedule, const MdConfig& config) {
  FluxState synced = synchronize_for_measurement(problem, result.state, schedule,
                                                 config.potential_power, config.time_scale);
  return md_hamiltonian(problem, synced, schedule, config.potential_power);
}

}  // namespace fluxanneal
