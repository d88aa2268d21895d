#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/io.hpp"
#include "fluxanneal/ising.hpp"
#include "fluxanneal/md.hpp"
#include "fluxanneal/parallel.hpp"
#include "fluxanneal/reducer.hpp"
#include "fluxanneal/remote.hpp"
#include "fluxanneal/rng.hpp"
#include "fluxanneal/schedule.hpp"
#include "fluxanneal/subsolvers.hpp"

namespace fluxanneal {

enum class PipelineKind { MdOnly, Hqa };
enum class BackendKind { Brute, Sa, Tabu, Remote };

inline std::string backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Brute: return "brute";
    case BackendKind::Sa: return "sa";
    case BackendKind::Tabu: return "tabu";
    case BackendKind::Remote: return "remote";
  }
  return "?";
}

inline BackendKind backend_from_name(const std::string& name) {
  if (name == "brute") return BackendKind::Brute;
  if (name == "sa") return BackendKind::Sa;
  if (name == "tabu") return BackendKind::Tabu;
  if (name == "remote") return BackendKind::Remote;
  throw ContractViolation("unknown backend '" + name + "'");
}

struct PipelineSpec {
  PipelineKind kind = PipelineKind::MdOnly;
  int n_ambivalent = 0;
  BackendKind backend = BackendKind::Brute;
  SaParams sa;
  TabuParams tabu;
  RemoteParams remote;
  bool remote_fallback_enabled = true;
  BackendKind remote_fallback = BackendKind::Tabu;
  std::string label;

  std::string name() const {
    if (!label.empty()) return label;
    if (kind == PipelineKind::MdOnly) return "md";
    return "hqa-" + backend_name(backend) + "-n" + std::to_string(n_ambivalent);
  }
};

struct BaselineSpec {
  BackendKind solver = BackendKind::Sa;  // full-problem reference: sa or tabu
  SaParams sa;
  TabuParams tabu;

  std::string name() const { return backend_name(solver); }
};

struct RunRecord {
  std::string instance;  // "seed:<k>", "seed:<k>:mirror", or a file path
  std::uint64_t instance_seed = 0;
  bool mirrored = false;
  std::uint64_t init_seed = 0;
  std::string solver;
  long md_steps = 0;  // 0 for the MD-free baselines
  double energy = 0.0;
  std::optional<double> cut;  // present iff the problem is MAX-CUT-mapped
  double wall_time_s = 0.0;
  std::int64_t flips = 0;  // subsolver proposals, for cost audits
  std::string fallback;    // local backend that replaced a failed remote
  std::string error;       // failed runs carry the message and are excluded
};

struct AggregateStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, n-1 denominator
  double min = 0.0;
  double max = 0.0;
  long count = 0;
};

inline AggregateStats compute_stats(const std::vector<double>& values) {
  AggregateStats stats;
  stats.count = static_cast<long>(values.size());
  if (values.empty()) return stats;
  double sum = 0.0;
  stats.min = values[0];
  stats.max = values[0];
  for (double v : values) {
    sum += v;
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
  }
  stats.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return stats;
}

struct AggregateCell {
  std::string solver;
  long md_steps = 0;
  AggregateStats energy;
  std::optional<AggregateStats> cut;
};

struct AggregateReport {
  std::vector<AggregateCell> cells;
  long failures = 0;
  std::optional<double> reference_cut;  // finite-size-scaling line for MAX-CUT runs
};

struct ExperimentSpec {
  // Problem source: a generator plus seeds, or explicit instance files.
  std::string generator;  // "bimodal-complete" | "uniform-sg" | "" for files
  int n_sites = 0;
  std::vector<std::uint64_t> instance_seeds;
  std::vector<std::string> instance_files;
  bool files_are_maxcut = false;
  bool mirror_pairing = false;
  Interval j_range{-1.0, 1.0};
  Interval h_range{-2.0, 2.0};

  Schedule schedule = Schedule::paper_default();
  MdConfig md;
  std::vector<long> md_steps_values;  // empty means {md.steps}

  std::vector<PipelineSpec> pipelines;
  std::vector<BaselineSpec> baselines;

  int n_inits = 1;
  std::uint64_t init_seed_base = 1;
  int workers = 0;  // 0 = hardware concurrency
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  AggregateReport report;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

struct InstanceHandle {
  std::string label;
  std::uint64_t seed = 0;
  bool mirrored = false;
  bool is_maxcut = false;
  double cut_offset = 0.0;
  std::shared_ptr<const IsingProblem> problem;
};

inline std::vector<InstanceHandle> materialize_instances(const ExperimentSpec& spec) {
  std::vector<InstanceHandle> out;
  auto add = [&](InstanceHandle handle) {
    if (spec.mirror_pairing) {
      InstanceHandle twin = handle;
      twin.label += ":mirror";
      twin.mirrored = true;
      auto mirrored = std::make_shared<IsingProblem>(mirror(*handle.problem));
      if (twin.is_maxcut) twin.cut_offset = maxcut_offset(*mirrored);
      twin.problem = std::move(mirrored);
      out.push_back(std::move(handle));
      out.push_back(std::move(twin));
    } else {
      out.push_back(std::move(handle));
    }
  };

  if (!spec.generator.empty()) {
    if (spec.n_sites < 2) throw ContractViolation("experiment: generator needs n_sites >= 2");
    if (spec.instance_seeds.empty())
      throw ContractViolation("experiment: generator needs at least one instance seed");
    for (std::uint64_t seed : spec.instance_seeds) {
      InstanceHandle handle;
      handle.label = "seed:" + std::to_string(seed);
      handle.seed = seed;
      if (spec.generator == "bimodal-complete") {
        MaxCutProblem mc = maxcut_to_ising(gen_bimodal_complete(spec.n_sites, seed));
        handle.is_maxcut = true;
        handle.cut_offset = mc.offset;
        handle.problem = std::make_shared<IsingProblem>(std::move(mc.problem));
      } else if (spec.generator == "uniform-sg") {
        handle.problem = std::make_shared<IsingProblem>(
            gen_uniform_spinglass(spec.n_sites, seed, spec.j_range, spec.h_range));
      } else {
        throw ContractViolation("experiment: unknown generator '" + spec.generator + "'");
      }
      add(std::move(handle));
    }
  } else {
    if (spec.instance_files.empty())
      throw ContractViolation("experiment: no generator and no instance files");
    for (const auto& path : spec.instance_files) {
      InstanceHandle handle;
      handle.label = path;
      handle.problem = std::make_shared<IsingProblem>(read_instance_file(path));
      handle.is_maxcut = spec.files_are_maxcut;
      if (handle.is_maxcut) handle.cut_offset = maxcut_offset(*handle.problem);
      add(std::move(handle));
    }
  }
  return out;
}

inline SubsolverResult dispatch_backend(BackendKind kind, const IsingProblem& sub,
                                        const PipelineSpec& pipeline, std::uint64_t run_seed,
                                        const std::optional<SpinConfig>& warm) {
  switch (kind) {
    case BackendKind::Brute: return brute_force(sub);
    case BackendKind::Sa: {
      SaParams params = pipeline.sa;
      params.seed = run_seed;
      return simulated_annealing(sub, params, warm);
    }
    case BackendKind::Tabu: {
      TabuParams params = pipeline.tabu;
      params.seed = run_seed;
      return tabu_search(sub, params, warm);
    }
    case BackendKind::Remote: return remote_solve(sub, pipeline.remote, warm);
  }
  throw ContractViolation("unknown backend kind");
}

}  // namespace detail

/// Executes the MD stage once and derives one RunRecord per pipeline from the
/// shared time-averaged fluxes. The reported wall time charges the shared MD
/// to every pipeline, since each would pay it when run alone.
inline std::vector<RunRecord> run_pipelines_shared(
    const IsingProblem& problem, const Schedule& schedule, const MdConfig& md,
    const std::vector<PipelineSpec>& pipelines, std::uint64_t init_seed, bool is_maxcut,
    double cut_offset, bool capture_errors = false) {
  for (const auto& pipeline : pipelines)
    if (pipeline.kind == PipelineKind::Hqa && pipeline.n_ambivalent > problem.n_sites())
      throw ContractViolation("pipeline declares n_ambivalent > problem size");

  auto t0 = detail::Clock::now();
  MdConfig config = md;
  config.seed = init_seed;
  MdResult md_result = leapfrog_run(problem, schedule, config);
  double md_seconds = detail::seconds_since(t0);

  const std::vector<double>& phibar = md_result.average.phibar;
  SpinConfig md_spins = project_all(phibar);
  double md_energy = energy(problem, md_spins);

  std::vector<RunRecord> records;
  records.reserve(pipelines.size());
  for (const auto& pipeline : pipelines) {
    auto t1 = detail::Clock::now();
    RunRecord record;
    record.init_seed = init_seed;
    record.solver = pipeline.name();
    record.md_steps = config.steps;

    try {
      if (pipeline.kind == PipelineKind::MdOnly || pipeline.n_ambivalent == 0) {
        record.energy = md_energy;
      } else {
        Partition part = make_partition(phibar, pipeline.n_ambivalent);
        SubProblem sub = build_subproblem(problem, part);
        SpinConfig warm(static_cast<std::size_t>(pipeline.n_ambivalent));
        for (int k = 0; k < pipeline.n_ambivalent; ++k)
          warm[k] = md_spins[sub.ambivalent_sites[k]];

        std::uint64_t run_seed = derive_seed(init_seed, detail::fnv1a64(pipeline.name()));
        SubsolverResult solved;
        if (pipeline.backend == BackendKind::Remote) {
          try {
            solved = remote_solve(sub.base, pipeline.remote, warm);
          } catch (const RemoteError&) {
            if (!pipeline.remote_fallback_enabled) throw;
            record.fallback = backend_name(pipeline.remote_fallback);
            solved = detail::dispatch_backend(pipeline.remote_fallback, sub.base, pipeline,
                                              run_seed, warm);
          }
        } else {
          solved = detail::dispatch_backend(pipeline.backend, sub.base, pipeline, run_seed, warm);
        }

        SpinConfig full = reconstruct(part, sub, solved.spins);
        double full_energy = energy(problem, full);
        // The warm start already guards the subproblem; this final comparison
        // on the full model makes hqa <= md-only exact in floating point too.
        if (full_energy > md_energy) {
          full = md_spins;
          full_energy = md_energy;
        }
        record.energy = full_energy;
        record.flips = solved.flips;
      }
      if (is_maxcut) record.cut = -0.5 * record.energy + cut_offset;
    } catch (const std::exception& e) {
      if (!capture_errors) throw;
      record.error = e.what();
    }
    record.wall_time_s = md_seconds + detail::seconds_since(t1);
    records.push_back(std::move(record));
  }
  return records;
}

/// MD -> sort -> reduce -> subsolve -> reconstruct for one pipeline; the
/// md-only pipeline stops at the sign projection.
inline RunRecord run_pipeline(const IsingProblem& problem, const Schedule& schedule,
                              const MdConfig& md, const PipelineSpec& pipeline,
                              std::uint64_t init_seed, bool is_maxcut = false,
                              double cut_offset = 0.0) {
  return run_pipelines_shared(problem, schedule, md, {pipeline}, init_seed, is_maxcut,
                              cut_offset)[0];
}

inline SubsolverResult run_baseline(const IsingProblem& problem, const BaselineSpec& baseline,
                                    std::uint64_t init_seed) {
  std::uint64_t run_seed = derive_seed(init_seed, detail::fnv1a64(baseline.name()));
  if (baseline.solver == BackendKind::Sa) {
    SaParams params = baseline.sa;
    params.seed = run_seed;
    return simulated_annealing(problem, params);
  }
  if (baseline.solver == BackendKind::Tabu) {
    TabuParams params = baseline.tabu;
    params.seed = run_seed;
    return tabu_search(problem, params);
  }
  throw ContractViolation("baselines must be sa or tabu");
}

inline AggregateReport aggregate_records(const std::vector<RunRecord>& records,
                                         std::optional<double> reference_cut = std::nullopt) {
  AggregateReport report;
  report.reference_cut = reference_cut;
  std::vector<std::pair<std::string, long>> keys;
  for (const auto& record : records) {
    if (!record.error.empty()) {
      ++report.failures;
      continue;
    }
    std::pair<std::string, long> key{record.solver, record.md_steps};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& [solver, steps] : keys) {
    std::vector<double> energies;
    std::vector<double> cuts;
    for (const auto& record : records) {
      if (!record.error.empty() || record.solver != solver || record.md_steps != steps) continue;
      energies.push_back(record.energy);
      if (record.cut) cuts.push_back(*record.cut);
    }
    AggregateCell cell;
    cell.solver = solver;
    cell.md_steps = steps;
    cell.energy = compute_stats(energies);
    if (!cuts.empty()) cell.cut = compute_stats(cuts);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

/// Runs instances x initial conditions x solvers. Pipelines sharing an MD
/// configuration reuse one MD evolution per (instance, init, steps) cell;
/// baselines run once per (instance, init). Deterministic given the spec.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.n_inits < 1) throw ContractViolation("experiment: n_inits must be >= 1");
  std::vector<detail::InstanceHandle> instances = detail::materialize_instances(spec);
  for (const auto& instance : instances)
    for (const auto& pipeline : spec.pipelines)
      if (pipeline.kind == PipelineKind::Hqa &&
          pipeline.n_ambivalent > instance.problem->n_sites())
        throw ContractViolation("experiment: pipeline '" + pipeline.name() +
                                "' declares n_ambivalent > problem size");
  std::vector<long> steps_values =
      spec.md_steps_values.empty() ? std::vector<long>{spec.md.steps} : spec.md_steps_values;

  const std::size_t n_instances = instances.size();
  const std::size_t n_inits = static_cast<std::size_t>(spec.n_inits);
  const std::size_t n_steps = steps_values.size();
  const std::size_t n_pipelines = spec.pipelines.size();
  const std::size_t n_baselines = spec.baselines.size();

  // Task layout: one task per (instance, init, steps) running every pipeline,
  // then one task per (instance, init) running every baseline.
  const std::size_t pipeline_tasks = n_instances * n_inits * n_steps;
  const std::size_t baseline_tasks = n_baselines > 0 ? n_instances * n_inits : 0;
  std::vector<RunRecord> records(pipeline_tasks * n_pipelines +
                                 baseline_tasks * n_baselines);

  parallel_for(pipeline_tasks + baseline_tasks, spec.workers, [&](std::size_t task) {
    if (task < pipeline_tasks) {
      std::size_t rest = task;
      std::size_t instance_idx = rest / (n_inits * n_steps);
      rest %= n_inits * n_steps;
      std::size_t init_idx = rest / n_steps;
      std::size_t steps_idx = rest % n_steps;
      const auto& instance = instances[instance_idx];
      std::uint64_t init_seed = spec.init_seed_base + init_idx;
      MdConfig md = spec.md;
      md.steps = steps_values[steps_idx];
      if (md.window_steps > md.steps) md.window_steps = md.steps;
      std::size_t slot = task * n_pipelines;
      auto stamp = [&](RunRecord& record) {
        record.instance = instance.label;
        record.instance_seed = instance.seed;
        record.mirrored = instance.mirrored;
        record.init_seed = init_seed;
      };
      try {
        std::vector<RunRecord> out =
            run_pipelines_shared(*instance.problem, spec.schedule, md, spec.pipelines,
                                 init_seed, instance.is_maxcut, instance.cut_offset,
                                 /*capture_errors=*/true);
        for (std::size_t k = 0; k < out.size(); ++k) {
          stamp(out[k]);
          records[slot + k] = std::move(out[k]);
        }
      } catch (const std::exception& e) {
        for (std::size_t k = 0; k < n_pipelines; ++k) {
          RunRecord record;
          record.solver = spec.pipelines[k].name();
          record.md_steps = md.steps;
          record.error = e.what();
          stamp(record);
          records[slot + k] = std::move(record);
        }
      }
    } else {
      std::size_t rest = task - pipeline_tasks;
      std::size_t instance_idx = rest / n_inits;
      std::size_t init_idx = rest % n_inits;
      const auto& instance = instances[instance_idx];
      std::uint64_t init_seed = spec.init_seed_base + init_idx;
      std::size_t slot = pipeline_tasks * n_pipelines + rest * n_baselines;
      for (std::size_t b = 0; b < n_baselines; ++b) {
        RunRecord record;
        record.instance = instance.label;
        record.instance_seed = instance.seed;
        record.mirrored = instance.mirrored;
        record.init_seed = init_seed;
        record.solver = spec.baselines[b].name();
        record.md_steps = 0;
        try {
          SubsolverResult result = run_baseline(*instance.problem, spec.baselines[b], init_seed);
          record.energy = result.energy;
          record.flips = result.flips;
          record.wall_time_s = result.elapsed_s;
          if (instance.is_maxcut) record.cut = -0.5 * result.energy + instance.cut_offset;
        } catch (const std::exception& e) {
          record.error = e.what();
        }
        records[slot + b] = std::move(record);
      }
    }
  });

  std::optional<double> reference;
  bool any_maxcut = std::any_of(instances.begin(), instances.end(),
                                [](const auto& h) { return h.is_maxcut; });
  if (any_maxcut) reference = parisi_reference_cut(instances.front().problem->n_sites());
  AggregateReport report = aggregate_records(records, reference);
  return {std::move(records), std::move(report)};
}

// ---------------------------------------------------------------------------
// Focused studies

struct AdiabaticityCell {
  double kappa2 = 0.0;
  long steps = 0;
  double mean_hamiltonian = 0.0;
  double ratio = 0.0;  // best-cell mean / cell mean: >= 1 away from convergence,
                       // decreasing toward 1.0 as the evolution turns adiabatic
};

struct AdiabaticityTable {
  std::vector<AdiabaticityCell> cells;  // kappa2-major, steps ascending
  double normalizer = 0.0;
};

/// Final H_MD(tau=1), averaged over shared initial conditions, for every
/// (kappa2, steps) cell, normalized against the best cell (kappa2=1 at the
/// largest step count when present, otherwise the grid minimum). Smaller
/// ratio = closer to the best available Hamiltonian.
inline AdiabaticityTable adiabaticity_sweep(const IsingProblem& problem,
                                            const Schedule& base_schedule,
                                            const MdConfig& base_md,
                                            std::vector<double> kappa2_values,
                                            std::vector<long> steps_values, int n_inits,
                                            std::uint64_t init_seed_base = 1, int workers = 0) {
  if (kappa2_values.empty() || steps_values.empty())
    throw ContractViolation("adiabaticity_sweep: empty grid");
  for (double k2 : kappa2_values)
    if (!(k2 >= -1.0 && k2 <= 1.0))
      throw ContractViolation("adiabaticity_sweep: kappa2 outside [-1, 1]");
  if (n_inits < 1) throw ContractViolation("adiabaticity_sweep: n_inits must be >= 1");
  std::sort(steps_values.begin(), steps_values.end());

  const std::size_t n_k = kappa2_values.size();
  const std::size_t n_s = steps_values.size();
  const std::size_t n_i = static_cast<std::size_t>(n_inits);
  std::vector<double> finals(n_k * n_s * n_i);
  parallel_for(n_k * n_s * n_i, workers, [&](std::size_t task) {
    std::size_t k_idx = task / (n_s * n_i);
    std::size_t s_idx = (task / n_i) % n_s;
    std::size_t i_idx = task % n_i;
    Schedule schedule = base_schedule.with_kappa2(kappa2_values[k_idx]);
    MdConfig md = base_md;
    md.steps = steps_values[s_idx];
    if (md.window_steps > md.steps) md.window_steps = md.steps;
    md.seed = init_seed_base + i_idx;
    MdResult result = leapfrog_run(problem, schedule, md);
    finals[task] = final_md_hamiltonian(problem, result, schedule, md);
  });

  AdiabaticityTable table;
  double best_cell = std::numeric_limits<double>::infinity();
  std::optional<double> kappa_one_cell;
  for (std::size_t k = 0; k < n_k; ++k) {
    for (std::size_t s = 0; s < n_s; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_i; ++i) sum += finals[(k * n_s + s) * n_i + i];
      double mean = sum / static_cast<double>(n_i);
      table.cells.push_back({kappa2_values[k], steps_values[s], mean, 0.0});
      best_cell = std::min(best_cell, mean);
      if (kappa2_values[k] == 1.0 && s == n_s - 1) kappa_one_cell = mean;
    }
  }
  table.normalizer = kappa_one_cell ? *kappa_one_cell : best_cell;
  for (auto& cell : table.cells) cell.ratio = table.normalizer / cell.mean_hamiltonian;
  return table;
}

struct DistributionSummary {
  std::string solver;
  std::vector<double> values;  // cut for MAX-CUT problems, energy otherwise
  AggregateStats stats;
};

/// Distribution of outcomes over n_inits momentum seeds on one instance; all
/// pipelines see the same seeds, so per-seed comparisons stay paired.
inline std::vector<DistributionSummary> initial_condition_study(
    const IsingProblem& problem, int n_inits, const std::vector<PipelineSpec>& pipelines,
    const Schedule& schedule, const MdConfig& md, bool is_maxcut = false,
    double cut_offset = 0.0, std::uint64_t init_seed_base = 1, int workers = 0) {
  if (n_inits < 1) throw ContractViolation("initial_condition_study: n_inits must be >= 1");
  std::vector<std::vector<RunRecord>> rows(static_cast<std::size_t>(n_inits));
  parallel_for(static_cast<std::size_t>(n_inits), workers, [&](std::size_t i) {
    rows[i] = run_pipelines_shared(problem, schedule, md, pipelines, init_seed_base + i,
                                   is_maxcut, cut_offset);
  });
  std::vector<DistributionSummary> out;
  for (std::size_t p = 0; p < pipelines.size(); ++p) {
    DistributionSummary summary;
    summary.solver = pipelines[p].name();
    for (int i = 0; i < n_inits; ++i) {
      const RunRecord& record = rows[static_cast<std::size_t>(i)][p];
      summary.values.push_back(record.cut ? *record.cut : record.energy);
    }
    summary.stats = compute_stats(summary.values);
    out.push_back(std::move(summary));
  }
  return out;
}

/// Reference values for report metadata (the dotted line of the benchmark
/// plots). Only "parisi_cut" is defined.
inline double reference_line(const std::string& kind, int n) {
  if (kind == "parisi_cut") return parisi_reference_cut(n);
  throw ContractViolation("reference_line: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Machine-readable output

inline nlohmann::json record_to_json(const RunRecord& record) {
  nlohmann::json j{{"instance", record.instance},
                   {"instance_seed", record.instance_seed},
                   {"mirrored", record.mirrored},
                   {"init_seed", record.init_seed},
                   {"solver", record.solver},
                   {"md_steps", record.md_steps},
                   {"energy", record.energy},
                   {"wall_time_s", record.wall_time_s},
                   {"flips", record.flips}};
  if (record.cut) j["cut"] = *record.cut;
  if (!record.fallback.empty()) j["fallback"] = record.fallback;
  if (!record.error.empty()) j["error"] = record.error;
  return j;
}

inline void write_records_jsonl(const std::string& path, const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& record : records) out << record_to_json(record).dump() << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json stats_to_json(const AggregateStats& stats) {
  return {{"mean", stats.mean},
          {"stddev", stats.stddev},
          {"min", stats.min},
          {"max", stats.max},
          {"count", stats.count}};
}

inline nlohmann::json aggregate_to_json(const AggregateReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    nlohmann::json j{{"solver", cell.solver},
                     {"md_steps", cell.md_steps},
                     {"energy", stats_to_json(cell.energy)}};
    if (cell.cut) j["cut"] = stats_to_json(*cell.cut);
    cells.push_back(std::move(j));
  }
  nlohmann::json j{{"cells", cells}, {"failures", report.failures}};
  if (report.reference_cut) j["reference_cut"] = *report.reference_cut;
  return j;
}

inline void write_aggregate_json(const std::string& path, const AggregateReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << aggregate_to_json(report).dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fluxanneal
