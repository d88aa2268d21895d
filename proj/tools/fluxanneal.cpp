// fluxanneal: generate instances, run MD / hybrid pipelines with baselines,
// sweep schedule parameters, and inspect instance files.
//
// Exit codes: 0 success, 2 configuration error, 3 MD divergence,
// 4 remote failure with no fallback.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxanneal/harness.hpp"
#include "fluxanneal/io.hpp"

namespace fs = std::filesystem;
using namespace fluxanneal;

namespace {

struct SourceOptions {
  std::vector<std::string> instance_files;
  std::string generator;
  int n_sites = 0;
  std::uint64_t seed = 1;
  int count = 1;
  bool mirror_pairs = false;
  bool files_are_maxcut = false;
};

void add_source_options(CLI::App* cmd, SourceOptions& src, bool allow_files = true) {
  if (allow_files)
    cmd->add_option("--instance", src.instance_files, "instance file(s) to load");
  cmd->add_option("--gen", src.generator, "generator: bimodal-complete | uniform-sg")
      ->check(CLI::IsMember({"bimodal-complete", "uniform-sg"}));
  cmd->add_option("--n", src.n_sites, "number of sites for the generator");
  cmd->add_option("--seed", src.seed, "base instance seed");
  cmd->add_option("--count", src.count, "number of instances (seeds seed..seed+count-1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--mirror-pairs", src.mirror_pairs,
                "pair every instance with its negated-coupling mirror");
  if (allow_files)
    cmd->add_flag("--maxcut", src.files_are_maxcut,
                  "treat loaded instance files as MAX-CUT mappings (report cuts)");
}

void fill_spec_source(ExperimentSpec& spec, const SourceOptions& src) {
  if (!src.generator.empty() && !src.instance_files.empty())
    throw ContractViolation("choose either --gen or --instance, not both");
  if (src.generator.empty() && src.instance_files.empty())
    throw ContractViolation("a problem source is required: --gen or --instance");
  spec.generator = src.generator;
  spec.n_sites = src.n_sites;
  spec.instance_files = src.instance_files;
  spec.files_are_maxcut = src.files_are_maxcut;
  spec.mirror_pairing = src.mirror_pairs;
  for (int k = 0; k < src.count; ++k)
    spec.instance_seeds.push_back(src.seed + static_cast<std::uint64_t>(k));
}

struct MdOptions {
  std::vector<long> steps{50000};
  int potential_power = 6;
  long window = 100;
  std::vector<double> schedule;
  long record_stride = 0;
  double time_scale = 1.0;
  int threads = 1;
};

void add_md_options(CLI::App* cmd, MdOptions& md) {
  cmd->add_option("--md-steps", md.steps, "MD step count(s), comma separated for a sweep")
      ->delimiter(',');
  cmd->add_option("--potential-power", md.potential_power, "confining power M (even, >= 4)");
  cmd->add_option("--window", md.window, "trailing average window in steps");
  cmd->add_option("--schedule", md.schedule,
                  "schedule coefficients a_f,r1,r2,b_f,k1,k2 (default: paper values)")
      ->delimiter(',')
      ->expected(0, 6);
  cmd->add_option("--record-stride", md.record_stride,
                  "write trajectory samples every this many steps (0 = off)");
  cmd->add_option("--time-scale", md.time_scale,
                  "multiplier on both leapfrog update lines (research knob)");
  cmd->add_option("--threads", md.threads, "site-parallel workers inside one MD run");
}

Schedule schedule_from(const MdOptions& md) {
  if (md.schedule.empty()) return Schedule::paper_default();
  if (md.schedule.size() != 6)
    throw ContractViolation("--schedule needs exactly 6 comma-separated values");
  return Schedule(md.schedule[0], md.schedule[1], md.schedule[2], md.schedule[3], md.schedule[4],
                  md.schedule[5]);
}

MdConfig md_config_from(const MdOptions& md) {
  MdConfig config;
  config.steps = md.steps.front();
  config.potential_power = md.potential_power;
  config.window_steps = md.window;
  config.record_stride = md.record_stride;
  config.time_scale = md.time_scale;
  config.threads = md.threads;
  return config;
}

std::string instance_stub(const std::string& label) {
  std::string out;
  for (char c : label)
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out;
}

int command_gen(const SourceOptions& src, const std::string& out_dir, Interval j_range,
                Interval h_range) {
  if (src.generator.empty()) throw ContractViolation("gen requires --gen");
  if (src.n_sites < 2) throw ContractViolation("gen requires --n >= 2");
  fs::create_directories(out_dir);
  for (int k = 0; k < src.count; ++k) {
    std::uint64_t seed = src.seed + static_cast<std::uint64_t>(k);
    IsingProblem problem =
        src.generator == "bimodal-complete"
            ? maxcut_to_ising(gen_bimodal_complete(src.n_sites, seed)).problem
            : gen_uniform_spinglass(src.n_sites, seed, j_range, h_range);
    std::string base = src.generator + "_n" + std::to_string(src.n_sites) + "_seed" +
                       std::to_string(seed);
    std::string path = (fs::path(out_dir) / (base + ".ising")).string();
    write_instance_file(path, problem);
    std::cout << path << "\n";
    if (src.mirror_pairs) {
      std::string mpath = (fs::path(out_dir) / (base + "_mirror.ising")).string();
      write_instance_file(mpath, mirror(problem));
      std::cout << mpath << "\n";
    }
  }
  return 0;
}

void print_aggregate(const AggregateReport& report) {
  std::printf("%-18s %10s %8s %14s %14s %14s\n", "solver", "md_steps", "count", "mean", "stddev",
              "max");
  for (const auto& cell : report.cells) {
    const AggregateStats& s = cell.cut ? *cell.cut : cell.energy;
    std::printf("%-18s %10ld %8ld %14.4f %14.4f %14.4f\n", cell.solver.c_str(), cell.md_steps,
                s.count, s.mean, s.stddev, s.max);
  }
  if (report.reference_cut)
    std::printf("reference cut C* = %.3f\n", *report.reference_cut);
  if (report.failures > 0) std::printf("failed runs: %ld\n", report.failures);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising/MAX-CUT solving with flux-variable MD preconditioning"};
  app.require_subcommand(1);

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "generate instance files");
  SourceOptions gen_src;
  add_source_options(gen, gen_src, /*allow_files=*/false);
  std::string gen_out = ".";
  gen->add_option("--out", gen_out, "output directory");
  std::vector<double> gen_jr{-1.0, 1.0}, gen_hr{-2.0, 2.0};
  gen->add_option("--j-range", gen_jr, "uniform-sg coupling interval lo,hi")->delimiter(',')->expected(2);
  gen->add_option("--h-range", gen_hr, "uniform-sg field interval lo,hi")->delimiter(',')->expected(2);

  // --- run ---
  auto* run = app.add_subcommand("run", "run pipelines and baselines, write records");
  SourceOptions run_src;
  add_source_options(run, run_src);
  MdOptions run_md;
  add_md_options(run, run_md);
  std::vector<std::string> pipelines{"md"};
  run->add_option("--pipeline", pipelines, "pipeline(s): md | hqa")
      ->delimiter(',')
      ->check(CLI::IsMember({"md", "hqa"}));
  int n_ambivalent = 0;
  run->add_option("--n-ambivalent", n_ambivalent, "subproblem size for hqa");
  std::string backend = "tabu";
  run->add_option("--backend", backend, "hqa subsolver: brute | sa | tabu | remote")
      ->check(CLI::IsMember({"brute", "sa", "tabu", "remote"}));
  std::string endpoint;
  run->add_option("--endpoint", endpoint, "remote solver URI, e.g. http://host:port");
  double remote_timeout = 10.0;
  run->add_option("--timeout", remote_timeout, "remote solve timeout in seconds");
  int num_reads = 1;
  run->add_option("--num-reads", num_reads, "reads requested from the remote");
  bool no_fallback = false;
  run->add_flag("--no-remote-fallback", no_fallback, "fail instead of falling back locally");
  std::string fallback = "tabu";
  run->add_option("--fallback", fallback, "local backend used when the remote fails")
      ->check(CLI::IsMember({"brute", "sa", "tabu"}));
  bool remote_descent = false;
  run->add_flag("--remote-descent", remote_descent,
                "polish remote samples with a greedy single-flip descent");
  std::vector<std::string> baselines;
  run->add_option("--baselines", baselines, "full-problem baselines: sa,tabu")
      ->delimiter(',')
      ->check(CLI::IsMember({"sa", "tabu"}));
  long sa_sweeps = 1000;
  run->add_option("--sa-sweeps", sa_sweeps, "SA sweeps (baseline and hqa-sa)");
  int inits = 1;
  run->add_option("--inits", inits, "initial conditions per instance")->check(CLI::PositiveNumber);
  std::uint64_t init_seed_base = 1;
  run->add_option("--init-seed-base", init_seed_base, "first momentum seed");
  std::string run_out = ".";
  run->add_option("--out", run_out, "output directory for records.jsonl / aggregate.json");
  bool gzip_traj = false;
  run->add_flag("--gzip-traj", gzip_traj, "gzip trajectory exports (.csv.gz)");
  bool export_partition = false;
  run->add_flag("--export-partition", export_partition,
                "write the frozen/ambivalent partition JSON per hqa run");
  int workers = 0;
  run->add_option("--workers", workers, "parallel runs (0 = hardware)");

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "adiabaticity sweep over kappa2 and step counts");
  SourceOptions sweep_src;
  add_source_options(sweep, sweep_src);
  MdOptions sweep_md;
  add_md_options(sweep, sweep_md);
  std::vector<double> kappa2_values{-1.0, 0.0, 1.0};
  sweep->add_option("--kappa2", kappa2_values, "kappa2 values in [-1, 1]")->delimiter(',');
  int sweep_inits = 10;
  sweep->add_option("--inits", sweep_inits, "initial conditions per cell");
  std::string sweep_out = ".";
  sweep->add_option("--out", sweep_out, "output directory for sweep.json");
  int sweep_workers = 0;
  sweep->add_option("--workers", sweep_workers, "parallel runs (0 = hardware)");

  // --- inspect ---
  auto* inspect = app.add_subcommand("inspect", "summarize an instance file");
  std::string inspect_file;
  inspect->add_option("file", inspect_file, "instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      return command_gen(gen_src, gen_out, {gen_jr[0], gen_jr[1]}, {gen_hr[0], gen_hr[1]});
    }

    if (run->parsed()) {
      ExperimentSpec spec;
      fill_spec_source(spec, run_src);
      spec.schedule = schedule_from(run_md);
      spec.md = md_config_from(run_md);
      spec.md_steps_values = run_md.steps;
      spec.n_inits = inits;
      spec.init_seed_base = init_seed_base;
      spec.workers = workers;
      for (const auto& name : pipelines) {
        PipelineSpec pipeline;
        if (name == "hqa") {
          pipeline.kind = PipelineKind::Hqa;
          pipeline.n_ambivalent = n_ambivalent;
          pipeline.backend = backend_from_name(backend);
          pipeline.sa.sweeps = sa_sweeps;
          pipeline.remote = {endpoint, remote_timeout, num_reads, remote_descent};
          pipeline.remote_fallback_enabled = !no_fallback;
          pipeline.remote_fallback = backend_from_name(fallback);
          if (pipeline.backend == BackendKind::Remote && endpoint.empty())
            throw ContractViolation("--backend remote requires --endpoint");
        }
        spec.pipelines.push_back(std::move(pipeline));
      }
      for (const auto& name : baselines) {
        BaselineSpec baseline;
        baseline.solver = backend_from_name(name);
        baseline.sa.sweeps = sa_sweeps;
        spec.baselines.push_back(baseline);
      }

      ExperimentResult result = run_experiment(spec);
      fs::create_directories(run_out);
      write_records_jsonl((fs::path(run_out) / "records.jsonl").string(), result.records);
      write_aggregate_json((fs::path(run_out) / "aggregate.json").string(), result.report);
      print_aggregate(result.report);

      if (spec.md.record_stride > 0 || export_partition) {
        // Export paths re-run the MD stage per cell with recording on.
        std::vector<detail::InstanceHandle> instances = detail::materialize_instances(spec);
        for (const auto& instance : instances) {
          for (int j = 0; j < spec.n_inits; ++j) {
            for (long steps : spec.md_steps_values) {
              MdConfig config = spec.md;
              config.steps = steps;
              if (config.window_steps > config.steps) config.window_steps = config.steps;
              config.seed = spec.init_seed_base + static_cast<std::uint64_t>(j);
              MdResult md_result = leapfrog_run(*instance.problem, spec.schedule, config);
              std::string stem = instance_stub(instance.label) + "_init" +
                                 std::to_string(config.seed) + "_steps" + std::to_string(steps);
              if (spec.md.record_stride > 0) {
                std::string name = "trajectory_" + stem + (gzip_traj ? ".csv.gz" : ".csv");
                write_trajectory_file((fs::path(run_out) / name).string(), md_result.samples);
              }
              if (export_partition) {
                for (const auto& pipeline : spec.pipelines) {
                  if (pipeline.kind != PipelineKind::Hqa) continue;
                  Partition part =
                      make_partition(md_result.average.phibar, pipeline.n_ambivalent);
                  std::ofstream pj(fs::path(run_out) /
                                   ("partition_" + pipeline.name() + "_" + stem + ".json"));
                  pj << partition_to_json(part).dump(2) << "\n";
                }
              }
            }
          }
        }
      }

      bool remote_failed_somewhere = false;
      for (const auto& record : result.records)
        if (!record.error.empty() && record.error.find("remote") != std::string::npos)
          remote_failed_somewhere = true;
      return remote_failed_somewhere ? 4 : 0;
    }

    if (sweep->parsed()) {
      ExperimentSpec source_spec;
      fill_spec_source(source_spec, sweep_src);
      std::vector<detail::InstanceHandle> instances = detail::materialize_instances(source_spec);
      const IsingProblem& problem = *instances.front().problem;
      Schedule schedule = schedule_from(sweep_md);
      MdConfig config = md_config_from(sweep_md);
      AdiabaticityTable table = adiabaticity_sweep(problem, schedule, config, kappa2_values,
                                                   sweep_md.steps, sweep_inits, 1, sweep_workers);
      nlohmann::json cells = nlohmann::json::array();
      std::printf("%8s %10s %18s %10s\n", "kappa2", "steps", "mean_H(tau=1)", "ratio");
      for (const auto& cell : table.cells) {
        std::printf("%8.3f %10ld %18.6f %10.6f\n", cell.kappa2, cell.steps,
                    cell.mean_hamiltonian, cell.ratio);
        cells.push_back({{"kappa2", cell.kappa2},
                         {"steps", cell.steps},
                         {"mean_hamiltonian", cell.mean_hamiltonian},
                         {"ratio", cell.ratio}});
      }
      fs::create_directories(sweep_out);
      std::ofstream out(fs::path(sweep_out) / "sweep.json");
      out << nlohmann::json{{"cells", cells}, {"normalizer", table.normalizer}}.dump(2) << "\n";
      return 0;
    }

    if (inspect->parsed()) {
      IsingProblem problem = read_instance_file(inspect_file);
      double j_min = 0.0, j_max = 0.0;
      bool first = true;
      problem.for_each_coupling([&](int, int, double v) {
        if (first) {
          j_min = j_max = v;
          first = false;
        }
        j_min = std::min(j_min, v);
        j_max = std::max(j_max, v);
      });
      bool h_zero = true;
      for (int i = 0; i < problem.n_sites(); ++i)
        if (problem.field(i) != 0.0) h_zero = false;
      std::printf("sites:      %d\n", problem.n_sites());
      std::printf("couplings:  %zu (storage: %s)\n", problem.coupling_count(),
                  problem.is_dense() ? "dense" : "sparse");
      if (problem.coupling_count() > 0) std::printf("J range:    [%g, %g]\n", j_min, j_max);
      std::printf("fields:     %s\n", h_zero ? "all zero" : "present");
      if (h_zero)
        std::printf("maxcut C0:  %.17g\n", maxcut_offset(problem));
      return 0;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const RemoteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
