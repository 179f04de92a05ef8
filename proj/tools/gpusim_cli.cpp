// gpusim: command-line front end.
//
//   gpusim run      simulate one trace under a schedule policy
//   gpusim verify   check that every policy/worker cell reproduces the sequential report
//   gpusim bench    timing sweep, speedup table, correlation, scheduler comparison
//   gpusim gen      write a synthetic workload trace
//   gpusim profile  per-phase wall-time breakdown of a run

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gpusim/bench.hpp"
#include "gpusim/config.hpp"
#include "gpusim/engine.hpp"
#include "gpusim/stats.hpp"
#include "gpusim/trace.hpp"

namespace {

using namespace gpusim;

constexpr int kExitBadInput = 2;
constexpr int kExitFailure = 1;
constexpr const char* kWorkersEnv = "GPUSIM_NUM_WORKERS";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Inputs {
  std::string config_path;
  std::string trace_path;
  std::string preset;
  std::uint64_t seed = 1;
  std::uint32_t scale = 1;
  bool oversubscribe = false;

  void add_to(CLI::App* cmd, bool with_trace = true) {
    cmd->add_option("--config", config_path, "Machine description (default: built-in profile)")
        ->check(CLI::ExistingFile);
    if (with_trace) {
      auto* t = cmd->add_option("--trace", trace_path, "Trace file")->check(CLI::ExistingFile);
      auto* p = cmd->add_option("--preset", preset, "Generate a synthetic workload instead");
      t->excludes(p);
      cmd->add_option("--seed", seed, "Generator seed");
      cmd->add_option("--scale", scale, "Generator scale")->check(CLI::PositiveNumber);
    }
    cmd->add_flag("--oversubscribe", oversubscribe,
                  "Allow more worker threads than hardware threads");
  }

  GpuConfig config() const {
    return config_path.empty() ? GpuConfig{} : load_config_file(config_path);
  }

  TraceProgram program() const {
    if (!trace_path.empty()) return load_trace_file(trace_path);
    if (!preset.empty()) return generate_workload(parse_preset(preset), seed, scale);
    throw UsageError("one of --trace or --preset is required");
  }
};

std::uint32_t workers_from_env() {
  const char* env = std::getenv(kWorkersEnv);
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw UsageError(std::string(kWorkersEnv) + " must be a positive integer");
  }
  return static_cast<std::uint32_t>(v);
}

SchedulePolicy make_policy(const std::string& schedule, std::uint32_t workers, std::uint32_t chunk) {
  SchedulePolicy::Kind kind;
  if (schedule.empty()) {
    kind = workers > 1 ? SchedulePolicy::Kind::Static : SchedulePolicy::Kind::Sequential;
  } else {
    try {
      kind = parse_schedule_kind(schedule);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return SchedulePolicy{kind, workers, chunk};
}

std::vector<SchedulePolicy::Kind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<SchedulePolicy::Kind> kinds;
  for (const auto& n : names) {
    try {
      kinds.push_back(parse_schedule_kind(n));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return kinds;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
}

void print_profile(const PhaseProfile& profile) {
  std::cout << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < kNumPhases; ++i) {
    auto p = static_cast<Phase>(i);
    std::cout << std::left << std::setw(26) << phase_name(p) << std::right << std::setw(12)
              << profile.seconds[i] << " s  " << std::setw(8) << std::setprecision(4)
              << profile.share(p) * 100.0 << " %\n"
              << std::setprecision(6);
  }
  std::cout << "sm_phase_share = " << profile.share(Phase::SmCycle) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-level GPGPU timing simulator with a parallel SM phase"};
  app.require_subcommand(1);

  // run
  Inputs run_in;
  std::uint32_t run_workers = 0;
  std::string run_schedule;
  std::uint32_t run_chunk = 1;
  std::string run_stats_out;
  auto* run_cmd = app.add_subcommand("run", "Simulate a trace");
  run_in.add_to(run_cmd);
  run_cmd->add_option("--workers", run_workers, std::string("Worker count (env ") + kWorkersEnv + ")")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--schedule", run_schedule, "seq | static | dynamic")
      ->check(CLI::IsMember({"seq", "static", "dynamic"}));
  run_cmd->add_option("--chunk", run_chunk, "Loop-schedule granularity")->check(CLI::PositiveNumber);
  run_cmd->add_option("--stats-out", run_stats_out, "Write the canonical stats report here");

  // verify
  Inputs ver_in;
  std::vector<std::uint32_t> ver_workers;
  std::vector<std::string> ver_schedules{"static", "dynamic"};
  std::uint32_t ver_chunk = 1;
  bool ver_fault = false;
  auto* ver_cmd = app.add_subcommand("verify", "Compare parallel reports against the sequential run");
  ver_in.add_to(ver_cmd);
  ver_cmd->add_option("--workers-list", ver_workers, "Comma-separated worker counts")
      ->delimiter(',')
      ->required()
      ->check(CLI::PositiveNumber);
  ver_cmd->add_option("--schedules", ver_schedules, "Comma-separated: static,dynamic")
      ->delimiter(',')
      ->check(CLI::IsMember({"static", "dynamic"}));
  ver_cmd->add_option("--chunk", ver_chunk, "Loop-schedule granularity")->check(CLI::PositiveNumber);
  ver_cmd->add_flag("--inject-shared-stat-fault", ver_fault,
                    "Test fixture: route one statistic through shared state");

  // bench
  Inputs bench_in;
  std::vector<std::string> bench_presets;
  std::vector<std::string> bench_traces;
  std::vector<std::uint64_t> bench_seeds{1};
  std::vector<std::uint32_t> bench_scales{1};
  std::vector<std::uint32_t> bench_workers{1, 2, 4, 8, 16};
  std::vector<std::string> bench_schedules{"static"};
  std::uint32_t bench_repeats = 3;
  std::string bench_out;
  std::string bench_summary_out;
  auto* bench_cmd = app.add_subcommand("bench", "Timing sweep over workloads and worker counts");
  bench_in.add_to(bench_cmd, false);
  bench_cmd->add_option("--presets", bench_presets, "Comma-separated presets")->delimiter(',');
  bench_cmd->add_option("--traces", bench_traces, "Comma-separated trace files")->delimiter(',');
  bench_cmd->add_option("--seeds", bench_seeds, "Comma-separated seeds")->delimiter(',');
  bench_cmd->add_option("--scales", bench_scales, "Comma-separated scales")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--workers", bench_workers, "Comma-separated worker counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--schedules", bench_schedules, "Comma-separated: static,dynamic")
      ->delimiter(',')
      ->check(CLI::IsMember({"static", "dynamic"}));
  bench_cmd->add_option("--repeats", bench_repeats, "Repeats per cell (>= 3)")
      ->check(CLI::Range(3u, 1000u));
  bench_cmd->add_option("--out", bench_out, "Per-run CSV");
  bench_cmd->add_option("--summary-out", bench_summary_out, "Speedup/efficiency CSV");

  // gen
  std::string gen_preset;
  std::uint64_t gen_seed = 1;
  std::uint32_t gen_scale = 1;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic workload trace");
  gen_cmd->add_option("--preset", gen_preset, "two_cta | balanced | imbalanced | memory_heavy")
      ->required();
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--scale", gen_scale, "Generator scale")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen_out, "Output trace path")->required();

  // profile
  Inputs prof_in;
  std::uint32_t prof_workers = 0;
  std::string prof_schedule;
  std::string prof_out;
  auto* prof_cmd = app.add_subcommand("profile", "Per-phase wall-time breakdown");
  prof_in.add_to(prof_cmd);
  prof_cmd->add_option("--workers", prof_workers, "Worker count")->check(CLI::PositiveNumber);
  prof_cmd->add_option("--schedule", prof_schedule, "seq | static | dynamic")
      ->check(CLI::IsMember({"seq", "static", "dynamic"}));
  prof_cmd->add_option("--out", prof_out, "Write phase,seconds,share CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*run_cmd) {
      const GpuConfig cfg = run_in.config();
      const TraceProgram program = run_in.program();
      const std::uint32_t workers = run_workers != 0 ? run_workers : workers_from_env();
      EngineOptions eo;
      eo.oversubscribe = run_in.oversubscribe;
      RunResult res = run(cfg, program, make_policy(run_schedule, workers, run_chunk), eo);
      const std::string report = render_report(res.stats);
      if (!run_stats_out.empty()) write_file(run_stats_out, report);
      std::cout << "cycles = " << res.stats.cycles << '\n'
                << "instructions = " << res.stats.instructions() << '\n'
                << "wall_seconds = " << std::fixed << std::setprecision(6) << res.wall_seconds
                << '\n'
                << "digest = " << report_digest(report) << '\n';
      return 0;
    }

    if (*ver_cmd) {
      const GpuConfig cfg = ver_in.config();
      const TraceProgram program = ver_in.program();
      if (ver_workers.empty()) throw UsageError("--workers-list must not be empty");
      const auto kinds = parse_kinds(ver_schedules);
      EngineOptions eo;
      eo.oversubscribe = ver_in.oversubscribe;
      eo.time_phases = false;
      eo.inject_shared_stat_fault = ver_fault;
      const std::string baseline = render_report(run(cfg, program, SchedulePolicy::sequential(), eo).stats);
      std::cout << "seq: digest " << report_digest(baseline) << '\n';
      bool ok = true;
      for (auto kind : kinds) {
        for (std::uint32_t w : ver_workers) {
          SchedulePolicy p{kind, w, ver_chunk};
          const std::string report = render_report(run(cfg, program, p, eo).stats);
          auto diff = diff_reports(baseline, report);
          if (diff) {
            ok = false;
            std::cout << p.label() << ": MISMATCH at " << *diff << '\n';
          } else {
            std::cout << p.label() << ": identical\n";
          }
        }
      }
      return ok ? 0 : kExitFailure;
    }

    if (*bench_cmd) {
      const GpuConfig cfg = bench_in.config();
      std::vector<Workload> workloads;
      for (const auto& preset : bench_presets) {
        for (std::uint32_t scale : bench_scales) {
          for (std::uint64_t seed : bench_seeds) {
            workloads.push_back({preset + "_s" + std::to_string(scale) + "_seed" + std::to_string(seed),
                                 generate_workload(parse_preset(preset), seed, scale)});
          }
        }
      }
      for (const auto& path : bench_traces) workloads.push_back({path, load_trace_file(path)});
      if (workloads.empty()) throw UsageError("bench needs --presets or --traces");

      SweepOptions so;
      so.repeats = bench_repeats;
      so.oversubscribe = bench_in.oversubscribe;
      auto records = sweep(cfg, workloads, bench_workers, parse_kinds(bench_schedules), so);
      auto table = speedup_table(records);

      std::ostringstream csv;
      write_records_csv(csv, records);
      if (!bench_out.empty()) write_file(bench_out, csv.str());
      std::ostringstream summary;
      write_summary_csv(summary, table);
      if (!bench_summary_out.empty()) write_file(bench_summary_out, summary.str());
      std::cout << summary.str();

      for (auto kind : parse_kinds(bench_schedules)) {
        auto corr = correlate(table, kind);
        std::cout << "correlation(" << to_string(kind) << ") = ";
        if (corr.r) {
          std::cout << std::setprecision(4) << *corr.r << '\n';
        } else {
          std::cout << "undefined\n";
        }
      }
      for (const auto& c : scheduler_compare(table)) {
        std::cout << "compare " << c.workload << " workers=" << c.workers
                  << " static=" << std::setprecision(3) << c.static_speedup
                  << " dynamic=" << c.dynamic_speedup << '\n';
      }
      return 0;
    }

    if (*gen_cmd) {
      write_file(gen_out, render_trace(generate_workload(parse_preset(gen_preset), gen_seed, gen_scale)));
      return 0;
    }

    if (*prof_cmd) {
      const GpuConfig cfg = prof_in.config();
      const TraceProgram program = prof_in.program();
      const std::uint32_t workers = prof_workers != 0 ? prof_workers : workers_from_env();
      EngineOptions eo;
      eo.oversubscribe = prof_in.oversubscribe;
      RunResult res = run(cfg, program, make_policy(prof_schedule, workers, 1), eo);
      print_profile(res.profile);
      std::cout << "wall_seconds = " << res.wall_seconds << '\n';
      if (!prof_out.empty()) {
        std::ostringstream csv;
        csv << "phase,seconds,share\n" << std::setprecision(9);
        for (std::size_t i = 0; i < kNumPhases; ++i) {
          auto p = static_cast<Phase>(i);
          csv << phase_name(p) << ',' << res.profile.seconds[i] << ',' << res.profile.share(p) << '\n';
        }
        write_file(prof_out, csv.str());
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const DeterminismViolation& e) {
    std::cerr << "determinism violation: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
