#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpusim/config.hpp"
#include "gpusim/parallel.hpp"
#include "gpusim/trace.hpp"

namespace gpusim {

struct Workload {
  std::string name;
  TraceProgram program;
};

// Raised when two cells of a sweep produce different reports.
class DeterminismViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchRecord {
  std::string workload;
  SchedulePolicy policy;
  std::vector<double> wall_seconds;  // one per repeat, engine time only
  std::string digest;
  std::uint64_t cycles = 0;

  double median() const;
};

struct SweepOptions {
  std::uint32_t repeats = 3;
  bool oversubscribe = false;
};

// Runs every workload under the sequential baseline and under each
// (policy, worker count) cell; a worker count of 1 is the baseline itself.
// Repeats are interleaved across cells. Throws DeterminismViolation on any
// report mismatch within a workload.
std::vector<BenchRecord> sweep(const GpuConfig& cfg, const std::vector<Workload>& workloads,
                               const std::vector<std::uint32_t>& worker_counts,
                               const std::vector<SchedulePolicy::Kind>& policies,
                               const SweepOptions& options = {});

struct SpeedupRow {
  std::string workload;
  SchedulePolicy policy;
  double median_seconds = 0.0;
  double baseline_seconds = 0.0;
  double speedup = 1.0;     // baseline median / cell median
  double efficiency = 1.0;  // speedup / workers
};

std::vector<SpeedupRow> speedup_table(const std::vector<BenchRecord>& records);

// Pearson correlation; nullopt when fewer than two points or either
// coordinate has zero variance.
std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationResult {
  std::vector<std::string> workloads;
  std::vector<double> sequential_seconds;
  std::vector<double> speedups;
  std::optional<double> r;
};

// Correlates each workload's sequential time with its speedup at the largest
// measured worker count under `kind`.
CorrelationResult correlate(const std::vector<SpeedupRow>& table, SchedulePolicy::Kind kind);

struct SchedulerComparison {
  std::string workload;
  std::uint32_t workers = 0;
  double static_speedup = 0.0;
  double dynamic_speedup = 0.0;
};

std::vector<SchedulerComparison> scheduler_compare(const GpuConfig& cfg,
                                                   const std::vector<Workload>& workloads,
                                                   const std::vector<std::uint32_t>& worker_counts,
                                                   const SweepOptions& options = {});
std::vector<SchedulerComparison> scheduler_compare(const std::vector<SpeedupRow>& table);

void write_records_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<SpeedupRow>& table);

}  // namespace gpusim
