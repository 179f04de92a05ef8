#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "gpusim/config.hpp"
#include "gpusim/icnt.hpp"
#include "gpusim/memsys.hpp"
#include "gpusim/parallel.hpp"
#include "gpusim/smcore.hpp"
#include "gpusim/stats.hpp"
#include "gpusim/trace.hpp"

namespace gpusim {

enum class Phase : std::uint8_t {
  IcntToSm,
  MemToIcnt,
  DramCycle,
  IcntToMemCacheCycle,
  IcntSchedule,
  SmCycle,
  IssueBlocks,
};
inline constexpr std::size_t kNumPhases = 7;
std::string_view phase_name(Phase p);

struct PhaseProfile {
  std::array<double, kNumPhases> seconds{};

  double total() const;
  // Fraction of the total; 0 for an empty profile.
  double share(Phase p) const;
};

struct CtaPlacement {
  std::uint32_t kernel;
  std::uint32_t cta;
  std::uint32_t sm;
  std::uint64_t cycle;
  friend bool operator==(const CtaPlacement&, const CtaPlacement&) = default;
};

struct EngineOptions {
  // Let logical workers exceed the hardware thread count.
  bool oversubscribe = false;
  bool time_phases = true;
  // Test fixture: routes a statistic through a variable shared by all SMs,
  // recreating the race the per-SM sheets exist to prevent.
  bool inject_shared_stat_fault = false;
  // Called after every cycle(); used by conservation tests.
  std::function<void(const class Engine&)> after_cycle;
};

struct RunResult {
  GpuStats stats;
  PhaseProfile profile;
  double wall_seconds = 0.0;
};

// Cycle-level driver. Each cycle runs, in order: interconnect->SM delivery,
// sub-partition->interconnect, DRAM channels, interconnect->sub-partition plus
// L2, interconnect scheduling, the SM loop (the only parallel phase),
// the cycle increment and CTA issue.
class Engine {
 public:
  // `program` must outlive the engine.
  Engine(const GpuConfig& cfg, const TraceProgram& program, SchedulePolicy policy,
         EngineOptions options = {});

  RunResult run();

  // Step-wise control, used by run() and by tests.
  void begin_kernel(std::size_t kernel_index);
  bool kernel_done() const;
  void cycle();
  GpuStats end_kernel();

  void issue_blocks_to_sms();

  std::uint64_t gpu_cycle() const { return gpu_cycle_; }
  std::span<SmCore> sms() { return sms_; }
  std::span<const SmCore> sms() const { return sms_; }
  std::span<const MemPartition> partitions() const { return partitions_; }
  const Interconnect& icnt() const { return icnt_; }
  const MemoryStats& memory_stats() const { return memory_; }
  const PhaseProfile& profile() const { return profile_; }
  const std::vector<CtaPlacement>& placements() const { return placements_; }
  std::size_t pending_ctas() const { return pending_.size(); }
  const GpuConfig& config() const { return cfg_; }

 private:
  GpuConfig cfg_;
  const TraceProgram& program_;
  EngineOptions options_;
  WorkerPool pool_;

  std::vector<SmCore> sms_;
  std::vector<MemPartition> partitions_;
  Interconnect icnt_;
  MemoryStats memory_;

  std::uint64_t gpu_cycle_ = 0;
  std::uint64_t kernel_start_cycle_ = 0;
  std::size_t kernel_index_ = 0;
  std::deque<std::uint32_t> pending_;
  std::uint32_t issue_pointer_ = 0;
  std::vector<CtaPlacement> placements_;
  PhaseProfile profile_;

  std::atomic<std::uint32_t> fault_last_sm_{0};
};

// Convenience wrapper: validates inputs, runs every kernel, reduces stats.
RunResult run(const GpuConfig& cfg, const TraceProgram& program, SchedulePolicy policy,
              EngineOptions options = {});

}  // namespace gpusim
