#include "gpusim/engine.hpp"

#include <algorithm>
#include <chrono>

namespace gpusim {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::IcntToSm: return "icnt_to_sm";
    case Phase::MemToIcnt: return "mem_to_icnt";
    case Phase::DramCycle: return "dram_cycle";
    case Phase::IcntToMemCacheCycle: return "icnt_to_mem_cache_cycle";
    case Phase::IcntSchedule: return "icnt_schedule";
    case Phase::SmCycle: return "sm_cycle";
    case Phase::IssueBlocks: return "issue_blocks";
  }
  return "?";
}

double PhaseProfile::total() const {
  double t = 0.0;
  for (double s : seconds) t += s;
  return t;
}

double PhaseProfile::share(Phase p) const {
  const double t = total();
  return t > 0.0 ? seconds[static_cast<std::size_t>(p)] / t : 0.0;
}

namespace {

using Clock = std::chrono::steady_clock;

// Accumulates the time since the previous mark into a phase bucket.
class PhaseTimer {
 public:
  PhaseTimer(PhaseProfile& profile, bool enabled) : profile_(profile), enabled_(enabled) {
    if (enabled_) last_ = Clock::now();
  }
  void mark(Phase p) {
    if (!enabled_) return;
    auto now = Clock::now();
    profile_.seconds[static_cast<std::size_t>(p)] +=
        std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  PhaseProfile& profile_;
  bool enabled_;
  Clock::time_point last_;
};

}  // namespace

Engine::Engine(const GpuConfig& cfg, const TraceProgram& program, SchedulePolicy policy,
               EngineOptions options)
    : cfg_(cfg),
      program_(program),
      options_(std::move(options)),
      pool_(policy, options_.oversubscribe),
      icnt_(cfg) {
  validate(cfg_);
  validate_trace(program_, cfg_);
  sms_.reserve(cfg_.num_sms);
  for (std::uint32_t i = 0; i < cfg_.num_sms; ++i) sms_.emplace_back(i, cfg_);
  partitions_.reserve(cfg_.num_mem_partitions);
  for (std::uint32_t p = 0; p < cfg_.num_mem_partitions; ++p) partitions_.emplace_back(p, cfg_);
}

void Engine::begin_kernel(std::size_t kernel_index) {
  kernel_index_ = kernel_index;
  kernel_start_cycle_ = gpu_cycle_;
  memory_ = MemoryStats{};
  for (auto& sm : sms_) sm.stats().reset();
  pending_.clear();
  const auto& kernel = program_.kernels.at(kernel_index);
  for (std::uint32_t c = 0; c < kernel.ctas.size(); ++c) pending_.push_back(c);
  issue_pointer_ = 0;
  issue_blocks_to_sms();
}

bool Engine::kernel_done() const {
  if (!pending_.empty() || !icnt_.is_empty()) return false;
  for (const auto& sm : sms_)
    if (!sm.is_idle()) return false;
  for (const auto& mp : partitions_)
    if (!mp.is_idle()) return false;
  return true;
}

void Engine::cycle() {
  PhaseTimer timer(profile_, options_.time_phases);
  const std::uint64_t now = gpu_cycle_;

  icnt_.to_sm(sms_, now);
  timer.mark(Phase::IcntToSm);

  for (auto& mp : partitions_)
    for (auto& sp : mp.subs) icnt_.mem_to_icnt(sp, now);
  timer.mark(Phase::MemToIcnt);

  for (auto& mp : partitions_) dram_cycle(mp, cfg_);
  timer.mark(Phase::DramCycle);

  for (auto& mp : partitions_) {
    for (std::uint32_t j = 0; j < mp.subs.size(); ++j) {
      icnt_.to_mem(mp.subs[j], now);
      cache_cycle(mp, j, now, cfg_, memory_);
    }
  }
  timer.mark(Phase::IcntToMemCacheCycle);

  icnt_.schedule(sms_, now);
  timer.mark(Phase::IcntSchedule);

  if (options_.inject_shared_stat_fault) {
    pool_.parallel_for(sms_.size(), [this, now](std::size_t i, std::uint32_t) {
      const auto id = static_cast<std::uint32_t>(i);
      if (fault_last_sm_.exchange(id, std::memory_order_relaxed) + 1 != id) {
        sms_[i].stats().add(Counter::StallCyclesExec);
      }
      sms_[i].cycle(now);
    });
  } else {
    pool_.parallel_for(sms_.size(), [this, now](std::size_t i, std::uint32_t) { sms_[i].cycle(now); });
  }
  timer.mark(Phase::SmCycle);

  ++gpu_cycle_;
  issue_blocks_to_sms();
  timer.mark(Phase::IssueBlocks);

  if (options_.after_cycle) options_.after_cycle(*this);
}

void Engine::issue_blocks_to_sms() {
  const auto& kernel = program_.kernels[kernel_index_];
  const auto n = static_cast<std::uint32_t>(sms_.size());
  while (!pending_.empty()) {
    const std::uint32_t cta = pending_.front();
    bool issued = false;
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t sm = (issue_pointer_ + k) % n;
      if (sms_[sm].accept_cta(kernel.ctas[cta], static_cast<std::uint32_t>(kernel_index_))) {
        placements_.push_back({static_cast<std::uint32_t>(kernel_index_), cta, sm, gpu_cycle_});
        issue_pointer_ = (sm + 1) % n;
        pending_.pop_front();
        issued = true;
        break;
      }
    }
    if (!issued) break;
  }
}

GpuStats Engine::end_kernel() {
  std::vector<StatSheet> sheets;
  sheets.reserve(sms_.size());
  for (auto& sm : sms_) {
    sheets.push_back(std::move(sm.stats()));
    sm.stats().reset();
  }
  return reduce(sheets, memory_, gpu_cycle_ - kernel_start_cycle_);
}

RunResult Engine::run() {
  RunResult result;
  const auto start = Clock::now();
  for (std::size_t k = 0; k < program_.kernels.size(); ++k) {
    begin_kernel(k);
    while (!kernel_done()) cycle();
    result.stats.append_kernel(program_.kernels[k].name, end_kernel());
  }
  result.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (result.stats.per_sm.empty()) result.stats.per_sm.resize(sms_.size());
  result.profile = profile_;
  return result;
}

RunResult run(const GpuConfig& cfg, const TraceProgram& program, SchedulePolicy policy,
              EngineOptions options) {
  Engine engine(cfg, program, policy, std::move(options));
  return engine.run();
}

}  // namespace gpusim
