#pragma once

// Reference models used by the unit tests and the acceptance binary. None of
// this shares code with the simulator beyond its public types.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "gpusim/engine.hpp"

namespace gpusim::oracle {

// Round-robin CTA issue: the head CTA goes to the first SM at or after the
// rotating pointer that has room for it; the pointer then moves one past that
// SM. Issue stops at the first CTA nobody can take.
class RoundRobinIssue {
 public:
  RoundRobinIssue(const KernelTrace& kernel, std::uint32_t kernel_index)
      : kernel_(kernel), kernel_index_(kernel_index) {
    for (std::uint32_t c = 0; c < kernel.ctas.size(); ++c) pending_.push_back(c);
  }

  // free_warps / free_ctas: capacity of every SM just before issue.
  std::vector<CtaPlacement> step(std::vector<std::uint32_t> free_warps,
                                 std::vector<std::uint32_t> free_ctas, std::uint64_t cycle) {
    std::vector<CtaPlacement> out;
    const auto n = static_cast<std::uint32_t>(free_warps.size());
    while (!pending_.empty()) {
      const std::uint32_t cta = pending_.front();
      const auto need = static_cast<std::uint32_t>(kernel_.ctas[cta].warps.size());
      bool placed = false;
      for (std::uint32_t k = 0; k < n && !placed; ++k) {
        const std::uint32_t sm = (pointer_ + k) % n;
        if (free_warps[sm] >= need && free_ctas[sm] > 0) {
          free_warps[sm] -= need;
          --free_ctas[sm];
          out.push_back({kernel_index_, cta, sm, cycle});
          pointer_ = (sm + 1) % n;
          pending_.pop_front();
          placed = true;
        }
      }
      if (!placed) break;
    }
    return out;
  }

  bool done() const { return pending_.empty(); }

 private:
  const KernelTrace& kernel_;
  std::uint32_t kernel_index_;
  std::deque<std::uint32_t> pending_;
  std::uint32_t pointer_ = 0;
};

// Replays a whole run cycle by cycle and compares every placement the engine
// makes with RoundRobinIssue. Capacity before issue is reconstructed from
// the post-issue occupancy minus the CTAs the engine just placed.
// Returns an empty string on agreement, else a description of the mismatch.
inline std::string check_placements(const GpuConfig& cfg, const TraceProgram& program,
                                    SchedulePolicy policy) {
  std::string error;
  std::size_t seen = 0;
  std::unique_ptr<RoundRobinIssue> model;

  auto compare = [&](const Engine& e) {
    if (!error.empty()) return;
    const auto& log = e.placements();
    std::vector<std::uint32_t> free_warps, free_ctas;
    for (const auto& sm : e.sms()) {
      free_warps.push_back(cfg.warps_per_sm - sm.resident_warps());
      free_ctas.push_back(cfg.max_ctas_per_sm - sm.resident_ctas());
    }
    for (std::size_t i = seen; i < log.size(); ++i) {
      const auto& p = log[i];
      free_warps[p.sm] += static_cast<std::uint32_t>(
          program.kernels[p.kernel].ctas[p.cta].warps.size());
      free_ctas[p.sm] += 1;
    }
    auto want = model->step(free_warps, free_ctas, e.gpu_cycle());
    std::vector<CtaPlacement> got(log.begin() + static_cast<std::ptrdiff_t>(seen), log.end());
    if (got != want) {
      std::ostringstream os;
      os << "cycle " << e.gpu_cycle() << ": engine placed " << got.size()
         << " CTA(s), oracle " << want.size();
      for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
        if (!(got[i] == want[i])) {
          os << "; first difference: CTA " << got[i].cta << " on SM " << got[i].sm
             << " vs CTA " << want[i].cta << " on SM " << want[i].sm;
          break;
        }
      }
      error = os.str();
    }
    seen = log.size();
  };

  EngineOptions opts;
  opts.time_phases = false;
  opts.after_cycle = compare;
  Engine engine(cfg, program, policy, opts);
  for (std::size_t k = 0; k < program.kernels.size() && error.empty(); ++k) {
    model = std::make_unique<RoundRobinIssue>(program.kernels[k], static_cast<std::uint32_t>(k));
    engine.begin_kernel(k);
    compare(engine);  // the issue inside begin_kernel
    while (!engine.kernel_done() && error.empty()) engine.cycle();
    if (error.empty() && !model->done()) error = "oracle still holds pending CTAs at kernel end";
    engine.end_kernel();
  }
  return error;
}

// Per-cycle conservation checks hooked into Engine::after_cycle.
struct ConservationChecker {
  std::string error;
  std::uint64_t checks = 0;

  void operator()(const Engine& e) {
    ++checks;
    if (!error.empty()) return;
    const auto& m = e.icnt().toward_mem_counters();
    const auto& s = e.icnt().toward_sm_counters();
    if (m.injected != m.delivered + e.icnt().queued_toward_mem()) {
      error = "toward-memory packets not conserved at cycle " + std::to_string(e.gpu_cycle());
    } else if (s.injected != s.delivered + e.icnt().queued_toward_sm()) {
      error = "toward-SM packets not conserved at cycle " + std::to_string(e.gpu_cycle());
    }
  }

  // At a kernel boundary nothing may remain in flight anywhere.
  void at_kernel_end(const Engine& e) {
    if (!error.empty()) return;
    if (!e.icnt().is_empty()) error = "interconnect not empty at kernel end";
    for (const auto& sm : e.sms())
      if (!sm.is_idle()) error = "SM " + std::to_string(sm.id()) + " busy at kernel end";
    for (const auto& mp : e.partitions())
      if (!mp.is_idle()) error = "partition " + std::to_string(mp.id) + " busy at kernel end";
  }
};

inline std::uint64_t reported_instructions(const CounterArray& c) {
  return c[static_cast<std::size_t>(Counter::InstructionsAlu)] +
         c[static_cast<std::size_t>(Counter::InstructionsLd)] +
         c[static_cast<std::size_t>(Counter::InstructionsSt)] +
         c[static_cast<std::size_t>(Counter::InstructionsBar)] +
         c[static_cast<std::size_t>(Counter::InstructionsExit)];
}

// Runs the program with the conservation checker attached; also checks that
// each kernel retires exactly the instructions its trace holds and that the
// L2 sees exactly the L1 load misses plus the stores.
inline std::string check_conservation(const GpuConfig& cfg, const TraceProgram& program,
                                      SchedulePolicy policy) {
  ConservationChecker checker;
  EngineOptions opts;
  opts.time_phases = false;
  opts.after_cycle = [&checker](const Engine& e) { checker(e); };
  Engine engine(cfg, program, policy, opts);
  for (std::size_t k = 0; k < program.kernels.size(); ++k) {
    engine.begin_kernel(k);
    while (!engine.kernel_done()) engine.cycle();
    checker.at_kernel_end(engine);
    GpuStats ks = engine.end_kernel();
    if (!checker.error.empty()) return "kernel " + std::to_string(k) + ": " + checker.error;
    std::uint64_t expected = 0;
    for (const auto& c : program.kernels[k].ctas) expected += c.instruction_count();
    if (reported_instructions(ks.totals) != expected) {
      return "kernel " + std::to_string(k) + ": " + std::to_string(reported_instructions(ks.totals)) +
             " instructions reported, trace holds " + std::to_string(expected);
    }
    const std::uint64_t l2_expected =
        ks.total(Counter::L1Misses) + ks.total(Counter::InstructionsSt);
    if (ks.memory.l2_accesses != l2_expected) {
      return "kernel " + std::to_string(k) + ": l2_accesses " +
             std::to_string(ks.memory.l2_accesses) + " != l1_misses + stores " +
             std::to_string(l2_expected);
    }
  }
  return {};
}

}  // namespace gpusim::oracle
