#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace gpusim {

// Closed registry of per-SM counters. This is a representative subset of
// what a full simulator reports, not an exhaustive list.
enum class Counter : std::uint8_t {
  InstructionsAlu,
  InstructionsLd,
  InstructionsSt,
  InstructionsBar,
  InstructionsExit,
  L1Hits,
  L1Misses,      // load misses that sent a request toward L2
  L1MshrMerges,  // load misses folded into an outstanding request
  ActiveCycles,
  IssuedCtas,
  StallCyclesMem,
  StallCyclesExec,
};
inline constexpr std::size_t kNumCounters = 12;

std::string_view counter_name(Counter c);

using CounterArray = std::array<std::uint64_t, kNumCounters>;

// Statistics owned by exactly one SM. Nothing outside that SM writes here
// while SMs are cycling; the engine reduces all sheets after each kernel.
class StatSheet {
 public:
  void add(Counter c, std::uint64_t n = 1) { counters_[static_cast<std::size_t>(c)] += n; }
  std::uint64_t get(Counter c) const { return counters_[static_cast<std::size_t>(c)]; }
  const CounterArray& counters() const { return counters_; }

  // Line-aligned addresses touched by this SM's memory instructions.
  void touch_line(std::uint64_t line_addr) { unique_lines_.insert(line_addr); }
  const std::unordered_set<std::uint64_t>& unique_lines() const { return unique_lines_; }

  void reset() {
    counters_.fill(0);
    unique_lines_.clear();
  }

 private:
  CounterArray counters_{};
  std::unordered_set<std::uint64_t> unique_lines_;
};

// Memory-side counters. Only the sequential phases touch them, so a single
// global instance is enough.
struct MemoryStats {
  std::uint64_t l2_accesses = 0;
  std::uint64_t l2_hits = 0;
  std::uint64_t l2_misses = 0;
  std::uint64_t l2_dirty_evictions = 0;
  std::uint64_t dram_accesses = 0;

  MemoryStats& operator+=(const MemoryStats& o);
  friend bool operator==(const MemoryStats&, const MemoryStats&) = default;
};

struct KernelReport {
  std::string name;
  std::uint64_t cycles = 0;
  CounterArray totals{};
  std::uint64_t unique_line_count = 0;
  MemoryStats memory;
};

struct GpuStats {
  std::uint64_t cycles = 0;
  CounterArray totals{};
  std::vector<CounterArray> per_sm;
  // Sorted union of every SM's unique lines.
  std::vector<std::uint64_t> unique_lines;
  MemoryStats memory;
  std::vector<KernelReport> kernels;

  std::uint64_t total(Counter c) const { return totals[static_cast<std::size_t>(c)]; }
  std::uint64_t unique_line_count() const { return unique_lines.size(); }
  std::uint64_t instructions() const;
  double ipc() const;

  // Folds one kernel's reduction into a whole-run report.
  void append_kernel(std::string name, const GpuStats& kernel);
};

// Sums counters and unions line sets in ascending SM order.
GpuStats reduce(std::span<const StatSheet> sheets, const MemoryStats& memory, std::uint64_t cycles);

// Canonical text: `key = value` lines sorted lexicographically by key.
std::string render_report(const GpuStats& stats);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Returns the first key (in canonical order) whose value differs or that is
// present in only one report; nullopt when both are identical.
// Throws ReportError when either text is not in canonical form.
std::optional<std::string> diff_reports(std::string_view a, std::string_view b);

std::string report_digest(std::string_view report);

}  // namespace gpusim
