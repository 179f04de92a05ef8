#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpusim/config.hpp"

namespace gpusim {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InstKind : std::uint8_t { Alu, Ld, St, Bar, Exit };
inline constexpr std::size_t kNumInstKinds = 5;

std::string_view to_string(InstKind kind);

// `latency` is meaningful for ALU only; `addr`/`size` for LD/ST only.
struct TraceInstruction {
  std::uint32_t pc = 0;
  InstKind kind = InstKind::Exit;
  std::uint32_t latency = 0;
  std::uint64_t addr = 0;
  std::uint32_t size = 0;

  static TraceInstruction alu(std::uint32_t latency) { return {0, InstKind::Alu, latency, 0, 0}; }
  static TraceInstruction load(std::uint64_t addr, std::uint32_t size) {
    return {0, InstKind::Ld, 0, addr, size};
  }
  static TraceInstruction store(std::uint64_t addr, std::uint32_t size) {
    return {0, InstKind::St, 0, addr, size};
  }
  static TraceInstruction bar() { return {0, InstKind::Bar, 0, 0, 0}; }
  static TraceInstruction exit() { return {0, InstKind::Exit, 0, 0, 0}; }

  friend bool operator==(const TraceInstruction&, const TraceInstruction&) = default;
};

struct WarpTrace {
  std::uint32_t warp_id = 0;
  std::vector<TraceInstruction> instructions;
  friend bool operator==(const WarpTrace&, const WarpTrace&) = default;
};

struct CtaTrace {
  std::uint32_t cta_id = 0;
  std::vector<WarpTrace> warps;

  std::uint64_t instruction_count() const;
  friend bool operator==(const CtaTrace&, const CtaTrace&) = default;
};

struct KernelTrace {
  std::string name;
  std::vector<CtaTrace> ctas;
  friend bool operator==(const KernelTrace&, const KernelTrace&) = default;
};

// Kernels run strictly in list order, one at a time.
struct TraceProgram {
  std::vector<KernelTrace> kernels;

  std::uint64_t instruction_count() const;
  friend bool operator==(const TraceProgram&, const TraceProgram&) = default;
};

// Assigns pcs in list order; structural checks only (EXIT placement, ids).
TraceProgram parse_trace(std::string_view text);
TraceProgram load_trace_file(const std::string& path);
std::string render_trace(const TraceProgram& program);

// Checks the program against a machine: warps per CTA and access sizes.
void validate_trace(const TraceProgram& program, const GpuConfig& cfg);

struct TraceSummary {
  std::vector<std::size_t> ctas_per_kernel;
  std::array<std::uint64_t, kNumInstKinds> per_kind{};
  std::uint64_t total_instructions = 0;

  std::uint64_t count(InstKind k) const { return per_kind[static_cast<std::size_t>(k)]; }
};

TraceSummary trace_stats(const TraceProgram& program);

// Synthetic workload archetypes. Instruction mixes are invented; each preset
// reproduces one workload class: a kernel with only two CTAs, uniformly sized
// CTAs, long-tailed CTA sizes, and a load/store dominated stream.
enum class Preset { TwoCta, Balanced, Imbalanced, MemoryHeavy };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);

// Deterministic function of its arguments, independent of platform.
TraceProgram generate_workload(Preset preset, std::uint64_t seed, std::uint32_t scale);

// Named workload sizes.
inline constexpr std::uint32_t kScaleSmall = 1;
inline constexpr std::uint32_t kScaleMedium = 4;
inline constexpr std::uint32_t kScaleLarge = 16;

// Closed form for the balanced preset's total instruction count.
std::uint64_t balanced_instruction_count(std::uint32_t scale);

}  // namespace gpusim
