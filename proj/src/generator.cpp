#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gpusim/trace.hpp"

namespace gpusim {

namespace {

// Preset shapes. Access sizes stay at 4 bytes so any line size >= 4 accepts them.
constexpr std::uint32_t kAccessBytes = 4;
constexpr std::uint64_t kLine = 128;

constexpr std::uint32_t kBalancedCtas = 320;
constexpr std::uint32_t kBalancedWarps = 12;
constexpr std::uint32_t kBalancedBody = 32;
constexpr std::uint64_t kBalancedLines = 512;

constexpr std::uint32_t kTwoCtaKernels = 2;
constexpr std::uint32_t kTwoCtaWarps = 8;
constexpr std::uint32_t kTwoCtaBody = 256;

constexpr std::uint32_t kImbalancedCtas = 48;
constexpr std::uint32_t kImbalancedWarps = 8;
constexpr std::uint32_t kImbalancedBody = 24;
constexpr std::uint32_t kImbalancedHeavy = 8;

constexpr std::uint32_t kMemoryCtas = 160;
constexpr std::uint32_t kMemoryWarps = 4;
constexpr std::uint32_t kMemoryBody = 32;
constexpr std::uint64_t kMemoryLines = 4096;

// std::mt19937_64 output is fully specified by the standard; the standard
// distributions are not, so bounded draws are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0); }

 private:
  std::mt19937_64 engine_;
};

// Percentages of the non-barrier body.
struct Mix {
  std::uint32_t alu_pct;
  std::uint32_t ld_pct;
  std::uint32_t max_alu_latency;
};

struct Region {
  std::uint64_t base;
  std::uint64_t lines;
};

// `body` counts every instruction except the trailing EXIT, including one
// BAR placed at the midpoint.
WarpTrace make_warp(Rng& rng, std::uint32_t warp_id, std::uint32_t body, const Mix& mix,
                    const Region& region) {
  WarpTrace w;
  w.warp_id = warp_id;
  w.instructions.reserve(body + 1);
  const std::uint32_t bar_at = body / 2;
  for (std::uint32_t i = 0; i < body; ++i) {
    if (i == bar_at) {
      w.instructions.push_back(TraceInstruction::bar());
      continue;
    }
    auto roll = static_cast<std::uint32_t>(rng.below(100));
    if (roll < mix.alu_pct) {
      auto lat = static_cast<std::uint32_t>(1 + rng.below(mix.max_alu_latency));
      w.instructions.push_back(TraceInstruction::alu(lat));
    } else {
      std::uint64_t addr = region.base + rng.below(region.lines) * kLine +
                           rng.below(kLine / kAccessBytes) * kAccessBytes;
      if (roll < mix.alu_pct + mix.ld_pct) {
        w.instructions.push_back(TraceInstruction::load(addr, kAccessBytes));
      } else {
        w.instructions.push_back(TraceInstruction::store(addr, kAccessBytes));
      }
    }
  }
  w.instructions.push_back(TraceInstruction::exit());
  for (std::uint32_t i = 0; i < w.instructions.size(); ++i) w.instructions[i].pc = i;
  return w;
}

CtaTrace make_cta(Rng& rng, std::uint32_t cta_id, std::uint32_t warps, std::uint32_t body,
                  const Mix& mix, const Region& region) {
  CtaTrace c;
  c.cta_id = cta_id;
  for (std::uint32_t w = 0; w < warps; ++w) c.warps.push_back(make_warp(rng, w, body, mix, region));
  return c;
}

TraceProgram two_cta(Rng& rng, std::uint32_t scale) {
  const Mix mix{85, 10, 8};
  TraceProgram p;
  for (std::uint32_t k = 0; k < kTwoCtaKernels; ++k) {
    KernelTrace kernel{"two_cta_k" + std::to_string(k), {}};
    for (std::uint32_t c = 0; c < 2; ++c) {
      Region region{(std::uint64_t{k} * 2 + c) << 20, 256};
      kernel.ctas.push_back(make_cta(rng, c, kTwoCtaWarps, kTwoCtaBody * scale, mix, region));
    }
    p.kernels.push_back(std::move(kernel));
  }
  return p;
}

TraceProgram balanced(Rng& rng, std::uint32_t scale) {
  const Mix mix{90, 7, 6};
  KernelTrace kernel{"balanced", {}};
  // Every CTA reads the same input tile, so after warm-up most accesses hit.
  const Region region{0, kBalancedLines};
  for (std::uint32_t c = 0; c < kBalancedCtas; ++c) {
    kernel.ctas.push_back(make_cta(rng, c, kBalancedWarps, kBalancedBody * scale, mix, region));
  }
  TraceProgram p;
  p.kernels.push_back(std::move(kernel));
  return p;
}

// Most CTAs run the base length; a few heavy ones run a Pareto-distributed
// multiple of it, one of them pinned at 16x so max/median >= 10 always holds.
TraceProgram imbalanced(Rng& rng, std::uint32_t scale) {
  const Mix mix{88, 8, 8};
  std::vector<std::uint32_t> factor(kImbalancedCtas, 1);
  std::vector<std::uint32_t> order(kImbalancedCtas);
  std::iota(order.begin(), order.end(), 0u);
  for (std::uint32_t i = kImbalancedCtas - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  for (std::uint32_t h = 0; h < kImbalancedHeavy; ++h) {
    std::uint32_t f = 16;
    if (h != 0) {
      double u = 1.0 - rng.unit();  // (0, 1]
      f = static_cast<std::uint32_t>(std::clamp(2.0 / std::pow(u, 1.0 / 1.2), 2.0, 32.0));
    }
    factor[order[h]] = f;
  }
  KernelTrace kernel{"imbalanced", {}};
  for (std::uint32_t c = 0; c < kImbalancedCtas; ++c) {
    Region region{std::uint64_t{c} << 16, 64};
    kernel.ctas.push_back(
        make_cta(rng, c, kImbalancedWarps, kImbalancedBody * scale * factor[c], mix, region));
  }
  TraceProgram p;
  p.kernels.push_back(std::move(kernel));
  return p;
}

TraceProgram memory_heavy(Rng& rng, std::uint32_t scale) {
  const Mix mix{30, 60, 4};
  const Region region{0, kMemoryLines * scale};
  KernelTrace kernel{"memory_heavy", {}};
  for (std::uint32_t c = 0; c < kMemoryCtas; ++c) {
    kernel.ctas.push_back(make_cta(rng, c, kMemoryWarps, kMemoryBody * scale, mix, region));
  }
  TraceProgram p;
  p.kernels.push_back(std::move(kernel));
  return p;
}

}  // namespace

Preset parse_preset(std::string_view name) {
  if (name == "two_cta") return Preset::TwoCta;
  if (name == "balanced") return Preset::Balanced;
  if (name == "imbalanced") return Preset::Imbalanced;
  if (name == "memory_heavy") return Preset::MemoryHeavy;
  throw TraceError("unknown preset: " + std::string(name));
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::TwoCta: return "two_cta";
    case Preset::Balanced: return "balanced";
    case Preset::Imbalanced: return "imbalanced";
    case Preset::MemoryHeavy: return "memory_heavy";
  }
  return "?";
}

TraceProgram generate_workload(Preset preset, std::uint64_t seed, std::uint32_t scale) {
  if (scale == 0) throw TraceError("scale must be positive");
  Rng rng(seed ^ (0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(preset) + 1)));
  switch (preset) {
    case Preset::TwoCta: return two_cta(rng, scale);
    case Preset::Balanced: return balanced(rng, scale);
    case Preset::Imbalanced: return imbalanced(rng, scale);
    case Preset::MemoryHeavy: return memory_heavy(rng, scale);
  }
  throw TraceError("unknown preset");
}

std::uint64_t balanced_instruction_count(std::uint32_t scale) {
  return std::uint64_t{kBalancedCtas} * kBalancedWarps * (std::uint64_t{kBalancedBody} * scale + 1);
}

}  // namespace gpusim
