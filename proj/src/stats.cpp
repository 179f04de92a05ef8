#include "gpusim/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "text_util.hpp"

namespace gpusim {

std::string_view counter_name(Counter c) {
  switch (c) {
    case Counter::InstructionsAlu: return "instructions_alu";
    case Counter::InstructionsLd: return "instructions_ld";
    case Counter::InstructionsSt: return "instructions_st";
    case Counter::InstructionsBar: return "instructions_bar";
    case Counter::InstructionsExit: return "instructions_exit";
    case Counter::L1Hits: return "l1_hits";
    case Counter::L1Misses: return "l1_misses";
    case Counter::L1MshrMerges: return "l1_mshr_merges";
    case Counter::ActiveCycles: return "active_cycles";
    case Counter::IssuedCtas: return "issued_ctas";
    case Counter::StallCyclesMem: return "stall_cycles_mem";
    case Counter::StallCyclesExec: return "stall_cycles_exec";
  }
  return "?";
}

MemoryStats& MemoryStats::operator+=(const MemoryStats& o) {
  l2_accesses += o.l2_accesses;
  l2_hits += o.l2_hits;
  l2_misses += o.l2_misses;
  l2_dirty_evictions += o.l2_dirty_evictions;
  dram_accesses += o.dram_accesses;
  return *this;
}

namespace {

std::uint64_t instruction_sum(const CounterArray& c) {
  std::uint64_t n = 0;
  for (Counter k : {Counter::InstructionsAlu, Counter::InstructionsLd, Counter::InstructionsSt,
                    Counter::InstructionsBar, Counter::InstructionsExit}) {
    n += c[static_cast<std::size_t>(k)];
  }
  return n;
}

std::string format_ratio(std::uint64_t num, std::uint64_t den) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", den == 0 ? 0.0 : static_cast<double>(num) / den);
  return buf;
}

void put_counters(std::map<std::string, std::string>& kv, const std::string& prefix,
                  const CounterArray& c) {
  for (std::size_t i = 0; i < kNumCounters; ++i) {
    kv[prefix + std::string(counter_name(static_cast<Counter>(i)))] = std::to_string(c[i]);
  }
}

void put_memory(std::map<std::string, std::string>& kv, const std::string& prefix,
                const MemoryStats& m) {
  kv[prefix + "dram_accesses"] = std::to_string(m.dram_accesses);
  kv[prefix + "l2_accesses"] = std::to_string(m.l2_accesses);
  kv[prefix + "l2_dirty_evictions"] = std::to_string(m.l2_dirty_evictions);
  kv[prefix + "l2_hits"] = std::to_string(m.l2_hits);
  kv[prefix + "l2_misses"] = std::to_string(m.l2_misses);
}

}  // namespace

std::uint64_t GpuStats::instructions() const { return instruction_sum(totals); }

double GpuStats::ipc() const {
  return cycles == 0 ? 0.0 : static_cast<double>(instructions()) / static_cast<double>(cycles);
}

void GpuStats::append_kernel(std::string name, const GpuStats& kernel) {
  KernelReport report;
  report.name = std::move(name);
  report.cycles = kernel.cycles;
  report.totals = kernel.totals;
  report.unique_line_count = kernel.unique_line_count();
  report.memory = kernel.memory;
  kernels.push_back(std::move(report));

  cycles += kernel.cycles;
  for (std::size_t i = 0; i < kNumCounters; ++i) totals[i] += kernel.totals[i];
  if (per_sm.size() < kernel.per_sm.size()) per_sm.resize(kernel.per_sm.size());
  for (std::size_t s = 0; s < kernel.per_sm.size(); ++s)
    for (std::size_t i = 0; i < kNumCounters; ++i) per_sm[s][i] += kernel.per_sm[s][i];
  memory += kernel.memory;

  std::vector<std::uint64_t> merged;
  merged.reserve(unique_lines.size() + kernel.unique_lines.size());
  std::set_union(unique_lines.begin(), unique_lines.end(), kernel.unique_lines.begin(),
                 kernel.unique_lines.end(), std::back_inserter(merged));
  unique_lines = std::move(merged);
}

GpuStats reduce(std::span<const StatSheet> sheets, const MemoryStats& memory,
                std::uint64_t cycles) {
  GpuStats gs;
  gs.cycles = cycles;
  gs.memory = memory;
  gs.per_sm.reserve(sheets.size());
  std::size_t line_total = 0;
  for (const auto& sheet : sheets) {
    gs.per_sm.push_back(sheet.counters());
    for (std::size_t i = 0; i < kNumCounters; ++i) gs.totals[i] += sheet.counters()[i];
    line_total += sheet.unique_lines().size();
  }
  gs.unique_lines.reserve(line_total);
  for (const auto& sheet : sheets) {
    gs.unique_lines.insert(gs.unique_lines.end(), sheet.unique_lines().begin(),
                           sheet.unique_lines().end());
  }
  std::sort(gs.unique_lines.begin(), gs.unique_lines.end());
  gs.unique_lines.erase(std::unique(gs.unique_lines.begin(), gs.unique_lines.end()),
                        gs.unique_lines.end());
  return gs;
}

std::string render_report(const GpuStats& gs) {
  std::map<std::string, std::string> kv;
  kv["cycles"] = std::to_string(gs.cycles);
  kv["instructions_total"] = std::to_string(gs.instructions());
  kv["ipc"] = format_ratio(gs.instructions(), gs.cycles);
  kv["unique_line_count"] = std::to_string(gs.unique_line_count());
  kv["kernels"] = std::to_string(gs.kernels.size());
  put_counters(kv, "", gs.totals);
  put_memory(kv, "", gs.memory);
  for (std::size_t k = 0; k < gs.kernels.size(); ++k) {
    const auto& kr = gs.kernels[k];
    const std::string prefix = "kernel." + std::to_string(k) + ".";
    kv[prefix + "name"] = kr.name;
    kv[prefix + "cycles"] = std::to_string(kr.cycles);
    kv[prefix + "unique_line_count"] = std::to_string(kr.unique_line_count);
    put_counters(kv, prefix, kr.totals);
    put_memory(kv, prefix, kr.memory);
  }
  for (std::size_t s = 0; s < gs.per_sm.size(); ++s) {
    put_counters(kv, "sm." + std::to_string(s) + ".", gs.per_sm[s]);
  }

  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::pair<std::string_view, std::string_view>> parse_report(std::string_view text,
                                                                         const char* which) {
  std::vector<std::pair<std::string_view, std::string_view>> entries;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    auto sep = line.find(" = ");
    if (sep == std::string_view::npos || sep == 0) {
      throw ReportError(std::string(which) + " report line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    std::string_view key = line.substr(0, sep);
    std::string_view value = line.substr(sep + 3);
    if (!entries.empty() && !(entries.back().first < key)) {
      throw ReportError(std::string(which) + " report line " + std::to_string(line_no) +
                        ": keys not in canonical order at '" + std::string(key) + "'");
    }
    entries.emplace_back(key, value);
  }
  return entries;
}

}  // namespace

std::optional<std::string> diff_reports(std::string_view a, std::string_view b) {
  auto ea = parse_report(a, "first");
  auto eb = parse_report(b, "second");
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first != eb[j].first) {
      return std::string(std::min(ea[i].first, eb[j].first));
    }
    if (ea[i].second != eb[j].second) return std::string(ea[i].first);
    ++i;
    ++j;
  }
  if (i < ea.size()) return std::string(ea[i].first);
  if (j < eb.size()) return std::string(eb[j].first);
  return std::nullopt;
}

std::string report_digest(std::string_view report) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : report) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gpusim
