#include "gpusim/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace gpusim {

std::string_view to_string(InstKind kind) {
  switch (kind) {
    case InstKind::Alu: return "ALU";
    case InstKind::Ld: return "LD";
    case InstKind::St: return "ST";
    case InstKind::Bar: return "BAR";
    case InstKind::Exit: return "EXIT";
  }
  return "?";
}

std::uint64_t CtaTrace::instruction_count() const {
  std::uint64_t n = 0;
  for (const auto& w : warps) n += w.instructions.size();
  return n;
}

std::uint64_t TraceProgram::instruction_count() const {
  std::uint64_t n = 0;
  for (const auto& k : kernels)
    for (const auto& c : k.ctas) n += c.instruction_count();
  return n;
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw TraceError("line " + std::to_string(line) + ": " + msg);
}

std::uint64_t number(std::size_t line, std::string_view tok, std::string_view what) {
  auto v = detail::parse_uint(tok);
  if (!v) fail(line, "invalid " + std::string(what) + " '" + std::string(tok) + "'");
  return *v;
}

void check_warp_closed(const WarpTrace* warp, std::size_t line) {
  if (warp == nullptr) return;
  if (warp->instructions.empty() || warp->instructions.back().kind != InstKind::Exit) {
    fail(line, "warp " + std::to_string(warp->warp_id) + " does not end with EXIT");
  }
}

}  // namespace

TraceProgram parse_trace(std::string_view text) {
  TraceProgram program;
  KernelTrace* kernel = nullptr;
  CtaTrace* cta = nullptr;
  WarpTrace* warp = nullptr;
  std::size_t line_no = 0;

  auto close_cta = [&](std::size_t line) {
    check_warp_closed(warp, line);
    if (cta != nullptr && cta->warps.empty()) {
      fail(line, "CTA " + std::to_string(cta->cta_id) + " has no warps");
    }
  };

  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    auto tokens = detail::split_ws(detail::trim(detail::strip_comment(raw)));
    if (tokens.empty()) continue;
    std::string_view op = tokens[0];
    auto expect_args = [&](std::size_t n) {
      if (tokens.size() != n + 1) {
        fail(line_no, std::string(op) + " expects " + std::to_string(n) + " argument(s)");
      }
    };

    if (op == "KERNEL") {
      expect_args(1);
      close_cta(line_no);
      program.kernels.push_back(KernelTrace{std::string(tokens[1]), {}});
      kernel = &program.kernels.back();
      cta = nullptr;
      warp = nullptr;
    } else if (op == "CTA") {
      expect_args(1);
      if (kernel == nullptr) fail(line_no, "CTA outside of a KERNEL");
      close_cta(line_no);
      auto id = number(line_no, tokens[1], "CTA id");
      if (id != kernel->ctas.size()) {
        fail(line_no, "CTA ids must be consecutive from 0 (expected " +
                          std::to_string(kernel->ctas.size()) + ")");
      }
      kernel->ctas.push_back(CtaTrace{static_cast<std::uint32_t>(id), {}});
      cta = &kernel->ctas.back();
      warp = nullptr;
    } else if (op == "WARP") {
      expect_args(1);
      if (cta == nullptr) fail(line_no, "WARP outside of a CTA");
      check_warp_closed(warp, line_no);
      auto id = number(line_no, tokens[1], "warp id");
      if (id != cta->warps.size()) {
        fail(line_no, "warp ids must be consecutive from 0 (expected " +
                          std::to_string(cta->warps.size()) + ")");
      }
      cta->warps.push_back(WarpTrace{static_cast<std::uint32_t>(id), {}});
      warp = &cta->warps.back();
    } else {
      if (warp == nullptr) fail(line_no, "instruction outside of a WARP");
      if (!warp->instructions.empty() && warp->instructions.back().kind == InstKind::Exit) {
        fail(line_no, "instruction after EXIT");
      }
      TraceInstruction inst;
      if (op == "ALU") {
        expect_args(1);
        auto lat = number(line_no, tokens[1], "latency");
        if (lat == 0 || lat > UINT32_MAX) fail(line_no, "ALU latency must be positive");
        inst = TraceInstruction::alu(static_cast<std::uint32_t>(lat));
      } else if (op == "LD" || op == "ST") {
        expect_args(2);
        auto addr = number(line_no, tokens[1], "address");
        auto size = number(line_no, tokens[2], "size");
        if (size == 0 || size > UINT32_MAX) fail(line_no, "access size must be positive");
        inst = op == "LD" ? TraceInstruction::load(addr, static_cast<std::uint32_t>(size))
                          : TraceInstruction::store(addr, static_cast<std::uint32_t>(size));
      } else if (op == "BAR") {
        expect_args(0);
        inst = TraceInstruction::bar();
      } else if (op == "EXIT") {
        expect_args(0);
        inst = TraceInstruction::exit();
      } else {
        fail(line_no, "unknown directive '" + std::string(op) + "'");
      }
      inst.pc = static_cast<std::uint32_t>(warp->instructions.size());
      warp->instructions.push_back(inst);
    }
  }
  close_cta(line_no);
  return program;
}

TraceProgram load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

std::string render_trace(const TraceProgram& program) {
  std::string out;
  out.reserve(program.instruction_count() * 12);
  char buf[64];
  for (const auto& k : program.kernels) {
    out += "KERNEL ";
    out += k.name;
    out += '\n';
    for (const auto& c : k.ctas) {
      out += "CTA " + std::to_string(c.cta_id) + '\n';
      for (const auto& w : c.warps) {
        out += "WARP " + std::to_string(w.warp_id) + '\n';
        for (const auto& i : w.instructions) {
          switch (i.kind) {
            case InstKind::Alu:
              std::snprintf(buf, sizeof buf, "ALU %u\n", i.latency);
              break;
            case InstKind::Ld:
            case InstKind::St:
              std::snprintf(buf, sizeof buf, "%s 0x%llx %u\n", i.kind == InstKind::Ld ? "LD" : "ST",
                            static_cast<unsigned long long>(i.addr), i.size);
              break;
            case InstKind::Bar:
              std::snprintf(buf, sizeof buf, "BAR\n");
              break;
            case InstKind::Exit:
              std::snprintf(buf, sizeof buf, "EXIT\n");
              break;
          }
          out += buf;
        }
      }
    }
  }
  return out;
}

void validate_trace(const TraceProgram& program, const GpuConfig& cfg) {
  for (std::size_t k = 0; k < program.kernels.size(); ++k) {
    const auto& kernel = program.kernels[k];
    for (const auto& cta : kernel.ctas) {
      const std::string where =
          "kernel " + kernel.name + " CTA " + std::to_string(cta.cta_id);
      if (cta.warps.empty()) throw TraceError(where + ": CTA has no warps");
      if (cta.warps.size() > cfg.warps_per_sm) {
        throw TraceError(where + ": warps per CTA exceeds warps_per_sm (" +
                         std::to_string(cta.warps.size()) + " > " +
                         std::to_string(cfg.warps_per_sm) + ")");
      }
      for (const auto& w : cta.warps) {
        if (w.instructions.empty() || w.instructions.back().kind != InstKind::Exit) {
          throw TraceError(where + ": warp does not end with EXIT");
        }
        for (std::size_t i = 0; i < w.instructions.size(); ++i) {
          const auto& inst = w.instructions[i];
          if (inst.kind == InstKind::Exit && i + 1 != w.instructions.size()) {
            throw TraceError(where + ": EXIT before end of warp");
          }
          if (inst.kind == InstKind::Alu && inst.latency == 0) {
            throw TraceError(where + ": ALU latency must be positive");
          }
          if ((inst.kind == InstKind::Ld || inst.kind == InstKind::St) &&
              (inst.size == 0 || inst.size > cfg.l1d_line_bytes)) {
            throw TraceError(where + ": access size must be in [1, l1d_line_bytes]");
          }
        }
      }
    }
  }
}

TraceSummary trace_stats(const TraceProgram& program) {
  TraceSummary s;
  for (const auto& k : program.kernels) {
    s.ctas_per_kernel.push_back(k.ctas.size());
    for (const auto& c : k.ctas)
      for (const auto& w : c.warps)
        for (const auto& i : w.instructions) {
          ++s.per_kind[static_cast<std::size_t>(i.kind)];
          ++s.total_instructions;
        }
  }
  return s;
}

}  // namespace gpusim
