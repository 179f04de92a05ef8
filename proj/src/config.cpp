#include "gpusim/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "text_util.hpp"

namespace gpusim {

namespace {

template <typename T>
struct Field {
  const char* name;
  T GpuConfig::*member;
};

using U32Field = Field<std::uint32_t>;
using U64Field = Field<std::uint64_t>;

// Order here is the canonical render order.
constexpr std::array kFields32 = {
    U32Field{"core_clock_mhz", &GpuConfig::core_clock_mhz},
    U32Field{"mem_clock_mhz", &GpuConfig::mem_clock_mhz},
    U32Field{"num_sms", &GpuConfig::num_sms},
    U32Field{"warps_per_sm", &GpuConfig::warps_per_sm},
    U32Field{"sub_cores_per_sm", &GpuConfig::sub_cores_per_sm},
    U32Field{"max_ctas_per_sm", &GpuConfig::max_ctas_per_sm},
    U32Field{"l1d_assoc", &GpuConfig::l1d_assoc},
    U32Field{"l1d_line_bytes", &GpuConfig::l1d_line_bytes},
    U32Field{"l2_assoc", &GpuConfig::l2_assoc},
    U32Field{"l2_line_bytes", &GpuConfig::l2_line_bytes},
    U32Field{"num_mem_partitions", &GpuConfig::num_mem_partitions},
    U32Field{"sub_partitions_per_partition", &GpuConfig::sub_partitions_per_partition},
    U32Field{"icnt_latency_cycles", &GpuConfig::icnt_latency_cycles},
    U32Field{"icnt_bw_per_dest_per_cycle", &GpuConfig::icnt_bw_per_dest_per_cycle},
    U32Field{"l2_inbox_capacity", &GpuConfig::l2_inbox_capacity},
    U32Field{"l1_hit_latency", &GpuConfig::l1_hit_latency},
    U32Field{"l2_hit_latency", &GpuConfig::l2_hit_latency},
    U32Field{"dram_latency", &GpuConfig::dram_latency},
    U32Field{"dram_queue_capacity", &GpuConfig::dram_queue_capacity},
};

constexpr std::array kFields64 = {
    U64Field{"l1d_size_bytes", &GpuConfig::l1d_size_bytes},
    U64Field{"l2_total_size_bytes", &GpuConfig::l2_total_size_bytes},
};

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::uint64_t parse_size(std::string_view key, std::string_view value) {
  std::uint64_t multiplier = 1;
  auto strip_suffix = [&](std::string_view suffix, std::uint64_t mult) {
    if (value.size() > suffix.size() && value.ends_with(suffix)) {
      value.remove_suffix(suffix.size());
      value = detail::trim(value);
      multiplier = mult;
      return true;
    }
    return false;
  };
  strip_suffix("KiB", 1ull << 10) || strip_suffix("MiB", 1ull << 20) ||
      strip_suffix("GiB", 1ull << 30);
  auto parsed = detail::parse_uint(value);
  if (!parsed) {
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
  }
  return *parsed * multiplier;
}

void require_positive(std::uint64_t v, const char* name) {
  if (v == 0) throw ConfigError(std::string(name) + " must be positive");
}

}  // namespace

void validate(const GpuConfig& cfg) {
  for (const auto& f : kFields32) {
    if (std::string_view(f.name) == "icnt_latency_cycles") continue;
    require_positive(cfg.*(f.member), f.name);
  }
  for (const auto& f : kFields64) require_positive(cfg.*(f.member), f.name);

  if (!is_pow2(cfg.l1d_line_bytes)) {
    throw ConfigError("invariant violated: l1d_line_bytes power of two");
  }
  if (!is_pow2(cfg.l2_line_bytes)) {
    throw ConfigError("invariant violated: l2_line_bytes power of two");
  }
  if (cfg.warps_per_sm % cfg.sub_cores_per_sm != 0) {
    throw ConfigError("invariant violated: warps_per_sm divisible by sub_cores_per_sm");
  }
  const std::uint64_t subparts =
      std::uint64_t{cfg.num_mem_partitions} * cfg.sub_partitions_per_partition;
  if (cfg.l2_total_size_bytes % subparts != 0) {
    throw ConfigError(
        "invariant violated: l2_total_size_bytes divisible by "
        "num_mem_partitions x sub_partitions_per_partition");
  }
  const std::uint64_t l1_way_bytes = std::uint64_t{cfg.l1d_assoc} * cfg.l1d_line_bytes;
  if (cfg.l1d_size_bytes % l1_way_bytes != 0) {
    throw ConfigError("invariant violated: l1d_size_bytes divisible by l1d_assoc x l1d_line_bytes");
  }
  const std::uint64_t slice = cfg.l2_total_size_bytes / subparts;
  const std::uint64_t l2_way_bytes = std::uint64_t{cfg.l2_assoc} * cfg.l2_line_bytes;
  if (slice % l2_way_bytes != 0 || slice / l2_way_bytes == 0) {
    throw ConfigError("invariant violated: l2 slice size divisible by l2_assoc x l2_line_bytes");
  }
  // Packet ids pack the SM id and per-cycle sequence into 20 bits.
  if (cfg.num_sms > 4096) throw ConfigError("num_sms must be at most 4096");
  if (cfg.sub_cores_per_sm > 255) throw ConfigError("sub_cores_per_sm must be at most 255");
}

GpuConfig parse_config(std::string_view text) {
  GpuConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    std::string_view line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string_view key = detail::trim(line.substr(0, eq));
    std::string_view value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("duplicate key: " + std::string(key));
    }

    bool matched = false;
    for (const auto& f : kFields32) {
      if (key == f.name) {
        std::uint64_t v = parse_size(key, value);
        if (v > UINT32_MAX) throw ConfigError("value out of range for " + std::string(key));
        cfg.*(f.member) = static_cast<std::uint32_t>(v);
        matched = true;
        break;
      }
    }
    if (!matched) {
      for (const auto& f : kFields64) {
        if (key == f.name) {
          cfg.*(f.member) = parse_size(key, value);
          matched = true;
          break;
        }
      }
    }
    if (!matched) throw ConfigError("unknown key: " + std::string(key));
  }
  validate(cfg);
  return cfg;
}

GpuConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const GpuConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : kFields32) out << f.name << " = " << cfg.*(f.member) << '\n';
  for (const auto& f : kFields64) out << f.name << " = " << cfg.*(f.member) << '\n';
  return out.str();
}

CacheGeometry derived_geometry(const GpuConfig& cfg) {
  CacheGeometry g;
  g.num_sub_partitions = cfg.num_mem_partitions * cfg.sub_partitions_per_partition;
  g.l2_slice_bytes = cfg.l2_total_size_bytes / g.num_sub_partitions;
  g.l1d_sets = cfg.l1d_size_bytes / (std::uint64_t{cfg.l1d_assoc} * cfg.l1d_line_bytes);
  g.l2_slice_sets = g.l2_slice_bytes / (std::uint64_t{cfg.l2_assoc} * cfg.l2_line_bytes);
  g.warps_per_sub_core = cfg.warps_per_sm / cfg.sub_cores_per_sm;
  return g;
}

}  // namespace gpusim
