#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gpusim {

// Raised for malformed or inconsistent machine descriptions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Machine description. Defaults reproduce an RTX 3080 Ti class GPU
// (1365/9500 MHz, 80 SMs, 48 warps/SM, 128 KiB L1D, 24 partitions, 6 MiB L2).
// Associativities, line sizes and latencies are not published for that part;
// the values below are modeling choices.
struct GpuConfig {
  std::uint32_t core_clock_mhz = 1365;
  std::uint32_t mem_clock_mhz = 9500;

  std::uint32_t num_sms = 80;
  std::uint32_t warps_per_sm = 48;
  std::uint32_t sub_cores_per_sm = 4;
  std::uint32_t max_ctas_per_sm = 32;

  std::uint64_t l1d_size_bytes = 128 * 1024;
  std::uint32_t l1d_assoc = 4;
  std::uint32_t l1d_line_bytes = 128;

  std::uint64_t l2_total_size_bytes = 6 * 1024 * 1024;
  std::uint32_t l2_assoc = 16;
  std::uint32_t l2_line_bytes = 128;

  std::uint32_t num_mem_partitions = 24;
  std::uint32_t sub_partitions_per_partition = 2;

  std::uint32_t icnt_latency_cycles = 8;
  std::uint32_t icnt_bw_per_dest_per_cycle = 1;
  // Requests a sub-partition can hold between the interconnect and its L2 slice.
  std::uint32_t l2_inbox_capacity = 8;

  std::uint32_t l1_hit_latency = 4;
  std::uint32_t l2_hit_latency = 40;
  std::uint32_t dram_latency = 120;
  std::uint32_t dram_queue_capacity = 32;

  friend bool operator==(const GpuConfig&, const GpuConfig&) = default;
};

struct CacheGeometry {
  std::uint32_t num_sub_partitions = 0;
  std::uint64_t l2_slice_bytes = 0;
  std::uint64_t l1d_sets = 0;
  std::uint64_t l2_slice_sets = 0;
  std::uint32_t warps_per_sub_core = 0;
};

// Throws ConfigError naming the offending field or invariant.
void validate(const GpuConfig& cfg);

// Parses a `key = value` document; keys absent from the text keep their
// defaults. Sizes accept KiB/MiB/GiB suffixes.
GpuConfig parse_config(std::string_view text);
GpuConfig load_config_file(const std::string& path);

// Canonical rendering, one key per line in declaration order.
std::string render_config(const GpuConfig& cfg);

CacheGeometry derived_geometry(const GpuConfig& cfg);

}  // namespace gpusim
