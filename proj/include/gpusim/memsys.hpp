#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "gpusim/cache.hpp"
#include "gpusim/config.hpp"
#include "gpusim/packet.hpp"
#include "gpusim/stats.hpp"

namespace gpusim {

// Line-interleaved mapping of addresses onto L2 sub-partitions. The real
// hardware hash is unpublished; plain modulo interleaving stands in for it.
class AddressMap {
 public:
  AddressMap(std::uint32_t line_bytes, std::uint32_t num_sub_partitions)
      : line_bytes_(line_bytes), num_sub_partitions_(num_sub_partitions) {}
  explicit AddressMap(const GpuConfig& cfg)
      : AddressMap(cfg.l2_line_bytes, derived_geometry(cfg).num_sub_partitions) {}

  std::uint32_t sub_partition(std::uint64_t addr) const {
    return static_cast<std::uint32_t>((addr / line_bytes_) % num_sub_partitions_);
  }
  std::uint32_t num_sub_partitions() const { return num_sub_partitions_; }

 private:
  std::uint32_t line_bytes_;
  std::uint32_t num_sub_partitions_;
};

// One L2 slice with its request and response mailboxes.
struct SubPartition {
  SubPartition(std::uint32_t id, const GpuConfig& cfg);

  std::uint32_t id;
  TagArray l2;
  std::deque<Packet> icnt_inbox;   // requests routed here, bounded
  std::deque<Packet> icnt_outbox;  // responses headed for SMs
  // L2 hits waiting out the hit latency: (ready cycle, response).
  std::deque<std::pair<std::uint64_t, Packet>> hit_pipeline;
  // DRAM fills delivered this cycle, consumed by the next cache_cycle.
  std::vector<Packet> fills;

  bool inbox_full(std::uint32_t capacity) const { return icnt_inbox.size() >= capacity; }
  bool is_idle() const {
    return icnt_inbox.empty() && icnt_outbox.empty() && hit_pipeline.empty() && fills.empty();
  }
};

struct DramService {
  Packet packet;
  std::uint32_t remaining;
};

// A memory channel: its sub-partitions plus a single-service DRAM queue.
struct MemPartition {
  MemPartition(std::uint32_t id, const GpuConfig& cfg);

  std::uint32_t id;
  std::vector<SubPartition> subs;
  std::deque<Packet> dram_queue;  // bounded by dram_queue_capacity
  std::optional<DramService> dram_in_service;

  bool is_idle() const;
};

// L2 work for one sub-partition for one cycle: install this cycle's DRAM
// fills, release ripe hit responses, then service at most one inbox request.
// A miss that finds the channel queue full blocks the inbox head.
void cache_cycle(MemPartition& mp, std::uint32_t sub_index, std::uint64_t cycle,
                 const GpuConfig& cfg, MemoryStats& stats);

// One DRAM channel cycle: finish the request in service (delivering its fill
// to the owning sub-partition), then start the next queued request.
void dram_cycle(MemPartition& mp, const GpuConfig& cfg);

// Reference LRU model used to check the timing caches: every request is
// resolved before the next one starts. Returns true for hits.
struct CacheShape {
  std::uint64_t sets;
  std::uint32_t assoc;
  std::uint32_t line_bytes;
  std::uint64_t index_stride = 1;
};
std::vector<bool> l2_oracle_check(const std::vector<std::uint64_t>& addrs, const CacheShape& shape);

}  // namespace gpusim
