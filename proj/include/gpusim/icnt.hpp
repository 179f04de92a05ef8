#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "gpusim/config.hpp"
#include "gpusim/memsys.hpp"
#include "gpusim/packet.hpp"
#include "gpusim/smcore.hpp"

namespace gpusim {

// Fixed-latency crossbar between SMs and L2 sub-partitions.
//
// Every phase walks its sources or destinations in ascending id order, so
// the order packets move in depends only on simulated state.
class Interconnect {
 public:
  struct Counters {
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
  };

  explicit Interconnect(const GpuConfig& cfg);

  // Drains every SM outbox (ascending SM id, FIFO within an SM) into the
  // per-sub-partition queues, stamping the injection cycle.
  void schedule(std::span<SmCore> sms, std::uint64_t cycle);

  // Moves up to the per-destination bandwidth of ripe requests into one
  // sub-partition inbox. A full inbox leaves packets queued in order.
  void to_mem(SubPartition& sp, std::uint64_t cycle);

  // Drains one sub-partition's responses into the per-SM queues.
  void mem_to_icnt(SubPartition& sp, std::uint64_t cycle);

  // Delivers up to the per-destination bandwidth of ripe responses to each
  // SM inbox, ascending SM id.
  void to_sm(std::span<SmCore> sms, std::uint64_t cycle);

  std::size_t queued_toward_mem() const;
  std::size_t queued_toward_sm() const;
  bool is_empty() const { return queued_toward_mem() == 0 && queued_toward_sm() == 0; }

  const Counters& toward_mem_counters() const { return to_mem_; }
  const Counters& toward_sm_counters() const { return to_sm_; }
  const std::deque<Packet>& toward_mem_queue(std::uint32_t sp) const { return toward_mem_[sp]; }
  const std::deque<Packet>& toward_sm_queue(std::uint32_t sm) const { return toward_sm_[sm]; }

 private:
  bool ripe(const Packet& p, std::uint64_t cycle) const {
    return p.inject_cycle + latency_ <= cycle;
  }

  AddressMap map_;
  std::uint64_t latency_;
  std::uint32_t bandwidth_;
  std::uint32_t inbox_capacity_;
  std::vector<std::deque<Packet>> toward_mem_;
  std::vector<std::deque<Packet>> toward_sm_;
  Counters to_mem_;
  Counters to_sm_;
};

}  // namespace gpusim
