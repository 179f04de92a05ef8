#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gpusim/cache.hpp"
#include "gpusim/config.hpp"
#include "gpusim/packet.hpp"
#include "gpusim/stats.hpp"
#include "gpusim/trace.hpp"

namespace gpusim {

enum class WarpState : std::uint8_t { Ready, ExecLatency, WaitMem, WaitBarrier, Finished };

struct WarpContext {
  bool active = false;
  std::uint32_t cta_slot = 0;
  const WarpTrace* trace = nullptr;
  std::uint32_t pc_index = 0;
  WarpState state = WarpState::Ready;
  std::uint32_t remaining = 0;  // cycles left while in ExecLatency
  std::uint64_t global_warp_id = 0;
};

struct SubCore {
  std::vector<std::uint32_t> warp_slots;
  std::uint32_t issue_pointer = 0;  // rotating start position into warp_slots
};

// One streaming multiprocessor: sub-cores with loose round-robin issue, warp
// contexts, an L1 data cache and two mailboxes.
//
// cycle() touches nothing but this object and read-only trace data, so
// distinct SmCores may be cycled concurrently. The inbox is filled, and the
// outbox drained, by the engine between parallel phases.
class SmCore {
 public:
  SmCore(std::uint32_t sm_id, const GpuConfig& cfg);

  std::uint32_t id() const { return sm_id_; }

  // Installs every warp of `cta` if warp and CTA slots allow; otherwise
  // returns false and leaves the SM untouched. `cta` must outlive the CTA's
  // residency.
  bool accept_cta(const CtaTrace& cta, std::uint32_t kernel_index);

  // Advances exactly one core cycle. `gpu_cycle` only feeds packet ids.
  void cycle(std::uint64_t gpu_cycle);

  bool is_idle() const;

  std::vector<Packet>& inbox() { return inbox_; }
  std::vector<Packet>& outbox() { return outbox_; }
  const std::vector<Packet>& inbox() const { return inbox_; }
  const std::vector<Packet>& outbox() const { return outbox_; }

  StatSheet& stats() { return stats_; }
  const StatSheet& stats() const { return stats_; }

  std::uint32_t resident_warps() const { return resident_warps_; }
  std::uint32_t resident_ctas() const { return resident_ctas_; }
  std::size_t pending_requests() const { return mshr_.size(); }
  const WarpContext& warp(std::uint32_t slot) const { return warps_[slot]; }
  const SubCore& sub_core(std::uint32_t id) const { return sub_cores_[id]; }
  const TagArray& l1() const { return l1_; }

 private:
  struct CtaSlot {
    bool active = false;
    std::uint32_t cta_id = 0;
    std::uint32_t live_warps = 0;
    std::uint32_t arrived = 0;  // live warps waiting at the barrier
    std::vector<std::uint32_t> warp_slots;
  };

  void consume_inbox();
  bool issue(SubCore& sc, std::uint64_t gpu_cycle);
  void execute(std::uint32_t slot, std::uint64_t gpu_cycle);
  void release_barrier(CtaSlot& cta);
  void retire_ctas();
  Packet make_request(PacketKind kind, const TraceInstruction& inst, std::uint64_t gpu_cycle);

  std::uint32_t sm_id_;
  std::uint32_t sub_cores_per_sm_;
  std::uint32_t l1_hit_latency_;

  std::vector<WarpContext> warps_;
  std::vector<CtaSlot> ctas_;
  std::vector<SubCore> sub_cores_;
  std::uint32_t resident_warps_ = 0;
  std::uint32_t resident_ctas_ = 0;
  std::uint32_t finished_ctas_pending_ = 0;

  TagArray l1_;
  // Outstanding load misses: line -> waiting warp slots.
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> mshr_;
  std::uint32_t packet_seq_ = 0;

  std::vector<Packet> inbox_;
  std::vector<Packet> outbox_;
  StatSheet stats_;
};

}  // namespace gpusim
