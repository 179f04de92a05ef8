#include "gpusim/smcore.hpp"

#include <algorithm>
#include <cassert>

namespace gpusim {

SmCore::SmCore(std::uint32_t sm_id, const GpuConfig& cfg)
    : sm_id_(sm_id),
      sub_cores_per_sm_(cfg.sub_cores_per_sm),
      l1_hit_latency_(cfg.l1_hit_latency),
      warps_(cfg.warps_per_sm),
      ctas_(cfg.max_ctas_per_sm),
      sub_cores_(cfg.sub_cores_per_sm),
      l1_(derived_geometry(cfg).l1d_sets, cfg.l1d_assoc, cfg.l1d_line_bytes) {}

bool SmCore::accept_cta(const CtaTrace& cta, std::uint32_t kernel_index) {
  const auto needed = static_cast<std::uint32_t>(cta.warps.size());
  if (needed == 0 || resident_warps_ + needed > warps_.size()) return false;
  auto cta_it = std::find_if(ctas_.begin(), ctas_.end(), [](const CtaSlot& c) { return !c.active; });
  if (cta_it == ctas_.end()) return false;

  const auto cta_slot = static_cast<std::uint32_t>(cta_it - ctas_.begin());
  CtaSlot& slot = *cta_it;
  slot.active = true;
  slot.cta_id = cta.cta_id;
  slot.live_warps = needed;
  slot.arrived = 0;
  slot.warp_slots.clear();

  std::uint32_t next = 0;
  for (const auto& wt : cta.warps) {
    while (warps_[next].active) ++next;
    WarpContext& w = warps_[next];
    w = WarpContext{};
    w.active = true;
    w.cta_slot = cta_slot;
    w.trace = &wt;
    w.global_warp_id = (std::uint64_t{kernel_index} << 40) | (std::uint64_t{cta.cta_id} << 16) |
                       wt.warp_id;
    slot.warp_slots.push_back(next);
    sub_cores_[wt.warp_id % sub_cores_per_sm_].warp_slots.push_back(next);
    ++next;
  }
  resident_warps_ += needed;
  ++resident_ctas_;
  stats_.add(Counter::IssuedCtas);
  return true;
}

bool SmCore::is_idle() const {
  return resident_warps_ == 0 && inbox_.empty() && outbox_.empty() && mshr_.empty();
}

void SmCore::cycle(std::uint64_t gpu_cycle) {
  if (resident_warps_ == 0 && inbox_.empty()) return;
  packet_seq_ = 0;
  if (resident_warps_ > 0) stats_.add(Counter::ActiveCycles);

  consume_inbox();

  bool issued_any = false;
  for (auto& sc : sub_cores_) issued_any |= issue(sc, gpu_cycle);

  bool waiting_mem = false;
  bool waiting_exec = false;
  for (auto& w : warps_) {
    if (!w.active) continue;
    if (w.state == WarpState::ExecLatency) {
      waiting_exec = true;
      if (--w.remaining == 0) w.state = WarpState::Ready;
    } else if (w.state == WarpState::WaitMem) {
      waiting_mem = true;
    }
  }
  if (!issued_any) {
    if (waiting_mem) {
      stats_.add(Counter::StallCyclesMem);
    } else if (waiting_exec) {
      stats_.add(Counter::StallCyclesExec);
    }
  }

  if (finished_ctas_pending_ > 0) retire_ctas();
}

void SmCore::consume_inbox() {
  for (const Packet& p : inbox_) {
    assert(p.kind == PacketKind::LoadResp);
    const std::uint64_t line = l1_.line_addr(p.addr);
    l1_.fill(line);
    auto it = mshr_.find(line);
    assert(it != mshr_.end());
    for (std::uint32_t slot : it->second) warps_[slot].state = WarpState::Ready;
    mshr_.erase(it);
  }
  inbox_.clear();
}

bool SmCore::issue(SubCore& sc, std::uint64_t gpu_cycle) {
  const auto n = static_cast<std::uint32_t>(sc.warp_slots.size());
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t pos = (sc.issue_pointer + k) % n;
    const std::uint32_t slot = sc.warp_slots[pos];
    if (warps_[slot].state != WarpState::Ready) continue;
    execute(slot, gpu_cycle);
    sc.issue_pointer = (pos + 1) % n;
    return true;
  }
  return false;
}

Packet SmCore::make_request(PacketKind kind, const TraceInstruction& inst,
                            std::uint64_t gpu_cycle) {
  Packet p;
  p.req_id = make_req_id(gpu_cycle, sm_id_, packet_seq_++);
  p.kind = kind;
  p.src = sm_id_;
  p.addr = kind == PacketKind::LoadReq ? l1_.line_addr(inst.addr) : inst.addr;
  p.size = inst.size;
  return p;
}

void SmCore::execute(std::uint32_t slot, std::uint64_t gpu_cycle) {
  WarpContext& w = warps_[slot];
  const TraceInstruction& inst = w.trace->instructions[w.pc_index++];
  CtaSlot& cta = ctas_[w.cta_slot];

  switch (inst.kind) {
    case InstKind::Alu:
      stats_.add(Counter::InstructionsAlu);
      w.state = WarpState::ExecLatency;
      w.remaining = inst.latency;
      break;

    case InstKind::Ld: {
      stats_.add(Counter::InstructionsLd);
      const std::uint64_t line = l1_.line_addr(inst.addr);
      stats_.touch_line(line);
      if (l1_.access(line)) {
        stats_.add(Counter::L1Hits);
        w.state = WarpState::ExecLatency;
        w.remaining = l1_hit_latency_;
        break;
      }
      auto [it, inserted] = mshr_.try_emplace(line);
      it->second.push_back(slot);
      if (inserted) {
        stats_.add(Counter::L1Misses);
        outbox_.push_back(make_request(PacketKind::LoadReq, inst, gpu_cycle));
      } else {
        stats_.add(Counter::L1MshrMerges);
      }
      w.state = WarpState::WaitMem;
      break;
    }

    case InstKind::St:
      // Write-through, no allocate: the store leaves the SM and the warp
      // moves on next cycle.
      stats_.add(Counter::InstructionsSt);
      stats_.touch_line(l1_.line_addr(inst.addr));
      outbox_.push_back(make_request(PacketKind::StoreReq, inst, gpu_cycle));
      w.state = WarpState::ExecLatency;
      w.remaining = 1;
      break;

    case InstKind::Bar:
      stats_.add(Counter::InstructionsBar);
      w.state = WarpState::WaitBarrier;
      if (++cta.arrived == cta.live_warps) release_barrier(cta);
      break;

    case InstKind::Exit:
      stats_.add(Counter::InstructionsExit);
      w.state = WarpState::Finished;
      --cta.live_warps;
      if (cta.live_warps == 0) {
        ++finished_ctas_pending_;
      } else if (cta.arrived > 0 && cta.arrived == cta.live_warps) {
        release_barrier(cta);
      }
      break;
  }
}

void SmCore::release_barrier(CtaSlot& cta) {
  for (std::uint32_t slot : cta.warp_slots) {
    if (warps_[slot].state == WarpState::WaitBarrier) warps_[slot].state = WarpState::Ready;
  }
  cta.arrived = 0;
}

void SmCore::retire_ctas() {
  for (auto& cta : ctas_) {
    if (!cta.active || cta.live_warps != 0) continue;
    for (std::uint32_t slot : cta.warp_slots) {
      auto& list = sub_cores_[warps_[slot].trace->warp_id % sub_cores_per_sm_];
      auto it = std::find(list.warp_slots.begin(), list.warp_slots.end(), slot);
      assert(it != list.warp_slots.end());
      const auto pos = static_cast<std::uint32_t>(it - list.warp_slots.begin());
      list.warp_slots.erase(it);
      if (pos < list.issue_pointer) --list.issue_pointer;
      if (list.issue_pointer >= list.warp_slots.size()) list.issue_pointer = 0;
      warps_[slot] = WarpContext{};
    }
    resident_warps_ -= static_cast<std::uint32_t>(cta.warp_slots.size());
    --resident_ctas_;
    cta.active = false;
    cta.warp_slots.clear();
  }
  finished_ctas_pending_ = 0;
}

}  // namespace gpusim
