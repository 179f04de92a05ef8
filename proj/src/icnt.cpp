#include "gpusim/icnt.hpp"

namespace gpusim {

Interconnect::Interconnect(const GpuConfig& cfg)
    : map_(cfg),
      latency_(cfg.icnt_latency_cycles),
      bandwidth_(cfg.icnt_bw_per_dest_per_cycle),
      inbox_capacity_(cfg.l2_inbox_capacity),
      toward_mem_(map_.num_sub_partitions()),
      toward_sm_(cfg.num_sms) {}

void Interconnect::schedule(std::span<SmCore> sms, std::uint64_t cycle) {
  for (SmCore& sm : sms) {
    auto& out = sm.outbox();
    for (Packet& p : out) {
      p.inject_cycle = cycle;
      p.dst = map_.sub_partition(p.addr);
      toward_mem_[p.dst].push_back(p);
      ++to_mem_.injected;
    }
    out.clear();
  }
}

void Interconnect::to_mem(SubPartition& sp, std::uint64_t cycle) {
  auto& q = toward_mem_[sp.id];
  for (std::uint32_t moved = 0; moved < bandwidth_ && !q.empty(); ++moved) {
    if (!ripe(q.front(), cycle) || sp.inbox_full(inbox_capacity_)) break;
    sp.icnt_inbox.push_back(q.front());
    q.pop_front();
    ++to_mem_.delivered;
  }
}

void Interconnect::mem_to_icnt(SubPartition& sp, std::uint64_t cycle) {
  for (Packet& p : sp.icnt_outbox) {
    p.inject_cycle = cycle;
    toward_sm_[p.dst].push_back(p);
    ++to_sm_.injected;
  }
  sp.icnt_outbox.clear();
}

void Interconnect::to_sm(std::span<SmCore> sms, std::uint64_t cycle) {
  for (SmCore& sm : sms) {
    auto& q = toward_sm_[sm.id()];
    for (std::uint32_t moved = 0; moved < bandwidth_ && !q.empty(); ++moved) {
      if (!ripe(q.front(), cycle)) break;
      sm.inbox().push_back(q.front());
      q.pop_front();
      ++to_sm_.delivered;
    }
  }
}

std::size_t Interconnect::queued_toward_mem() const {
  std::size_t n = 0;
  for (const auto& q : toward_mem_) n += q.size();
  return n;
}

std::size_t Interconnect::queued_toward_sm() const {
  std::size_t n = 0;
  for (const auto& q : toward_sm_) n += q.size();
  return n;
}

}  // namespace gpusim
