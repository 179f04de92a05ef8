#include "gpusim/memsys.hpp"

#include <algorithm>
#include <list>

namespace gpusim {

SubPartition::SubPartition(std::uint32_t id_, const GpuConfig& cfg)
    : id(id_),
      l2(derived_geometry(cfg).l2_slice_sets, cfg.l2_assoc, cfg.l2_line_bytes,
         derived_geometry(cfg).num_sub_partitions) {}

MemPartition::MemPartition(std::uint32_t id_, const GpuConfig& cfg) : id(id_) {
  subs.reserve(cfg.sub_partitions_per_partition);
  for (std::uint32_t j = 0; j < cfg.sub_partitions_per_partition; ++j) {
    subs.emplace_back(id_ * cfg.sub_partitions_per_partition + j, cfg);
  }
}

bool MemPartition::is_idle() const {
  return dram_queue.empty() && !dram_in_service &&
         std::all_of(subs.begin(), subs.end(), [](const SubPartition& s) { return s.is_idle(); });
}

namespace {

Packet make_response(const Packet& req, std::uint32_t sub_id, std::uint64_t line) {
  Packet resp = req;
  resp.kind = PacketKind::LoadResp;
  resp.src = sub_id;
  resp.dst = req.src;
  resp.addr = line;
  return resp;
}

}  // namespace

void cache_cycle(MemPartition& mp, std::uint32_t sub_index, std::uint64_t cycle,
                 const GpuConfig& cfg, MemoryStats& stats) {
  SubPartition& sp = mp.subs[sub_index];

  // Fills carry the original request whose line just came back from DRAM.
  for (const Packet& req : sp.fills) {
    const std::uint64_t line = sp.l2.line_addr(req.addr);
    auto ev = sp.l2.fill(line, req.kind == PacketKind::StoreReq);
    if (ev.valid && ev.dirty) ++stats.l2_dirty_evictions;
    if (req.kind == PacketKind::LoadReq) sp.icnt_outbox.push_back(make_response(req, sp.id, line));
  }
  sp.fills.clear();

  while (!sp.hit_pipeline.empty() && sp.hit_pipeline.front().first <= cycle) {
    sp.icnt_outbox.push_back(sp.hit_pipeline.front().second);
    sp.hit_pipeline.pop_front();
  }

  if (sp.icnt_inbox.empty()) return;
  const Packet& req = sp.icnt_inbox.front();
  const std::uint64_t line = sp.l2.line_addr(req.addr);
  const bool hit = sp.l2.probe(line);
  if (!hit && mp.dram_queue.size() >= cfg.dram_queue_capacity) return;

  ++stats.l2_accesses;
  if (hit) {
    ++stats.l2_hits;
    sp.l2.access(line);
    if (req.kind == PacketKind::StoreReq) {
      sp.l2.mark_dirty(line);
    } else {
      sp.hit_pipeline.emplace_back(cycle + cfg.l2_hit_latency, make_response(req, sp.id, line));
    }
  } else {
    ++stats.l2_misses;
    ++stats.dram_accesses;
    mp.dram_queue.push_back(req);
  }
  sp.icnt_inbox.pop_front();
}

void dram_cycle(MemPartition& mp, const GpuConfig& cfg) {
  if (mp.dram_in_service && --mp.dram_in_service->remaining == 0) {
    const Packet& req = mp.dram_in_service->packet;
    mp.subs[req.dst % cfg.sub_partitions_per_partition].fills.push_back(req);
    mp.dram_in_service.reset();
  }
  if (!mp.dram_in_service && !mp.dram_queue.empty()) {
    mp.dram_in_service = DramService{mp.dram_queue.front(), cfg.dram_latency};
    mp.dram_queue.pop_front();
  }
}

// Recency lists per set, most recent at the front. Deliberately shares no
// code with TagArray.
std::vector<bool> l2_oracle_check(const std::vector<std::uint64_t>& addrs,
                                  const CacheShape& shape) {
  std::vector<std::list<std::uint64_t>> sets(shape.sets);
  std::vector<bool> hits;
  hits.reserve(addrs.size());
  for (std::uint64_t addr : addrs) {
    const std::uint64_t line_no = addr / shape.line_bytes;
    auto& set = sets[(line_no / shape.index_stride) % shape.sets];
    auto it = std::find(set.begin(), set.end(), line_no);
    if (it != set.end()) {
      set.splice(set.begin(), set, it);
      hits.push_back(true);
    } else {
      set.push_front(line_no);
      if (set.size() > shape.assoc) set.pop_back();
      hits.push_back(false);
    }
  }
  return hits;
}

}  // namespace gpusim
