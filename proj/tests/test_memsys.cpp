#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "gpusim/config.hpp"
#include "gpusim/memsys.hpp"

using namespace gpusim;

namespace {

Packet load_req(std::uint64_t addr, std::uint32_t dst, std::uint32_t src = 0) {
  Packet p;
  p.kind = PacketKind::LoadReq;
  p.addr = addr;
  p.size = 4;
  p.src = src;
  p.dst = dst;
  return p;
}

Packet store_req(std::uint64_t addr, std::uint32_t dst) {
  Packet p = load_req(addr, dst);
  p.kind = PacketKind::StoreReq;
  return p;
}

// Runs dram_cycle then cache_cycle for one sub-partition until the partition
// is idle; returns the cycle count spent.
std::uint64_t drain(MemPartition& mp, std::uint32_t sub, const GpuConfig& cfg, MemoryStats& st,
                    std::uint64_t& now) {
  std::uint64_t start = now;
  while (!mp.is_idle()) {
    dram_cycle(mp, cfg);
    cache_cycle(mp, sub, now, cfg, st);
    mp.subs[sub].icnt_outbox.clear();
    ++now;
  }
  return now - start;
}

}  // namespace

TEST(AddressMap, DefaultProfileExamples) {
  const AddressMap map(GpuConfig{});
  EXPECT_EQ(map.sub_partition(0x0), 0u);
  EXPECT_EQ(map.sub_partition(0x80), 1u);
  EXPECT_EQ(map.sub_partition(0x80 * 48), 0u);
  EXPECT_EQ(map.sub_partition(0x80 * 47 + 0x7f), 47u);
}

TEST(AddressMap, SequentialLinesRoundRobinOverAllSubPartitions) {
  const GpuConfig cfg;
  const AddressMap map(cfg);
  for (std::uint64_t line = 0; line < 48 * 5; ++line) {
    EXPECT_EQ(map.sub_partition(line * cfg.l2_line_bytes), line % 48);
  }
}

TEST(CacheCycle, ColdMissGoesToDram) {
  const GpuConfig cfg;
  MemPartition mp(0, cfg);
  MemoryStats st;
  mp.subs[0].icnt_inbox.push_back(load_req(0x0, 0));
  cache_cycle(mp, 0, 0, cfg, st);
  EXPECT_EQ(mp.dram_queue.size(), 1u);
  EXPECT_TRUE(mp.subs[0].icnt_inbox.empty());
  EXPECT_EQ(st.l2_misses, 1u);
  EXPECT_EQ(st.dram_accesses, 1u);
}

TEST(CacheCycle, SameLineLoadAfterFillHitsWithoutDram) {
  const GpuConfig cfg;
  MemPartition mp(0, cfg);
  MemoryStats st;
  std::uint64_t now = 0;
  mp.subs[0].icnt_inbox.push_back(load_req(0x0, 0));
  drain(mp, 0, cfg, st, now);
  ASSERT_EQ(st.dram_accesses, 1u);

  mp.subs[0].icnt_inbox.push_back(load_req(0x40, 0));
  const std::uint64_t issued = now;
  cache_cycle(mp, 0, now, cfg, st);
  EXPECT_EQ(st.l2_hits, 1u);
  EXPECT_EQ(st.dram_accesses, 1u);
  EXPECT_TRUE(mp.dram_queue.empty());
  // The response appears once the hit latency has elapsed.
  for (std::uint64_t c = issued + 1; c < issued + cfg.l2_hit_latency; ++c) {
    cache_cycle(mp, 0, c, cfg, st);
    EXPECT_TRUE(mp.subs[0].icnt_outbox.empty());
  }
  cache_cycle(mp, 0, issued + cfg.l2_hit_latency, cfg, st);
  ASSERT_EQ(mp.subs[0].icnt_outbox.size(), 1u);
  EXPECT_EQ(mp.subs[0].icnt_outbox[0].kind, PacketKind::LoadResp);
  EXPECT_EQ(mp.subs[0].icnt_outbox[0].addr, 0x0u);
}

TEST(CacheCycle, FullDramQueueBlocksInboxHead) {
  GpuConfig cfg;
  cfg.dram_queue_capacity = 2;
  MemPartition mp(0, cfg);
  MemoryStats st;
  for (std::uint64_t i = 0; i < 3; ++i) mp.subs[0].icnt_inbox.push_back(load_req(i * 96 * 128, 0));
  cache_cycle(mp, 0, 0, cfg, st);
  cache_cycle(mp, 0, 1, cfg, st);
  EXPECT_EQ(mp.dram_queue.size(), 2u);
  cache_cycle(mp, 0, 2, cfg, st);
  EXPECT_EQ(mp.subs[0].icnt_inbox.size(), 1u);
  EXPECT_EQ(st.l2_accesses, 2u);
}

TEST(CacheCycle, AtMostOneRequestPerCycle) {
  const GpuConfig cfg;
  MemPartition mp(0, cfg);
  MemoryStats st;
  for (int i = 0; i < 4; ++i) mp.subs[1].icnt_inbox.push_back(load_req(0x80, 1));
  cache_cycle(mp, 1, 0, cfg, st);
  EXPECT_EQ(mp.subs[1].icnt_inbox.size(), 3u);
}

TEST(CacheCycle, StoreHitMarksDirtyAndEvictionIsCounted) {
  GpuConfig cfg;
  cfg.l2_total_size_bytes = 48ull * 128;  // one set, one way per slice
  cfg.l2_assoc = 1;
  validate(cfg);
  MemPartition mp(0, cfg);
  MemoryStats st;
  std::uint64_t now = 0;
  mp.subs[0].icnt_inbox.push_back(load_req(0, 0));
  drain(mp, 0, cfg, st, now);
  mp.subs[0].icnt_inbox.push_back(store_req(0, 0));
  drain(mp, 0, cfg, st, now);
  EXPECT_EQ(st.l2_hits, 1u);
  EXPECT_EQ(st.l2_dirty_evictions, 0u);
  mp.subs[0].icnt_inbox.push_back(load_req(48 * 128, 0));
  drain(mp, 0, cfg, st, now);
  EXPECT_EQ(st.l2_dirty_evictions, 1u);
}

TEST(DramCycle, SingleRequestTakesExactlyLatency) {
  const GpuConfig cfg;
  MemPartition mp(3, cfg);
  mp.dram_queue.push_back(load_req(0, 7));  // global sub-partition 7 = partition 3, slot 1
  dram_cycle(mp, cfg);
  ASSERT_TRUE(mp.dram_in_service.has_value());
  for (std::uint32_t c = 1; c < cfg.dram_latency; ++c) {
    dram_cycle(mp, cfg);
    EXPECT_TRUE(mp.subs[1].fills.empty()) << c;
  }
  dram_cycle(mp, cfg);
  EXPECT_EQ(mp.subs[1].fills.size(), 1u);
  EXPECT_TRUE(mp.subs[0].fills.empty());
}

TEST(DramCycle, SecondRequestAtTwiceLatency) {
  const GpuConfig cfg;
  MemPartition mp(0, cfg);
  mp.dram_queue.push_back(load_req(0, 0));
  mp.dram_queue.push_back(load_req(0x100 * 48, 0));
  std::vector<std::uint32_t> delivered_at;
  // Step 0 puts the first request into service.
  for (std::uint32_t step = 0; step <= 2 * cfg.dram_latency + 1; ++step) {
    dram_cycle(mp, cfg);
    if (!mp.subs[0].fills.empty()) {
      delivered_at.push_back(step);
      mp.subs[0].fills.clear();
    }
  }
  EXPECT_EQ(delivered_at, (std::vector<std::uint32_t>{cfg.dram_latency, 2 * cfg.dram_latency}));
}

TEST(DramCycle, EmptyQueueNoStateChange) {
  const GpuConfig cfg;
  MemPartition mp(0, cfg);
  dram_cycle(mp, cfg);
  EXPECT_TRUE(mp.is_idle());
  EXPECT_FALSE(mp.dram_in_service.has_value());
}

TEST(L2Oracle, TimingModelMatchesOracleWhenDrained) {
  const GpuConfig cfg;
  const auto g = derived_geometry(cfg);
  const AddressMap map(cfg);
  std::mt19937_64 rng(99);
  // Addresses restricted to sub-partition 0 with a footprint of twice its
  // capacity so hits, misses and evictions all occur.
  const std::uint64_t slice_lines = g.l2_slice_sets * cfg.l2_assoc;
  std::vector<std::uint64_t> addrs;
  for (int i = 0; i < 1000; ++i) {
    addrs.push_back((rng() % (2 * slice_lines)) * g.num_sub_partitions * cfg.l2_line_bytes +
                    rng() % cfg.l2_line_bytes);
    ASSERT_EQ(map.sub_partition(addrs.back()), 0u);
  }
  MemPartition mp(0, cfg);
  MemoryStats st;
  std::uint64_t now = 0;
  std::vector<bool> got;
  for (auto a : addrs) {
    const auto hits_before = st.l2_hits;
    mp.subs[0].icnt_inbox.push_back(a % 3 == 0 ? store_req(a, 0) : load_req(a, 0));
    drain(mp, 0, cfg, st, now);
    got.push_back(st.l2_hits != hits_before);
  }
  auto want = l2_oracle_check(addrs, {g.l2_slice_sets, cfg.l2_assoc, cfg.l2_line_bytes,
                                      g.num_sub_partitions});
  EXPECT_EQ(got, want);
  EXPECT_GT(std::count(got.begin(), got.end(), true), 100);
  EXPECT_GT(std::count(got.begin(), got.end(), false), 100);
}
