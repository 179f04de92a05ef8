#include <gtest/gtest.h>

#include <vector>

#include "gpusim/icnt.hpp"

using namespace gpusim;

namespace {

Packet req(std::uint64_t addr, std::uint32_t src, std::uint64_t id) {
  Packet p;
  p.req_id = id;
  p.kind = PacketKind::LoadReq;
  p.addr = addr;
  p.src = src;
  p.size = 4;
  return p;
}

std::vector<SmCore> make_sms(const GpuConfig& cfg) {
  std::vector<SmCore> sms;
  for (std::uint32_t i = 0; i < cfg.num_sms; ++i) sms.emplace_back(i, cfg);
  return sms;
}

}  // namespace

TEST(Icnt, ScheduleDrainsInAscendingSmOrder) {
  const GpuConfig cfg;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  // Both target sub-partition 0; SM 7 filled its outbox first.
  sms[7].outbox().push_back(req(0x0, 7, 70));
  sms[3].outbox().push_back(req(0x0, 3, 30));
  sms[3].outbox().push_back(req(48 * 128, 3, 31));
  icnt.schedule(sms, 5);
  const auto& q = icnt.toward_mem_queue(0);
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0].req_id, 30u);
  EXPECT_EQ(q[1].req_id, 31u);
  EXPECT_EQ(q[2].req_id, 70u);
  EXPECT_EQ(q[0].inject_cycle, 5u);
  EXPECT_TRUE(sms[3].outbox().empty());
  EXPECT_TRUE(sms[7].outbox().empty());
  EXPECT_EQ(icnt.toward_mem_counters().injected, 3u);
}

TEST(Icnt, RoutesByAddressMap) {
  const GpuConfig cfg;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  sms[0].outbox().push_back(req(0x80 * 13, 0, 1));
  icnt.schedule(sms, 0);
  ASSERT_EQ(icnt.toward_mem_queue(13).size(), 1u);
  EXPECT_EQ(icnt.toward_mem_queue(13)[0].dst, 13u);
}

TEST(Icnt, DeliveryWaitsForLatency) {
  const GpuConfig cfg;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  MemPartition mp(0, cfg);
  sms[0].outbox().push_back(req(0x0, 0, 1));
  icnt.schedule(sms, 10);
  for (std::uint64_t c = 10; c < 10 + cfg.icnt_latency_cycles; ++c) {
    icnt.to_mem(mp.subs[0], c);
    EXPECT_TRUE(mp.subs[0].icnt_inbox.empty()) << c;
  }
  icnt.to_mem(mp.subs[0], 10 + cfg.icnt_latency_cycles);
  EXPECT_EQ(mp.subs[0].icnt_inbox.size(), 1u);
  EXPECT_EQ(icnt.toward_mem_counters().delivered, 1u);
}

TEST(Icnt, BandwidthOnePerDestinationPerCycle) {
  const GpuConfig cfg;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  MemPartition mp(0, cfg);
  for (std::uint32_t s = 0; s < 4; ++s) sms[s].outbox().push_back(req(0x0, s, s));
  icnt.schedule(sms, 0);
  const std::uint64_t ripe = cfg.icnt_latency_cycles;
  for (std::uint64_t c = ripe; c < ripe + 4; ++c) {
    icnt.to_mem(mp.subs[0], c);
    EXPECT_EQ(mp.subs[0].icnt_inbox.size(), c - ripe + 1);
  }
  for (std::uint32_t s = 0; s < 4; ++s) EXPECT_EQ(mp.subs[0].icnt_inbox[s].req_id, s);
}

TEST(Icnt, FullInboxStallsInOrder) {
  GpuConfig cfg;
  cfg.l2_inbox_capacity = 2;
  cfg.icnt_bw_per_dest_per_cycle = 4;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  MemPartition mp(0, cfg);
  for (std::uint32_t i = 0; i < 5; ++i) sms[0].outbox().push_back(req(0x0, 0, i));
  icnt.schedule(sms, 0);
  icnt.to_mem(mp.subs[0], 100);
  EXPECT_EQ(mp.subs[0].icnt_inbox.size(), 2u);
  EXPECT_EQ(icnt.queued_toward_mem(), 3u);
  mp.subs[0].icnt_inbox.pop_front();
  icnt.to_mem(mp.subs[0], 101);
  ASSERT_EQ(mp.subs[0].icnt_inbox.size(), 2u);
  EXPECT_EQ(mp.subs[0].icnt_inbox[1].req_id, 2u);
}

TEST(Icnt, ResponsesReturnToSourceSm) {
  const GpuConfig cfg;
  auto sms = make_sms(cfg);
  Interconnect icnt(cfg);
  MemPartition mp(0, cfg);
  Packet r = req(0x0, 0, 9);
  r.kind = PacketKind::LoadResp;
  r.dst = 42;
  mp.subs[1].icnt_outbox.push_back(r);
  icnt.mem_to_icnt(mp.subs[1], 3);
  EXPECT_TRUE(mp.subs[1].icnt_outbox.empty());
  EXPECT_EQ(icnt.toward_sm_queue(42).size(), 1u);
  icnt.to_sm(sms, 3 + cfg.icnt_latency_cycles - 1);
  EXPECT_TRUE(sms[42].inbox().empty());
  icnt.to_sm(sms, 3 + cfg.icnt_latency_cycles);
  ASSERT_EQ(sms[42].inbox().size(), 1u);
  EXPECT_EQ(sms[42].inbox()[0].req_id, 9u);
  EXPECT_TRUE(icnt.is_empty());
  EXPECT_EQ(icnt.toward_sm_counters().injected, icnt.toward_sm_counters().delivered);
}
