#pragma once

#include <cstdint>

namespace gpusim {

enum class PacketKind : std::uint8_t { LoadReq, StoreReq, LoadResp, Fill };

// A request or response crossing the interconnect.
//
// req_id packs (issue cycle, SM id, per-cycle sequence) so ids are unique and
// their order is independent of how SMs were scheduled.
struct Packet {
  std::uint64_t req_id = 0;
  PacketKind kind = PacketKind::LoadReq;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint64_t addr = 0;
  std::uint32_t size = 0;
  std::uint64_t inject_cycle = 0;

  friend bool operator==(const Packet&, const Packet&) = default;
};

constexpr std::uint64_t make_req_id(std::uint64_t cycle, std::uint32_t sm_id, std::uint32_t seq) {
  return (cycle << 20) | (std::uint64_t{sm_id} << 8) | seq;
}

}  // namespace gpusim
