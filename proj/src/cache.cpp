#include "gpusim/cache.hpp"

#include <cassert>

namespace gpusim {

TagArray::TagArray(std::uint64_t sets, std::uint32_t assoc, std::uint32_t line_bytes,
                   std::uint64_t index_stride)
    : sets_(sets),
      assoc_(assoc),
      line_bytes_(line_bytes),
      line_mask_(std::uint64_t{line_bytes} - 1),
      index_stride_(index_stride),
      ways_(sets * assoc) {
  assert(sets > 0 && assoc > 0 && index_stride > 0);
}

std::uint64_t TagArray::set_of(std::uint64_t addr) const {
  return (addr / line_bytes_ / index_stride_) % sets_;
}

int TagArray::find(std::uint64_t addr) const {
  const std::uint64_t tag = line_addr(addr);
  const Way* set = &ways_[set_of(addr) * assoc_];
  for (std::uint32_t w = 0; w < assoc_; ++w) {
    if (set[w].valid && set[w].tag == tag) return static_cast<int>(w);
  }
  return -1;
}

bool TagArray::probe(std::uint64_t addr) const { return find(addr) >= 0; }

bool TagArray::access(std::uint64_t addr) {
  int w = find(addr);
  if (w < 0) return false;
  ways_[set_of(addr) * assoc_ + w].last_use = ++clock_;
  return true;
}

TagArray::Eviction TagArray::fill(std::uint64_t addr, bool dirty) {
  Way* set = &ways_[set_of(addr) * assoc_];
  if (int w = find(addr); w >= 0) {
    set[w].last_use = ++clock_;
    set[w].dirty = set[w].dirty || dirty;
    return {};
  }
  // First invalid way, else least recently used.
  std::uint32_t victim = 0;
  for (std::uint32_t w = 0; w < assoc_; ++w) {
    if (!set[w].valid) {
      victim = w;
      break;
    }
    if (set[w].last_use < set[victim].last_use) victim = w;
  }
  Eviction ev;
  if (set[victim].valid) ev = {true, set[victim].tag, set[victim].dirty};
  set[victim] = Way{line_addr(addr), ++clock_, true, dirty};
  return ev;
}

bool TagArray::mark_dirty(std::uint64_t addr) {
  int w = find(addr);
  if (w < 0) return false;
  ways_[set_of(addr) * assoc_ + w].dirty = true;
  return true;
}

}  // namespace gpusim
