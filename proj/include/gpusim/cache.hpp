#pragma once

#include <cstdint>
#include <vector>

namespace gpusim {

// Set-associative tag array with true-LRU replacement. Holds no data.
//
// `index_stride` removes interleaving bits from the set index: an L2 slice
// only sees every n-th line, so its set index is computed from
// line_number / n rather than line_number.
class TagArray {
 public:
  struct Eviction {
    bool valid = false;
    std::uint64_t line_addr = 0;
    bool dirty = false;
  };

  TagArray(std::uint64_t sets, std::uint32_t assoc, std::uint32_t line_bytes,
           std::uint64_t index_stride = 1);

  std::uint64_t line_addr(std::uint64_t addr) const { return addr & ~line_mask_; }
  std::uint64_t set_of(std::uint64_t addr) const;

  bool probe(std::uint64_t addr) const;
  // Lookup; a hit refreshes recency. Misses do not allocate.
  bool access(std::uint64_t addr);
  // Installs the line (or refreshes it if already present) and returns the
  // displaced victim, if any.
  Eviction fill(std::uint64_t addr, bool dirty = false);
  // Marks a resident line dirty; returns false if the line is absent.
  bool mark_dirty(std::uint64_t addr);

  std::uint64_t sets() const { return sets_; }
  std::uint32_t assoc() const { return assoc_; }
  std::uint32_t line_bytes() const { return line_bytes_; }

 private:
  struct Way {
    std::uint64_t tag = 0;
    std::uint64_t last_use = 0;
    bool valid = false;
    bool dirty = false;
  };

  int find(std::uint64_t addr) const;

  std::uint64_t sets_;
  std::uint32_t assoc_;
  std::uint32_t line_bytes_;
  std::uint64_t line_mask_;
  std::uint64_t index_stride_;
  std::uint64_t clock_ = 0;
  std::vector<Way> ways_;
};

}  // namespace gpusim
