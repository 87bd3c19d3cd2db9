#pragma once

// Independent reference models used as test oracles. These deliberately
// share no code with the implementation they check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "core/config.hpp"
#include "core/types.hpp"

namespace oracle {

// Functional set-associative LRU write-back write-allocate cache. Instant
// fills, state moves atomically per access.
class RefCache {
public:
  RefCache(uint32_t line_bytes, uint32_t ways, uint32_t num_lines)
      : line_bytes_(line_bytes), ways_(ways), sets_(num_lines / ways), table_(sets_) {}

  struct Result {
    bool hit;
    bool evicted;
    bool writeback;
  };

  Result access(mcsim::MemOp op, uint64_t addr) {
    uint64_t line = addr / line_bytes_;
    uint32_t set = static_cast<uint32_t>(line % sets_);
    uint64_t tag = line / sets_;
    auto& entries = table_[set];
    ++clock_;
    for (auto& e : entries) {
      if (e.tag == tag) {
        e.last_used = clock_;
        if (op == mcsim::MemOp::Write) e.dirty = true;
        return {true, false, false};
      }
    }
    Result r{false, false, false};
    if (entries.size() < ways_) {
      entries.push_back({tag, op == mcsim::MemOp::Write, clock_});
      return r;
    }
    auto victim = std::min_element(entries.begin(), entries.end(),
                                   [](const Entry& a, const Entry& b) {
                                     return a.last_used < b.last_used;
                                   });
    r.evicted = true;
    r.writeback = victim->dirty;
    *victim = {tag, op == mcsim::MemOp::Write, clock_};
    return r;
  }

private:
  struct Entry {
    uint64_t tag;
    bool dirty;
    uint64_t last_used;
  };
  uint32_t line_bytes_, ways_, sets_;
  std::vector<std::vector<Entry>> table_;
  uint64_t clock_ = 0;
};

// Expected payload segmentation of a request: sizes of the payload pieces.
inline std::vector<uint32_t> segment_sizes(uint32_t total, uint32_t piece) {
  std::vector<uint32_t> out;
  uint32_t off = 0;
  while (off < total) {
    out.push_back(std::min(piece, total - off));
    off += out.back();
  }
  return out;
}

// Direct bit-slice decode for a row:bank:column layout (high to low).
struct Slices {
  uint64_t row, bank, column;
};
inline Slices decode_rbc(uint64_t addr, uint32_t row_bits, uint32_t bank_bits,
                         uint32_t col_bits) {
  Slices s{};
  s.column = addr & ((1ULL << col_bits) - 1);
  s.bank = (addr >> col_bits) & ((1ULL << bank_bits) - 1);
  s.row = (addr >> (col_bits + bank_bits)) & ((1ULL << row_bits) - 1);
  return s;
}

// Adjacent row changes of a row sequence.
inline int row_switches(const std::vector<uint64_t>& rows) {
  int n = 0;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i] != rows[i - 1]) ++n;
  return n;
}

// Minimum adjacent row changes over all permutations (exhaustive).
inline int min_row_switches_exhaustive(std::vector<uint64_t> rows) {
  std::sort(rows.begin(), rows.end());
  int best = 1 << 30;
  do {
    best = std::min(best, row_switches(rows));
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best;
}

// Byte-level memory image replayed from a request stream in program order;
// gives the expected data for any read.
class RefMemory {
public:
  void write(uint64_t addr, const std::vector<uint8_t>& data) {
    for (size_t i = 0; i < data.size(); ++i) bytes_[addr + i] = data[i];
  }
  std::vector<uint8_t> read(uint64_t addr, uint32_t n) const {
    std::vector<uint8_t> out(n, 0);
    for (uint32_t i = 0; i < n; ++i) {
      auto it = bytes_.find(addr + i);
      if (it != bytes_.end()) out[i] = it->second;
    }
    return out;
  }

private:
  std::map<uint64_t, uint8_t> bytes_;
};

}  // namespace oracle
