#pragma once

#include <array>
#include <cstring>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/config.hpp"

namespace mcsim {

struct DecodedAddress {
  uint64_t row = 0;
  uint32_t bank = 0;
  uint64_t column = 0;
};

enum class RowResult : uint8_t { FirstHit, RowHit, RowConflict };

struct RowStats {
  uint64_t first_hits = 0;
  uint64_t row_hits = 0;
  uint64_t row_conflicts = 0;
  uint64_t total() const { return first_hits + row_hits + row_conflicts; }
};

// Bit-slices an address through the configured map. Addresses are taken
// modulo the memory-interface address space.
DecodedAddress decode_address(uint64_t addr, const DramTimingConfig& timing,
                              uint32_t mem_if_addr_width);

// Per-bank open-row state plus the latency model. Memory-cycle costs follow
// the open-row rules (first access t_cl+t_rcd, hit t_cl, conflict
// t_rp+t_cl+t_rcd) and convert to controller cycles with a ceiling.
class DramModel {
public:
  DramModel(const DramTimingConfig& timing, uint32_t mem_if_addr_width);

  DecodedAddress decode(uint64_t addr) const {
    return decode_address(addr, timing_, addr_width_);
  }

  // Returns controller-clock cycles; updates open row and stats.
  uint64_t access(const DecodedAddress& d);
  uint64_t access_addr(uint64_t addr) { return access(decode(addr)); }
  RowResult classify(const DecodedAddress& d) const;

  const RowStats& stats() const { return stats_; }
  std::optional<uint64_t> open_row(uint32_t bank) const { return open_rows_.at(bank); }
  RowResult last_result() const { return last_result_; }

  // Pure timing helpers. The *_mem_cycles forms are pre-conversion memory
  // cycles; the raw forms are pre-ceiling controller cycles.
  static uint32_t seq_mem_cycles(const DramTimingConfig& t) { return t.t_cl; }
  static uint32_t rand_mem_cycles(const DramTimingConfig& t) { return t.t_rp + t.t_cl + t.t_rcd; }
  static double clock_ratio(const DramTimingConfig& t) { return t.t_mem / t.t_fpga; }
  static double t_mem_seq_raw(const DramTimingConfig& t);
  static double t_mem_rand_raw(const DramTimingConfig& t);
  static uint64_t t_mem_seq(const DramTimingConfig& t);
  static uint64_t t_mem_rand(const DramTimingConfig& t);
  static uint64_t to_ctrl_cycles(uint32_t mem_cycles, const DramTimingConfig& t);

private:
  DramTimingConfig timing_;
  uint32_t addr_width_;
  std::vector<std::optional<uint64_t>> open_rows_;
  RowStats stats_;
  RowResult last_result_ = RowResult::FirstHit;
};

// Sparse byte-addressable backing store; pages allocate on first write and
// read as zero before that.
class MainMemory {
public:
  void write(uint64_t addr, std::span<const uint8_t> data);
  void read(uint64_t addr, std::span<uint8_t> out) const;
  std::vector<uint8_t> read(uint64_t addr, size_t n) const;

private:
  static constexpr uint64_t kPageBits = 12;
  static constexpr uint64_t kPageSize = 1ULL << kPageBits;
  std::unordered_map<uint64_t, std::array<uint8_t, kPageSize>> pages_;
};

}  // namespace mcsim
