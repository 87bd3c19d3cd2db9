#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "core/config.hpp"
#include "core/types.hpp"

namespace mcsim {

enum class PipelineGrant : uint8_t { RunMem, RunPe, Idle };

// The MEM pipeline has priority over the PE pipeline; both share the tag,
// data and LRU RAMs, so only one runs per cycle.
inline PipelineGrant arbitrate_pipelines(bool pe_ready, bool mem_ready) {
  if (mem_ready) return PipelineGrant::RunMem;
  if (pe_ready) return PipelineGrant::RunPe;
  return PipelineGrant::Idle;
}

// Outcome of one PE-side access. Hits while any miss is outstanding are
// hidden under that miss and cost no additional visible cycles.
struct CacheAccessOutcome {
  bool hit = false;
  bool under_active_miss = false;
  uint64_t miss_cost = 0;  // L_mem + T_sch + T_mem_acc, misses only
};

// Total cache-unit time for a slice of N consecutive accesses:
// L_ctrl_oh + L_cache + sum over accesses.
uint64_t cache_time(const std::vector<CacheAccessOutcome>& outcomes, const ControllerConfig& cfg);

// Set-associative LRU write-back write-allocate cache, evaluated
// functionally: tag/LRU/data state moves at access time, so the hit/miss
// sequence is independent of pipeline timing. Fill events carry data and
// release the requests waiting on an outstanding line.
class CacheCore {
public:
  struct Waiter {
    uint64_t seq = 0;
    MemOp op = MemOp::Read;
    uint32_t offset = 0;  // within the line
    uint32_t size = 0;
    std::vector<uint8_t> write_data;
  };

  struct Writeback {
    uint64_t address = 0;  // line-aligned
    std::vector<uint8_t> data;
  };

  struct AccessResult {
    bool accepted = true;  // false: MissStatus full, retry later (no state change)
    bool hit = false;
    bool under_active_miss = false;
    bool needs_fill = false;           // miss: a line request goes to memory
    uint64_t line_address = 0;
    std::optional<Writeback> writeback;  // dirty victim displaced by this miss
    std::vector<uint8_t> read_data;      // read hits on a ready line
    bool deferred = false;               // response released by the fill
  };

  struct FillResult {
    std::optional<Writeback> writeback;  // victim displaced by this fill's miss
    std::vector<Waiter> released;        // waiters in arrival order
    std::vector<std::vector<uint8_t>> read_data;  // per released read waiter
  };

  CacheCore(const ControllerConfig& cfg);

  AccessResult pe_access(MemOp op, uint64_t address, uint32_t size,
                         const uint8_t* write_data, uint64_t seq);

  // line data as read from DRAM; throws internal_error when no outstanding
  // miss matches (protocol guard).
  FillResult mem_fill(uint64_t line_address, const std::vector<uint8_t>& data);

  bool has_outstanding_miss() const { return !mshr_.empty(); }
  size_t outstanding_misses() const { return mshr_.size(); }
  bool mshr_full() const { return mshr_.size() >= kMshrCapacity; }
  uint64_t line_address_of(uint64_t addr) const { return addr & ~uint64_t(line_bytes_ - 1); }
  uint32_t line_bytes() const { return line_bytes_; }

  struct Stats {
    uint64_t accesses = 0;
    uint64_t hits = 0;
    uint64_t misses = 0;
    uint64_t hits_under_miss = 0;
    uint64_t evictions = 0;
    uint64_t writebacks = 0;
  };
  const Stats& stats() const { return stats_; }

  static constexpr size_t kMshrCapacity = 16;

private:
  struct Way {
    uint64_t tag = 0;
    bool valid = false;
    bool dirty = false;
    bool pending = false;  // fill in flight; data not yet usable
    uint64_t lru = 0;      // higher = more recently used
    std::vector<uint8_t> data;
  };

  struct MshrEntry {
    uint64_t line_address = 0;
    uint32_t set = 0, way = 0;
    std::vector<Waiter> waiters;
    std::optional<Writeback> writeback;
  };

  uint32_t set_index(uint64_t addr) const;
  uint64_t tag_of(uint64_t addr) const;
  Way* lookup(uint64_t addr, uint32_t* way_out = nullptr);
  uint32_t pick_victim(uint32_t set) const;

  uint32_t line_bytes_;
  uint32_t sets_;
  uint32_t ways_;
  std::vector<Way> table_;  // sets_ x ways_
  uint64_t lru_clock_ = 0;
  std::vector<MshrEntry> mshr_;
  Stats stats_;
};

}  // namespace mcsim
