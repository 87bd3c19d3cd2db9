#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "core/config.hpp"
#include "core/dram_model.hpp"
#include "core/types.hpp"

namespace mcsim {

// Identifies who is waiting on a DRAM access so completions can be routed
// back without the scheduler knowing about the engines.
struct SchedTag {
  enum class Kind : uint8_t { CacheFill, CacheWriteback, DmaElement, Direct };
  Kind kind = Kind::Direct;
  uint32_t owner = 0;  // MSHR slot / DMA buffer index
  uint32_t sub = 0;    // element index within a DMA transfer
};

// One reorderable unit: a cache line fill/writeback or one DMA element.
struct SchedItem {
  uint64_t address = 0;
  uint64_t row = 0;
  uint32_t bank = 0;
  MemOp op = MemOp::Read;
  uint64_t seq = 0;  // global arrival order; sort tie-break
  SchedTag tag;
};

struct Batch {
  std::vector<SchedItem> requests;
  MemOp op = MemOp::Read;
  uint64_t formed_at = 0;
  uint32_t bank = 0;
};

// Reorders a batch by (row, seq) through the bitonic network model; the
// input is padded with sentinel max-keys up to the next power of two.
// Returns the sorted batch and reports the comparator stages traversed.
Batch sort_batch(Batch b, uint64_t* stages_run = nullptr);

// Per-batch scheduling cost: N + (log2 N)(log2 N + 1)/2 + L_data_cond,
// always evaluated at the configured batch size; partial batches traverse
// the same fixed-depth hardware.
uint64_t schedule_cycles(uint32_t fill_count, const ControllerConfig& cfg);

// Double-buffered per-bank batch accumulation with timeout, a single shared
// sorting network, and a bypass path for sequential or sparse traffic.
// Cycle-driven through step(); sorted output lands in output().
class BatchScheduler {
public:
  BatchScheduler(const ControllerConfig& cfg, const DramTimingConfig& timing);

  enum class Enqueue { Accepted, AcceptedSealed, Backpressure };

  bool can_accept(uint32_t bank, MemOp op) const;
  Enqueue enqueue(const SchedItem& item, uint64_t cycle);

  // Timeout bookkeeping + sort-stage progress; call once per cycle.
  void step(uint64_t cycle);

  // True when the item may skip batching entirely: recent traffic is
  // row-sequential per bank, or sparse. Only offered while the batching
  // machinery is idle so a bypass can never overtake a buffered request.
  bool should_bypass(const SchedItem& item, uint64_t cycle) const;

  // Window bookkeeping; call for every request entering the scheduler path,
  // bypassed or batched.
  void observe(const SchedItem& item, uint64_t cycle, bool bypassed);

  bool idle() const;
  std::deque<SchedItem>& output() { return output_; }
  const std::deque<SchedItem>& output() const { return output_; }

  struct Stats {
    uint64_t batches = 0;
    uint64_t batched_requests = 0;
    uint64_t bypassed_requests = 0;
    uint64_t formation_cycles = 0;  // sum over batches (first store -> seal)
    uint64_t sort_stage_cycles = 0;
    double mean_fill() const { return batches ? double(batched_requests) / double(batches) : 0.0; }
    double mean_formation() const { return batches ? double(formation_cycles) / double(batches) : 0.0; }
  };
  const Stats& stats() const { return stats_; }

private:
  struct Buffer {
    std::vector<SchedItem> slots;
    MemOp active_op = MemOp::Read;
    uint64_t first_store_cycle = 0;
    bool sealed = false;
  };

  struct BankBuffers {
    Buffer bufs[2];  // double buffering: one fills while the other drains
    uint32_t filling = 0;
  };

  void seal(uint32_t bank, uint64_t cycle);
  void try_start_sort(uint64_t cycle);

  const ControllerConfig cfg_;
  std::vector<BankBuffers> banks_;
  struct SealedRef {
    uint32_t bank;
    uint32_t buf;
  };
  std::deque<SealedRef> sealed_order_;
  std::optional<Batch> in_network_;
  uint64_t sort_done_cycle_ = 0;
  uint64_t next_timeout_check_ = UINT64_MAX;
  uint64_t pending_requests_ = 0;
  std::deque<SchedItem> output_;

  // Bypass heuristics state: consecutive requests that continued their
  // bank's non-decreasing row run, per-bank last rows, recent arrivals.
  std::vector<uint64_t> last_row_;
  std::vector<bool> bank_seen_;
  uint64_t seq_run_ = 0;
  std::deque<uint64_t> arrivals_;

  Stats stats_;
};

}  // namespace mcsim
