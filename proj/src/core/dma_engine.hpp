#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/config.hpp"
#include "core/dram_model.hpp"
#include "core/types.hpp"

namespace mcsim {

enum class DmaAccessKind : uint8_t { Sequential, Random };

// Analytical transfer cost for N elements:
// L_ctrl_oh + T_sch + L_data_convert + N * (T_mem_seq | T_mem_rand).
// T_sch is the configured per-batch scheduling cost, or 0 with the
// scheduler disabled.
uint64_t dma_transfer_time(uint64_t n_elements, DmaAccessKind kind,
                           const ControllerConfig& cfg, const DramTimingConfig& timing);

// Parallel DMA buffers keyed by PE id. A header flit claims an idle buffer;
// payload flits follow their PE's mapping; the transfer arms once every
// flit arrived (writes) or immediately (reads). Element pacing and DRAM
// hand-off are driven from outside.
class DmaEngine {
public:
  enum class BufferState : uint8_t { Idle, Filling, Armed, Active };

  struct Buffer {
    BufferState state = BufferState::Idle;
    uint32_t owner_pe = 0;
    MemOp op = MemOp::Read;
    uint64_t base_address = 0;
    uint32_t total_size = 0;
    uint32_t received_bytes = 0;
    std::vector<uint8_t> staged;  // write payload
    uint64_t seq = 0;
    uint64_t occupied_cycle = 0;
    uint64_t armed_cycle = 0;
    uint64_t start_cycle = 0;  // first element issued
    uint32_t elements_total = 0;
    uint32_t elements_issued = 0;
    uint32_t elements_done = 0;
    uint32_t burst_id = 0;
  };

  enum class Accept : uint8_t { Buffered, Armed, Backpressure };

  DmaEngine(const ControllerConfig& cfg);

  // Header/payload intake. Backpressure when no buffer is idle or the PE
  // already owns one; a payload flit with no mapped buffer is a protocol
  // error (internal_error).
  Accept accept(const Flit& flit, uint64_t cycle);

  bool any_armed() const;
  bool any_active() const;
  size_t occupied_count() const;
  std::vector<Buffer>& buffers() { return buffers_; }
  const std::vector<Buffer>& buffers() const { return buffers_; }

  // Round-robin pick of the next active buffer with elements left to issue.
  int next_issue_buffer();

  void release(uint32_t index);  // transfer done; buffer returns to idle

  struct Stats {
    uint64_t transfers = 0;
    uint64_t elements = 0;
    uint64_t bytes = 0;
  };
  const Stats& stats() const { return stats_; }

private:
  int find_buffer_of_pe(uint32_t pe) const;

  const ControllerConfig cfg_;
  std::vector<Buffer> buffers_;
  uint32_t rr_next_ = 0;
  Stats stats_;
};

}  // namespace mcsim
