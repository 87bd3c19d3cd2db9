#pragma once

#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "core/cache_engine.hpp"
#include "core/config.hpp"
#include "core/dma_engine.hpp"
#include "core/dram_model.hpp"
#include "core/event_log.hpp"
#include "core/report.hpp"
#include "core/scheduler.hpp"
#include "core/workloads.hpp"

namespace mcsim {

enum class ArbGrant : uint8_t { Cache, Dma, None };

// Top-level cycle-stepped composition: FLIT ingest, routing, the cache and
// DMA engines, the batch scheduler, one DRAM port, and the weak-consistency
// gates. One instance is strictly single-threaded and deterministic for a
// given (config, trace, seed); instances are independent.
//
// Intra-cycle order is fixed: submit, scheduler tick, DRAM, engines,
// issue/arbitration, completion release.
class Controller {
public:
  struct Options {
    bool record_event_log = false;
    bool record_cache_outcomes = false;
    bool record_read_data = false;
    uint64_t max_cycles = 0;  // 0 = unbounded; exceeded -> internal_error
  };

  // The trace is borrowed, not copied; it must outlive the controller.
  Controller(const SimConfig& cfg, const Trace& trace);
  Controller(const SimConfig& cfg, const Trace& trace, Options opts);
  Controller(const SimConfig&, Trace&&) = delete;
  Controller(const SimConfig&, Trace&&, Options) = delete;

  SimReport run();

  // Who may issue toward DRAM this cycle. Once a DMA transfer is in
  // flight it holds the grant until completion; otherwise pending
  // cache-side work wins over an armed transfer.
  ArbGrant arbitrate() const;

  const EventLog& event_log() const { return log_; }
  // 0 = miss, 1 = hit, 2 = hit under an active miss; one entry per access.
  const std::vector<uint8_t>& cache_outcomes() const { return cache_outcomes_; }
  const std::vector<uint8_t>& read_data_of(uint64_t idx) const { return read_data_.at(idx); }
  uint64_t completion_cycle_of(uint64_t idx) const { return completion_cycle_.at(idx); }
  uint64_t cycle() const { return cycle_; }

private:
  struct CacheEntry {
    uint32_t idx;        // trace index
    uint64_t ready_at;   // ingest + L_ctrl_oh
    uint32_t mark;       // burst id open at submit
    bool waiting;        // submitted while a burst was open
  };

  struct FillEvent {
    uint64_t line_addr;
    uint64_t ready_at;
    std::vector<uint8_t> data;
  };

  struct WbStash {
    uint64_t base;
    uint32_t remaining;
    std::vector<uint8_t> data;
  };

  void step();
  bool quiet() const;
  void front_end();
  void submit_cacheline(uint32_t idx);
  void submit_bulk(uint32_t idx, uint32_t buffer);
  void dram_step();
  void cache_step();
  void dma_step();
  void issue_step();
  bool push_to_dram_path(const SchedItem& item);
  void release_step();
  void check_overlap(const TraceRecord& r);

  static constexpr size_t kCacheQueueCap = 64;
  static constexpr size_t kDramFifoCap = 64;

  SimConfig cfg_;
  const Trace& trace_;
  Options opts_;

  DramModel dram_;
  MainMemory memory_;
  BatchScheduler scheduler_;
  CacheCore cache_;
  DmaEngine dma_;
  EventLog log_;

  uint64_t cycle_ = 0;
  uint64_t issue_seq_ = 0;

  // front end
  size_t next_record_ = 0;
  uint32_t flit_cursor_ = 0;
  uint64_t frontend_flits_ = 0;
  uint64_t frontend_stalls_ = 0;

  // weak-consistency epochs
  uint32_t open_burst_id_ = 0;
  uint64_t open_burst_incomplete_ = 0;
  std::deque<uint32_t> cache_marks_incomplete_;

  // cache runtime
  std::deque<CacheEntry> cache_in_;
  std::deque<FillEvent> fill_events_;
  std::deque<SchedItem> cache_issue_;
  std::unordered_map<uint64_t, uint32_t> fill_outstanding_;  // line addr -> beats left
  std::unordered_map<uint32_t, WbStash> wb_stash_;
  uint32_t next_wb_id_ = 0;
  bool cache_op_this_cycle_ = false;

  // DRAM port
  bool dram_busy_ = false;
  uint64_t dram_done_cycle_ = 0;
  SchedItem dram_current_{};

  // completion release, in submit order per class
  std::deque<uint32_t> cache_release_;
  std::deque<uint32_t> dma_release_;
  std::vector<uint64_t> ready_cycle_;
  std::vector<uint64_t> completion_cycle_;
  uint64_t completed_ = 0;

  // accounting
  uint64_t cache_busy_ = 0;
  uint64_t dma_busy_ = 0;
  uint64_t dram_busy_cycles_ = 0;
  uint64_t overlap_warnings_ = 0;

  std::vector<uint8_t> cache_outcomes_;
  std::unordered_map<uint64_t, std::vector<uint8_t>> read_data_;
};

// Convenience wrappers used by the CLI layer and tests.
SimReport run_controller(const SimConfig& cfg, const Trace& trace,
                         Controller::Options opts = Controller::Options(),
                         std::string* event_log_text = nullptr);

}  // namespace mcsim
