#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcsim {

// Aggregate results of one simulation. Figures are reported both as
// absolute cycle counts and as ratios of the controller total, since the
// reference presentation normalizes everything that way.
struct SimReport {
  std::string kind = "run";  // "run" | "baseline"
  uint64_t total_cycles = 0;

  uint64_t requests = 0;
  uint64_t completed = 0;
  uint64_t cacheline_reads = 0;
  uint64_t cacheline_writes = 0;
  uint64_t bulk_reads = 0;
  uint64_t bulk_writes = 0;

  uint64_t cache_accesses = 0;
  uint64_t cache_hits = 0;
  uint64_t cache_misses = 0;
  uint64_t cache_hits_under_miss = 0;
  uint64_t cache_evictions = 0;
  uint64_t cache_writebacks = 0;
  uint64_t cache_busy_cycles = 0;

  uint64_t dma_transfers = 0;
  uint64_t dma_elements = 0;
  uint64_t dma_busy_cycles = 0;

  uint64_t dram_accesses = 0;
  uint64_t dram_first_hits = 0;
  uint64_t dram_row_hits = 0;
  uint64_t dram_row_conflicts = 0;
  uint64_t dram_busy_cycles = 0;

  uint64_t sched_batches = 0;
  double sched_mean_fill = 0.0;
  double sched_mean_formation = 0.0;
  uint64_t sched_cycles_per_batch = 0;  // fixed cost at the configured N
  uint64_t sched_bypassed = 0;

  uint64_t frontend_flits = 0;
  uint64_t frontend_stall_cycles = 0;
  uint64_t overlap_warnings = 0;

  double cache_share = 0.0;  // busy / total
  double dma_share = 0.0;
  double dram_share = 0.0;

  bool has_baseline = false;
  uint64_t baseline_total_cycles = 0;
  double improvement = 0.0;  // 1 - controller/baseline

  void finalize_shares();
  void attach_baseline(const SimReport& baseline);
  bool operator==(const SimReport&) const = default;
};

// format: "text" (aligned table), "csv" (header + one row), "structured"
// (JSON document; "json" is accepted as an alias).
std::string report_emit(const SimReport& r, const std::string& format);
SimReport report_parse_structured(const std::string& text);

// One CSV table for a parameter sweep: a leading column holds the swept
// value, then the per-run columns.
std::string sweep_csv(const std::string& key, const std::vector<std::string>& values,
                      const std::vector<SimReport>& reports);

}  // namespace mcsim
