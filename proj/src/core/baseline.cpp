#include "core/baseline.hpp"

#include <algorithm>

#include "core/dram_model.hpp"
#include "core/errors.hpp"
#include "core/event_log.hpp"

namespace mcsim {

SimReport run_baseline(const SimConfig& cfg, const Trace& trace, std::string* event_log_text) {
  ValidationResult v = validate(cfg);
  if (!v.ok()) throw config_error(v.to_string());
  std::string err = validate_trace(trace, cfg.ctrl);
  if (!err.empty()) throw trace_error(err);

  DramModel dram(cfg.dram, cfg.ctrl.mem_if_addr_width);
  EventLog log;
  log.enabled = event_log_text != nullptr;

  const uint32_t beat = std::min(cfg.ctrl.app_io_data_width, cfg.ctrl.mem_if_data_width);
  uint64_t now = 0;
  uint64_t busy = 0;

  SimReport r;
  r.kind = "baseline";
  r.requests = trace.records.size();

  for (size_t i = 0; i < trace.records.size(); ++i) {
    const TraceRecord& rec = trace.records[i];
    if (rec.access_class == AccessClass::CacheLine)
      ++(rec.op == MemOp::Read ? r.cacheline_reads : r.cacheline_writes);
    else
      ++(rec.op == MemOp::Read ? r.bulk_reads : r.bulk_writes);

    now = std::max(now, rec.arrival_cycle);
    log.submit(now, i, rec.pe_id, rec.access_class, rec.op, rec.address, rec.total_size);
    uint64_t beats = (static_cast<uint64_t>(rec.total_size) + beat - 1) / beat;
    for (uint64_t k = 0; k < beats; ++k) {
      DecodedAddress d = dram.decode(rec.address + k * beat);
      log.dram(now, rec.address + k * beat, static_cast<uint8_t>(dram.classify(d)));
      uint64_t lat = dram.access(d);
      now += lat;
      busy += lat;
    }
    log.complete(now, i);
    ++r.completed;
  }

  r.total_cycles = now;
  const RowStats& rs = dram.stats();
  r.dram_first_hits = rs.first_hits;
  r.dram_row_hits = rs.row_hits;
  r.dram_row_conflicts = rs.row_conflicts;
  r.dram_accesses = rs.total();
  r.dram_busy_cycles = busy;
  r.finalize_shares();
  if (event_log_text) *event_log_text = log.render();
  return r;
}

}  // namespace mcsim
