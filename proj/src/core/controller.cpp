#include "core/controller.hpp"

#include <algorithm>

#include "core/errors.hpp"
#include "core/request_model.hpp"

namespace mcsim {

Controller::Controller(const SimConfig& cfg, const Trace& trace)
    : Controller(cfg, trace, Options()) {}

Controller::Controller(const SimConfig& cfg, const Trace& trace, Options opts)
    : cfg_(cfg),
      trace_(trace),
      opts_(opts),
      dram_(cfg.dram, cfg.ctrl.mem_if_addr_width),
      scheduler_(cfg.ctrl, cfg.dram),
      cache_(cfg.ctrl),
      dma_(cfg.ctrl),
      ready_cycle_(trace.records.size(), UINT64_MAX),
      completion_cycle_(trace.records.size(), UINT64_MAX) {
  log_.enabled = opts.record_event_log;
  std::string err = validate_trace(trace, cfg.ctrl);
  if (!err.empty()) throw trace_error(err);
  ValidationResult v = validate(cfg);
  if (!v.ok()) throw config_error(v.to_string());
}

bool Controller::quiet() const {
  return next_record_ == trace_.records.size() && cache_in_.empty() && fill_events_.empty() &&
         cache_issue_.empty() && !cache_.has_outstanding_miss() && dma_.occupied_count() == 0 &&
         scheduler_.idle() && scheduler_.output().empty() && !dram_busy_ &&
         cache_release_.empty() && dma_release_.empty() && wb_stash_.empty();
}

SimReport Controller::run() {
  while (!quiet()) {
    step();
    if (opts_.max_cycles && cycle_ > opts_.max_cycles)
      throw internal_error("simulation exceeded max_cycles guard");
  }

  SimReport r;
  r.kind = "run";
  r.total_cycles = cycle_;
  r.requests = trace_.records.size();
  r.completed = completed_;
  for (const TraceRecord& rec : trace_.records) {
    if (rec.access_class == AccessClass::CacheLine)
      ++(rec.op == MemOp::Read ? r.cacheline_reads : r.cacheline_writes);
    else
      ++(rec.op == MemOp::Read ? r.bulk_reads : r.bulk_writes);
  }
  const auto& cs = cache_.stats();
  r.cache_accesses = cs.accesses;
  r.cache_hits = cs.hits;
  r.cache_misses = cs.misses;
  r.cache_hits_under_miss = cs.hits_under_miss;
  r.cache_evictions = cs.evictions;
  r.cache_writebacks = cs.writebacks;
  r.cache_busy_cycles = cache_busy_;
  const auto& ds = dma_.stats();
  r.dma_transfers = ds.transfers;
  r.dma_elements = ds.elements;
  r.dma_busy_cycles = dma_busy_;
  const auto& rs = dram_.stats();
  r.dram_first_hits = rs.first_hits;
  r.dram_row_hits = rs.row_hits;
  r.dram_row_conflicts = rs.row_conflicts;
  r.dram_accesses = rs.total();
  r.dram_busy_cycles = dram_busy_cycles_;
  const auto& ss = scheduler_.stats();
  r.sched_batches = ss.batches;
  r.sched_mean_fill = ss.mean_fill();
  r.sched_mean_formation = ss.mean_formation();
  r.sched_cycles_per_batch = schedule_cycles(cfg_.ctrl.sched_batch_size, cfg_.ctrl);
  r.sched_bypassed = ss.bypassed_requests;
  r.frontend_flits = frontend_flits_;
  r.frontend_stall_cycles = frontend_stalls_;
  r.overlap_warnings = overlap_warnings_;
  r.finalize_shares();
  return r;
}

void Controller::step() {
  cache_op_this_cycle_ = false;

  front_end();
  scheduler_.step(cycle_);
  dram_step();
  cache_step();
  dma_step();
  issue_step();
  release_step();

  // Attribute the cycle to at most one engine: an in-flight DMA transfer
  // owns it, otherwise any cache-side progress or outstanding miss.
  bool dma_active = dma_.any_active();
  bool cache_active =
      !dma_active && (cache_op_this_cycle_ || cache_.has_outstanding_miss() ||
                      !cache_issue_.empty() || !wb_stash_.empty());
  if (dma_active) ++dma_busy_;
  if (cache_active) ++cache_busy_;
  if (dram_busy_) ++dram_busy_cycles_;

  ++cycle_;
}

void Controller::check_overlap(const TraceRecord& r) {
  uint64_t lo = r.address, hi = r.address + r.total_size;
  for (const auto& b : dma_.buffers()) {
    if (b.state == DmaEngine::BufferState::Idle) continue;
    if (lo < b.base_address + b.total_size && b.base_address < hi) {
      ++overlap_warnings_;
      return;
    }
  }
}

void Controller::front_end() {
  if (next_record_ == trace_.records.size()) return;
  const TraceRecord& rec = trace_.records[next_record_];
  if (cycle_ < rec.arrival_cycle) return;
  uint32_t idx = static_cast<uint32_t>(next_record_);

  if (rec.access_class == AccessClass::CacheLine) {
    uint32_t total_flits = rec.op == MemOp::Write ? 2 : 1;
    if (flit_cursor_ + 1 == total_flits) {
      if (cache_in_.size() >= kCacheQueueCap) {
        ++frontend_stalls_;
        return;
      }
      ++frontend_flits_;
      flit_cursor_ = 0;
      ++next_record_;
      submit_cacheline(idx);
    } else {
      ++frontend_flits_;
      ++flit_cursor_;
    }
    return;
  }

  // Bulk: stream header + payload flits into the DMA engine.
  uint32_t payload_size = Trace::element_size(rec, cfg_.ctrl);
  uint32_t payload_flits =
      rec.op == MemOp::Write ? (rec.total_size + payload_size - 1) / payload_size : 0;
  uint32_t total_flits = 1 + payload_flits;

  Flit f;
  f.pe_id = rec.pe_id;
  f.op = rec.op;
  f.access_class = AccessClass::Bulk;
  f.address = rec.address;
  f.payload_size = payload_size;
  f.total_size = rec.total_size;
  f.seq_no = idx;
  f.flit_index = flit_cursor_;
  if (flit_cursor_ == 0) {
    f.kind = FlitKind::Header;
  } else {
    f.kind = FlitKind::Payload;
    uint32_t off = (flit_cursor_ - 1) * payload_size;
    uint32_t seg = std::min(payload_size, rec.total_size - off);
    f.payload_segment = synth_payload(trace_.meta.seed, rec.address + off, seg);
  }

  DmaEngine::Accept acc = dma_.accept(f, cycle_);
  if (acc == DmaEngine::Accept::Backpressure) {
    ++frontend_stalls_;
    return;
  }
  ++frontend_flits_;
  if (flit_cursor_ + 1 == total_flits) {
    if (acc != DmaEngine::Accept::Armed)
      throw internal_error("bulk transfer did not arm on its final flit");
    flit_cursor_ = 0;
    ++next_record_;
    int buf = -1;
    for (size_t i = 0; i < dma_.buffers().size(); ++i)
      if (dma_.buffers()[i].state != DmaEngine::BufferState::Idle &&
          dma_.buffers()[i].owner_pe == rec.pe_id)
        buf = static_cast<int>(i);
    submit_bulk(idx, static_cast<uint32_t>(buf));
  } else {
    ++flit_cursor_;
  }
}

void Controller::submit_cacheline(uint32_t idx) {
  const TraceRecord& rec = trace_.records[idx];
  log_.submit(cycle_, idx, rec.pe_id, rec.access_class, rec.op, rec.address, rec.total_size);
  log_.route(cycle_, idx, false);
  check_overlap(rec);
  CacheEntry e;
  e.idx = idx;
  e.ready_at = cycle_ + cfg_.ctrl.ctrl_overhead;
  e.mark = open_burst_id_;
  e.waiting = open_burst_incomplete_ > 0;
  cache_in_.push_back(e);
  cache_marks_incomplete_.push_back(e.mark);
  cache_release_.push_back(idx);
}

void Controller::submit_bulk(uint32_t idx, uint32_t buffer) {
  const TraceRecord& rec = trace_.records[idx];
  log_.submit(cycle_, idx, rec.pe_id, rec.access_class, rec.op, rec.address, rec.total_size);
  log_.route(cycle_, idx, true);
  if (open_burst_incomplete_ == 0) ++open_burst_id_;
  ++open_burst_incomplete_;
  dma_.buffers().at(buffer).burst_id = open_burst_id_;
  dma_release_.push_back(idx);
}

void Controller::dram_step() {
  if (dram_busy_ && cycle_ >= dram_done_cycle_) {
    dram_busy_ = false;
    const SchedItem& item = dram_current_;
    switch (item.tag.kind) {
      case SchedTag::Kind::CacheFill: {
        uint64_t line = cache_.line_address_of(item.address);
        auto it = fill_outstanding_.find(line);
        if (it == fill_outstanding_.end()) throw internal_error("fill beat with no record");
        if (--it->second == 0) {
          fill_outstanding_.erase(it);
          FillEvent ev;
          ev.line_addr = line;
          ev.ready_at = cycle_;
          ev.data = memory_.read(line, cache_.line_bytes());
          fill_events_.push_back(std::move(ev));
        }
        break;
      }
      case SchedTag::Kind::CacheWriteback: {
        auto it = wb_stash_.find(item.tag.owner);
        if (it == wb_stash_.end()) throw internal_error("writeback beat with no stash");
        WbStash& wb = it->second;
        uint64_t off = item.address - wb.base;
        uint32_t n = std::min<uint64_t>(cfg_.ctrl.mem_if_data_width, wb.data.size() - off);
        memory_.write(item.address, std::span<const uint8_t>(wb.data.data() + off, n));
        if (--wb.remaining == 0) wb_stash_.erase(it);
        break;
      }
      case SchedTag::Kind::DmaElement: {
        auto& b = dma_.buffers().at(item.tag.owner);
        uint64_t off = static_cast<uint64_t>(item.tag.sub) * cfg_.ctrl.mem_if_data_width;
        if (b.op == MemOp::Write) {
          uint32_t n = std::min<uint64_t>(cfg_.ctrl.mem_if_data_width, b.total_size - off);
          memory_.write(item.address, std::span<const uint8_t>(b.staged.data() + off, n));
        }
        if (++b.elements_done == b.elements_total) {
          ready_cycle_.at(b.seq) = cycle_ + cfg_.ctrl.data_convert_latency;
          dma_.release(item.tag.owner);
        }
        break;
      }
      case SchedTag::Kind::Direct:
        break;
    }
  }

  if (!dram_busy_ && !scheduler_.output().empty()) {
    SchedItem item = scheduler_.output().front();
    scheduler_.output().pop_front();
    DecodedAddress d = dram_.decode(item.address);
    log_.dram(cycle_, item.address, static_cast<uint8_t>(dram_.classify(d)));
    uint64_t lat = dram_.access(d);
    dram_current_ = item;
    dram_busy_ = true;
    dram_done_cycle_ = cycle_ + lat;
  }
}

void Controller::cache_step() {
  // MEM pipeline has priority and stalls the PE pipeline for the cycle.
  if (!fill_events_.empty() && fill_events_.front().ready_at <= cycle_) {
    FillEvent ev = std::move(fill_events_.front());
    fill_events_.pop_front();
    auto res = cache_.mem_fill(ev.line_addr, ev.data);
    for (size_t i = 0; i < res.released.size(); ++i) {
      const auto& w = res.released[i];
      ready_cycle_.at(w.seq) = cycle_ + cfg_.ctrl.mem_pipeline_fill;
      if (opts_.record_read_data && w.op == MemOp::Read) read_data_[w.seq] = res.read_data[i];
    }
    cache_op_this_cycle_ = true;
    return;
  }

  if (cache_in_.empty()) return;
  const CacheEntry& e = cache_in_.front();
  if (cycle_ < e.ready_at) return;
  // Requests that arrived during a bulk burst stay gated until it drains.
  if (e.waiting && e.mark >= open_burst_id_ && open_burst_incomplete_ > 0) return;

  const TraceRecord& rec = trace_.records[e.idx];
  std::vector<uint8_t> wdata;
  if (rec.op == MemOp::Write) wdata = synth_payload(trace_.meta.seed, rec.address, rec.total_size);
  auto res = cache_.pe_access(rec.op, rec.address, rec.total_size,
                              wdata.empty() ? nullptr : wdata.data(), e.idx);
  if (!res.accepted) return;  // MSHR or victim stall; retry next cycle

  cache_op_this_cycle_ = true;
  if (opts_.record_cache_outcomes)
    cache_outcomes_.push_back(res.hit ? (res.under_active_miss ? 2 : 1) : 0);

  if (res.hit && !res.deferred) {
    ready_cycle_.at(e.idx) = cycle_ + cfg_.ctrl.cache_pipeline_fill;
    if (opts_.record_read_data && rec.op == MemOp::Read) read_data_[e.idx] = res.read_data;
  }
  if (res.needs_fill) {
    uint32_t beat = cfg_.ctrl.mem_if_data_width;
    if (res.writeback.has_value()) {
      uint32_t id = next_wb_id_++;
      const auto& wb = *res.writeback;
      uint32_t beats = (static_cast<uint32_t>(wb.data.size()) + beat - 1) / beat;
      wb_stash_[id] = {wb.address, beats, wb.data};
      for (uint32_t k = 0; k < beats; ++k) {
        SchedItem item;
        item.address = wb.address + static_cast<uint64_t>(k) * beat;
        DecodedAddress d = dram_.decode(item.address);
        item.row = d.row;
        item.bank = d.bank;
        item.op = MemOp::Write;
        item.seq = issue_seq_++;
        item.tag = {SchedTag::Kind::CacheWriteback, id, k};
        cache_issue_.push_back(item);
      }
    }
    uint32_t beats = (cache_.line_bytes() + beat - 1) / beat;
    fill_outstanding_[res.line_address] = beats;
    for (uint32_t k = 0; k < beats; ++k) {
      SchedItem item;
      item.address = res.line_address + static_cast<uint64_t>(k) * beat;
      DecodedAddress d = dram_.decode(item.address);
      item.row = d.row;
      item.bank = d.bank;
      item.op = MemOp::Read;
      item.seq = issue_seq_++;
      item.tag = {SchedTag::Kind::CacheFill, 0, k};
      cache_issue_.push_back(item);
    }
  }
  cache_in_.pop_front();
}

void Controller::dma_step() {
  // Armed transfers may start once the controller-overhead window elapsed,
  // every earlier-arriving cache request has completed, and no cache-side
  // DRAM work is pending (cache wins while no transfer is active).
  for (auto& b : dma_.buffers()) {
    if (b.state != DmaEngine::BufferState::Armed) continue;
    if (cycle_ < b.armed_cycle + cfg_.ctrl.ctrl_overhead) continue;
    bool cache_clear = cache_marks_incomplete_.empty() ||
                       cache_marks_incomplete_.front() >= b.burst_id;
    if (!cache_clear || !cache_issue_.empty()) continue;
    b.state = DmaEngine::BufferState::Active;
    b.start_cycle = cycle_;
  }
}

bool Controller::push_to_dram_path(const SchedItem& item) {
  if (scheduler_.output().size() >= kDramFifoCap) return false;
  if (scheduler_.should_bypass(item, cycle_)) {
    scheduler_.output().push_back(item);
    scheduler_.observe(item, cycle_, true);
    return true;
  }
  if (scheduler_.enqueue(item, cycle_) == BatchScheduler::Enqueue::Backpressure) return false;
  scheduler_.observe(item, cycle_, false);
  return true;
}

void Controller::issue_step() {
  if (!dma_.any_active()) {
    // Cache-side fills and writebacks issue in order, one per cycle.
    if (!cache_issue_.empty() && push_to_dram_path(cache_issue_.front()))
      cache_issue_.pop_front();
    return;
  }
  // One DMA element per cycle, round-robin over active transfers.
  int idx = dma_.next_issue_buffer();
  if (idx < 0) return;
  auto& b = dma_.buffers()[idx];
  SchedItem item;
  item.address = b.base_address +
                 static_cast<uint64_t>(b.elements_issued) * cfg_.ctrl.mem_if_data_width;
  DecodedAddress d = dram_.decode(item.address);
  item.row = d.row;
  item.bank = d.bank;
  item.op = b.op;
  item.seq = issue_seq_++;
  item.tag = {SchedTag::Kind::DmaElement, static_cast<uint32_t>(idx), b.elements_issued};
  if (push_to_dram_path(item)) ++b.elements_issued;
}

void Controller::release_step() {
  while (!cache_release_.empty() && ready_cycle_[cache_release_.front()] <= cycle_) {
    uint32_t idx = cache_release_.front();
    cache_release_.pop_front();
    completion_cycle_[idx] = cycle_;
    ++completed_;
    cache_marks_incomplete_.pop_front();
    log_.complete(cycle_, idx);
  }
  while (!dma_release_.empty() && ready_cycle_[dma_release_.front()] <= cycle_) {
    uint32_t idx = dma_release_.front();
    dma_release_.pop_front();
    completion_cycle_[idx] = cycle_;
    ++completed_;
    --open_burst_incomplete_;
    log_.complete(cycle_, idx);
  }
}

ArbGrant Controller::arbitrate() const {
  if (dma_.any_active()) return ArbGrant::Dma;
  if (!cache_issue_.empty()) return ArbGrant::Cache;
  if (dma_.any_armed()) return ArbGrant::Dma;
  return ArbGrant::None;
}

SimReport run_controller(const SimConfig& cfg, const Trace& trace, Controller::Options opts,
                         std::string* event_log_text) {
  if (event_log_text) opts.record_event_log = true;
  Controller c(cfg, trace, opts);
  SimReport r = c.run();
  if (event_log_text) *event_log_text = c.event_log().render();
  return r;
}

}  // namespace mcsim
