#include "core/dma_engine.hpp"

#include "core/errors.hpp"
#include "core/scheduler.hpp"

namespace mcsim {

uint64_t dma_transfer_time(uint64_t n_elements, DmaAccessKind kind,
                           const ControllerConfig& cfg, const DramTimingConfig& timing) {
  uint64_t t_sch = cfg.enable_scheduler ? schedule_cycles(cfg.sched_batch_size, cfg) : 0;
  uint64_t per = kind == DmaAccessKind::Sequential ? DramModel::t_mem_seq(timing)
                                                   : DramModel::t_mem_rand(timing);
  return cfg.ctrl_overhead + t_sch + cfg.data_convert_latency + n_elements * per;
}

DmaEngine::DmaEngine(const ControllerConfig& cfg)
    : cfg_(cfg), buffers_(cfg.dma_parallel_count) {}

int DmaEngine::find_buffer_of_pe(uint32_t pe) const {
  for (size_t i = 0; i < buffers_.size(); ++i)
    if (buffers_[i].state != BufferState::Idle && buffers_[i].owner_pe == pe)
      return static_cast<int>(i);
  return -1;
}

DmaEngine::Accept DmaEngine::accept(const Flit& flit, uint64_t cycle) {
  if (flit.kind == FlitKind::Header) {
    if (find_buffer_of_pe(flit.pe_id) >= 0) return Accept::Backpressure;
    int idx = -1;
    for (size_t i = 0; i < buffers_.size(); ++i)
      if (buffers_[i].state == BufferState::Idle) {
        idx = static_cast<int>(i);
        break;
      }
    if (idx < 0) return Accept::Backpressure;

    Buffer& b = buffers_[idx];
    b = Buffer{};
    b.owner_pe = flit.pe_id;
    b.op = flit.op;
    b.base_address = flit.address;
    b.total_size = flit.total_size;
    b.seq = flit.seq_no;
    b.occupied_cycle = cycle;
    b.elements_total = static_cast<uint32_t>(
        (static_cast<uint64_t>(flit.total_size) + cfg_.mem_if_data_width - 1) /
        cfg_.mem_if_data_width);
    if (flit.op == MemOp::Read) {
      // Reads carry no payload; the transfer arms on the header.
      b.state = BufferState::Armed;
      b.armed_cycle = cycle;
      return Accept::Armed;
    }
    b.state = BufferState::Filling;
    b.staged.reserve(flit.total_size);
    if (flit.total_size == 0) {
      b.state = BufferState::Armed;
      b.armed_cycle = cycle;
      return Accept::Armed;
    }
    return Accept::Buffered;
  }

  int idx = find_buffer_of_pe(flit.pe_id);
  if (idx < 0 || buffers_[idx].state != BufferState::Filling)
    throw internal_error("DMA payload flit with no mapped buffer (pe " +
                         std::to_string(flit.pe_id) + ")");
  Buffer& b = buffers_[idx];
  b.staged.insert(b.staged.end(), flit.payload_segment.begin(), flit.payload_segment.end());
  b.received_bytes += static_cast<uint32_t>(flit.payload_segment.size());
  if (b.received_bytes > b.total_size)
    throw internal_error("DMA buffer overrun");
  if (b.received_bytes == b.total_size) {
    // All FLITs of the bulk transfer are available.
    b.state = BufferState::Armed;
    b.armed_cycle = cycle;
    return Accept::Armed;
  }
  return Accept::Buffered;
}

bool DmaEngine::any_armed() const {
  for (const auto& b : buffers_)
    if (b.state == BufferState::Armed) return true;
  return false;
}

bool DmaEngine::any_active() const {
  for (const auto& b : buffers_)
    if (b.state == BufferState::Active) return true;
  return false;
}

size_t DmaEngine::occupied_count() const {
  size_t n = 0;
  for (const auto& b : buffers_)
    if (b.state != BufferState::Idle) ++n;
  return n;
}

int DmaEngine::next_issue_buffer() {
  const size_t n = buffers_.size();
  for (size_t k = 0; k < n; ++k) {
    uint32_t i = (rr_next_ + k) % n;
    Buffer& b = buffers_[i];
    if (b.state == BufferState::Active && b.elements_issued < b.elements_total) {
      rr_next_ = (i + 1) % n;
      return static_cast<int>(i);
    }
  }
  return -1;
}

void DmaEngine::release(uint32_t index) {
  Buffer& b = buffers_.at(index);
  ++stats_.transfers;
  stats_.elements += b.elements_total;
  stats_.bytes += b.total_size;
  b = Buffer{};
}

}  // namespace mcsim
