#include "core/scheduler.hpp"

#include <algorithm>
#include <bit>

#include "core/bitonic.hpp"

namespace mcsim {

uint64_t schedule_cycles(uint32_t fill_count, const ControllerConfig& cfg) {
  (void)fill_count;  // the hardware cost is fixed by the configured size
  uint32_t n = cfg.sched_batch_size;
  return static_cast<uint64_t>(n) + bitonic_stage_count(n) + cfg.data_cond_latency;
}

Batch sort_batch(Batch b, uint64_t* stages_run) {
  if (b.requests.empty()) {
    if (stages_run) *stages_run = 0;
    return b;
  }
  struct Keyed {
    uint64_t row;
    uint64_t seq;
    uint32_t idx;  // UINT32_MAX marks a sentinel pad slot
  };
  size_t n = std::bit_ceil(b.requests.size());
  std::vector<Keyed> keys(n);
  for (size_t i = 0; i < b.requests.size(); ++i)
    keys[i] = {b.requests[i].row, b.requests[i].seq, static_cast<uint32_t>(i)};
  for (size_t i = b.requests.size(); i < n; ++i)
    keys[i] = {UINT64_MAX, UINT64_MAX, UINT32_MAX};

  auto stats = bitonic_sort(std::span<Keyed>(keys), [](const Keyed& a, const Keyed& b) {
    return a.row != b.row ? a.row < b.row : a.seq < b.seq;
  });
  if (stages_run) *stages_run = stats.stages;

  std::vector<SchedItem> sorted;
  sorted.reserve(b.requests.size());
  for (const auto& k : keys)
    if (k.idx != UINT32_MAX) sorted.push_back(b.requests[k.idx]);
  b.requests = std::move(sorted);
  return b;
}

BatchScheduler::BatchScheduler(const ControllerConfig& cfg, const DramTimingConfig& timing)
    : cfg_(cfg),
      banks_(timing.num_banks),
      last_row_(timing.num_banks, 0),
      bank_seen_(timing.num_banks, false) {}

bool BatchScheduler::can_accept(uint32_t bank, MemOp op) const {
  const BankBuffers& bb = banks_.at(bank);
  const Buffer& fill = bb.bufs[bb.filling];
  if (fill.sealed) return false;
  if (!fill.slots.empty() && fill.active_op != op)
    return !bb.bufs[1 - bb.filling].sealed;  // op switch needs the other buffer free
  return true;
}

BatchScheduler::Enqueue BatchScheduler::enqueue(const SchedItem& item, uint64_t cycle) {
  BankBuffers& bb = banks_.at(item.bank);
  Buffer* fill = &bb.bufs[bb.filling];

  if (fill->sealed) return Enqueue::Backpressure;

  bool sealed_now = false;
  if (!fill->slots.empty() && fill->active_op != item.op) {
    // A batch holds a single request type; close it and switch buffers.
    if (bb.bufs[1 - bb.filling].sealed) return Enqueue::Backpressure;
    seal(item.bank, cycle);
    sealed_now = true;
    fill = &bb.bufs[bb.filling];
  }

  if (fill->slots.empty()) {
    fill->active_op = item.op;
    fill->first_store_cycle = cycle;
    next_timeout_check_ = std::min(next_timeout_check_, cycle + cfg_.sched_timeout);
  }
  fill->slots.push_back(item);
  ++pending_requests_;

  if (fill->slots.size() >= cfg_.sched_batch_size) {
    seal(item.bank, cycle);
    sealed_now = true;
  }
  return sealed_now ? Enqueue::AcceptedSealed : Enqueue::Accepted;
}

void BatchScheduler::seal(uint32_t bank, uint64_t cycle) {
  BankBuffers& bb = banks_[bank];
  Buffer& fill = bb.bufs[bb.filling];
  if (fill.slots.empty() || fill.sealed) return;
  fill.sealed = true;
  stats_.formation_cycles += cycle - fill.first_store_cycle;
  sealed_order_.push_back({bank, bb.filling});
  bb.filling = 1 - bb.filling;
}

void BatchScheduler::try_start_sort(uint64_t cycle) {
  if (in_network_.has_value() || sealed_order_.empty()) return;
  SealedRef ref = sealed_order_.front();
  sealed_order_.pop_front();
  Buffer& drain = banks_[ref.bank].bufs[ref.buf];

  Batch b;
  b.requests = std::move(drain.slots);
  b.op = drain.active_op;
  b.formed_at = drain.first_store_cycle;
  b.bank = ref.bank;
  drain.slots.clear();
  drain.sealed = false;

  uint64_t cost = schedule_cycles(static_cast<uint32_t>(b.requests.size()), cfg_);
  sort_done_cycle_ = cycle + cost;
  stats_.sort_stage_cycles += cost;
  in_network_ = sort_batch(std::move(b));
}

void BatchScheduler::step(uint64_t cycle) {
  if (cycle >= next_timeout_check_) {
    next_timeout_check_ = UINT64_MAX;
    for (uint32_t bank = 0; bank < banks_.size(); ++bank) {
      Buffer& fill = banks_[bank].bufs[banks_[bank].filling];
      if (fill.slots.empty() || fill.sealed) continue;
      uint64_t deadline = fill.first_store_cycle + cfg_.sched_timeout;
      if (cycle >= deadline)
        seal(bank, cycle);
      else
        next_timeout_check_ = std::min(next_timeout_check_, deadline);
    }
  }

  if (in_network_.has_value() && cycle >= sort_done_cycle_) {
    Batch& b = *in_network_;
    ++stats_.batches;
    stats_.batched_requests += b.requests.size();
    pending_requests_ -= b.requests.size();
    for (auto& item : b.requests) output_.push_back(item);
    in_network_.reset();
  }

  try_start_sort(cycle);
}

bool BatchScheduler::idle() const {
  return pending_requests_ == 0 && !in_network_.has_value() && sealed_order_.empty();
}

bool BatchScheduler::should_bypass(const SchedItem& item, uint64_t cycle) const {
  if (!cfg_.enable_scheduler) return true;
  if (!idle()) return false;  // a bypass must never overtake buffered work

  // Sparse traffic: mean inter-arrival over the window at or above the
  // configured interval (or not enough recent traffic to judge).
  if (arrivals_.size() < cfg_.bypass_seq_window) return true;
  uint64_t span = cycle - arrivals_.front();
  if (span >= static_cast<uint64_t>(cfg_.bypass_traffic_interval) * arrivals_.size())
    return true;

  // Row-sequential: the last window worth of requests all continued their
  // bank's non-decreasing row run, and this one does too.
  if (seq_run_ >= cfg_.bypass_seq_window &&
      (!bank_seen_[item.bank] || item.row >= last_row_[item.bank]))
    return true;
  return false;
}

void BatchScheduler::observe(const SchedItem& item, uint64_t cycle, bool bypassed) {
  if (bypassed) ++stats_.bypassed_requests;
  if (!bank_seen_[item.bank] || item.row >= last_row_[item.bank])
    ++seq_run_;
  else
    seq_run_ = 0;
  bank_seen_[item.bank] = true;
  last_row_[item.bank] = item.row;
  arrivals_.push_back(cycle);
  if (arrivals_.size() > cfg_.bypass_seq_window) arrivals_.pop_front();
}

}  // namespace mcsim
