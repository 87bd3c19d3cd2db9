#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace mcsim {

// One record per request lifecycle event, cycle-stamped. Serialized as a
// line-oriented text document so external tools (and the consistency
// checker) can consume it.
struct Event {
  enum class Kind : uint8_t { Submit, Route, Batch, Dram, Complete };
  Kind kind = Kind::Submit;
  uint64_t cycle = 0;
  uint64_t seq = 0;        // Submit/Route/Complete
  uint32_t pe = 0;         // Submit
  AccessClass cls = AccessClass::CacheLine;  // Submit
  MemOp op = MemOp::Read;  // Submit / Batch
  uint64_t address = 0;    // Submit / Dram
  uint32_t size = 0;       // Submit
  uint8_t dest = 0;        // Route: 0 cache, 1 dma
  uint32_t bank = 0;       // Batch
  uint32_t batch_size = 0; // Batch
  uint8_t row_result = 0;  // Dram: 0 first, 1 hit, 2 conflict
};

class EventLog {
public:
  bool enabled = false;

  void submit(uint64_t cycle, uint64_t seq, uint32_t pe, AccessClass cls, MemOp op,
              uint64_t addr, uint32_t size) {
    if (!enabled) return;
    events_.push_back({Event::Kind::Submit, cycle, seq, pe, cls, op, addr, size, 0, 0, 0, 0});
  }
  void route(uint64_t cycle, uint64_t seq, bool to_dma) {
    if (!enabled) return;
    Event e;
    e.kind = Event::Kind::Route;
    e.cycle = cycle;
    e.seq = seq;
    e.dest = to_dma ? 1 : 0;
    events_.push_back(e);
  }
  void batch(uint64_t cycle, uint32_t bank, uint32_t size, MemOp op) {
    if (!enabled) return;
    Event e;
    e.kind = Event::Kind::Batch;
    e.cycle = cycle;
    e.bank = bank;
    e.batch_size = size;
    e.op = op;
    events_.push_back(e);
  }
  void dram(uint64_t cycle, uint64_t addr, uint8_t row_result) {
    if (!enabled) return;
    Event e;
    e.kind = Event::Kind::Dram;
    e.cycle = cycle;
    e.address = addr;
    e.row_result = row_result;
    events_.push_back(e);
  }
  void complete(uint64_t cycle, uint64_t seq) {
    if (!enabled) return;
    Event e;
    e.kind = Event::Kind::Complete;
    e.cycle = cycle;
    e.seq = seq;
    events_.push_back(e);
  }

  const std::vector<Event>& events() const { return events_; }
  std::string render() const;
  static std::vector<Event> parse(const std::string& text);  // throws trace_error

private:
  std::vector<Event> events_;
};

}  // namespace mcsim
