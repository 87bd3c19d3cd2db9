#include <doctest.h>

#include "core/dma_engine.hpp"
#include "core/errors.hpp"
#include "core/request_model.hpp"
#include "core/scheduler.hpp"

using namespace mcsim;

namespace {

ControllerConfig dma_cfg(uint32_t parallel = 4) {
  ControllerConfig c;
  c.dma_parallel_count = parallel;
  c.sched_batch_size = 4;  // T_sch = 9 with L_data_cond = 2
  return c;
}

Flit header(uint32_t pe, MemOp op, uint64_t addr, uint32_t total, uint32_t payload = 8) {
  Flit f;
  f.kind = FlitKind::Header;
  f.pe_id = pe;
  f.op = op;
  f.access_class = AccessClass::Bulk;
  f.address = addr;
  f.payload_size = payload;
  f.total_size = total;
  return f;
}

}  // namespace

TEST_CASE("transfer time follows the element cost model") {
  ControllerConfig cfg = dma_cfg();
  DramTimingConfig timing;  // defaults: T_mem_seq = 5, T_mem_rand = 13
  timing.address_map = AddressMap::row_bank_column(21, 4, 6);
  REQUIRE(schedule_cycles(cfg.sched_batch_size, cfg) == 9);

  CHECK(dma_transfer_time(16, DmaAccessKind::Sequential, cfg, timing) == 101);  // 21 + 16*5
  CHECK(dma_transfer_time(16, DmaAccessKind::Random, cfg, timing) == 229);      // 21 + 16*13
  CHECK(dma_transfer_time(0, DmaAccessKind::Sequential, cfg, timing) == 21);

  cfg.enable_scheduler = false;  // no batching stage in the path
  CHECK(dma_transfer_time(0, DmaAccessKind::Sequential, cfg, timing) == 12);
}

TEST_CASE("header claims a buffer; reads arm immediately") {
  DmaEngine dma(dma_cfg());
  auto acc = dma.accept(header(3, MemOp::Read, 0x1000, 4096), 5);
  CHECK(acc == DmaEngine::Accept::Armed);
  const auto& b = dma.buffers()[0];
  CHECK(b.state == DmaEngine::BufferState::Armed);
  CHECK(b.owner_pe == 3);
  CHECK(b.elements_total == 64);  // 4096 / 64
  CHECK(dma.occupied_count() == 1);
}

TEST_CASE("writes arm once every flit arrived") {
  DmaEngine dma(dma_cfg());
  CHECK(dma.accept(header(1, MemOp::Write, 0, 24, 8), 0) == DmaEngine::Accept::Buffered);
  Flit p;
  p.kind = FlitKind::Payload;
  p.pe_id = 1;
  p.op = MemOp::Write;
  p.access_class = AccessClass::Bulk;
  p.payload_segment = std::vector<uint8_t>(8, 0xAA);
  CHECK(dma.accept(p, 1) == DmaEngine::Accept::Buffered);
  CHECK(dma.accept(p, 2) == DmaEngine::Accept::Buffered);
  CHECK(dma.accept(p, 3) == DmaEngine::Accept::Armed);
  CHECK(dma.buffers()[0].received_bytes == 24);
  CHECK(dma.buffers()[0].staged.size() == 24);
}

TEST_CASE("all buffers occupied means backpressure") {
  DmaEngine dma(dma_cfg(2));
  CHECK(dma.accept(header(0, MemOp::Read, 0, 256), 0) == DmaEngine::Accept::Armed);
  CHECK(dma.accept(header(1, MemOp::Read, 512, 256), 0) == DmaEngine::Accept::Armed);
  CHECK(dma.accept(header(2, MemOp::Read, 1024, 256), 0) == DmaEngine::Accept::Backpressure);
  dma.release(0);
  CHECK(dma.occupied_count() == 1);
  CHECK(dma.accept(header(2, MemOp::Read, 1024, 256), 1) == DmaEngine::Accept::Armed);
}

TEST_CASE("one buffer per PE at a time") {
  DmaEngine dma(dma_cfg(4));
  CHECK(dma.accept(header(5, MemOp::Read, 0, 256), 0) == DmaEngine::Accept::Armed);
  CHECK(dma.accept(header(5, MemOp::Read, 512, 256), 1) == DmaEngine::Accept::Backpressure);
}

TEST_CASE("payload flit without a mapped buffer is a protocol error") {
  DmaEngine dma(dma_cfg());
  Flit p;
  p.kind = FlitKind::Payload;
  p.pe_id = 6;
  p.access_class = AccessClass::Bulk;
  CHECK_THROWS_AS(dma.accept(p, 0), SimError);
}

TEST_CASE("round-robin issue covers all active transfers") {
  DmaEngine dma(dma_cfg(3));
  dma.accept(header(0, MemOp::Read, 0, 128), 0);
  dma.accept(header(1, MemOp::Read, 4096, 128), 0);
  for (auto& b : dma.buffers())
    if (b.state == DmaEngine::BufferState::Armed) b.state = DmaEngine::BufferState::Active;

  int seen0 = 0, seen1 = 0;
  for (int i = 0; i < 4; ++i) {
    int idx = dma.next_issue_buffer();
    REQUIRE(idx >= 0);
    auto& b = dma.buffers()[idx];
    ++b.elements_issued;
    (idx == 0 ? seen0 : seen1)++;
  }
  CHECK(seen0 == 2);  // 128 B = 2 elements each
  CHECK(seen1 == 2);
  CHECK(dma.next_issue_buffer() == -1);  // everything issued
}

TEST_CASE("element count rounds up") {
  DmaEngine dma(dma_cfg());
  dma.accept(header(0, MemOp::Read, 0, 100), 0);
  CHECK(dma.buffers()[0].elements_total == 2);  // ceil(100/64)
}
