#include <doctest.h>

#include <random>

#include "core/cache_engine.hpp"
#include "core/errors.hpp"
#include "oracles.hpp"

using namespace mcsim;

namespace {

ControllerConfig cache_cfg(uint32_t line_bits, uint32_t ways, uint32_t lines) {
  ControllerConfig c;
  c.cache_line_width = line_bits;
  c.cache_associativity = ways;
  c.cache_num_lines = lines;
  return c;
}

// Drives the functional core with instant fills.
struct Harness {
  CacheCore core;
  explicit Harness(const ControllerConfig& cfg) : core(cfg) {}

  CacheCore::AccessResult access(MemOp op, uint64_t addr, uint32_t size,
                                 const std::vector<uint8_t>& data = {}, uint64_t seq = 0) {
    auto res = core.pe_access(op, addr, size, data.empty() ? nullptr : data.data(), seq);
    REQUIRE(res.accepted);
    if (res.needs_fill) core.mem_fill(res.line_address, fill_data);
    return res;
  }
  std::vector<uint8_t> fill_data = std::vector<uint8_t>(64, 0);
};

}  // namespace

TEST_CASE("pipeline arbitration gives the MEM side priority") {
  CHECK(arbitrate_pipelines(true, true) == PipelineGrant::RunMem);
  CHECK(arbitrate_pipelines(false, true) == PipelineGrant::RunMem);
  CHECK(arbitrate_pipelines(true, false) == PipelineGrant::RunPe);
  CHECK(arbitrate_pipelines(false, false) == PipelineGrant::Idle);
}

TEST_CASE("cache_time evaluates the per-access cost model") {
  ControllerConfig cfg;
  cfg.ctrl_overhead = 10;
  cfg.cache_pipeline_fill = 4;

  SUBCASE("one plain hit") {
    std::vector<CacheAccessOutcome> o = {{true, false, 0}};
    CHECK(cache_time(o, cfg) == 15);
  }
  SUBCASE("one miss with its memory-path cost") {
    std::vector<CacheAccessOutcome> o = {{false, false, 3 + 9 + 9}};
    CHECK(cache_time(o, cfg) == 35);
  }
  SUBCASE("empty slice is only the fixed overheads") {
    CHECK(cache_time({}, cfg) == 14);
  }
  SUBCASE("hits under an active miss are free") {
    std::vector<CacheAccessOutcome> o = {{true, true, 0}, {true, true, 0}, {true, false, 0}};
    CHECK(cache_time(o, cfg) == 15);
  }
}

TEST_CASE("fill then read hits") {
  Harness h(cache_cfg(512, 2, 64));
  auto first = h.access(MemOp::Read, 0x1000, 8);
  CHECK_FALSE(first.hit);
  auto second = h.access(MemOp::Read, 0x1000, 8);
  CHECK(second.hit);
}

TEST_CASE("cold cache always misses") {
  Harness h(cache_cfg(512, 4, 256));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto res = h.access(MemOp::Read, (rng() % 4096) * 4096, 8);
    CHECK_FALSE(res.hit);
  }
}

TEST_CASE("LRU eviction in a 2-way set matches the described sequence") {
  // access A, B, A, then a third line mapping to the same set: B goes
  ControllerConfig cfg = cache_cfg(512, 2, 16);  // 8 sets, line 64 B
  Harness h(cfg);
  uint64_t set_span = 8 * 64;
  uint64_t A = 0, B = set_span, C = 2 * set_span;  // same set, distinct tags
  h.access(MemOp::Read, A, 8);
  h.access(MemOp::Read, B, 8);
  h.access(MemOp::Read, A, 8);
  h.access(MemOp::Read, C, 8);  // evicts B
  CHECK(h.access(MemOp::Read, A, 8).hit);
  CHECK_FALSE(h.access(MemOp::Read, B, 8).hit);
}

TEST_CASE("writebacks only for dirty victims") {
  ControllerConfig cfg = cache_cfg(512, 1, 8);  // direct mapped, tiny
  Harness h(cfg);
  uint64_t set_span = 8 * 64;

  SUBCASE("fill into an invalid way") {
    auto res = h.access(MemOp::Read, 0, 8);
    CHECK_FALSE(res.writeback.has_value());
  }
  SUBCASE("clean eviction") {
    h.access(MemOp::Read, 0, 8);
    auto res = h.access(MemOp::Read, set_span, 8);  // same set, clean victim
    CHECK(res.needs_fill);
    CHECK_FALSE(res.writeback.has_value());
  }
  SUBCASE("dirty eviction carries the old line") {
    std::vector<uint8_t> data = {0xAB, 0xCD};
    h.access(MemOp::Write, 16, 2, data);
    auto res = h.access(MemOp::Read, set_span, 8);
    REQUIRE(res.writeback.has_value());
    CHECK(res.writeback->address == 0);  // line-aligned victim address
    CHECK(res.writeback->data[16] == 0xAB);
    CHECK(res.writeback->data[17] == 0xCD);
  }
}

TEST_CASE("mem_fill without an outstanding miss is a protocol error") {
  CacheCore core(cache_cfg(512, 2, 64));
  CHECK_THROWS_AS(core.mem_fill(0x40, std::vector<uint8_t>(64, 0)), SimError);
}

TEST_CASE("secondary accesses attach to the outstanding miss") {
  CacheCore core(cache_cfg(512, 2, 64));
  auto first = core.pe_access(MemOp::Read, 0x80, 8, nullptr, 0);
  CHECK(first.needs_fill);
  auto second = core.pe_access(MemOp::Read, 0x88, 8, nullptr, 1);
  CHECK(second.hit);
  CHECK(second.deferred);
  CHECK(second.under_active_miss);
  CHECK(core.outstanding_misses() == 1);  // coalesced, no second fill

  std::vector<uint8_t> line(64);
  for (int i = 0; i < 64; ++i) line[i] = static_cast<uint8_t>(i);
  auto fill = core.mem_fill(0x80, line);
  REQUIRE(fill.released.size() == 2);
  CHECK(fill.released[0].seq == 0);
  CHECK(fill.released[1].seq == 1);
  CHECK(fill.read_data[1] == std::vector<uint8_t>{8, 9, 10, 11, 12, 13, 14, 15});
}

TEST_CASE("write merge happens at fill time in arrival order") {
  CacheCore core(cache_cfg(512, 2, 64));
  core.pe_access(MemOp::Read, 0x40, 8, nullptr, 0);
  uint8_t a = 0x11, b = 0x22;
  core.pe_access(MemOp::Write, 0x44, 1, &a, 1);
  core.pe_access(MemOp::Write, 0x44, 1, &b, 2);
  auto fill = core.mem_fill(0x40, std::vector<uint8_t>(64, 0));
  (void)fill;
  auto read = core.pe_access(MemOp::Read, 0x44, 1, nullptr, 3);
  REQUIRE(read.hit);
  CHECK(read.read_data[0] == 0x22);  // last write wins
}

TEST_CASE("hit/miss stream matches the reference cache across geometries") {
  struct Geo {
    uint32_t line_bits, ways, lines;
  };
  for (Geo g : {Geo{512, 1, 512}, Geo{512, 4, 4096}, Geo{512, 8, 8192}, Geo{256, 2, 256}}) {
    CAPTURE(g.ways);
    ControllerConfig cfg = cache_cfg(g.line_bits, g.ways, g.lines);
    Harness h(cfg);
    h.fill_data.resize(cfg.cache_line_bytes());
    oracle::RefCache ref(cfg.cache_line_bytes(), g.ways, g.lines);
    std::mt19937_64 rng(g.ways * 7919);
    uint64_t space = uint64_t(g.lines) * g.line_bits / 8 * 4;  // 4x capacity
    for (int i = 0; i < 20000; ++i) {
      MemOp op = rng() % 4 == 0 ? MemOp::Write : MemOp::Read;
      uint64_t addr = (rng() % space) & ~7ULL;
      std::vector<uint8_t> data(8, uint8_t(i));
      auto got = h.access(op, addr, 8, op == MemOp::Write ? data : std::vector<uint8_t>{}, i);
      auto want = ref.access(op, addr);
      REQUIRE(got.hit == want.hit);
      if (!got.hit) REQUIRE(got.writeback.has_value() == want.writeback);
    }
  }
}

TEST_CASE("writebacks <= evictions <= misses") {
  ControllerConfig cfg = cache_cfg(512, 4, 64);
  Harness h(cfg);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 5000; ++i) {
    MemOp op = rng() % 2 ? MemOp::Write : MemOp::Read;
    std::vector<uint8_t> data(4, uint8_t(i));
    h.access(op, (rng() % 16384) & ~3ULL, 4, op == MemOp::Write ? data : std::vector<uint8_t>{},
             i);
  }
  const auto& s = h.core.stats();
  CHECK(s.writebacks <= s.evictions);
  CHECK(s.evictions <= s.misses);
  CHECK(s.hits + s.misses == s.accesses);
}

TEST_CASE("MSHR capacity stalls instead of corrupting state") {
  ControllerConfig cfg = cache_cfg(512, 4, 1024);
  CacheCore core(cfg);
  // fill the MissStatus with distinct lines
  for (size_t i = 0; i < CacheCore::kMshrCapacity; ++i) {
    auto res = core.pe_access(MemOp::Read, (i + 1) * 0x10000, 8, nullptr, i);
    CHECK(res.needs_fill);
  }
  auto stalled = core.pe_access(MemOp::Read, 0x990000, 8, nullptr, 99);
  CHECK_FALSE(stalled.accepted);
  CHECK(core.mshr_full());
  // but an access to an already-pending line still coalesces
  auto coalesced = core.pe_access(MemOp::Read, 0x10008, 8, nullptr, 100);
  CHECK(coalesced.accepted);
  CHECK(coalesced.deferred);
}

TEST_CASE("a pending victim stalls the conflicting miss") {
  ControllerConfig cfg = cache_cfg(512, 1, 8);  // direct mapped
  CacheCore core(cfg);
  uint64_t set_span = 8 * 64;
  auto first = core.pe_access(MemOp::Read, 0, 8, nullptr, 0);
  CHECK(first.needs_fill);
  // same set, different tag: the victim way is still pending
  auto second = core.pe_access(MemOp::Read, set_span, 8, nullptr, 1);
  CHECK_FALSE(second.accepted);
  core.mem_fill(0, std::vector<uint8_t>(64, 0));
  auto retry = core.pe_access(MemOp::Read, set_span, 8, nullptr, 1);
  CHECK(retry.accepted);
  CHECK(retry.needs_fill);
}
