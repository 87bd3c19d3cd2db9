#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/bitonic.hpp"
#include "core/scheduler.hpp"
#include "oracles.hpp"

using namespace mcsim;

namespace {

ControllerConfig sched_cfg(uint32_t batch, uint32_t timeout = 16, uint32_t cond = 2) {
  ControllerConfig c;
  c.sched_batch_size = batch;
  c.sched_timeout = timeout;
  c.data_cond_latency = cond;
  return c;
}

DramTimingConfig two_banks() {
  DramTimingConfig t;
  t.num_banks = 2;
  t.address_map = AddressMap::row_bank_column(14, 1, 6);
  return t;
}

SchedItem item(uint64_t row, uint32_t bank, uint64_t seq, MemOp op = MemOp::Read,
               uint64_t addr = 0) {
  SchedItem it;
  it.address = addr ? addr : (row << 7) | (uint64_t(bank) << 6);
  it.row = row;
  it.bank = bank;
  it.op = op;
  it.seq = seq;
  return it;
}

}  // namespace

TEST_CASE("network stage count follows (log N)(log N + 1)/2") {
  CHECK(bitonic_stage_count(1) == 0);
  CHECK(bitonic_stage_count(2) == 1);
  CHECK(bitonic_stage_count(4) == 3);
  CHECK(bitonic_stage_count(8) == 6);
  CHECK(bitonic_stage_count(64) == 21);
  CHECK(bitonic_stage_count(128) == 28);

  for (uint32_t n : {2u, 4u, 8u, 16u, 32u, 64u, 128u}) {
    std::vector<int> v(n);
    std::mt19937 rng(n);
    for (auto& x : v) x = static_cast<int>(rng() % 100);
    auto stats = bitonic_sort(std::span<int>(v), std::less<int>());
    CHECK(stats.stages == bitonic_stage_count(n));
    CHECK(std::is_sorted(v.begin(), v.end()));
    // n/2 comparators per stage
    CHECK(stats.comparators == stats.stages * (n / 2));
  }
}

TEST_CASE("schedule_cycles evaluates the batch cost formula") {
  CHECK(schedule_cycles(4, sched_cfg(4)) == 9);    // 4 + 3 + 2
  CHECK(schedule_cycles(64, sched_cfg(64)) == 87); // 64 + 21 + 2
  CHECK(schedule_cycles(1, sched_cfg(1)) == 3);    // 1 + 0 + 2
  // partial fills pay the configured size
  CHECK(schedule_cycles(3, sched_cfg(64)) == 87);
}

TEST_CASE("sort_batch orders by row and matches a stable sort") {
  SUBCASE("rows [5,1,3,2] sort to [1,2,3,5]") {
    Batch b;
    b.op = MemOp::Read;
    uint64_t seq = 0;
    for (uint64_t row : {5, 1, 3, 2}) b.requests.push_back(item(row, 0, seq++));
    Batch sorted = sort_batch(std::move(b));
    std::vector<uint64_t> rows;
    for (auto& r : sorted.requests) rows.push_back(r.row);
    CHECK(rows == std::vector<uint64_t>{1, 2, 3, 5});
  }

  SUBCASE("same-address requests keep arrival order") {
    Batch b;
    for (uint64_t s : {0, 1, 2, 3}) b.requests.push_back(item(7, 0, s, MemOp::Read, 0x9000));
    Batch sorted = sort_batch(std::move(b));
    for (size_t i = 0; i < sorted.requests.size(); ++i) CHECK(sorted.requests[i].seq == i);
  }

  SUBCASE("random batches equal the reference stable sort") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 300; ++iter) {
      size_t n = 1 + rng() % 16;
      Batch b;
      for (size_t i = 0; i < n; ++i)
        b.requests.push_back(item(rng() % 6, 0, i, MemOp::Read, rng() % 4096));
      std::vector<SchedItem> ref = b.requests;
      std::stable_sort(ref.begin(), ref.end(),
                       [](const SchedItem& a, const SchedItem& b) { return a.row < b.row; });
      uint64_t stages = 0;
      Batch sorted = sort_batch(std::move(b), &stages);
      REQUIRE(sorted.requests.size() == ref.size());
      for (size_t i = 0; i < ref.size(); ++i) {
        CHECK(sorted.requests[i].row == ref[i].row);
        CHECK(sorted.requests[i].seq == ref[i].seq);
      }
      CHECK(stages == bitonic_stage_count(std::bit_ceil(n)));
    }
  }

  SUBCASE("multiset preserved") {
    std::mt19937_64 rng(22);
    Batch b;
    for (size_t i = 0; i < 13; ++i) b.requests.push_back(item(rng() % 4, 0, i));
    std::vector<uint64_t> before;
    for (auto& r : b.requests) before.push_back(r.seq);
    Batch sorted = sort_batch(std::move(b));
    std::vector<uint64_t> after;
    for (auto& r : sorted.requests) after.push_back(r.seq);
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    CHECK(before == after);
  }
}

TEST_CASE("sorted batches reach the minimum row-switch count") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    size_t n = 2 + rng() % 7;  // up to 8: exhaustive search stays cheap
    Batch b;
    std::vector<uint64_t> rows;
    for (size_t i = 0; i < n; ++i) {
      rows.push_back(rng() % 4);
      b.requests.push_back(item(rows.back(), 0, i));
    }
    Batch sorted = sort_batch(std::move(b));
    std::vector<uint64_t> sorted_rows;
    for (auto& r : sorted.requests) sorted_rows.push_back(r.row);
    CHECK(oracle::row_switches(sorted_rows) == oracle::min_row_switches_exhaustive(rows));
  }
}

TEST_CASE("enqueue fills, seals on capacity, and separates op types") {
  ControllerConfig cfg = sched_cfg(4, 8);
  BatchScheduler s(cfg, two_banks());

  SUBCASE("first request starts the timeout, N-th seals") {
    CHECK(s.enqueue(item(1, 0, 0), 10) == BatchScheduler::Enqueue::Accepted);
    CHECK(s.enqueue(item(2, 0, 1), 11) == BatchScheduler::Enqueue::Accepted);
    CHECK(s.enqueue(item(3, 0, 2), 12) == BatchScheduler::Enqueue::Accepted);
    CHECK(s.enqueue(item(4, 0, 3), 13) == BatchScheduler::Enqueue::AcceptedSealed);
    // the double buffer keeps accepting while the sealed batch waits
    CHECK(s.enqueue(item(5, 0, 4), 14) == BatchScheduler::Enqueue::Accepted);
  }

  SUBCASE("op switch seals the open batch first") {
    s.enqueue(item(1, 0, 0), 0);
    CHECK(s.enqueue(item(2, 0, 1, MemOp::Write), 1) == BatchScheduler::Enqueue::AcceptedSealed);
    // write landed in the fresh buffer
    CHECK(s.enqueue(item(3, 0, 2, MemOp::Write), 2) == BatchScheduler::Enqueue::Accepted);
  }

  SUBCASE("both buffers sealed means backpressure") {
    for (int i = 0; i < 4; ++i) s.enqueue(item(i, 0, i), 0);           // seals buffer A
    for (int i = 0; i < 4; ++i) s.enqueue(item(i, 0, 4 + i), 1);      // seals buffer B
    CHECK(s.enqueue(item(9, 0, 8), 2) == BatchScheduler::Enqueue::Backpressure);
    CHECK_FALSE(s.can_accept(0, MemOp::Read));
    CHECK(s.can_accept(1, MemOp::Read));  // other bank unaffected
  }
}

TEST_CASE("timeout emits a partial batch") {
  ControllerConfig cfg = sched_cfg(64, 4);
  BatchScheduler s(cfg, two_banks());
  s.enqueue(item(1, 0, 0), 0);
  s.enqueue(item(2, 0, 1), 1);
  s.enqueue(item(3, 0, 2), 2);

  // counter reaches the limit at cycle 4; the sort stage then runs for
  // schedule_cycles before the batch lands in the output FIFO
  for (uint64_t c = 0; c <= 4; ++c) {
    s.step(c);
    CHECK(s.output().empty());
  }
  uint64_t done = 4 + schedule_cycles(3, cfg);
  for (uint64_t c = 5; c < done; ++c) s.step(c);
  CHECK(s.output().empty());
  s.step(done);
  CHECK(s.output().size() == 3);
  CHECK(s.stats().batches == 1);
  CHECK(s.stats().batched_requests == 3);
}

TEST_CASE("empty buffers never emit") {
  BatchScheduler s(sched_cfg(8, 4), two_banks());
  for (uint64_t c = 0; c < 100; ++c) s.step(c);
  CHECK(s.output().empty());
  CHECK(s.stats().batches == 0);
}

TEST_CASE("a full buffer seals before its timeout") {
  ControllerConfig cfg = sched_cfg(4, 40);
  BatchScheduler s(cfg, two_banks());
  for (int i = 0; i < 4; ++i) {
    s.step(i);
    s.enqueue(item(i, 0, i), i);
  }
  // sealed at cycle 3; sorted output appears schedule_cycles later
  uint64_t done = 4 + schedule_cycles(4, cfg);
  for (uint64_t c = 4; c <= done; ++c) s.step(c);
  CHECK(s.output().size() == 4);
  CHECK(s.stats().mean_fill() == doctest::Approx(4.0));
}

TEST_CASE("sealed batches from both buffers drain in seal order") {
  ControllerConfig cfg = sched_cfg(2, 40);
  BatchScheduler s(cfg, two_banks());
  // seal A with writes, then B with reads, same bank
  s.enqueue(item(1, 0, 0, MemOp::Write, 0x100), 0);
  s.enqueue(item(1, 0, 1, MemOp::Write, 0x100), 0);
  s.enqueue(item(1, 0, 2, MemOp::Read, 0x100), 0);
  s.enqueue(item(1, 0, 3, MemOp::Read, 0x100), 0);
  uint64_t c = 0;
  while (s.output().size() < 4) {
    s.step(c++);
    REQUIRE(c < 1000);
  }
  // the write batch (earlier seal) drained first: same-address W->R preserved
  CHECK(s.output()[0].op == MemOp::Write);
  CHECK(s.output()[1].op == MemOp::Write);
  CHECK(s.output()[2].op == MemOp::Read);
  CHECK(s.output()[3].op == MemOp::Read);
}

TEST_CASE("bypass paths") {
  ControllerConfig cfg = sched_cfg(32, 16);
  cfg.bypass_seq_window = 4;
  cfg.bypass_traffic_interval = 8;
  BatchScheduler s(cfg, two_banks());

  SUBCASE("sparse traffic bypasses") {
    uint64_t cycle = 0;
    for (int i = 0; i < 10; ++i) {
      SchedItem it = item((i * 37) % 100, i % 2, i);
      CHECK(s.should_bypass(it, cycle));
      s.observe(it, cycle, true);
      cycle += 100;
    }
    CHECK(s.stats().bypassed_requests == 10);
  }

  SUBCASE("row-sequential traffic bypasses even when dense") {
    uint64_t cycle = 0;
    for (int i = 0; i < 20; ++i) {
      SchedItem it = item(3 + i / 8, 0, i);  // slowly ascending rows
      CHECK(s.should_bypass(it, cycle));
      s.observe(it, cycle, true);
      ++cycle;
    }
  }

  SUBCASE("dense random traffic schedules") {
    std::mt19937_64 rng(4);
    uint64_t cycle = 0;
    int bypasses = 0;
    for (int i = 0; i < 50; ++i) {
      SchedItem it = item(rng() % 512, rng() % 2, i);
      if (s.should_bypass(it, cycle)) {
        ++bypasses;
        s.observe(it, cycle, true);
      } else {
        s.enqueue(it, cycle);
        s.observe(it, cycle, false);
      }
      ++cycle;
    }
    // only the cold-start window may slip through
    CHECK(bypasses <= 4);
  }

  SUBCASE("never bypass while batches are pending") {
    s.enqueue(item(1, 0, 0), 0);
    CHECK_FALSE(s.should_bypass(item(1, 0, 1), 1));
  }
}
