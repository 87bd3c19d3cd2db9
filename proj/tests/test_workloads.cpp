#include <doctest.h>

#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "core/errors.hpp"
#include "core/workloads.hpp"
#include "oracles.hpp"

using namespace mcsim;

TEST_CASE("sequential generator shapes") {
  SUBCASE("one 16 KB bulk request") {
    SequentialParams p;
    p.total_bytes = 16 * 1024;
    p.stride = 16 * 1024;
    p.access_class = AccessClass::Bulk;
    Trace t = gen_sequential(p, 1);
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].total_size == 16 * 1024);
    CHECK(t.records[0].access_class == AccessClass::Bulk);
  }
  SUBCASE("16 KB as 64 B cacheline requests") {
    SequentialParams p;
    p.total_bytes = 16 * 1024;
    p.stride = 64;
    p.access_class = AccessClass::CacheLine;
    Trace t = gen_sequential(p, 1);
    REQUIRE(t.records.size() == 256);
    for (size_t i = 0; i < t.records.size(); ++i) {
      CHECK(t.records[i].address == i * 64);
      CHECK(t.records[i].total_size == 64);
    }
  }
  SUBCASE("total equals stride gives a single request") {
    SequentialParams p;
    p.total_bytes = 4096;
    p.stride = 4096;
    Trace t = gen_sequential(p, 1);
    CHECK(t.records.size() == 1);
  }
}

TEST_CASE("random generator is pure in its seed") {
  RandomParams p;
  p.count = 500;
  p.address_space = 1 << 26;
  Trace a = gen_random(p, 77);
  Trace b = gen_random(p, 77);
  Trace c = gen_random(p, 78);
  CHECK(render_trace(a) == render_trace(b));
  CHECK(render_trace(a) != render_trace(c));
}

TEST_CASE("random addresses stay aligned and inside the space") {
  RandomParams p;
  p.count = 2000;
  p.address_space = 1 << 20;
  p.align = 64;
  p.bulk_fraction = 0.25;
  p.write_fraction = 0.3;
  Trace t = gen_random(p, 5);
  for (const auto& r : t.records) {
    CHECK(r.address % 64 == 0);
    CHECK(r.address + r.total_size <= p.address_space);
  }
}

TEST_CASE("degenerate single-row space row-hits after the first access") {
  RandomParams p;
  p.count = 64;
  p.address_space = 64;  // one beat, one row
  p.size = 8;
  p.align = 64;
  Trace t = gen_random(p, 9);
  for (const auto& r : t.records) CHECK(r.address == 0);
}

TEST_CASE("duplicate-row statistics match the birthday bound") {
  // Uniform beat-aligned addresses over a known space: the expected number
  // of distinct rows among n draws from R equals R(1 - (1 - 1/R)^n).
  RandomParams p;
  p.count = 4096;
  p.address_space = 1ULL << 30;  // 1 GB
  p.align = 64;
  Trace t = gen_random(p, 1234);

  // row := address / 64 KB (a 16-bank stripe of 4 KB rows)
  const uint64_t row_span = 64 * 1024;
  const double R = double(p.address_space / row_span);
  const int batch = 64;
  double expected_distinct = 0, measured_distinct = 0;
  int batches = 0;
  for (size_t base = 0; base + batch <= t.records.size(); base += batch) {
    std::set<uint64_t> rows;
    for (int i = 0; i < batch; ++i) rows.insert(t.records[base + i].address / row_span);
    measured_distinct += double(rows.size());
    expected_distinct += R * (1.0 - std::pow(1.0 - 1.0 / R, batch));
    ++batches;
  }
  measured_distinct /= batches;
  expected_distinct /= batches;
  double expected_dups = batch - expected_distinct;
  double measured_dups = batch - measured_distinct;
  CHECK(measured_dups == doctest::Approx(expected_dups).epsilon(0.5));
  CHECK(measured_dups > 0.0);
}

TEST_CASE("gcn generator shapes") {
  SUBCASE("desk-scale sizes") {
    GcnParams p;
    p.num_vertices = 64;
    p.num_edges = 256;
    p.feature_bytes = 4096;
    p.adj_record_bytes = 256;
    Trace t = gen_gcn(p, 3);
    uint64_t bulk = 0, cache = 0;
    for (const auto& r : t.records) {
      if (r.access_class == AccessClass::Bulk) {
        CHECK(r.total_size == 4096);
        ++bulk;
      } else {
        CHECK(r.total_size == p.element_bytes);
        ++cache;
      }
    }
    CHECK(bulk == p.num_vertices + p.num_edges);  // own + neighbour features
    CHECK(cache == p.num_edges);
  }
  SUBCASE("zero edges leaves feature reads only") {
    GcnParams p;
    p.num_vertices = 32;
    p.num_edges = 0;
    Trace t = gen_gcn(p, 3);
    CHECK(t.records.size() == 32);
    for (const auto& r : t.records) CHECK(r.access_class == AccessClass::Bulk);
  }
  SUBCASE("param ranges enforced unless overridden") {
    GcnParams p;
    p.feature_bytes = 512;  // below 1 KB
    CHECK_THROWS_AS(gen_gcn(p, 1), SimError);
    p.override_ranges = true;
    CHECK_NOTHROW(gen_gcn(p, 1));
  }
}

TEST_CASE("gcn adjacency reuse tracks cache_size/graph_size * degree") {
  GcnParams p;
  p.num_vertices = 4096;
  p.num_edges = 16 * 4096;  // average degree 16
  p.feature_bytes = 1024;
  p.adj_record_bytes = 128;
  p.element_bytes = 8;
  Trace t = gen_gcn(p, 2024);

  // reference cache: 128 KB (2048 lines of 64 B), 4-way
  const uint64_t cache_bytes = 128 * 1024;
  oracle::RefCache ref(64, 4, 2048);
  uint64_t adj_base = p.num_vertices * uint64_t(p.feature_bytes);
  adj_base = (adj_base + 4095) & ~uint64_t(4095);

  uint64_t hits = 0, accesses = 0;
  std::unordered_set<uint64_t> records_touched;
  for (const auto& r : t.records) {
    if (r.access_class != AccessClass::CacheLine) continue;
    ++accesses;
    if (ref.access(MemOp::Read, r.address).hit) ++hits;
    records_touched.insert((r.address - adj_base) / p.adj_record_bytes);
  }
  REQUIRE(accesses == p.num_edges);

  double measured_reuse = double(hits) / double(records_touched.size());
  double expected_reuse = gcn_expected_reuse(p, cache_bytes);
  CHECK(expected_reuse == doctest::Approx((128.0 * 1024 / (4096.0 * 128)) * 16.0));
  CHECK(measured_reuse > expected_reuse * 0.8);
  CHECK(measured_reuse < expected_reuse * 1.2);
}

TEST_CASE("cnn generator shapes") {
  SUBCASE("kernel regions are shared across PEs, inputs are not") {
    CnnParams p;
    p.channels = 4;
    p.kernel_bytes = 36;  // 3x3 x 4 B
    p.input_bytes = 2048;
    p.pes = 4;
    p.element_bytes = 4;
    Trace t = gen_cnn(p, 1);
    std::unordered_map<uint64_t, int> weight_readers;
    uint64_t bulk = 0;
    uint64_t weight_requests = 0;
    for (const auto& r : t.records) {
      if (r.access_class == AccessClass::Bulk) {
        ++bulk;
        CHECK(r.total_size == p.input_bytes);
      } else {
        ++weight_requests;
        weight_readers[r.address] |= 1 << r.pe_id;
      }
    }
    CHECK(bulk == p.channels * p.pes);
    CHECK(weight_requests == uint64_t(p.channels) * p.pes * 9);  // 36 B / 4 B
    for (const auto& [addr, mask] : weight_readers) CHECK(mask == 0b1111);
  }
  SUBCASE("single channel without weights is pure bulk") {
    CnnParams p;
    p.channels = 1;
    p.kernel_bytes = 4;
    p.input_bytes = 2048;
    p.pes = 2;
    p.element_bytes = 4;
    Trace t = gen_cnn(p, 1);
    uint64_t cache = 0;
    for (const auto& r : t.records)
      if (r.access_class == AccessClass::CacheLine) ++cache;
    CHECK(cache == 2);  // one 4-B kernel word per PE
  }
  SUBCASE("range checks") {
    CnnParams p;
    p.kernel_bytes = 2;
    CHECK_THROWS_AS(gen_cnn(p, 1), SimError);
  }
}

TEST_CASE("trace text round-trips") {
  RandomParams p;
  p.count = 300;
  p.bulk_fraction = 0.2;
  p.write_fraction = 0.4;
  Trace t = gen_random(p, 41);
  t.meta.params.emplace_back("note", "x");
  std::string text = render_trace(t);
  Trace back = parse_trace(text);
  CHECK(render_trace(back) == text);
  CHECK(back.meta.generator == "random");
  CHECK(back.meta.seed == 41);
  bool has_note = false;
  for (auto& [k, v] : back.meta.params) has_note |= (k == "note" && v == "x");
  CHECK(has_note);
}

TEST_CASE("malformed trace lines are rejected with the line number") {
  CHECK_THROWS_WITH_AS(parse_trace("0 0 Q C 0 64\n"), doctest::Contains("unknown op"), SimError);
  CHECK_THROWS_WITH_AS(parse_trace("0 0 R Z 0 64\n"), doctest::Contains("unknown class"),
                       SimError);
  CHECK_THROWS_WITH_AS(parse_trace("#seed=1\nnot a record\n"), doctest::Contains("line 2"),
                       SimError);
}

TEST_CASE("trace validation against a config") {
  SimConfig cfg = default_config();
  Trace t;
  t.records.push_back({0, 0, 8, 0, MemOp::Read, AccessClass::CacheLine});
  CHECK(validate_trace(t, cfg.ctrl).empty());

  Trace bad = t;
  bad.records[0].pe_id = 200;
  CHECK(validate_trace(bad, cfg.ctrl).find("pe_id") != std::string::npos);

  bad = t;
  bad.records[0].total_size = 128;  // exceeds app_io_data_width
  CHECK_FALSE(validate_trace(bad, cfg.ctrl).empty());

  bad = t;
  bad.records[0].access_class = AccessClass::Bulk;
  bad.records[0].total_size = 32 * 1024;  // exceeds dma_max_transaction
  CHECK_FALSE(validate_trace(bad, cfg.ctrl).empty());

  bad = t;
  bad.records.push_back({5, 0, 8, 0, MemOp::Read, AccessClass::CacheLine});
  bad.records.push_back({4, 0, 8, 0, MemOp::Read, AccessClass::CacheLine});
  CHECK(validate_trace(bad, cfg.ctrl).find("non-decreasing") != std::string::npos);
}

TEST_CASE("generator dispatch parses parameters") {
  Trace t = generate_trace("sequential", "total_bytes=512, stride=64, class=C", 1);
  CHECK(t.records.size() == 8);
  CHECK_THROWS_AS(generate_trace("zipf", "", 1), SimError);
  CHECK_THROWS_AS(generate_trace("random", "count=abc", 1), SimError);
  CHECK_THROWS_AS(generate_trace("random", "shape=1", 1), SimError);
}
