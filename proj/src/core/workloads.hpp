#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/config.hpp"
#include "core/types.hpp"

namespace mcsim {

// Compact trace record; payload bytes are synthesized from (address, seed)
// rather than stored. seq_no is the record index.
struct TraceRecord {
  uint64_t arrival_cycle = 0;
  uint64_t address = 0;
  uint32_t total_size = 0;
  uint16_t pe_id = 0;
  MemOp op = MemOp::Read;
  AccessClass access_class = AccessClass::CacheLine;
};

struct TraceMeta {
  std::string generator = "manual";
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;
};

struct Trace {
  TraceMeta meta;
  std::vector<TraceRecord> records;

  MemRequest request_at(size_t i, const ControllerConfig& cfg) const;
  static uint32_t element_size(const TraceRecord& r, const ControllerConfig& cfg);
};

// Per-record invariant check against the active config; empty string when
// the whole trace is valid, else a message naming the record.
std::string validate_trace(const Trace& t, const ControllerConfig& cfg);

// Text format: '#key=value' header lines, then one record per line:
//   cycle pe_id op class address size   (op R|W, class C|D, address hex)
std::string render_trace(const Trace& t);
Trace parse_trace(const std::string& text);
Trace load_trace_file(const std::string& path);
void save_trace_file(const Trace& t, const std::string& path);

struct SequentialParams {
  uint64_t total_bytes = 16 * 1024;
  uint32_t stride = 64;  // bytes per request
  AccessClass access_class = AccessClass::Bulk;
  MemOp op = MemOp::Read;
  uint64_t base_address = 0;
  uint64_t gap = 0;  // inter-arrival cycles; 0 = saturation
  uint32_t pes = 8;
};

struct RandomParams {
  uint64_t count = 1000;
  uint64_t address_space = 1ULL << 30;
  uint32_t size = 8;       // bytes per cacheline request
  uint32_t align = 64;     // beat alignment of generated addresses
  double bulk_fraction = 0.0;
  uint32_t bulk_min = 256;
  uint32_t bulk_max = 4096;
  double write_fraction = 0.0;
  uint64_t gap = 0;
  uint32_t pes = 8;
};

struct GcnParams {
  uint64_t num_vertices = 16 * 1024;
  uint64_t num_edges = 2400 * 1000;
  uint32_t feature_bytes = 4096;     // 1 KB - 8 KB typical
  uint32_t adj_record_bytes = 256;   // 128 B - 512 B typical
  uint32_t pes = 8;
  uint32_t element_bytes = 8;        // cacheline request size
  bool override_ranges = false;
};

struct CnnParams {
  uint32_t channels = 64;
  uint32_t kernel_bytes = 484;   // 11x11 x 4 B; 4 B - 512 B typical
  uint32_t input_bytes = 6442;   // ceil(227*227 / pes): one image tile
  uint32_t pes = 8;
  uint32_t element_bytes = 4;    // one weight word per cacheline request
  bool override_ranges = false;
};

// All generators are pure functions of (params, seed).
Trace gen_sequential(const SequentialParams& p, uint64_t seed);
Trace gen_random(const RandomParams& p, uint64_t seed);
Trace gen_gcn(const GcnParams& p, uint64_t seed);
Trace gen_cnn(const CnnParams& p, uint64_t seed);

// Expected adjacency reuse per record for a GCN access stream:
// (cache_bytes / graph_bytes) * average_degree.
double gcn_expected_reuse(const GcnParams& p, uint64_t cache_bytes);

// CLI-facing dispatch: pattern in {sequential,random,gcn,cnn}, params as
// comma- or newline-separated key=value pairs.
Trace generate_trace(const std::string& pattern, const std::string& params, uint64_t seed);

}  // namespace mcsim
