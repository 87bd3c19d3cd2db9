#include "core/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "core/errors.hpp"

namespace mcsim {

uint32_t Trace::element_size(const TraceRecord& r, const ControllerConfig& cfg) {
  if (r.access_class == AccessClass::CacheLine) return r.total_size;
  return std::min<uint32_t>(cfg.app_io_data_width, r.total_size);
}

MemRequest Trace::request_at(size_t i, const ControllerConfig& cfg) const {
  const TraceRecord& r = records.at(i);
  MemRequest req;
  req.pe_id = r.pe_id;
  req.op = r.op;
  req.access_class = r.access_class;
  req.address = r.address;
  req.total_size = r.total_size;
  req.payload_size = element_size(r, cfg);
  req.arrival_cycle = r.arrival_cycle;
  req.seq_no = i;
  if (r.op == MemOp::Write) req.payload = synth_payload(meta.seed, r.address, r.total_size);
  return req;
}

std::string validate_trace(const Trace& t, const ControllerConfig& cfg) {
  uint64_t prev_cycle = 0;
  for (size_t i = 0; i < t.records.size(); ++i) {
    const TraceRecord& r = t.records[i];
    auto at = [&](const std::string& what) {
      return "record " + std::to_string(i) + ": " + what;
    };
    if (r.arrival_cycle < prev_cycle) return at("arrival cycles must be non-decreasing");
    prev_cycle = r.arrival_cycle;
    if (r.pe_id >= cfg.num_pes) return at("pe_id " + std::to_string(r.pe_id) + " >= num_pes");
    if (cfg.app_addr_width < 64 && r.address >= (1ULL << cfg.app_addr_width))
      return at("address outside the application address space");
    if (r.total_size == 0) return at("size must be positive");
    if (r.access_class == AccessClass::CacheLine) {
      if (!cfg.enable_cacheline) return at("cacheline access with cache engine disabled");
      if (r.total_size > cfg.app_io_data_width)
        return at("cacheline request larger than app_io_data_width");
    } else {
      if (!cfg.enable_dma) return at("bulk access with DMA engine disabled");
      if (r.total_size > cfg.dma_max_transaction)
        return at("bulk request larger than dma.max_transaction");
    }
  }
  return {};
}

std::string render_trace(const Trace& t) {
  std::string out;
  out += "#format_version=1\n";
  out += "#generator=" + t.meta.generator + "\n";
  out += "#seed=" + std::to_string(t.meta.seed) + "\n";
  for (const auto& [k, v] : t.meta.params) out += "#param." + k + "=" + v + "\n";
  char line[96];
  for (const TraceRecord& r : t.records) {
    std::snprintf(line, sizeof(line), "%llu %u %c %c %llx %u\n",
                  static_cast<unsigned long long>(r.arrival_cycle), r.pe_id, op_letter(r.op),
                  class_letter(r.access_class), static_cast<unsigned long long>(r.address),
                  r.total_size);
    out += line;
  }
  return out;
}

Trace parse_trace(const std::string& text) {
  Trace t;
  t.meta.generator = "manual";
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;  // comment
      std::string key = line.substr(1, eq - 1);
      std::string value = line.substr(eq + 1);
      if (key == "generator") t.meta.generator = value;
      else if (key == "seed") t.meta.seed = std::strtoull(value.c_str(), nullptr, 10);
      else if (key.rfind("param.", 0) == 0) t.meta.params.emplace_back(key.substr(6), value);
      // format_version and unknown metadata keys are tolerated
      continue;
    }
    TraceRecord r;
    unsigned long long cycle = 0, addr = 0;
    unsigned pe = 0, size = 0;
    char op = 0, cls = 0;
    if (std::sscanf(line.c_str(), "%llu %u %c %c %llx %u", &cycle, &pe, &op, &cls, &addr,
                    &size) != 6)
      throw trace_error("line " + std::to_string(lineno) + ": expected 'cycle pe op class address size'");
    r.arrival_cycle = cycle;
    r.pe_id = static_cast<uint16_t>(pe);
    if (op == 'R') r.op = MemOp::Read;
    else if (op == 'W') r.op = MemOp::Write;
    else throw trace_error("line " + std::to_string(lineno) + ": unknown op '" + std::string(1, op) + "'");
    if (cls == 'C') r.access_class = AccessClass::CacheLine;
    else if (cls == 'D') r.access_class = AccessClass::Bulk;
    else throw trace_error("line " + std::to_string(lineno) + ": unknown class '" + std::string(1, cls) + "'");
    r.address = addr;
    r.total_size = size;
    t.records.push_back(r);
  }
  return t;
}

Trace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw trace_error("cannot open trace file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void save_trace_file(const Trace& t, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw trace_error("cannot write trace file '" + path + "'");
  out << render_trace(t);
}

namespace {

void push_meta(Trace& t, const std::string& k, uint64_t v) {
  t.meta.params.emplace_back(k, std::to_string(v));
}

}  // namespace

Trace gen_sequential(const SequentialParams& p, uint64_t seed) {
  if (p.total_bytes == 0) throw trace_error("sequential: total_bytes must be positive");
  if (p.stride == 0) throw trace_error("sequential: stride must be positive");
  Trace t;
  t.meta.generator = "sequential";
  t.meta.seed = seed;
  push_meta(t, "total_bytes", p.total_bytes);
  push_meta(t, "stride", p.stride);

  uint64_t cycle = 0;
  uint32_t pe = 0;
  for (uint64_t off = 0; off < p.total_bytes; off += p.stride) {
    TraceRecord r;
    r.arrival_cycle = cycle;
    r.address = p.base_address + off;
    r.total_size = static_cast<uint32_t>(std::min<uint64_t>(p.stride, p.total_bytes - off));
    r.pe_id = static_cast<uint16_t>(pe);
    r.op = p.op;
    r.access_class = p.access_class;
    t.records.push_back(r);
    cycle += p.gap;
    pe = (pe + 1) % p.pes;
  }
  return t;
}

Trace gen_random(const RandomParams& p, uint64_t seed) {
  if (p.count == 0) throw trace_error("random: count must be positive");
  Trace t;
  t.meta.generator = "random";
  t.meta.seed = seed;
  push_meta(t, "count", p.count);
  push_meta(t, "address_space", p.address_space);

  std::mt19937_64 rng(seed);
  uint64_t slots = std::max<uint64_t>(1, p.address_space / p.align);
  uint64_t cycle = 0;
  for (uint64_t i = 0; i < p.count; ++i) {
    TraceRecord r;
    r.arrival_cycle = cycle;
    r.pe_id = static_cast<uint16_t>(i % p.pes);
    r.op = (p.write_fraction > 0.0 &&
            std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p.write_fraction)
               ? MemOp::Write
               : MemOp::Read;
    bool bulk = p.bulk_fraction > 0.0 &&
                std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p.bulk_fraction;
    if (bulk) {
      r.access_class = AccessClass::Bulk;
      uint32_t span = std::max<uint32_t>(1, (p.bulk_max - p.bulk_min) / p.align + 1);
      r.total_size = p.bulk_min + p.align * (static_cast<uint32_t>(rng() % span));
    } else {
      r.access_class = AccessClass::CacheLine;
      r.total_size = p.size;
    }
    uint64_t max_slot = slots;
    if (r.total_size > p.align) {
      uint64_t needed = (r.total_size + p.align - 1) / p.align;
      max_slot = slots > needed ? slots - needed : 1;
    }
    r.address = (rng() % max_slot) * p.align;
    t.records.push_back(r);
    cycle += p.gap;
  }
  return t;
}

Trace gen_gcn(const GcnParams& p, uint64_t seed) {
  if (!p.override_ranges) {
    if (p.feature_bytes < 1024 || p.feature_bytes > 8 * 1024)
      throw trace_error("gcn: feature_bytes outside 1 KB - 8 KB (set override_ranges)");
    if (p.adj_record_bytes < 128 || p.adj_record_bytes > 512)
      throw trace_error("gcn: adj_record_bytes outside 128 B - 512 B (set override_ranges)");
  }
  if (p.num_vertices == 0) throw trace_error("gcn: num_vertices must be positive");
  if (p.element_bytes == 0 || p.element_bytes > p.adj_record_bytes)
    throw trace_error("gcn: element_bytes must be in [1, adj_record_bytes]");

  Trace t;
  t.meta.generator = "gcn";
  t.meta.seed = seed;
  push_meta(t, "num_vertices", p.num_vertices);
  push_meta(t, "num_edges", p.num_edges);
  push_meta(t, "feature_bytes", p.feature_bytes);
  push_meta(t, "adj_record_bytes", p.adj_record_bytes);

  std::mt19937_64 rng(seed);
  const uint64_t feature_base = 0;
  uint64_t adj_base = p.num_vertices * p.feature_bytes;
  adj_base = (adj_base + 4095) & ~uint64_t(4095);
  const uint32_t elems_per_record = std::max<uint32_t>(1, p.adj_record_bytes / p.element_bytes);

  uint32_t pe = 0;
  auto next_pe = [&]() {
    uint32_t v = pe;
    pe = (pe + 1) % p.pes;
    return static_cast<uint16_t>(v);
  };
  auto feature_read = [&](uint64_t vertex) {
    TraceRecord r;
    r.address = feature_base + vertex * p.feature_bytes;
    r.total_size = p.feature_bytes;
    r.pe_id = next_pe();
    r.op = MemOp::Read;
    r.access_class = AccessClass::Bulk;
    t.records.push_back(r);
  };

  // Aggregation sweep: each vertex streams its own feature vector, then for
  // every incident edge touches the neighbour's adjacency record and
  // streams the neighbour's features. Neighbours are uniform (synthetic
  // Erdos-Renyi-style graph), which is what makes the record reuse follow
  // cache_size/graph_size.
  for (uint64_t u = 0; u < p.num_vertices; ++u) {
    feature_read(u);
    uint64_t deg = p.num_edges / p.num_vertices + (u < p.num_edges % p.num_vertices ? 1 : 0);
    for (uint64_t e = 0; e < deg; ++e) {
      uint64_t v = rng() % p.num_vertices;
      uint64_t slot = rng() % elems_per_record;
      TraceRecord r;
      r.address = adj_base + v * p.adj_record_bytes + slot * p.element_bytes;
      r.total_size = p.element_bytes;
      r.pe_id = next_pe();
      r.op = MemOp::Read;
      r.access_class = AccessClass::CacheLine;
      t.records.push_back(r);
      feature_read(v);
    }
  }
  return t;
}

double gcn_expected_reuse(const GcnParams& p, uint64_t cache_bytes) {
  double graph_bytes = static_cast<double>(p.num_vertices) * p.adj_record_bytes;
  double avg_degree = static_cast<double>(p.num_edges) / static_cast<double>(p.num_vertices);
  return (static_cast<double>(cache_bytes) / graph_bytes) * avg_degree;
}

Trace gen_cnn(const CnnParams& p, uint64_t seed) {
  if (!p.override_ranges) {
    if (p.kernel_bytes < 4 || p.kernel_bytes > 512)
      throw trace_error("cnn: kernel_bytes outside 4 B - 512 B (set override_ranges)");
    if (p.input_bytes < 1024 || p.input_bytes > 16 * 1024)
      throw trace_error("cnn: input_bytes outside 1 KB - 16 KB (set override_ranges)");
  }
  if (p.channels == 0) throw trace_error("cnn: channels must be positive");
  if (p.element_bytes == 0) throw trace_error("cnn: element_bytes must be positive");

  Trace t;
  t.meta.generator = "cnn";
  t.meta.seed = seed;
  push_meta(t, "channels", p.channels);
  push_meta(t, "kernel_bytes", p.kernel_bytes);
  push_meta(t, "input_bytes", p.input_bytes);

  const uint64_t weight_stride = (p.kernel_bytes + 63) & ~uint64_t(63);
  const uint64_t weight_base = 0;
  uint64_t input_base = p.channels * weight_stride;
  input_base = (input_base + 4095) & ~uint64_t(4095);
  const uint64_t input_stride = (p.input_bytes + 4095) & ~uint64_t(4095);

  // Layer sweep: every PE re-reads the channel's kernel (shared, cacheable)
  // and then streams its own input tile for that channel.
  for (uint32_t c = 0; c < p.channels; ++c) {
    for (uint32_t pe = 0; pe < p.pes; ++pe) {
      for (uint32_t off = 0; off < p.kernel_bytes; off += p.element_bytes) {
        TraceRecord r;
        r.address = weight_base + c * weight_stride + off;
        r.total_size = std::min(p.element_bytes, p.kernel_bytes - off);
        r.pe_id = static_cast<uint16_t>(pe);
        r.op = MemOp::Read;
        r.access_class = AccessClass::CacheLine;
        t.records.push_back(r);
      }
      TraceRecord r;
      r.address = input_base + (static_cast<uint64_t>(c) * p.pes + pe) * input_stride;
      r.total_size = p.input_bytes;
      r.pe_id = static_cast<uint16_t>(pe);
      r.op = MemOp::Read;
      r.access_class = AccessClass::Bulk;
      t.records.push_back(r);
    }
  }
  (void)seed;
  return t;
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& params) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string token;
  std::stringstream ss(params);
  while (std::getline(ss, token, ',')) {
    std::stringstream inner(token);
    std::string piece;
    while (std::getline(inner, piece, '\n')) {
      auto trim = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      };
      trim(piece);
      if (piece.empty()) continue;
      auto eq = piece.find('=');
      if (eq == std::string::npos)
        throw trace_error("generator params: expected key=value, got '" + piece + "'");
      std::string k = piece.substr(0, eq), v = piece.substr(eq + 1);
      trim(k);
      trim(v);
      out.emplace_back(k, v);
    }
  }
  return out;
}

uint64_t to_u64(const std::string& k, const std::string& v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw trace_error("generator param " + k + ": expected integer, got '" + v + "'");
  return out;
}

double to_f64(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw trace_error("generator param " + k + ": expected number, got '" + v + "'");
  }
}

}  // namespace

Trace generate_trace(const std::string& pattern, const std::string& params, uint64_t seed) {
  auto kv = parse_kv(params);
  auto unknown = [](const std::string& k) {
    throw trace_error("unknown generator param '" + k + "'");
  };

  if (pattern == "sequential") {
    SequentialParams p;
    for (const auto& [k, v] : kv) {
      if (k == "total_bytes") p.total_bytes = to_u64(k, v);
      else if (k == "stride") p.stride = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "class") p.access_class = v == "C" ? AccessClass::CacheLine : AccessClass::Bulk;
      else if (k == "op") p.op = v == "W" ? MemOp::Write : MemOp::Read;
      else if (k == "base") p.base_address = to_u64(k, v);
      else if (k == "gap") p.gap = to_u64(k, v);
      else if (k == "pes") p.pes = static_cast<uint32_t>(to_u64(k, v));
      else unknown(k);
    }
    return gen_sequential(p, seed);
  }
  if (pattern == "random") {
    RandomParams p;
    for (const auto& [k, v] : kv) {
      if (k == "count") p.count = to_u64(k, v);
      else if (k == "address_space") p.address_space = to_u64(k, v);
      else if (k == "size") p.size = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "align") p.align = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "bulk_fraction") p.bulk_fraction = to_f64(k, v);
      else if (k == "bulk_min") p.bulk_min = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "bulk_max") p.bulk_max = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "write_fraction") p.write_fraction = to_f64(k, v);
      else if (k == "gap") p.gap = to_u64(k, v);
      else if (k == "pes") p.pes = static_cast<uint32_t>(to_u64(k, v));
      else unknown(k);
    }
    return gen_random(p, seed);
  }
  if (pattern == "gcn") {
    GcnParams p;
    for (const auto& [k, v] : kv) {
      if (k == "num_vertices") p.num_vertices = to_u64(k, v);
      else if (k == "num_edges") p.num_edges = to_u64(k, v);
      else if (k == "feature_bytes") p.feature_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "adj_record_bytes") p.adj_record_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "pes") p.pes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "element_bytes") p.element_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "override_ranges") p.override_ranges = v == "1";
      else unknown(k);
    }
    return gen_gcn(p, seed);
  }
  if (pattern == "cnn") {
    CnnParams p;
    for (const auto& [k, v] : kv) {
      if (k == "channels") p.channels = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "kernel_bytes") p.kernel_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "input_bytes") p.input_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "pes") p.pes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "element_bytes") p.element_bytes = static_cast<uint32_t>(to_u64(k, v));
      else if (k == "override_ranges") p.override_ranges = v == "1";
      else unknown(k);
    }
    return gen_cnn(p, seed);
  }
  throw trace_error("unknown trace generator '" + pattern + "'");
}

}  // namespace mcsim
