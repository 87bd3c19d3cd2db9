#include "core/config.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "core/errors.hpp"

namespace mcsim {

AddressMap AddressMap::row_bank_column(uint32_t row_bits, uint32_t bank_bits,
                                       uint32_t column_bits) {
  AddressMap m;
  m.slices = {{MapField::Row, row_bits},
              {MapField::Bank, bank_bits},
              {MapField::Column, column_bits}};
  return m;
}

uint32_t AddressMap::width(MapField f) const {
  for (const auto& s : slices)
    if (s.field == f) return s.bits;
  return 0;
}

uint32_t AddressMap::total_bits() const {
  uint32_t n = 0;
  for (const auto& s : slices) n += s.bits;
  return n;
}

static const char* field_name(MapField f) {
  switch (f) {
    case MapField::Row: return "row";
    case MapField::Bank: return "bank";
    case MapField::Column: return "column";
  }
  return "?";
}

std::string AddressMap::to_string() const {
  std::string out;
  for (const auto& s : slices) {
    if (!out.empty()) out += ',';
    out += field_name(s.field);
    out += ':';
    out += std::to_string(s.bits);
  }
  return out;
}

AddressMap AddressMap::parse(const std::string& text) {
  AddressMap m;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw config_error("address_map: expected field:width in '" + part + "'");
    std::string name = part.substr(0, colon);
    std::string width = part.substr(colon + 1);
    // trim
    auto trim = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    trim(name);
    trim(width);
    MapField f;
    if (name == "row") f = MapField::Row;
    else if (name == "bank") f = MapField::Bank;
    else if (name == "column") f = MapField::Column;
    else throw config_error("address_map: unknown field '" + name + "'");
    uint32_t bits = 0;
    auto [p, ec] = std::from_chars(width.data(), width.data() + width.size(), bits);
    if (ec != std::errc() || p != width.data() + width.size())
      throw config_error("address_map: bad width '" + width + "'");
    for (const auto& s : m.slices)
      if (s.field == f) throw config_error(std::string("address_map: duplicate field '") + name + "'");
    m.slices.push_back({f, bits});
  }
  if (m.slices.size() != 3)
    throw config_error("address_map: must name row, bank and column exactly once");
  return m;
}

static uint32_t log2_exact(uint64_t v) {
  return static_cast<uint32_t>(std::countr_zero(v));
}

static AddressMap derive_default_map(const ControllerConfig& ctrl, const DramTimingConfig& dram) {
  uint32_t column = std::has_single_bit(static_cast<uint64_t>(ctrl.mem_if_data_width))
                        ? log2_exact(ctrl.mem_if_data_width)
                        : static_cast<uint32_t>(std::bit_width(static_cast<uint64_t>(ctrl.mem_if_data_width)));
  uint32_t bank = std::has_single_bit(static_cast<uint64_t>(dram.num_banks))
                      ? log2_exact(dram.num_banks)
                      : static_cast<uint32_t>(std::bit_width(static_cast<uint64_t>(dram.num_banks)));
  uint32_t used = column + bank;
  uint32_t row = ctrl.mem_if_addr_width > used ? ctrl.mem_if_addr_width - used : 1;
  return AddressMap::row_bank_column(row, bank, column);
}

SimConfig default_config() {
  SimConfig cfg;
  cfg.dram.address_map = derive_default_map(cfg.ctrl, cfg.dram);
  return cfg;
}

std::string ValidationResult::to_string() const {
  std::string out;
  for (const auto& i : issues) {
    out += i.field;
    out += ": ";
    out += i.message;
    out += '\n';
  }
  return out;
}

namespace {

struct RangeRule {
  const char* field;
  uint64_t lo, hi;
  std::function<uint64_t(const ControllerConfig&)> get;
};

const RangeRule kTableRanges[] = {
    {"controller.mem_if_data_width", 64, 512, [](const ControllerConfig& c) { return (uint64_t)c.mem_if_data_width; }},
    {"controller.mem_if_addr_width", 20, 36, [](const ControllerConfig& c) { return (uint64_t)c.mem_if_addr_width; }},
    {"controller.app_io_data_width", 1, 64, [](const ControllerConfig& c) { return (uint64_t)c.app_io_data_width; }},
    {"controller.app_addr_width", 28, 37, [](const ControllerConfig& c) { return (uint64_t)c.app_addr_width; }},
    {"controller.num_pes", 1, 128, [](const ControllerConfig& c) { return (uint64_t)c.num_pes; }},
    {"dma.max_transaction", 256, 256 * 1024, [](const ControllerConfig& c) { return c.dma_max_transaction; }},
    {"dma.parallel_count", 1, 8, [](const ControllerConfig& c) { return (uint64_t)c.dma_parallel_count; }},
    {"sched.batch_size", 4, 128, [](const ControllerConfig& c) { return (uint64_t)c.sched_batch_size; }},
    {"sched.timeout", 4, 40, [](const ControllerConfig& c) { return (uint64_t)c.sched_timeout; }},
    {"cache.line_width", 256, 1024, [](const ControllerConfig& c) { return (uint64_t)c.cache_line_width; }},
    {"cache.num_lines", 256, 16384, [](const ControllerConfig& c) { return (uint64_t)c.cache_num_lines; }},
    {"cache.associativity", 1, 16, [](const ControllerConfig& c) { return (uint64_t)c.cache_associativity; }},
};

void add(ValidationResult& r, const std::string& field, const std::string& msg) {
  r.issues.push_back({field, msg});
}

}  // namespace

ValidationResult validate(const ControllerConfig& ctrl, const DramTimingConfig& dram) {
  ValidationResult r;

  if (!ctrl.override_ranges) {
    for (const auto& rule : kTableRanges) {
      uint64_t v = rule.get(ctrl);
      if (v < rule.lo || v > rule.hi) {
        add(r, rule.field,
            "value " + std::to_string(v) + " outside typical range [" +
                std::to_string(rule.lo) + ", " + std::to_string(rule.hi) +
                "] (set controller.override_ranges=1 to force)");
      }
    }
  }

  // Structural rules hold regardless of the override flag.
  if (!std::has_single_bit(static_cast<uint64_t>(ctrl.sched_batch_size)))
    add(r, "sched.batch_size", "must be a power of two (bitonic network input)");
  if (ctrl.cache_associativity == 0)
    add(r, "cache.associativity", "must be at least 1");
  else if (ctrl.cache_num_lines % ctrl.cache_associativity != 0)
    add(r, "cache.num_lines", "must be divisible by cache.associativity");
  if (ctrl.ctrl_overhead > 10)
    add(r, "controller.ctrl_overhead", "must not exceed 10 cycles");
  if (!ctrl.enable_cacheline && !ctrl.enable_dma)
    add(r, "controller.enable_cacheline", "at least one of enable_cacheline, enable_dma must be set");
  if (ctrl.cache_line_width % 8 != 0)
    add(r, "cache.line_width", "must be byte aligned (multiple of 8 bits)");
  if (ctrl.enable_cacheline && ctrl.cache_line_width % 8 == 0 &&
      ctrl.app_io_data_width > ctrl.cache_line_bytes())
    add(r, "controller.app_io_data_width",
        "a single element must fit in one cache line (" +
            std::to_string(ctrl.cache_line_bytes()) + " B)");
  if (ctrl.mem_if_data_width == 0) add(r, "controller.mem_if_data_width", "must be positive");
  if (ctrl.app_io_data_width == 0) add(r, "controller.app_io_data_width", "must be positive");
  if (ctrl.sched_timeout == 0) add(r, "sched.timeout", "must be positive");
  if (ctrl.bypass_seq_window == 0) add(r, "sched.bypass_seq_window", "must be positive");

  if (dram.t_cl == 0) add(r, "dram.t_cl", "must be strictly positive");
  if (dram.t_rcd == 0) add(r, "dram.t_rcd", "must be strictly positive");
  if (dram.t_rp == 0) add(r, "dram.t_rp", "must be strictly positive");
  if (!(dram.t_mem > 0.0)) add(r, "dram.t_mem", "must be strictly positive");
  if (!(dram.t_fpga > 0.0)) add(r, "dram.t_fpga", "must be strictly positive");
  if (dram.num_banks == 0 || !std::has_single_bit(static_cast<uint64_t>(dram.num_banks)))
    add(r, "dram.num_banks", "must be a power of two");

  const AddressMap& map = dram.address_map;
  if (map.slices.size() != 3) {
    add(r, "dram.address_map", "must name row, bank and column exactly once");
  } else {
    if (map.width(MapField::Row) == 0) add(r, "dram.address_map", "row slice must be non-empty");
    if (map.width(MapField::Column) == 0) add(r, "dram.address_map", "column slice must be non-empty");
    if (map.total_bits() > ctrl.mem_if_addr_width)
      add(r, "dram.address_map",
          "slices (" + std::to_string(map.total_bits()) + " bits) must fit within mem_if_addr_width (" +
              std::to_string(ctrl.mem_if_addr_width) + ")");
    if (dram.num_banks != 0 && std::has_single_bit(static_cast<uint64_t>(dram.num_banks)) &&
        map.width(MapField::Bank) != log2_exact(dram.num_banks))
      add(r, "dram.address_map",
          "bank slice width must equal log2(num_banks) = " +
              std::to_string(log2_exact(dram.num_banks)));
  }

  return r;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct KeyBinding {
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

uint64_t parse_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  std::string s = v;
  int base = 10;
  size_t off = 0;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    off = 2;
  }
  auto [p, ec] = std::from_chars(s.data() + off, s.data() + s.size(), out, base);
  if (ec != std::errc() || p != s.data() + s.size())
    throw config_error(key + ": expected integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw config_error(key + ": expected 0/1, got '" + v + "'");
}

double parse_f64(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw config_error(key + ": expected number, got '" + v + "'");
  }
}

#define U32_KEY(name, expr)                                                              \
  {                                                                                      \
    name, {                                                                              \
      [](SimConfig& c, const std::string& v) {                                           \
        expr = static_cast<uint32_t>(parse_u64(name, v));                                \
      },                                                                                 \
          [](const SimConfig& c) { return std::to_string(expr); }                        \
    }                                                                                    \
  }
#define U64_KEY(name, expr)                                                              \
  {                                                                                      \
    name, {                                                                              \
      [](SimConfig& c, const std::string& v) { expr = parse_u64(name, v); },             \
          [](const SimConfig& c) { return std::to_string(expr); }                        \
    }                                                                                    \
  }
#define BOOL_KEY(name, expr)                                                             \
  {                                                                                      \
    name, {                                                                              \
      [](SimConfig& c, const std::string& v) { expr = parse_bool(name, v); },            \
          [](const SimConfig& c) { return std::string(expr ? "1" : "0"); }               \
    }                                                                                    \
  }
#define F64_KEY(name, expr)                                                              \
  {                                                                                      \
    name, {                                                                              \
      [](SimConfig& c, const std::string& v) { expr = parse_f64(name, v); },             \
          [](const SimConfig& c) { return format_double(expr); }                         \
    }                                                                                    \
  }

const std::vector<std::pair<std::string, KeyBinding>>& key_table() {
  static const std::vector<std::pair<std::string, KeyBinding>> table = {
      U32_KEY("controller.mem_if_data_width", c.ctrl.mem_if_data_width),
      U32_KEY("controller.mem_if_addr_width", c.ctrl.mem_if_addr_width),
      U32_KEY("controller.app_io_data_width", c.ctrl.app_io_data_width),
      U32_KEY("controller.app_addr_width", c.ctrl.app_addr_width),
      U32_KEY("controller.num_pes", c.ctrl.num_pes),
      BOOL_KEY("controller.enable_scheduler", c.ctrl.enable_scheduler),
      BOOL_KEY("controller.enable_cacheline", c.ctrl.enable_cacheline),
      BOOL_KEY("controller.enable_dma", c.ctrl.enable_dma),
      U32_KEY("controller.ctrl_overhead", c.ctrl.ctrl_overhead),
      BOOL_KEY("controller.override_ranges", c.ctrl.override_ranges),
      U64_KEY("dma.max_transaction", c.ctrl.dma_max_transaction),
      U32_KEY("dma.parallel_count", c.ctrl.dma_parallel_count),
      U32_KEY("dma.data_convert_latency", c.ctrl.data_convert_latency),
      U32_KEY("sched.batch_size", c.ctrl.sched_batch_size),
      U32_KEY("sched.timeout", c.ctrl.sched_timeout),
      U32_KEY("sched.data_cond_latency", c.ctrl.data_cond_latency),
      U32_KEY("sched.bypass_seq_window", c.ctrl.bypass_seq_window),
      U32_KEY("sched.bypass_traffic_interval", c.ctrl.bypass_traffic_interval),
      U32_KEY("cache.line_width", c.ctrl.cache_line_width),
      U32_KEY("cache.num_lines", c.ctrl.cache_num_lines),
      U32_KEY("cache.associativity", c.ctrl.cache_associativity),
      U32_KEY("cache.pipeline_fill", c.ctrl.cache_pipeline_fill),
      U32_KEY("cache.mem_pipeline_fill", c.ctrl.mem_pipeline_fill),
      U32_KEY("dram.t_cl", c.dram.t_cl),
      U32_KEY("dram.t_rcd", c.dram.t_rcd),
      U32_KEY("dram.t_rp", c.dram.t_rp),
      F64_KEY("dram.t_mem", c.dram.t_mem),
      F64_KEY("dram.t_fpga", c.dram.t_fpga),
      U32_KEY("dram.num_banks", c.dram.num_banks),
      {"dram.address_map",
       {[](SimConfig& c, const std::string& v) {
          c.dram.address_map = AddressMap::parse(v);
          c.dram.address_map_explicit = true;
        },
        [](const SimConfig& c) { return c.dram.address_map.to_string(); }}},
  };
  return table;
}

#undef U32_KEY
#undef U64_KEY
#undef BOOL_KEY
#undef F64_KEY

const KeyBinding* find_key(const std::string& key) {
  for (const auto& [name, binding] : key_table())
    if (name == key) return &binding;
  return nullptr;
}

}  // namespace

bool is_config_key(const std::string& key) { return find_key(key) != nullptr; }

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
  const KeyBinding* b = find_key(key);
  if (!b) throw config_error("unknown config key '" + key + "'");
  b->set(cfg, value);
  if (!cfg.dram.address_map_explicit)
    cfg.dram.address_map = derive_default_map(cfg.ctrl, cfg.dram);
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg = default_config();
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    };
    trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected 'section.key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    trim(key);
    trim(value);
    try {
      set_config_value(cfg, key, value);
    } catch (const SimError& e) {
      throw config_error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const SimConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [name, binding] : key_table()) {
    std::string sec = name.substr(0, name.find('.'));
    if (sec != section) {
      if (!out.empty()) out += '\n';
      out += "# [" + sec + "]\n";
      section = sec;
    }
    out += name + " = " + binding.get(cfg) + "\n";
  }
  return out;
}

}  // namespace mcsim
