#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcsim {

enum class MapField : uint8_t { Row, Bank, Column };

struct AddressSlice {
  MapField field;
  uint32_t bits;
};

// High-to-low bit-slice layout of the DRAM-visible address. The default is
// row:bank:column with the column covering one memory beat span.
struct AddressMap {
  std::vector<AddressSlice> slices;  // high -> low

  static AddressMap row_bank_column(uint32_t row_bits, uint32_t bank_bits,
                                    uint32_t column_bits);
  uint32_t width(MapField f) const;
  uint32_t total_bits() const;
  std::string to_string() const;  // e.g. "row:21,bank:4,column:6"
  static AddressMap parse(const std::string& text);  // throws config_error
};

// Table-style reconfigurable parameters. Widths are bytes unless the name
// says bits; latencies are controller-clock cycles.
struct ControllerConfig {
  uint32_t mem_if_data_width = 64;   // bytes per memory-interface beat
  uint32_t mem_if_addr_width = 31;   // bits
  uint32_t app_io_data_width = 8;    // bytes per PE interface beat
  uint32_t app_addr_width = 31;      // bits
  uint32_t num_pes = 8;
  bool enable_scheduler = true;
  bool enable_cacheline = true;
  bool enable_dma = true;
  uint64_t dma_max_transaction = 16 * 1024;  // bytes
  uint32_t dma_parallel_count = 4;
  uint32_t sched_batch_size = 32;  // N; power of two
  uint32_t sched_timeout = 16;     // cycles
  uint32_t cache_line_width = 512;  // bits
  uint32_t cache_num_lines = 4096;
  uint32_t cache_associativity = 4;  // ways (DoSA)
  uint32_t ctrl_overhead = 10;       // L_ctrl_oh
  uint32_t data_cond_latency = 2;    // L_data_cond
  uint32_t data_convert_latency = 2; // L_data_convert
  uint32_t cache_pipeline_fill = 4;  // L_cache (PE pipeline depth)
  uint32_t mem_pipeline_fill = 3;    // L_mem (MEM pipeline depth)
  // Scheduler bypass knobs; the feature is named in the source material
  // without parameters, so these are documented defaults.
  uint32_t bypass_seq_window = 16;
  uint32_t bypass_traffic_interval = 8;  // bypass when inter-arrival >= this
  // Accept values outside the typical ranges (structural rules still apply).
  bool override_ranges = false;

  uint32_t cache_line_bytes() const { return cache_line_width / 8; }
};

struct DramTimingConfig {
  uint32_t t_cl = 17;   // memory-clock cycles
  uint32_t t_rcd = 17;
  uint32_t t_rp = 17;
  double t_mem = 0.833;   // ns per memory clock
  double t_fpga = 3.333;  // ns per controller clock
  uint32_t num_banks = 16;
  AddressMap address_map;       // derived from widths when not set explicitly
  bool address_map_explicit = false;
};

struct SimConfig {
  ControllerConfig ctrl;
  DramTimingConfig dram;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

SimConfig default_config();

// Violations are values, not failures; never mutates input.
ValidationResult validate(const ControllerConfig& ctrl, const DramTimingConfig& dram);
inline ValidationResult validate(const SimConfig& cfg) { return validate(cfg.ctrl, cfg.dram); }

// Line-oriented `section.key = value` document. Parse errors carry the line
// number; unknown keys are rejected. Omitted keys keep their defaults.
SimConfig parse_config(const std::string& text);
SimConfig load_config_file(const std::string& path);
std::string render_config(const SimConfig& cfg);

// Assigns one dotted key (used by sweeps). Throws config_error on unknown
// key or malformed value.
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value);
bool is_config_key(const std::string& key);

}  // namespace mcsim
