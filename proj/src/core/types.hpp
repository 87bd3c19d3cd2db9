#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mcsim {

enum class MemOp : uint8_t { Read, Write };
enum class AccessClass : uint8_t { CacheLine, Bulk };

inline char op_letter(MemOp op) { return op == MemOp::Read ? 'R' : 'W'; }
inline char class_letter(AccessClass c) { return c == AccessClass::CacheLine ? 'C' : 'D'; }

// One accelerator-issued memory access; the unit that flows through the
// whole system. seq_no is the global arrival order and doubles as the
// sort tie-break inside the scheduler.
struct MemRequest {
  uint32_t pe_id = 0;
  MemOp op = MemOp::Read;
  AccessClass access_class = AccessClass::CacheLine;
  uint64_t address = 0;
  uint32_t payload_size = 0;  // bytes per element (PE interface beat)
  uint32_t total_size = 0;    // bytes of the whole request
  std::vector<uint8_t> payload;  // writes only
  uint64_t arrival_cycle = 0;
  uint64_t seq_no = 0;
};

enum class FlitKind : uint8_t { Header, Payload };

// Flow-control unit: header + payload segments. Modeled as structured
// values, not bit vectors.
struct Flit {
  FlitKind kind = FlitKind::Header;
  uint32_t pe_id = 0;
  MemOp op = MemOp::Read;
  AccessClass access_class = AccessClass::CacheLine;
  uint64_t address = 0;
  uint32_t payload_size = 0;
  uint32_t total_size = 0;
  uint32_t flit_index = 0;  // dense from 0; header is 0, payloads follow
  std::vector<uint8_t> payload_segment;
  uint64_t seq_no = 0;
};

using FlitSequence = std::vector<Flit>;

// Deterministic byte synthesis for write payloads and memory background.
// Traces never store payload bytes; they are regenerated from (address, seed).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint8_t synth_payload_byte(uint64_t seed, uint64_t byte_address) {
  return static_cast<uint8_t>(splitmix64(seed ^ byte_address) & 0xff);
}

inline std::vector<uint8_t> synth_payload(uint64_t seed, uint64_t address, uint32_t n) {
  std::vector<uint8_t> out(n);
  for (uint32_t i = 0; i < n; ++i) out[i] = synth_payload_byte(seed, address + i);
  return out;
}

}  // namespace mcsim
