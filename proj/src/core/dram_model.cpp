#include "core/dram_model.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace mcsim {

DecodedAddress decode_address(uint64_t addr, const DramTimingConfig& timing,
                              uint32_t mem_if_addr_width) {
  if (mem_if_addr_width < 64) addr &= (1ULL << mem_if_addr_width) - 1;
  DecodedAddress d;
  // Slices are listed high -> low; walk from the low end.
  uint32_t shift = 0;
  for (auto it = timing.address_map.slices.rbegin(); it != timing.address_map.slices.rend(); ++it) {
    uint64_t mask = it->bits >= 64 ? ~0ULL : ((1ULL << it->bits) - 1);
    uint64_t v = (addr >> shift) & mask;
    switch (it->field) {
      case MapField::Row: d.row = v; break;
      case MapField::Bank: d.bank = static_cast<uint32_t>(v); break;
      case MapField::Column: d.column = v; break;
    }
    shift += it->bits;
  }
  return d;
}

DramModel::DramModel(const DramTimingConfig& timing, uint32_t mem_if_addr_width)
    : timing_(timing), addr_width_(mem_if_addr_width), open_rows_(timing.num_banks) {}

RowResult DramModel::classify(const DecodedAddress& d) const {
  const auto& open = open_rows_.at(d.bank);
  if (!open.has_value()) return RowResult::FirstHit;
  return *open == d.row ? RowResult::RowHit : RowResult::RowConflict;
}

uint64_t DramModel::access(const DecodedAddress& d) {
  RowResult r = classify(d);
  last_result_ = r;
  uint32_t mem_cycles = 0;
  switch (r) {
    case RowResult::FirstHit:
      mem_cycles = timing_.t_cl + timing_.t_rcd;
      ++stats_.first_hits;
      break;
    case RowResult::RowHit:
      mem_cycles = timing_.t_cl;
      ++stats_.row_hits;
      break;
    case RowResult::RowConflict:
      mem_cycles = timing_.t_rp + timing_.t_cl + timing_.t_rcd;
      ++stats_.row_conflicts;
      break;
  }
  open_rows_[d.bank] = d.row;  // open row policy: the row stays open
  return to_ctrl_cycles(mem_cycles, timing_);
}

uint64_t DramModel::to_ctrl_cycles(uint32_t mem_cycles, const DramTimingConfig& t) {
  return static_cast<uint64_t>(std::ceil(static_cast<double>(mem_cycles) * t.t_mem / t.t_fpga));
}

double DramModel::t_mem_seq_raw(const DramTimingConfig& t) {
  return static_cast<double>(seq_mem_cycles(t)) * t.t_mem / t.t_fpga;
}

double DramModel::t_mem_rand_raw(const DramTimingConfig& t) {
  return static_cast<double>(rand_mem_cycles(t)) * t.t_mem / t.t_fpga;
}

uint64_t DramModel::t_mem_seq(const DramTimingConfig& t) {
  return to_ctrl_cycles(seq_mem_cycles(t), t);
}

uint64_t DramModel::t_mem_rand(const DramTimingConfig& t) {
  return to_ctrl_cycles(rand_mem_cycles(t), t);
}

void MainMemory::write(uint64_t addr, std::span<const uint8_t> data) {
  size_t off = 0;
  while (off < data.size()) {
    uint64_t a = addr + off;
    uint64_t page = a >> kPageBits;
    uint64_t in_page = a & (kPageSize - 1);
    size_t n = std::min<size_t>(data.size() - off, kPageSize - in_page);
    auto it = pages_.find(page);
    if (it == pages_.end()) it = pages_.emplace(page, std::array<uint8_t, kPageSize>{}).first;
    std::memcpy(it->second.data() + in_page, data.data() + off, n);
    off += n;
  }
}

void MainMemory::read(uint64_t addr, std::span<uint8_t> out) const {
  size_t off = 0;
  while (off < out.size()) {
    uint64_t a = addr + off;
    uint64_t page = a >> kPageBits;
    uint64_t in_page = a & (kPageSize - 1);
    size_t n = std::min<size_t>(out.size() - off, kPageSize - in_page);
    auto it = pages_.find(page);
    if (it == pages_.end())
      std::memset(out.data() + off, 0, n);
    else
      std::memcpy(out.data() + off, it->second.data() + in_page, n);
    off += n;
  }
}

std::vector<uint8_t> MainMemory::read(uint64_t addr, size_t n) const {
  std::vector<uint8_t> out(n);
  read(addr, std::span<uint8_t>(out));
  return out;
}

}  // namespace mcsim
