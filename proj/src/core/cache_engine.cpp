#include "core/cache_engine.hpp"

#include <algorithm>
#include <cstring>

#include "core/errors.hpp"

namespace mcsim {

uint64_t cache_time(const std::vector<CacheAccessOutcome>& outcomes, const ControllerConfig& cfg) {
  uint64_t total = cfg.ctrl_overhead + cfg.cache_pipeline_fill;
  for (const auto& o : outcomes) {
    if (o.hit)
      total += o.under_active_miss ? 0 : 1;
    else
      total += o.miss_cost;
  }
  return total;
}

CacheCore::CacheCore(const ControllerConfig& cfg)
    : line_bytes_(cfg.cache_line_bytes()),
      sets_(cfg.cache_num_lines / cfg.cache_associativity),
      ways_(cfg.cache_associativity),
      table_(static_cast<size_t>(sets_) * ways_) {
  for (auto& w : table_) w.data.assign(line_bytes_, 0);
}

uint32_t CacheCore::set_index(uint64_t addr) const {
  return static_cast<uint32_t>((addr / line_bytes_) % sets_);
}

uint64_t CacheCore::tag_of(uint64_t addr) const {
  return (addr / line_bytes_) / sets_;
}

CacheCore::Way* CacheCore::lookup(uint64_t addr, uint32_t* way_out) {
  uint32_t set = set_index(addr);
  uint64_t tag = tag_of(addr);
  for (uint32_t w = 0; w < ways_; ++w) {
    Way& way = table_[static_cast<size_t>(set) * ways_ + w];
    if (way.valid && way.tag == tag) {
      if (way_out) *way_out = w;
      return &way;
    }
  }
  return nullptr;
}

uint32_t CacheCore::pick_victim(uint32_t set) const {
  // Invalid way first, else least recently used.
  uint32_t victim = 0;
  uint64_t best = UINT64_MAX;
  for (uint32_t w = 0; w < ways_; ++w) {
    const Way& way = table_[static_cast<size_t>(set) * ways_ + w];
    if (!way.valid) return w;
    if (way.lru < best) {
      best = way.lru;
      victim = w;
    }
  }
  return victim;
}

CacheCore::AccessResult CacheCore::pe_access(MemOp op, uint64_t address, uint32_t size,
                                             const uint8_t* write_data, uint64_t seq) {
  AccessResult res;
  uint64_t line_addr = line_address_of(address);
  uint32_t offset = static_cast<uint32_t>(address - line_addr);
  res.line_address = line_addr;

  Way* way = lookup(address);
  uint32_t set = set_index(address);
  uint32_t victim = 0;
  if (!way) {
    if (mshr_full()) {
      res.accepted = false;  // no state change; caller retries
      return res;
    }
    victim = pick_victim(set);
    const Way& v = table_[static_cast<size_t>(set) * ways_ + victim];
    if (v.valid && v.pending) {
      // The LRU victim is still being filled; stalling keeps the eviction
      // order identical to a purely functional model.
      res.accepted = false;
      return res;
    }
  }

  ++stats_.accesses;
  bool miss_active = has_outstanding_miss();

  if (way) {
    res.hit = true;
    res.under_active_miss = miss_active;
    ++stats_.hits;
    if (miss_active) ++stats_.hits_under_miss;
    way->lru = ++lru_clock_;
    if (way->pending) {
      // Line still in flight: attach to the outstanding miss; the response
      // (and any write merge) happens when the fill lands.
      for (auto& e : mshr_) {
        if (e.line_address != line_addr) continue;
        Waiter wtr{seq, op, offset, size, {}};
        if (op == MemOp::Write) wtr.write_data.assign(write_data, write_data + size);
        e.waiters.push_back(std::move(wtr));
        break;
      }
      res.deferred = true;
      return res;
    }
    if (op == MemOp::Read) {
      res.read_data.assign(way->data.begin() + offset, way->data.begin() + offset + size);
    } else {
      std::memcpy(way->data.data() + offset, write_data, size);
      way->dirty = true;
    }
    return res;
  }

  // Miss: evict the victim now so the hit/miss sequence matches a purely
  // functional model; the fill event only carries timing and data.
  ++stats_.misses;
  res.needs_fill = true;
  res.deferred = true;

  Way& v = table_[static_cast<size_t>(set) * ways_ + victim];
  if (v.valid) {
    ++stats_.evictions;
    if (v.dirty) {
      ++stats_.writebacks;
      uint64_t victim_addr = (v.tag * sets_ + set) * line_bytes_;
      res.writeback = Writeback{victim_addr, v.data};
    }
  }
  v.tag = tag_of(address);
  v.valid = true;
  v.dirty = false;
  v.pending = true;
  v.lru = ++lru_clock_;

  MshrEntry entry;
  entry.line_address = line_addr;
  entry.set = set;
  entry.way = victim;
  entry.writeback = res.writeback;
  Waiter wtr{seq, op, offset, size, {}};
  if (op == MemOp::Write) wtr.write_data.assign(write_data, write_data + size);
  entry.waiters.push_back(std::move(wtr));
  mshr_.push_back(std::move(entry));
  return res;
}

CacheCore::FillResult CacheCore::mem_fill(uint64_t line_address, const std::vector<uint8_t>& data) {
  auto it = std::find_if(mshr_.begin(), mshr_.end(), [&](const MshrEntry& e) {
    return e.line_address == line_address;
  });
  if (it == mshr_.end())
    throw internal_error("mem_fill with no outstanding miss for this line");

  FillResult out;
  out.writeback = it->writeback;

  Way& way = table_[static_cast<size_t>(it->set) * ways_ + it->way];
  way.data = data;
  way.data.resize(line_bytes_, 0);
  way.pending = false;

  for (auto& w : it->waiters) {
    if (w.op == MemOp::Write) {
      std::memcpy(way.data.data() + w.offset, w.write_data.data(), w.size);
      way.dirty = true;
      out.read_data.emplace_back();
    } else {
      out.read_data.emplace_back(way.data.begin() + w.offset, way.data.begin() + w.offset + w.size);
    }
    out.released.push_back(std::move(w));
  }
  mshr_.erase(it);
  return out;
}

}  // namespace mcsim
