#include "core/consistency.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace mcsim {

namespace {

struct ReqInfo {
  uint64_t seq = 0;
  AccessClass cls = AccessClass::CacheLine;
  uint64_t address = 0;
  uint64_t submit_pos = 0;    // order of S events
  uint64_t complete_pos = UINT64_MAX;  // order of C events
  uint64_t submit_cycle = 0;
  uint64_t complete_cycle = 0;
  uint32_t burst = 0;       // bulk: burst id; cacheline: burst open at submit (0 = none)
  bool waiting = false;     // cacheline submitted while a burst was open
  bool completed = false;
};

}  // namespace

std::vector<std::string> check_consistency(const std::vector<Event>& events,
                                           size_t max_violations) {
  std::vector<std::string> out;
  auto report = [&](std::string msg) {
    if (out.size() < max_violations) out.push_back(std::move(msg));
  };

  std::unordered_map<uint64_t, ReqInfo> reqs;
  std::vector<uint64_t> submit_order;
  std::vector<uint64_t> complete_order;

  // Pass 1: reconstruct per-request info and the burst structure.
  uint32_t current_burst = 0;
  uint64_t open_incomplete = 0;  // incomplete bulk requests of the open burst
  uint64_t submit_pos = 0, complete_pos = 0;
  for (const Event& e : events) {
    if (e.kind == Event::Kind::Submit) {
      if (reqs.count(e.seq)) {
        report("request " + std::to_string(e.seq) + " submitted twice");
        continue;
      }
      ReqInfo info;
      info.seq = e.seq;
      info.cls = e.cls;
      info.address = e.address;
      info.submit_pos = submit_pos++;
      info.submit_cycle = e.cycle;
      if (e.cls == AccessClass::Bulk) {
        if (open_incomplete == 0) ++current_burst;
        info.burst = current_burst;
        ++open_incomplete;
      } else {
        info.waiting = open_incomplete > 0;
        info.burst = current_burst;
      }
      reqs.emplace(e.seq, info);
      submit_order.push_back(e.seq);
    } else if (e.kind == Event::Kind::Complete) {
      auto it = reqs.find(e.seq);
      if (it == reqs.end()) {
        report("request " + std::to_string(e.seq) + " completed without a submit");
        continue;
      }
      ReqInfo& info = it->second;
      if (info.completed) {
        report("request " + std::to_string(e.seq) + " completed twice");
        continue;
      }
      info.completed = true;
      info.complete_pos = complete_pos++;
      info.complete_cycle = e.cycle;
      if (e.cycle < info.submit_cycle)
        report("request " + std::to_string(e.seq) + " completes before it is submitted");
      if (info.cls == AccessClass::Bulk) --open_incomplete;
      complete_order.push_back(e.seq);
    }
  }

  for (uint64_t seq : submit_order) {
    const ReqInfo& info = reqs[seq];
    if (!info.completed)
      report("request " + std::to_string(seq) + " never completes");
  }

  // Rules (a), (b): per-engine FIFO over completions.
  uint64_t last_cache_pos = 0, last_bulk_pos = 0;
  bool cache_seen = false, bulk_seen = false;
  for (uint64_t seq : complete_order) {
    const ReqInfo& info = reqs[seq];
    uint64_t pos = info.submit_pos;
    if (info.cls == AccessClass::CacheLine) {
      if (cache_seen && pos < last_cache_pos)
        report("cacheline completion order breaks FIFO at request " + std::to_string(seq));
      if (!cache_seen || pos > last_cache_pos) last_cache_pos = pos;
      cache_seen = true;
    } else {
      if (bulk_seen && pos < last_bulk_pos)
        report("bulk completion order breaks FIFO at request " + std::to_string(seq));
      if (!bulk_seen || pos > last_bulk_pos) last_bulk_pos = pos;
      bulk_seen = true;
    }
  }

  // Burst completion spans.
  std::unordered_map<uint32_t, std::pair<uint64_t, uint64_t>> burst_span;  // min,max complete_pos
  for (uint64_t seq : submit_order) {
    const ReqInfo& info = reqs[seq];
    if (info.cls != AccessClass::Bulk || !info.completed) continue;
    auto [it, fresh] = burst_span.emplace(info.burst,
                                          std::make_pair(info.complete_pos, info.complete_pos));
    if (!fresh) {
      it->second.first = std::min(it->second.first, info.complete_pos);
      it->second.second = std::max(it->second.second, info.complete_pos);
    }
  }

  // Rules (c), (d): cacheline completions order around bursts. For (c) it
  // is enough to beat the earliest completion of every later burst, so a
  // suffix-min over burst ids does the whole check.
  std::vector<std::pair<uint32_t, uint64_t>> burst_first;  // (id, min complete_pos)
  for (const auto& [burst, span] : burst_span) burst_first.emplace_back(burst, span.first);
  std::sort(burst_first.begin(), burst_first.end());
  std::vector<uint64_t> suffix_min(burst_first.size() + 1, UINT64_MAX);
  for (size_t i = burst_first.size(); i-- > 0;)
    suffix_min[i] = std::min(suffix_min[i + 1], burst_first[i].second);

  for (uint64_t seq : submit_order) {
    const ReqInfo& info = reqs[seq];
    if (info.cls != AccessClass::CacheLine || !info.completed) continue;
    if (info.waiting) {
      auto it = burst_span.find(info.burst);
      if (it != burst_span.end() && info.complete_pos < it->second.second)
        report("cacheline request " + std::to_string(seq) +
               " arrived inside bulk burst " + std::to_string(info.burst) +
               " but completed before the burst finished");
    }
    auto it = std::upper_bound(burst_first.begin(), burst_first.end(),
                               std::make_pair(info.burst, UINT64_MAX));
    uint64_t later_min = suffix_min[static_cast<size_t>(it - burst_first.begin())];
    if (later_min != UINT64_MAX && info.complete_pos > later_min)
      report("cacheline request " + std::to_string(seq) +
             " arrived before a later bulk burst but completed after it started completing");
  }

  // Rule (e): per-address, per-class completion order equals arrival order.
  std::unordered_map<uint64_t, uint64_t> last_pos_by_key;
  for (uint64_t seq : complete_order) {
    const ReqInfo& info = reqs[seq];
    uint64_t key = info.address * 2 + (info.cls == AccessClass::Bulk ? 1 : 0);
    auto it = last_pos_by_key.find(key);
    if (it != last_pos_by_key.end() && info.submit_pos < it->second)
      report("same-address order violated at request " + std::to_string(seq));
    if (it == last_pos_by_key.end() || info.submit_pos > it->second)
      last_pos_by_key[key] = info.submit_pos;
  }

  return out;
}

std::vector<std::string> check_consistency_text(const std::string& log_text,
                                                size_t max_violations) {
  return check_consistency(EventLog::parse(log_text), max_violations);
}

}  // namespace mcsim
