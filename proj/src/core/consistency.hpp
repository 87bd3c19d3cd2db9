#pragma once

#include <string>
#include <vector>

#include "core/event_log.hpp"

namespace mcsim {

// Verifies a simulation event log against the weak consistency rules:
//   (a) cacheline completions follow cacheline arrival order;
//   (b) bulk completions follow bulk arrival order;
//   (c) cacheline requests arriving before the first bulk request of a
//       burst complete before every member of that burst;
//   (d) cacheline requests arriving while a bulk burst is open complete
//       after all of that burst's members;
//   (e) completions to any single address, within a class, follow arrival
//       order;
// plus multiset integrity (every submit completes exactly once).
//
// A burst is a maximal run of bulk requests each submitted while an earlier
// member was still incomplete. Everything is derived from the log alone.
std::vector<std::string> check_consistency(const std::vector<Event>& events,
                                           size_t max_violations = 16);

std::vector<std::string> check_consistency_text(const std::string& log_text,
                                                size_t max_violations = 16);

}  // namespace mcsim
