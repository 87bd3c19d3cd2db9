#pragma once

#include <string>

#include "core/config.hpp"
#include "core/report.hpp"
#include "core/workloads.hpp"

namespace mcsim {

// Raw memory-interface baseline: a FIFO of PE requests driving the same
// open-row DRAM model directly, with no cache, no scheduler and no DMA
// staging. Each request is served as back-to-back beats at the PE interface
// width, the way a directly connected interface IP sees the traffic; row
// hits still occur naturally.
SimReport run_baseline(const SimConfig& cfg, const Trace& trace,
                       std::string* event_log_text = nullptr);

}  // namespace mcsim
