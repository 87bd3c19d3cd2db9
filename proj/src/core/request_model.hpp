#pragma once

#include "core/config.hpp"
#include "core/types.hpp"

namespace mcsim {

enum class Destination : uint8_t { CacheEngine, DmaEngine };

// Number of payload flits a request produces: writes carry the payload in
// app-width segments, reads are header-only.
uint32_t payload_flit_count(const MemRequest& req);

// Header first, then dense payload flits. Throws trace_error naming the
// offending field when the request violates its invariants.
FlitSequence flit_encode(const MemRequest& req);

// Inverse of flit_encode for a complete in-order sequence; reconstructs the
// request up to arrival_cycle. Gaps or duplicates raise trace_error.
MemRequest flit_decode(const FlitSequence& flits);

// cacheline -> cache engine, bulk -> DMA engine. Throws config_error when
// the target engine is disabled.
Destination route(const Flit& flit, const ControllerConfig& cfg);

// Request-level invariant check against the active config; returns an
// error message or empty string.
std::string check_request(const MemRequest& req, const ControllerConfig& cfg);

}  // namespace mcsim
