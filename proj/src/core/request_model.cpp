#include "core/request_model.hpp"

#include <algorithm>

#include "core/errors.hpp"

namespace mcsim {

uint32_t payload_flit_count(const MemRequest& req) {
  if (req.op == MemOp::Read || req.total_size == 0) return 0;
  return (req.total_size + req.payload_size - 1) / req.payload_size;
}

std::string check_request(const MemRequest& req, const ControllerConfig& cfg) {
  if (req.pe_id >= cfg.num_pes) return "pe_id";
  if (cfg.app_addr_width < 64 && req.address >= (1ULL << cfg.app_addr_width)) return "address";
  if (req.payload_size == 0 || req.payload_size > cfg.app_io_data_width) return "payload_size";
  if (req.access_class == AccessClass::CacheLine && req.total_size != req.payload_size)
    return "total_size";
  if (req.access_class == AccessClass::Bulk && req.total_size > cfg.dma_max_transaction)
    return "total_size";
  if (req.op == MemOp::Write && req.payload.size() != req.total_size) return "payload";
  return {};
}

FlitSequence flit_encode(const MemRequest& req) {
  if (req.payload_size == 0)
    throw trace_error("malformed request: payload_size");
  if (req.access_class == AccessClass::CacheLine && req.total_size != req.payload_size)
    throw trace_error("malformed request: total_size");
  if (req.op == MemOp::Write && req.payload.size() != req.total_size)
    throw trace_error("malformed request: payload");

  FlitSequence out;
  Flit header;
  header.kind = FlitKind::Header;
  header.pe_id = req.pe_id;
  header.op = req.op;
  header.access_class = req.access_class;
  header.address = req.address;
  header.payload_size = req.payload_size;
  header.total_size = req.total_size;
  header.flit_index = 0;
  header.seq_no = req.seq_no;
  out.push_back(std::move(header));

  uint32_t n = payload_flit_count(req);
  uint32_t offset = 0;
  for (uint32_t i = 0; i < n; ++i) {
    Flit p;
    p.kind = FlitKind::Payload;
    p.pe_id = req.pe_id;
    p.op = req.op;
    p.access_class = req.access_class;
    p.address = req.address;
    p.payload_size = req.payload_size;
    p.total_size = req.total_size;
    p.flit_index = i + 1;
    p.seq_no = req.seq_no;
    uint32_t seg = std::min(req.payload_size, req.total_size - offset);
    p.payload_segment.assign(req.payload.begin() + offset, req.payload.begin() + offset + seg);
    offset += seg;
    out.push_back(std::move(p));
  }
  return out;
}

MemRequest flit_decode(const FlitSequence& flits) {
  if (flits.empty() || flits.front().kind != FlitKind::Header)
    throw trace_error("incomplete transfer: missing header flit");
  const Flit& h = flits.front();

  MemRequest req;
  req.pe_id = h.pe_id;
  req.op = h.op;
  req.access_class = h.access_class;
  req.address = h.address;
  req.payload_size = h.payload_size;
  req.total_size = h.total_size;
  req.seq_no = h.seq_no;

  uint32_t received = 0;
  for (size_t i = 1; i < flits.size(); ++i) {
    const Flit& f = flits[i];
    if (f.kind != FlitKind::Payload || f.flit_index != i)
      throw trace_error("incomplete transfer: flit_index " + std::to_string(i) +
                        " missing or duplicated");
    req.payload.insert(req.payload.end(), f.payload_segment.begin(), f.payload_segment.end());
    received += static_cast<uint32_t>(f.payload_segment.size());
  }

  if (req.op == MemOp::Write && received != req.total_size)
    throw trace_error("incomplete transfer: got " + std::to_string(received) + " of " +
                      std::to_string(req.total_size) + " payload bytes");
  if (req.op == MemOp::Read && flits.size() != 1)
    throw trace_error("incomplete transfer: read carries no payload flits");
  return req;
}

Destination route(const Flit& flit, const ControllerConfig& cfg) {
  if (flit.access_class == AccessClass::CacheLine) {
    if (!cfg.enable_cacheline)
      throw config_error("routing error: cache engine disabled for cacheline access");
    return Destination::CacheEngine;
  }
  if (!cfg.enable_dma)
    throw config_error("routing error: DMA engine disabled for bulk access");
  return Destination::DmaEngine;
}

}  // namespace mcsim
