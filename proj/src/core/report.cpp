#include "core/report.hpp"

#include <cstdio>
#include <json.hpp>

#include "core/errors.hpp"

namespace mcsim {

using nlohmann::json;

void SimReport::finalize_shares() {
  double t = total_cycles ? static_cast<double>(total_cycles) : 0.0;
  cache_share = t > 0 ? cache_busy_cycles / t : 0.0;
  dma_share = t > 0 ? dma_busy_cycles / t : 0.0;
  dram_share = t > 0 ? dram_busy_cycles / t : 0.0;
}

void SimReport::attach_baseline(const SimReport& baseline) {
  has_baseline = true;
  baseline_total_cycles = baseline.total_cycles;
  improvement = baseline.total_cycles
                    ? 1.0 - static_cast<double>(total_cycles) / baseline.total_cycles
                    : 0.0;
}

namespace {

struct Field {
  const char* name;
  enum class T { U64, F64, Str, Bool } type;
  uint64_t SimReport::* u64 = nullptr;
  double SimReport::* f64 = nullptr;
  std::string SimReport::* str = nullptr;
  bool SimReport::* b = nullptr;
};

// Stable field order shared by every output format.
const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"format_version", Field::T::U64, nullptr, nullptr, nullptr, nullptr},  // pseudo
      {"kind", Field::T::Str, nullptr, nullptr, &SimReport::kind, nullptr},
      {"total_cycles", Field::T::U64, &SimReport::total_cycles},
      {"requests", Field::T::U64, &SimReport::requests},
      {"completed", Field::T::U64, &SimReport::completed},
      {"cacheline_reads", Field::T::U64, &SimReport::cacheline_reads},
      {"cacheline_writes", Field::T::U64, &SimReport::cacheline_writes},
      {"bulk_reads", Field::T::U64, &SimReport::bulk_reads},
      {"bulk_writes", Field::T::U64, &SimReport::bulk_writes},
      {"cache_accesses", Field::T::U64, &SimReport::cache_accesses},
      {"cache_hits", Field::T::U64, &SimReport::cache_hits},
      {"cache_misses", Field::T::U64, &SimReport::cache_misses},
      {"cache_hits_under_miss", Field::T::U64, &SimReport::cache_hits_under_miss},
      {"cache_evictions", Field::T::U64, &SimReport::cache_evictions},
      {"cache_writebacks", Field::T::U64, &SimReport::cache_writebacks},
      {"cache_busy_cycles", Field::T::U64, &SimReport::cache_busy_cycles},
      {"dma_transfers", Field::T::U64, &SimReport::dma_transfers},
      {"dma_elements", Field::T::U64, &SimReport::dma_elements},
      {"dma_busy_cycles", Field::T::U64, &SimReport::dma_busy_cycles},
      {"dram_accesses", Field::T::U64, &SimReport::dram_accesses},
      {"dram_first_hits", Field::T::U64, &SimReport::dram_first_hits},
      {"dram_row_hits", Field::T::U64, &SimReport::dram_row_hits},
      {"dram_row_conflicts", Field::T::U64, &SimReport::dram_row_conflicts},
      {"dram_busy_cycles", Field::T::U64, &SimReport::dram_busy_cycles},
      {"sched_batches", Field::T::U64, &SimReport::sched_batches},
      {"sched_mean_fill", Field::T::F64, nullptr, &SimReport::sched_mean_fill},
      {"sched_mean_formation", Field::T::F64, nullptr, &SimReport::sched_mean_formation},
      {"sched_cycles_per_batch", Field::T::U64, &SimReport::sched_cycles_per_batch},
      {"sched_bypassed", Field::T::U64, &SimReport::sched_bypassed},
      {"frontend_flits", Field::T::U64, &SimReport::frontend_flits},
      {"frontend_stall_cycles", Field::T::U64, &SimReport::frontend_stall_cycles},
      {"overlap_warnings", Field::T::U64, &SimReport::overlap_warnings},
      {"cache_share", Field::T::F64, nullptr, &SimReport::cache_share},
      {"dma_share", Field::T::F64, nullptr, &SimReport::dma_share},
      {"dram_share", Field::T::F64, nullptr, &SimReport::dram_share},
      {"has_baseline", Field::T::Bool, nullptr, nullptr, nullptr, &SimReport::has_baseline},
      {"baseline_total_cycles", Field::T::U64, &SimReport::baseline_total_cycles},
      {"improvement", Field::T::F64, nullptr, &SimReport::improvement},
  };
  return f;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string field_value(const SimReport& r, const Field& f) {
  switch (f.type) {
    case Field::T::U64:
      return f.u64 ? std::to_string(r.*(f.u64)) : "1";
    case Field::T::F64:
      return fmt_double(r.*(f.f64));
    case Field::T::Str:
      return r.*(f.str);
    case Field::T::Bool:
      return (r.*(f.b)) ? "1" : "0";
  }
  return {};
}

}  // namespace

std::string report_emit(const SimReport& r, const std::string& format) {
  if (format == "text") {
    std::string out;
    char line[128];
    for (const auto& f : fields()) {
      std::snprintf(line, sizeof(line), "%-24s %s\n", f.name, field_value(r, f).c_str());
      out += line;
    }
    return out;
  }
  if (format == "csv") {
    std::string header, row;
    for (const auto& f : fields()) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += f.name;
      row += field_value(r, f);
    }
    return header + "\n" + row + "\n";
  }
  if (format == "structured" || format == "json") {
    json j;
    j["format_version"] = 1;
    for (const auto& f : fields()) {
      if (f.type == Field::T::U64 && f.u64) j[f.name] = r.*(f.u64);
      else if (f.type == Field::T::F64) j[f.name] = r.*(f.f64);
      else if (f.type == Field::T::Str) j[f.name] = r.*(f.str);
      else if (f.type == Field::T::Bool) j[f.name] = r.*(f.b);
    }
    return j.dump(2) + "\n";
  }
  throw config_error("unknown report format '" + format + "' (text, csv, structured)");
}

SimReport report_parse_structured(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw trace_error(std::string("structured report: ") + e.what());
  }
  SimReport r;
  for (const auto& f : fields()) {
    if (!j.contains(f.name)) continue;
    if (f.type == Field::T::U64 && f.u64) r.*(f.u64) = j[f.name].get<uint64_t>();
    else if (f.type == Field::T::F64) r.*(f.f64) = j[f.name].get<double>();
    else if (f.type == Field::T::Str) r.*(f.str) = j[f.name].get<std::string>();
    else if (f.type == Field::T::Bool) r.*(f.b) = j[f.name].get<bool>();
  }
  return r;
}

std::string sweep_csv(const std::string& key, const std::vector<std::string>& values,
                      const std::vector<SimReport>& reports) {
  std::string out = key;
  for (const auto& f : fields()) {
    out += ',';
    out += f.name;
  }
  out += '\n';
  for (size_t i = 0; i < reports.size(); ++i) {
    out += values.at(i);
    for (const auto& f : fields()) {
      out += ',';
      out += field_value(reports[i], f);
    }
    out += '\n';
  }
  return out;
}

}  // namespace mcsim
