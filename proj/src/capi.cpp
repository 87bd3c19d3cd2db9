#include "mcsim.h"

#include <cstring>
#include <string>

#include "core/baseline.hpp"
#include "core/config.hpp"
#include "core/consistency.hpp"
#include "core/controller.hpp"
#include "core/errors.hpp"
#include "core/report.hpp"
#include "core/workloads.hpp"

using namespace mcsim;

struct mcsim_config {
  SimConfig cfg;
};

struct mcsim_trace {
  Trace trace;
};

struct mcsim_report {
  SimReport report;
  std::string event_log;
  bool has_log = false;
};

namespace {

thread_local std::string g_last_error = "";

mcsim_status fail(mcsim_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

mcsim_status from_exception(const SimError& e) {
  switch (e.kind()) {
    case SimError::Kind::Config: return fail(MCSIM_ERR_CONFIG, e.what());
    case SimError::Kind::Trace: return fail(MCSIM_ERR_TRACE, e.what());
    case SimError::Kind::Internal: break;
  }
  return fail(MCSIM_ERR_INTERNAL, e.what());
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
mcsim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SimError& e) {
    return from_exception(e);
  } catch (const std::exception& e) {
    return fail(MCSIM_ERR_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* mcsim_version(void) { return "1.0.0"; }

const char* mcsim_last_error(void) { return g_last_error.c_str(); }

void mcsim_string_free(char* s) { std::free(s); }

mcsim_status mcsim_config_default(mcsim_config** out) {
  if (!out) return fail(MCSIM_ERR_ARG, "null out parameter");
  *out = new mcsim_config{default_config()};
  return MCSIM_OK;
}

mcsim_status mcsim_config_parse(const char* text, mcsim_config** out) {
  if (!text || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new mcsim_config{parse_config(text)};
    return MCSIM_OK;
  });
}

mcsim_status mcsim_config_load(const char* path, mcsim_config** out) {
  if (!path || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new mcsim_config{load_config_file(path)};
    return MCSIM_OK;
  });
}

mcsim_status mcsim_config_set(mcsim_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    set_config_value(cfg->cfg, key, value);
    return MCSIM_OK;
  });
}

mcsim_status mcsim_config_validate(const mcsim_config* cfg) {
  if (!cfg) return fail(MCSIM_ERR_ARG, "null config");
  ValidationResult v = validate(cfg->cfg);
  if (v.ok()) return MCSIM_OK;
  return fail(MCSIM_ERR_CONFIG, v.to_string());
}

mcsim_status mcsim_config_render(const mcsim_config* cfg, char** out_text) {
  if (!cfg || !out_text) return fail(MCSIM_ERR_ARG, "null argument");
  *out_text = dup_string(render_config(cfg->cfg));
  return MCSIM_OK;
}

void mcsim_config_free(mcsim_config* cfg) { delete cfg; }

mcsim_status mcsim_trace_parse(const char* text, mcsim_trace** out) {
  if (!text || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new mcsim_trace{parse_trace(text)};
    return MCSIM_OK;
  });
}

mcsim_status mcsim_trace_load(const char* path, mcsim_trace** out) {
  if (!path || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new mcsim_trace{load_trace_file(path)};
    return MCSIM_OK;
  });
}

mcsim_status mcsim_trace_generate(const char* pattern, const char* params, uint64_t seed,
                                  mcsim_trace** out) {
  if (!pattern || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out = new mcsim_trace{generate_trace(pattern, params ? params : "", seed)};
    return MCSIM_OK;
  });
}

mcsim_status mcsim_trace_render(const mcsim_trace* t, char** out_text) {
  if (!t || !out_text) return fail(MCSIM_ERR_ARG, "null argument");
  *out_text = dup_string(render_trace(t->trace));
  return MCSIM_OK;
}

uint64_t mcsim_trace_length(const mcsim_trace* t) {
  return t ? t->trace.records.size() : 0;
}

void mcsim_trace_free(mcsim_trace* t) { delete t; }

mcsim_status mcsim_run(const mcsim_config* cfg, const mcsim_trace* trace, int baseline,
                       int with_event_log, mcsim_report** out) {
  if (!cfg || !trace || !out) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    auto* rep = new mcsim_report;
    try {
      if (baseline) {
        rep->report = run_baseline(cfg->cfg, trace->trace,
                                   with_event_log ? &rep->event_log : nullptr);
      } else {
        Controller::Options opts;
        rep->report = run_controller(cfg->cfg, trace->trace, opts,
                                     with_event_log ? &rep->event_log : nullptr);
      }
    } catch (...) {
      delete rep;
      throw;
    }
    rep->has_log = with_event_log != 0;
    *out = rep;
    return MCSIM_OK;
  });
}

mcsim_status mcsim_report_emit(const mcsim_report* r, const char* format, char** out_text) {
  if (!r || !format || !out_text) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    *out_text = dup_string(report_emit(r->report, format));
    return MCSIM_OK;
  });
}

mcsim_status mcsim_report_scalar(const mcsim_report* r, const char* name, double* out) {
  if (!r || !name || !out) return fail(MCSIM_ERR_ARG, "null argument");
  // Reuse the structured emitter's field table through a tiny lookup.
  const SimReport& rep = r->report;
  const std::string key = name;
  struct Entry {
    const char* n;
    double v;
  };
  const Entry entries[] = {
      {"total_cycles", double(rep.total_cycles)},
      {"requests", double(rep.requests)},
      {"completed", double(rep.completed)},
      {"cacheline_reads", double(rep.cacheline_reads)},
      {"cacheline_writes", double(rep.cacheline_writes)},
      {"bulk_reads", double(rep.bulk_reads)},
      {"bulk_writes", double(rep.bulk_writes)},
      {"cache_accesses", double(rep.cache_accesses)},
      {"cache_hits", double(rep.cache_hits)},
      {"cache_misses", double(rep.cache_misses)},
      {"cache_hits_under_miss", double(rep.cache_hits_under_miss)},
      {"cache_evictions", double(rep.cache_evictions)},
      {"cache_writebacks", double(rep.cache_writebacks)},
      {"cache_busy_cycles", double(rep.cache_busy_cycles)},
      {"dma_transfers", double(rep.dma_transfers)},
      {"dma_elements", double(rep.dma_elements)},
      {"dma_busy_cycles", double(rep.dma_busy_cycles)},
      {"dram_accesses", double(rep.dram_accesses)},
      {"dram_first_hits", double(rep.dram_first_hits)},
      {"dram_row_hits", double(rep.dram_row_hits)},
      {"dram_row_conflicts", double(rep.dram_row_conflicts)},
      {"dram_busy_cycles", double(rep.dram_busy_cycles)},
      {"sched_batches", double(rep.sched_batches)},
      {"sched_mean_fill", rep.sched_mean_fill},
      {"sched_mean_formation", rep.sched_mean_formation},
      {"sched_cycles_per_batch", double(rep.sched_cycles_per_batch)},
      {"sched_bypassed", double(rep.sched_bypassed)},
      {"frontend_flits", double(rep.frontend_flits)},
      {"frontend_stall_cycles", double(rep.frontend_stall_cycles)},
      {"overlap_warnings", double(rep.overlap_warnings)},
      {"cache_share", rep.cache_share},
      {"dma_share", rep.dma_share},
      {"dram_share", rep.dram_share},
      {"has_baseline", rep.has_baseline ? 1.0 : 0.0},
      {"baseline_total_cycles", double(rep.baseline_total_cycles)},
      {"improvement", rep.improvement},
  };
  for (const auto& e : entries) {
    if (key == e.n) {
      *out = e.v;
      return MCSIM_OK;
    }
  }
  return fail(MCSIM_ERR_ARG, "unknown report field '" + key + "'");
}

const char* mcsim_report_event_log(const mcsim_report* r) {
  if (!r || !r->has_log) return nullptr;
  return r->event_log.c_str();
}

mcsim_status mcsim_report_set_baseline(mcsim_report* r, const mcsim_report* baseline) {
  if (!r || !baseline) return fail(MCSIM_ERR_ARG, "null argument");
  r->report.attach_baseline(baseline->report);
  return MCSIM_OK;
}

void mcsim_report_free(mcsim_report* r) { delete r; }

mcsim_status mcsim_sweep(const mcsim_config* cfg, const mcsim_trace* trace, const char* key,
                         const char* values, char** out_csv) {
  if (!cfg || !trace || !key || !values || !out_csv)
    return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&] {
    if (!is_config_key(key)) throw config_error("unknown config key '" + std::string(key) + "'");
    std::vector<std::string> vals;
    std::string cur;
    for (const char* p = values;; ++p) {
      if (*p == ',' || *p == '\0') {
        if (!cur.empty()) vals.push_back(cur);
        cur.clear();
        if (*p == '\0') break;
      } else {
        cur += *p;
      }
    }
    if (vals.empty()) throw config_error("sweep: no values given");
    std::vector<SimReport> reports;
    for (const std::string& v : vals) {
      SimConfig point = cfg->cfg;
      set_config_value(point, key, v);
      ValidationResult check = validate(point);
      if (!check.ok()) throw config_error("sweep value '" + v + "':\n" + check.to_string());
      reports.push_back(run_controller(point, trace->trace));
    }
    *out_csv = dup_string(sweep_csv(key, vals, reports));
    return MCSIM_OK;
  });
}

mcsim_status mcsim_check_log(const char* log_text) {
  if (!log_text) return fail(MCSIM_ERR_ARG, "null argument");
  return guarded([&]() -> mcsim_status {
    auto violations = check_consistency_text(log_text);
    if (violations.empty()) return MCSIM_OK;
    std::string msg;
    for (const auto& v : violations) msg += v + "\n";
    return fail(MCSIM_ERR_CONSISTENCY, msg);
  });
}

}  // extern "C"
