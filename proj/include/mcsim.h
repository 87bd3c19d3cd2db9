/* mcsim: trace-driven simulator of a programmable DRAM memory controller.
 *
 * C API over the C++ core. All objects are opaque handles; every function
 * that can fail returns an mcsim_status, with a thread-local message
 * available through mcsim_last_error(). Strings returned through out
 * parameters are heap-allocated and must be freed with mcsim_string_free().
 */
#ifndef MCSIM_H
#define MCSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcsim_status {
  MCSIM_OK = 0,
  MCSIM_ERR_CONFIG = 1,      /* bad configuration or usage */
  MCSIM_ERR_TRACE = 2,       /* bad trace, event log or generator input */
  MCSIM_ERR_INTERNAL = 3,    /* simulator invariant violation */
  MCSIM_ERR_CONSISTENCY = 4, /* event log fails the consistency rules */
  MCSIM_ERR_ARG = 5          /* null handle or malformed argument */
} mcsim_status;

typedef struct mcsim_config mcsim_config;
typedef struct mcsim_trace mcsim_trace;
typedef struct mcsim_report mcsim_report;

const char* mcsim_version(void);

/* Last error message of the calling thread; valid until the next failing
 * call. Never NULL. */
const char* mcsim_last_error(void);

void mcsim_string_free(char* s);

/* ---- configuration ---- */

mcsim_status mcsim_config_default(mcsim_config** out);
/* Parses a `section.key = value` document (defaults for omitted keys). */
mcsim_status mcsim_config_parse(const char* text, mcsim_config** out);
mcsim_status mcsim_config_load(const char* path, mcsim_config** out);
mcsim_status mcsim_config_set(mcsim_config* cfg, const char* key, const char* value);
/* MCSIM_OK when valid; MCSIM_ERR_CONFIG with the violation list in
 * mcsim_last_error() otherwise. */
mcsim_status mcsim_config_validate(const mcsim_config* cfg);
mcsim_status mcsim_config_render(const mcsim_config* cfg, char** out_text);
void mcsim_config_free(mcsim_config* cfg);

/* ---- traces ---- */

mcsim_status mcsim_trace_parse(const char* text, mcsim_trace** out);
mcsim_status mcsim_trace_load(const char* path, mcsim_trace** out);
/* pattern: sequential | random | gcn | cnn; params: comma-separated
 * key=value pairs (may be NULL or empty for defaults). */
mcsim_status mcsim_trace_generate(const char* pattern, const char* params, uint64_t seed,
                                  mcsim_trace** out);
mcsim_status mcsim_trace_render(const mcsim_trace* t, char** out_text);
uint64_t mcsim_trace_length(const mcsim_trace* t);
void mcsim_trace_free(mcsim_trace* t);

/* ---- simulation ---- */

/* baseline != 0 runs the raw-interface FIFO model instead of the
 * controller. with_event_log != 0 records the per-request lifecycle log. */
mcsim_status mcsim_run(const mcsim_config* cfg, const mcsim_trace* trace, int baseline,
                       int with_event_log, mcsim_report** out);

/* format: text | csv | structured (json accepted as an alias). */
mcsim_status mcsim_report_emit(const mcsim_report* r, const char* format, char** out_text);
/* Numeric field by report name, e.g. "total_cycles", "dma_share". */
mcsim_status mcsim_report_scalar(const mcsim_report* r, const char* name, double* out);
/* NULL when the run did not record an event log. Owned by the report. */
const char* mcsim_report_event_log(const mcsim_report* r);
/* Attaches a baseline run so the report carries the improvement figure. */
mcsim_status mcsim_report_set_baseline(mcsim_report* r, const mcsim_report* baseline);
void mcsim_report_free(mcsim_report* r);

/* ---- parameter sweeps ---- */

/* Runs one simulation per value of `key` (comma-separated list) and returns
 * a CSV table, one row per value. */
mcsim_status mcsim_sweep(const mcsim_config* cfg, const mcsim_trace* trace, const char* key,
                         const char* values, char** out_csv);

/* ---- consistency checking ---- */

/* MCSIM_OK for a clean log; MCSIM_ERR_CONSISTENCY with the violation list
 * in mcsim_last_error() otherwise. */
mcsim_status mcsim_check_log(const char* log_text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MCSIM_H */
