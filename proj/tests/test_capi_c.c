/* Compile-and-run check that mcsim.h is consumable from plain C. */
#include <stdio.h>
#include <string.h>

#include "mcsim.h"

int main(void) {
  mcsim_config* cfg = NULL;
  if (mcsim_config_default(&cfg) != MCSIM_OK) return 1;
  if (mcsim_config_validate(cfg) != MCSIM_OK) return 1;

  mcsim_trace* trace = NULL;
  if (mcsim_trace_generate("sequential", "total_bytes=4096,stride=64,class=C", 1, &trace) !=
      MCSIM_OK)
    return 1;
  if (mcsim_trace_length(trace) != 64) return 1;

  mcsim_report* rep = NULL;
  if (mcsim_run(cfg, trace, 0, 0, &rep) != MCSIM_OK) {
    fprintf(stderr, "run failed: %s\n", mcsim_last_error());
    return 1;
  }
  double cycles = 0;
  if (mcsim_report_scalar(rep, "total_cycles", &cycles) != MCSIM_OK) return 1;
  if (cycles <= 0) return 1;

  if (strlen(mcsim_version()) == 0) return 1;

  mcsim_report_free(rep);
  mcsim_trace_free(trace);
  mcsim_config_free(cfg);
  printf("c api ok (%.0f cycles)\n", cycles);
  return 0;
}
