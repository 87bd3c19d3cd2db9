// Command-line front end for the mcsim shared library. Everything goes
// through the public C API in mcsim.h.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "mcsim.h"

namespace {

int exit_code_for(mcsim_status st) {
  switch (st) {
    case MCSIM_OK: return 0;
    case MCSIM_ERR_CONFIG:
    case MCSIM_ERR_ARG: return 1;
    case MCSIM_ERR_TRACE: return 2;
    case MCSIM_ERR_INTERNAL:
    case MCSIM_ERR_CONSISTENCY: return 3;
  }
  return 3;
}

[[noreturn]] void die(mcsim_status st) {
  std::cerr << "error: " << mcsim_last_error() << "\n";
  std::exit(exit_code_for(st));
}

void check(mcsim_status st) {
  if (st != MCSIM_OK) die(st);
}

void write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(1);
  }
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    std::exit(2);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ConfigHandle {
  mcsim_config* ptr = nullptr;
  ~ConfigHandle() { mcsim_config_free(ptr); }
};
struct TraceHandle {
  mcsim_trace* ptr = nullptr;
  ~TraceHandle() { mcsim_trace_free(ptr); }
};
struct ReportHandle {
  mcsim_report* ptr = nullptr;
  ~ReportHandle() { mcsim_report_free(ptr); }
};
struct CStr {
  char* ptr = nullptr;
  ~CStr() { mcsim_string_free(ptr); }
};

void load_config(const std::string& path, const std::vector<std::string>& sets,
                 ConfigHandle& cfg) {
  if (path.empty())
    check(mcsim_config_default(&cfg.ptr));
  else
    check(mcsim_config_load(path.c_str(), &cfg.ptr));
  for (const std::string& kv : sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      std::exit(1);
    }
    check(mcsim_config_set(cfg.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  check(mcsim_config_validate(cfg.ptr));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mcsim: programmable memory controller simulator"};
  app.require_subcommand(1);

  std::string config_path, trace_path, out_path, format = "text", log_path;
  std::string sweep_spec, pattern, params;
  std::vector<std::string> sets, param_list;
  uint64_t seed = 1;
  bool with_baseline = false;

  auto add_common = [&](CLI::App* sub, bool needs_trace) {
    sub->add_option("--config", config_path, "configuration document");
    if (needs_trace)
      sub->add_option("--trace", trace_path, "trace file")->required();
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "text | csv | structured")
        ->check(CLI::IsMember({"text", "csv", "structured", "json"}));
    sub->add_option("--set", sets, "config override key=value (repeatable)");
  };

  CLI::App* run = app.add_subcommand("run", "simulate a trace through the controller");
  add_common(run, true);
  run->add_option("--log", log_path, "write the event log to this path");
  run->add_flag("--with-baseline", with_baseline, "also run the baseline and report improvement");

  CLI::App* baseline = app.add_subcommand("baseline", "simulate a trace through the raw interface");
  add_common(baseline, true);
  baseline->add_option("--log", log_path, "write the event log to this path");

  CLI::App* sweep = app.add_subcommand("sweep", "run one simulation per parameter value");
  add_common(sweep, true);
  sweep->add_option("--sweep", sweep_spec, "KEY=V1,V2,... (e.g. sched.batch_size=4,32,64)")
      ->required();

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic trace");
  gen->add_option("--pattern", pattern, "sequential | random | gcn | cnn")->required();
  gen->add_option("--param", param_list, "generator parameter key=value (repeatable)");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* dump = app.add_subcommand("dump-default-config", "print the default configuration");
  dump->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* checkcmd = app.add_subcommand("check", "verify an event log against the consistency rules");
  checkcmd->add_option("--log", log_path, "event log file")->required();

  CLI11_PARSE(app, argc, argv);

  if (dump->parsed()) {
    ConfigHandle cfg;
    check(mcsim_config_default(&cfg.ptr));
    CStr text;
    check(mcsim_config_render(cfg.ptr, &text.ptr));
    write_output(out_path, text.ptr);
    return 0;
  }

  if (gen->parsed()) {
    std::string joined;
    for (const auto& p : param_list) {
      if (!joined.empty()) joined += ',';
      joined += p;
    }
    TraceHandle trace;
    check(mcsim_trace_generate(pattern.c_str(), joined.c_str(), seed, &trace.ptr));
    CStr text;
    check(mcsim_trace_render(trace.ptr, &text.ptr));
    write_output(out_path, text.ptr);
    return 0;
  }

  if (checkcmd->parsed()) {
    std::string log_text = read_file(log_path);
    mcsim_status st = mcsim_check_log(log_text.c_str());
    if (st == MCSIM_OK) {
      std::cout << "consistency: ok\n";
      return 0;
    }
    std::cerr << "consistency violations:\n" << mcsim_last_error();
    return exit_code_for(st);
  }

  // run / baseline / sweep all need a config and a trace.
  ConfigHandle cfg;
  load_config(config_path, sets, cfg);
  TraceHandle trace;
  check(mcsim_trace_load(trace_path.c_str(), &trace.ptr));

  if (sweep->parsed()) {
    auto eq = sweep_spec.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --sweep expects KEY=V1,V2,...\n";
      return 1;
    }
    CStr csv;
    check(mcsim_sweep(cfg.ptr, trace.ptr, sweep_spec.substr(0, eq).c_str(),
                      sweep_spec.substr(eq + 1).c_str(), &csv.ptr));
    write_output(out_path, csv.ptr);
    return 0;
  }

  bool is_baseline = baseline->parsed();
  ReportHandle report;
  check(mcsim_run(cfg.ptr, trace.ptr, is_baseline ? 1 : 0, log_path.empty() ? 0 : 1,
                  &report.ptr));
  if (!log_path.empty()) write_output(log_path, mcsim_report_event_log(report.ptr));

  if (!is_baseline && with_baseline) {
    ReportHandle base;
    check(mcsim_run(cfg.ptr, trace.ptr, 1, 0, &base.ptr));
    check(mcsim_report_set_baseline(report.ptr, base.ptr));
  }

  CStr text;
  check(mcsim_report_emit(report.ptr, format == "json" ? "structured" : format.c_str(),
                          &text.ptr));
  write_output(out_path, text.ptr);
  return 0;
}
