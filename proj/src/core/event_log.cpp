#include "core/event_log.hpp"

#include <cstdio>
#include <sstream>

#include "core/errors.hpp"

namespace mcsim {

std::string EventLog::render() const {
  std::string out = "#mcsim-event-log\n#format_version=1\n";
  char line[128];
  for (const Event& e : events_) {
    switch (e.kind) {
      case Event::Kind::Submit:
        std::snprintf(line, sizeof(line), "S %llu %llu %u %c %c %llx %u\n",
                      (unsigned long long)e.cycle, (unsigned long long)e.seq, e.pe,
                      class_letter(e.cls), op_letter(e.op), (unsigned long long)e.address,
                      e.size);
        break;
      case Event::Kind::Route:
        std::snprintf(line, sizeof(line), "R %llu %llu %c\n", (unsigned long long)e.cycle,
                      (unsigned long long)e.seq, e.dest ? 'd' : 'c');
        break;
      case Event::Kind::Batch:
        std::snprintf(line, sizeof(line), "B %llu %u %u %c\n", (unsigned long long)e.cycle,
                      e.bank, e.batch_size, op_letter(e.op));
        break;
      case Event::Kind::Dram:
        std::snprintf(line, sizeof(line), "D %llu %llx %c\n", (unsigned long long)e.cycle,
                      (unsigned long long)e.address,
                      e.row_result == 0 ? 'f' : (e.row_result == 1 ? 'h' : 'x'));
        break;
      case Event::Kind::Complete:
        std::snprintf(line, sizeof(line), "C %llu %llu\n", (unsigned long long)e.cycle,
                      (unsigned long long)e.seq);
        break;
    }
    out += line;
  }
  return out;
}

std::vector<Event> EventLog::parse(const std::string& text) {
  std::vector<Event> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto bad = [&]() {
      return trace_error("event log line " + std::to_string(lineno) + ": malformed record");
    };
    Event e;
    unsigned long long cycle = 0, seq = 0, addr = 0;
    unsigned pe = 0, size = 0, bank = 0, bsize = 0;
    char cls = 0, op = 0, dest = 0, rr = 0;
    switch (line[0]) {
      case 'S':
        if (std::sscanf(line.c_str(), "S %llu %llu %u %c %c %llx %u", &cycle, &seq, &pe, &cls,
                        &op, &addr, &size) != 7)
          throw bad();
        e.kind = Event::Kind::Submit;
        e.cycle = cycle;
        e.seq = seq;
        e.pe = pe;
        if (cls == 'C') e.cls = AccessClass::CacheLine;
        else if (cls == 'D') e.cls = AccessClass::Bulk;
        else throw bad();
        if (op == 'R') e.op = MemOp::Read;
        else if (op == 'W') e.op = MemOp::Write;
        else throw bad();
        e.address = addr;
        e.size = size;
        break;
      case 'R':
        if (std::sscanf(line.c_str(), "R %llu %llu %c", &cycle, &seq, &dest) != 3) throw bad();
        e.kind = Event::Kind::Route;
        e.cycle = cycle;
        e.seq = seq;
        e.dest = dest == 'd' ? 1 : 0;
        break;
      case 'B':
        if (std::sscanf(line.c_str(), "B %llu %u %u %c", &cycle, &bank, &bsize, &op) != 4)
          throw bad();
        e.kind = Event::Kind::Batch;
        e.cycle = cycle;
        e.bank = bank;
        e.batch_size = bsize;
        e.op = op == 'W' ? MemOp::Write : MemOp::Read;
        break;
      case 'D':
        if (std::sscanf(line.c_str(), "D %llu %llx %c", &cycle, &addr, &rr) != 3) throw bad();
        e.kind = Event::Kind::Dram;
        e.cycle = cycle;
        e.address = addr;
        e.row_result = rr == 'f' ? 0 : (rr == 'h' ? 1 : 2);
        break;
      case 'C':
        if (std::sscanf(line.c_str(), "C %llu %llu", &cycle, &seq) != 2) throw bad();
        e.kind = Event::Kind::Complete;
        e.cycle = cycle;
        e.seq = seq;
        break;
      default:
        throw bad();
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace mcsim
