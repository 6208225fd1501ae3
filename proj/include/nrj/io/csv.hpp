#pragma once

// Minimal CSV plumbing. Doubles are written with 17 significant digits so
// every numeric field round-trips exactly through parse.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrj/trace.hpp"

namespace nrj {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
    columns_ = header.size();
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

// trace schema: iter,k,move,accepted,nu with the initial state at iter 0
inline void write_trace_csv(const ChainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,k,move,accepted,nu\n";
  out << "0," << trace.initial.k << ",init,1,"
      << static_cast<int>(trace.initial.nu) << "\n";
  for (const auto& r : trace.records)
    out << r.iter << "," << r.k << "," << move_kind_name(r.move) << ","
        << (r.accepted ? 1 : 0) << "," << static_cast<int>(r.nu) << "\n";
}

inline ChainTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  ChainTrace trace;
  std::string line;
  int lineno = 0;
  bool have_initial = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("iter,", 0) == 0) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 5 columns");
    TraceRecord r;
    r.iter = std::stoll(cells[0]);
    r.k = std::stoi(cells[1]);
    r.accepted = cells[3] == "1";
    r.nu = static_cast<std::int8_t>(std::stoi(cells[4]));
    if (cells[2] == "init") {
      trace.initial.k = r.k;
      trace.initial.nu = r.nu;
      have_initial = true;
      continue;
    } else if (cells[2] == "param_update") {
      r.move = MoveKind::ParamUpdate;
    } else if (cells[2] == "switch_up") {
      r.move = MoveKind::SwitchUp;
    } else if (cells[2] == "switch_down") {
      r.move = MoveKind::SwitchDown;
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown move kind " + cells[2]);
    }
    trace.records.push_back(r);
  }
  if (!have_initial && !trace.records.empty()) {
    trace.initial.k = trace.records.front().k;
    trace.initial.nu = trace.records.front().nu;
  }
  return trace;
}

}  // namespace nrj
