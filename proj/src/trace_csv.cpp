#include "flownet/trace_csv.hpp"

#include <iterator>

#include <fmt/core.h>

namespace flownet {

namespace {

void append_names(std::string& out, const char* prefix, int count) {
  for (int i = 1; i <= count; ++i) fmt::format_to(std::back_inserter(out), ",{}_{}", prefix, i);
}

void append_values(std::string& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    fmt::format_to(std::back_inserter(out), ",{:.17g}", v(i));
  }
}

}  // namespace

std::string trace_csv_header(int n, int m) {
  std::string out = "t";
  append_names(out, "x", n);
  append_names(out, "xbar", n);
  append_names(out, "up", n);
  append_names(out, "ue", m);
  append_names(out, "xp", n);
  append_names(out, "xe", m);
  out += ",V,err_x,err_up,sat_flags";
  return out;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << trace_csv_header(trace.n, trace.m) << '\n';
  std::string line;
  for (const TraceRecord& r : trace.records) {
    line.clear();
    fmt::format_to(std::back_inserter(line), "{:.17g}", r.t);
    append_values(line, r.x);
    append_values(line, r.xbar);
    append_values(line, r.u_p);
    append_values(line, r.u_e);
    append_values(line, r.x_p);
    append_values(line, r.x_e);
    fmt::format_to(std::back_inserter(line), ",{:.17g},{:.17g},{:.17g},", r.v, r.err_x,
                   r.err_up);
    bool first = true;
    for (int i : r.sat_nodes) {
      fmt::format_to(std::back_inserter(line), "{}p{}", first ? "" : ";", i + 1);
      first = false;
    }
    for (int e : r.sat_edges) {
      fmt::format_to(std::back_inserter(line), "{}e{}", first ? "" : ";", e + 1);
      first = false;
    }
    out << line << '\n';
  }
}

}  // namespace flownet
