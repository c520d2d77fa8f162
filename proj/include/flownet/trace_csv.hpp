#pragma once

#include <ostream>
#include <string>

#include "flownet/simulator.hpp"

namespace flownet {

/// Header: t, x_1..x_n, xbar_1..xbar_n, up_1..up_n, ue_1..ue_m, xp_1..xp_n,
/// xe_1..xe_m, V, err_x, err_up, sat_flags. Indices in column names and in
/// sat_flags ("p4;e1") are 1-based. Numbers use 17 significant digits.
std::string trace_csv_header(int n, int m);

void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace flownet
