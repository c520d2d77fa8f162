#pragma once

#include <optional>
#include <vector>

#include "flownet/controllers.hpp"
#include "flownet/gain_set.hpp"
#include "flownet/graph.hpp"
#include "flownet/optimum.hpp"
#include "flownet/steady_state.hpp"

namespace flownet {

enum class ControlMode { kUnconstrained, kSaturated };

/// Constant disturbance with a linear reference on [t_start, t_end].
struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vector d;
  Vector xbar_start;
  Vector xbar_slope;
  /// Permits xbar_start to differ from the previous segment's end value.
  bool jump = false;

  Vector xbar_at(double t) const { return xbar_start + xbar_slope * (t - t_start); }
};

struct InitSpec {
  enum class Kind { kSteadyState, kExplicit };
  Kind kind = Kind::kSteadyState;
  Vector x;
  Vector x_p;
  Vector x_e;
};

struct SimSettings {
  double dt = 1.0;
  int output_stride = 1;
  ControlMode mode = ControlMode::kSaturated;
};

struct Scenario {
  NetworkSpec network;
  CostModel cost;
  std::vector<Segment> segments;
  SatBounds bounds;
  double eps1 = 1e-2;
  double eps2 = 1e-4;
  InitSpec init;
  std::optional<Gains> gains;
  SimSettings sim;

  /// Dimensions, contiguity, reference continuity and bound sanity.
  void validate() const;
  /// Index of the segment governing time t; the later one at a shared boundary.
  int segment_index(double t) const;
};

struct ClosedLoopState {
  Vector x;
  Vector x_p;
  Vector x_e;
};

struct ClosedLoopDeriv {
  ClosedLoopState deriv;
  Vector u_p;
  Vector u_e;
};

/// Plant plus controllers for one segment's data. Saturated mode evaluates
/// the edge output first and feeds it to the node law.
ClosedLoopDeriv closed_loop_rhs(double t, const ClosedLoopState& s, const Segment& seg,
                                const Network& net, const CostModel& cost, const Gains& g,
                                const SatBounds& bounds, ControlMode mode);
/// Same, locating the segment from t. Throws ValidationError outside the schedule.
ClosedLoopDeriv closed_loop_rhs(double t, const ClosedLoopState& s, const Scenario& sc,
                                const Network& net, const Gains& g, ControlMode mode);

/// Steady-state and offset data of one segment.
struct SegmentEquilibrium {
  SteadyState ss;
  HatState hats;
  ShiftedSatBounds shifted;
  Vector u_p_opt;
};

SegmentEquilibrium segment_equilibrium(const Network& net, const Scenario& sc, int index,
                                       const Gains& g, ControlMode mode);

/// Equilibrium start. x = xbar(t_start) + hat_x so every derivative except
/// the reference slope vanishes; the offsets are zero in unconstrained mode.
/// Throws InfeasibleError in saturated mode when the first segment is infeasible.
ClosedLoopState steady_state_init(const Network& net, const Scenario& sc, const Gains& g,
                                  ControlMode mode);

struct TraceRecord {
  double t = 0.0;
  int segment = 0;
  Vector x, xbar, u_p, u_e, x_p, x_e;
  double v = 0.0;
  double err_x = 0.0;
  double err_up = 0.0;
  /// Node and edge indices whose input sits exactly on a limit.
  std::vector<int> sat_nodes;
  std::vector<int> sat_edges;
};

struct SegmentSummary {
  int index = 0;
  double t_end = 0.0;
  double err_x = 0.0;
  double err_up = 0.0;
  /// |1'(u_p + d - xbar_s)| at the final sample.
  double balance = 0.0;
  bool within_eps1 = false;
  bool within_eps2 = false;
};

struct SimTrace {
  int n = 0;
  int m = 0;
  ControlMode mode = ControlMode::kSaturated;
  std::vector<TraceRecord> records;
  std::vector<SegmentSummary> segments;
};

/// Fixed-step classical RK4 over the whole schedule. Each segment is split
/// into ceil(length/dt) equal steps. Throws BlowUpError on a non-finite state.
SimTrace simulate(const Network& net, const Scenario& sc, const Gains& g, ControlMode mode,
                  double dt, int output_stride);
SimTrace simulate(const Network& net, const Scenario& sc, const Gains& g, ControlMode mode,
                  double dt, int output_stride, const ClosedLoopState& init);

/// Cold-layer volume from conservation of total volume per node.
Vector cold_layer_volume(const Vector& hot0, const Vector& cold0, const Vector& hot);

}  // namespace flownet
