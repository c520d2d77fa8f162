#include "flownet/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "flownet/errors.hpp"
#include "flownet/lyapunov.hpp"

namespace flownet {

namespace {

void check_size(const Vector& v, Eigen::Index want, const std::string& what) {
  if (v.size() != want) {
    throw ValidationError(fmt::format("{}: expected {} entries, got {}", what, want, v.size()));
  }
}

ClosedLoopState axpy(const ClosedLoopState& s, double h, const ClosedLoopState& d) {
  return ClosedLoopState{s.x + h * d.x, s.x_p + h * d.x_p, s.x_e + h * d.x_e};
}

bool finite(const ClosedLoopState& s) {
  return s.x.allFinite() && s.x_p.allFinite() && s.x_e.allFinite();
}

}  // namespace

void Scenario::validate() const {
  network.validate();
  const int n = network.n;
  const int m = static_cast<int>(network.edges.size());
  cost.validate(n);
  bounds.validate(n, m);
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ValidationError("eps1 and eps2 must be > 0");
  if (segments.empty()) throw ValidationError("scenario needs at least one segment");
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& seg = segments[k];
    const std::string tag = fmt::format("segment {}", k);
    if (!std::isfinite(seg.t_start) || !std::isfinite(seg.t_end) || !(seg.t_end > seg.t_start)) {
      throw ValidationError(tag + ": need finite t_end > t_start");
    }
    check_size(seg.d, n, tag + " d");
    check_size(seg.xbar_start, n, tag + " xbar_start");
    check_size(seg.xbar_slope, n, tag + " xbar_slope");
    require_finite(seg.d, "segment d");
    require_finite(seg.xbar_start, "segment xbar_start");
    require_finite(seg.xbar_slope, "segment xbar_slope");
    if (k == 0) continue;
    const Segment& prev = segments[k - 1];
    if (seg.t_start < prev.t_end) {
      throw ValidationError(fmt::format("{} overlaps segment {}", tag, k - 1));
    }
    if (seg.t_start > prev.t_end) {
      throw ValidationError(fmt::format("gap between segment {} and {}", k - 1, k));
    }
    const Vector prev_end = prev.xbar_at(prev.t_end);
    const double scale = std::max(1.0, prev_end.cwiseAbs().maxCoeff());
    if (!seg.jump && (seg.xbar_start - prev_end).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw ValidationError(tag + ": reference jumps without an explicit jump flag");
    }
  }
  if (sim.dt <= 0.0 || !std::isfinite(sim.dt)) throw ValidationError("dt must be > 0");
  if (sim.output_stride < 1) throw ValidationError("output_stride must be >= 1");
  if (init.kind == InitSpec::Kind::kExplicit) {
    check_size(init.x, n, "init x");
    check_size(init.x_p, n, "init x_p");
    check_size(init.x_e, m, "init x_e");
  }
  if (gains) gains->validate();
}

int Scenario::segment_index(double t) const {
  if (segments.empty() || t < segments.front().t_start || t > segments.back().t_end) {
    throw ValidationError(fmt::format("time {} outside the schedule", t));
  }
  for (int k = static_cast<int>(segments.size()) - 1; k >= 0; --k) {
    if (t >= segments[k].t_start) return k;
  }
  return 0;
}

ClosedLoopDeriv closed_loop_rhs(double t, const ClosedLoopState& s, const Segment& seg,
                                const Network& net, const CostModel& cost, const Gains& g,
                                const SatBounds& bounds, ControlMode mode) {
  const Vector y = s.x - seg.xbar_at(t);
  ClosedLoopDeriv out;
  if (mode == ControlMode::kSaturated) {
    out.u_e = edge_output_saturated(net, y, s.x_e, g, bounds);
    out.u_p = node_output_saturated(s.x_p, cost, g, bounds);
    out.deriv.x_p = node_deriv_saturated(net, y, s.x_p, out.u_e, cost, g, bounds);
  } else {
    out.u_e = edge_output_unconstrained(net, y, s.x_e, g);
    out.u_p = node_output_unconstrained(s.x_p, cost, g);
    out.deriv.x_p = node_deriv_unconstrained(net, y, s.x_p, cost, g);
  }
  out.deriv.x = net.incidence() * out.u_e + out.u_p + seg.d;
  out.deriv.x_e = edge_deriv(net, y, g);
  return out;
}

ClosedLoopDeriv closed_loop_rhs(double t, const ClosedLoopState& s, const Scenario& sc,
                                const Network& net, const Gains& g, ControlMode mode) {
  const Segment& seg = sc.segments[static_cast<std::size_t>(sc.segment_index(t))];
  return closed_loop_rhs(t, s, seg, net, sc.cost, g, sc.bounds, mode);
}

SegmentEquilibrium segment_equilibrium(const Network& net, const Scenario& sc, int index,
                                       const Gains& g, ControlMode mode) {
  const Segment& seg = sc.segments.at(static_cast<std::size_t>(index));
  SegmentEquilibrium eq;
  // Flow limits only matter to the saturated laws.
  const FlowSelection selection{mode == ControlMode::kSaturated
                                    ? FlowSelection::Policy::kMaxMargin
                                    : FlowSelection::Policy::kMinimumNorm,
                                sc.bounds.u_e_max};
  eq.ss = compute_core(net, sc.cost, seg.d, seg.xbar_slope, g, selection);
  eq.hats = mode == ControlMode::kSaturated
                ? compute_hats(net, sc.cost, eq.ss, g)
                : HatState::zeros(net.num_nodes(), net.num_edges());
  eq.shifted = shifted_bounds(sc.cost, eq.ss, eq.hats, sc.bounds, g);
  eq.u_p_opt = optimal_input(sc.cost, seg.d, seg.xbar_slope).u_p_opt;
  return eq;
}

ClosedLoopState steady_state_init(const Network& net, const Scenario& sc, const Gains& g,
                                  ControlMode mode) {
  const SegmentEquilibrium eq = segment_equilibrium(net, sc, 0, g, mode);
  if (mode == ControlMode::kSaturated) {
    const Vector& up = eq.ss.ubar_p;
    const Vector& ue = eq.ss.ubar_e;
    const bool inside = (up.array() > sc.bounds.u_p_min.array()).all() &&
                        (up.array() < sc.bounds.u_p_max.array()).all() &&
                        (ue.array() > 0.0).all() &&
                        (ue.array() < sc.bounds.u_e_max.array()).all();
    if (!inside) throw InfeasibleError("first segment violates the feasibility condition");
  }
  const Segment& seg = sc.segments.front();
  return ClosedLoopState{seg.xbar_at(seg.t_start) + eq.hats.hat_x,
                         eq.ss.xbar_p + eq.hats.hat_xp, eq.ss.xbar_e + eq.hats.hat_xe};
}

SimTrace simulate(const Network& net, const Scenario& sc, const Gains& g, ControlMode mode,
                  double dt, int output_stride) {
  ClosedLoopState init;
  if (sc.init.kind == InitSpec::Kind::kExplicit) {
    init = ClosedLoopState{sc.init.x, sc.init.x_p, sc.init.x_e};
  } else {
    init = steady_state_init(net, sc, g, mode);
  }
  return simulate(net, sc, g, mode, dt, output_stride, init);
}

SimTrace simulate(const Network& net, const Scenario& sc, const Gains& g, ControlMode mode,
                  double dt, int output_stride, const ClosedLoopState& init) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (output_stride < 1) throw ValidationError("output_stride must be >= 1");
  g.validate();
  const int n = net.num_nodes();
  const int m = net.num_edges();
  check_size(init.x, n, "init x");
  check_size(init.x_p, n, "init x_p");
  check_size(init.x_e, m, "init x_e");
  if (!finite(init)) throw ValidationError("initial state is not finite");

  SimTrace trace;
  trace.n = n;
  trace.m = m;
  trace.mode = mode;

  const bool saturated = mode == ControlMode::kSaturated;
  ClosedLoopState state = init;
  long long global_step = 0;

  for (int k = 0; k < static_cast<int>(sc.segments.size()); ++k) {
    const Segment& seg = sc.segments[static_cast<std::size_t>(k)];
    const SegmentEquilibrium eq = segment_equilibrium(net, sc, k, g, mode);

    auto record = [&](double t) {
      const ClosedLoopDeriv out =
          closed_loop_rhs(t, state, seg, net, sc.cost, g, sc.bounds, mode);
      TraceRecord rec;
      rec.t = t;
      rec.segment = k;
      rec.x = state.x;
      rec.xbar = seg.xbar_at(t);
      rec.u_p = out.u_p;
      rec.u_e = out.u_e;
      rec.x_p = state.x_p;
      rec.x_e = state.x_e;
      const IncrementalCoords inc =
          make_incremental(state.x, rec.xbar, state.x_p, state.x_e, eq.ss, eq.hats);
      rec.v = saturated ? v_saturated_unchecked(net, inc, eq.shifted, g) : v_unconstrained(inc);
      rec.err_x = (state.x - rec.xbar).norm();
      rec.err_up = (out.u_p - eq.u_p_opt).norm();
      if (saturated) {
        for (int i = 0; i < n; ++i) {
          if (out.u_p(i) == sc.bounds.u_p_min(i) || out.u_p(i) == sc.bounds.u_p_max(i)) {
            rec.sat_nodes.push_back(i);
          }
        }
        for (int e = 0; e < m; ++e) {
          if (out.u_e(e) == 0.0 || out.u_e(e) == sc.bounds.u_e_max(e)) rec.sat_edges.push_back(e);
        }
      }
      trace.records.push_back(std::move(rec));
    };

    if (k == 0) record(seg.t_start);

    const double len = seg.t_end - seg.t_start;
    const long long steps = std::max(1LL, static_cast<long long>(std::ceil(len / dt - 1e-9)));
    const double h = len / static_cast<double>(steps);
    auto rhs = [&](double t, const ClosedLoopState& s) {
      return closed_loop_rhs(t, s, seg, net, sc.cost, g, sc.bounds, mode).deriv;
    };

    for (long long i = 0; i < steps; ++i) {
      const double t = seg.t_start + static_cast<double>(i) * h;
      const ClosedLoopState k1 = rhs(t, state);
      const ClosedLoopState k2 = rhs(t + 0.5 * h, axpy(state, 0.5 * h, k1));
      const ClosedLoopState k3 = rhs(t + 0.5 * h, axpy(state, 0.5 * h, k2));
      const ClosedLoopState k4 = rhs(t + h, axpy(state, h, k3));
      ClosedLoopState next{
          state.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          state.x_p + (h / 6.0) * (k1.x_p + 2.0 * k2.x_p + 2.0 * k3.x_p + k4.x_p),
          state.x_e + (h / 6.0) * (k1.x_e + 2.0 * k2.x_e + 2.0 * k3.x_e + k4.x_e)};
      if (!finite(next)) {
        throw BlowUpError(fmt::format("state became non-finite after t = {}", t), t);
      }
      state = std::move(next);
      ++global_step;
      const bool last = i + 1 == steps;
      const double t_next = last ? seg.t_end : seg.t_start + static_cast<double>(i + 1) * h;
      if (last || global_step % output_stride == 0) record(t_next);
    }

    const TraceRecord& fin = trace.records.back();
    SegmentSummary sum;
    sum.index = k;
    sum.t_end = seg.t_end;
    sum.err_x = fin.err_x;
    sum.err_up = fin.err_up;
    sum.balance = std::abs((fin.u_p + seg.d - seg.xbar_slope).sum());
    sum.within_eps1 = fin.err_x < sc.eps1;
    sum.within_eps2 = fin.err_up < sc.eps2;
    trace.segments.push_back(sum);
  }
  return trace;
}

Vector cold_layer_volume(const Vector& hot0, const Vector& cold0, const Vector& hot) {
  if (hot0.size() != cold0.size() || hot0.size() != hot.size()) {
    throw ValidationError("cold_layer_volume: dimension mismatch");
  }
  return hot0 + cold0 - hot;
}

}  // namespace flownet
