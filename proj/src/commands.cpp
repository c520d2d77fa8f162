#include "flownet/commands.hpp"

#include <chrono>
#include <fstream>
#include <functional>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "flownet/errors.hpp"
#include "flownet/lyapunov.hpp"
#include "flownet/scenario_io.hpp"
#include "flownet/trace_csv.hpp"

namespace flownet {

namespace {

std::string vec(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s += fmt::format("{}{:.10g}", i ? ", " : "", v(i));
  }
  return s + "]";
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<Instance> instances_of(const Scenario& sc) {
  std::vector<Instance> out;
  for (const Segment& seg : sc.segments) out.push_back({seg.d, seg.xbar_slope});
  return out;
}

struct ResolvedGains {
  Gains gains;
  bool synthesized = false;
};

ResolvedGains resolve_gains(const Network& net, const Scenario& sc, const CommandOptions& opts) {
  if (sc.gains) {
    Gains g = *sc.gains;
    if (opts.theta) g.theta = opts.theta;
    g.validate();
    return {g, false};
  }
  SynthesisOptions so;
  so.theta = opts.theta;
  so.reading = opts.reading;
  return {synthesize_gains(net, sc.cost, instances_of(sc), sc.bounds, sc.eps1, sc.eps2, so),
          true};
}

void print_gains(std::ostream& out, const Gains& g) {
  out << fmt::format("gamma_e: {:.10g}\ngamma_c: {:.10g}\ngamma_p: {:.10g}\ngamma_l: {:.10g}\n",
                     g.gamma_e, g.gamma_c, g.gamma_p, g.gamma_l);
  if (g.theta) out << fmt::format("theta: {:.10g}\n", *g.theta);
  out << fmt::format("gamma: {:.10g}\n", g.gamma_eff());
}

void print_report(std::ostream& out, const GainReport& r, const Gains& g) {
  const GainBounds& b = r.bounds;
  out << fmt::format("  theta: {:.10g}\n", r.theta);
  out << fmt::format("  norm_v: {:.10g}\n  phi_qbar_norm: {:.10g}\n  ratio: {:.10g}\n",
                     b.terms.norm_v, b.terms.phi_qbar_norm, b.terms.ratio);
  out << fmt::format("  delta_p: {:.10g}\n  delta_e: {:.10g}\n  delta_theta: {:.10g}\n",
                     b.delta.delta_p, b.delta.delta_e, b.delta.delta_theta);
  out << fmt::format("  bound_gamma_c: {:.10g} (gamma_c < bound: {})\n", b.bound_gamma_c,
                     yes_no(r.gamma_c_ok));
  out << fmt::format("  max_gain_ratio: {:.10g} (gamma_p^2/gamma_l = {:.10g}, ok: {})\n",
                     b.max_gain_ratio(g.gamma_c), g.gamma_p * g.gamma_p / g.gamma_l,
                     yes_no(r.gain_ratio_ok));
  out << fmt::format("  series_gain_ratio: {:.10g} (ok: {})\n", b.series_gain_ratio(g.gamma_c),
                     yes_no(r.series_ok));
  out << fmt::format("  |hat_up|: {:.6g} <= {:.6g}\n  |hat_ue|: {:.6g} <= {:.6g}\n"
                     "  |hat_x|: {:.6g} <= {:.6g}\n  offset bounds ok: {}\n",
                     r.norm_hat_up, r.bound_hat_up, r.norm_hat_ue, r.bound_hat_ue, r.norm_hat_x,
                     r.bound_hat_x, yes_no(r.offset_bounds_ok));
  out << fmt::format("  hat_up within eps2 and slack: {}\n  hat_x within eps1: {}\n"
                     "  hat_ue within slack: {}\n  shifted limits straddle zero: {}\n",
                     yes_no(r.hat_up_ok), yes_no(r.hat_x_ok), yes_no(r.hat_ue_ok),
                     yes_no(r.signs_ok));
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const GainBoundError& e) {
    err << "gain bound violated: " << e.what() << '\n';
    return kExitGainBound;
  } catch (const BlowUpError& e) {
    err << "numerical blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

FlowSelection selection_for(const Scenario& sc) {
  return FlowSelection{FlowSelection::Policy::kMaxMargin, sc.bounds.u_e_max};
}

}  // namespace

int cmd_feasibility(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(opts.scenario);
    const Network net(sc.network);
    const Gains unit{1.0, 1.0, 1.0, 1.0, std::nullopt};
    bool all = true;
    for (std::size_t k = 0; k < sc.segments.size(); ++k) {
      const Segment& seg = sc.segments[k];
      const SteadyState ss = compute_core(net, sc.cost, seg.d, seg.xbar_slope, unit,
                                          selection_for(sc));
      const FeasibilityReport rep = check_feasibility(ss, sc.bounds);
      all = all && rep.feasible;
      out << fmt::format("segment {} [{:g}, {:g}]: feasible = {}\n", k, seg.t_start, seg.t_end,
                         rep.feasible ? "true" : "false");
      out << "  ubar_p: " << vec(ss.ubar_p) << '\n';
      out << "  ubar_e: " << vec(ss.ubar_e) << '\n';
      out << fmt::format("  min margin node: {:.10g}\n  min margin edge: {:.10g}\n",
                         std::min(rep.margin_p_upper.minCoeff(), rep.margin_p_lower.minCoeff()),
                         std::min(rep.margin_e_upper.minCoeff(), rep.margin_e_lower.minCoeff()));
      for (const auto& b : rep.binding) out << "  violated: " << b << '\n';
    }
    return all ? kExitOk : kExitInfeasible;
  });
}

int cmd_gains(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(opts.scenario);
    const Network net(sc.network);
    const ResolvedGains rg = resolve_gains(net, sc, opts);
    out << (rg.synthesized ? "synthesized gains\n" : "scenario gains\n");
    print_gains(out, rg.gains);
    bool ok = true;
    for (std::size_t k = 0; k < sc.segments.size(); ++k) {
      const Segment& seg = sc.segments[k];
      const SteadyState ss = compute_core(net, sc.cost, seg.d, seg.xbar_slope, rg.gains,
                                          selection_for(sc));
      const FeasibilityReport feas = check_feasibility(ss, sc.bounds);
      if (!feas.feasible) {
        std::string msg = fmt::format("segment {}:", k);
        for (const auto& b : feas.binding) msg += "\n  " + b;
        throw InfeasibleError(msg);
      }
      const HatState hats = compute_hats(net, sc.cost, ss, rg.gains);
      const GainReport rep = verify_gains(net, sc.cost, rg.gains, ss, hats, sc.bounds, sc.eps1,
                                          sc.eps2, opts.reading);
      out << fmt::format("segment {}: certificate {}\n", k, rep.all_pass() ? "holds" : "fails");
      print_report(out, rep, rg.gains);
      ok = ok && rep.all_pass();
    }
    return ok ? kExitOk : kExitGainBound;
  });
}

int cmd_steady_state(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(opts.scenario);
    if (opts.segment < 0 || opts.segment >= static_cast<int>(sc.segments.size())) {
      throw ParseError(opts.scenario, 0, 0,
                       fmt::format("segment index {} out of range", opts.segment));
    }
    const Network net(sc.network);
    const ResolvedGains rg = resolve_gains(net, sc, opts);
    const Segment& seg = sc.segments[static_cast<std::size_t>(opts.segment)];
    const SteadyState ss =
        compute_core(net, sc.cost, seg.d, seg.xbar_slope, rg.gains, selection_for(sc));
    const HatState hats = compute_hats(net, sc.cost, ss, rg.gains);
    const ShiftedSatBounds sb = shifted_bounds(sc.cost, ss, hats, sc.bounds, rg.gains);
    const auto res = hat_residuals(net, sc.cost, ss, hats, rg.gains);

    out << fmt::format("segment {} [{:g}, {:g}]\n", opts.segment, seg.t_start, seg.t_end);
    print_gains(out, rg.gains);
    out << "xbar_start: " << vec(seg.xbar_start) << '\n';
    out << "xbar_slope: " << vec(seg.xbar_slope) << '\n';
    out << "dtilde: " << vec(ss.dtilde) << '\n';
    out << "ubar_p: " << vec(ss.ubar_p) << '\n';
    out << "ubar_e: " << vec(ss.ubar_e) << '\n';
    out << "xbar_p: " << vec(ss.xbar_p) << '\n';
    out << "xbar_e: " << vec(ss.xbar_e) << '\n';
    out << "hat_x: " << vec(hats.hat_x) << '\n';
    out << "hat_xp: " << vec(hats.hat_xp) << '\n';
    out << "hat_xe: " << vec(hats.hat_xe) << '\n';
    out << "hat_up: " << vec(hats.hat_up) << '\n';
    out << "hat_ue: " << vec(hats.hat_ue) << '\n';
    out << "xe_min: " << vec(sb.xe_min) << '\n';
    out << "xe_max: " << vec(sb.xe_max) << '\n';
    out << "xp_min: " << vec(sb.xp_min) << '\n';
    out << "xp_max: " << vec(sb.xp_max) << '\n';
    out << fmt::format("offset residuals: {:.3e} {:.3e} {:.3e}\n", res[0], res[1], res[2]);
    return kExitOk;
  });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = load_scenario(opts.scenario);
    const Network net(sc.network);
    const ControlMode mode = opts.mode.value_or(sc.sim.mode);
    const double dt = opts.dt.value_or(sc.sim.dt);
    const ResolvedGains rg = resolve_gains(net, sc, opts);

    for (std::size_t k = 0; k < sc.segments.size(); ++k) {
      const Segment& seg = sc.segments[k];
      const SteadyState ss =
          compute_core(net, sc.cost, seg.d, seg.xbar_slope, rg.gains, selection_for(sc));
      if (mode == ControlMode::kSaturated && !check_feasibility(ss, sc.bounds).feasible) {
        spdlog::warn("segment {} violates the feasibility condition", k);
        continue;
      }
      const HatState hats = compute_hats(net, sc.cost, ss, rg.gains);
      const GainReport rep = verify_gains(net, sc.cost, rg.gains, ss, hats, sc.bounds, sc.eps1,
                                          sc.eps2, opts.reading);
      if (!rep.all_pass()) spdlog::warn("segment {}: gain certificate does not hold", k);
    }

    const auto start = std::chrono::steady_clock::now();
    const SimTrace trace = simulate(net, sc, rg.gains, mode, dt, sc.sim.output_stride);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (opts.out) {
      std::ofstream file(*opts.out, std::ios::binary);
      if (!file) throw Error("cannot open output file " + *opts.out);
      write_trace_csv(file, trace);
      if (!file) throw Error("failed writing " + *opts.out);
    }

    out << fmt::format("mode: {}\ndt: {:g}\nrecords: {}\n",
                       mode == ControlMode::kSaturated ? "saturated" : "unconstrained", dt,
                       trace.records.size());
    print_gains(out, rg.gains);
    for (const SegmentSummary& s : trace.segments) {
      out << fmt::format(
          "segment {} (t = {:g}): err_x = {:.6g} ({} eps1 = {:g}), err_up = {:.6g} ({} eps2 = "
          "{:g}), balance = {:.3g}\n",
          s.index, s.t_end, s.err_x, s.within_eps1 ? "<" : ">=", sc.eps1, s.err_up,
          s.within_eps2 ? "<" : ">=", sc.eps2, s.balance);
    }
    out << fmt::format("wall time: {:.3f} s\n", wall);
    return kExitOk;
  });
}

}  // namespace flownet
