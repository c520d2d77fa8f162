#include "flownet/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "flownet/errors.hpp"

namespace flownet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
}

bool dominated(double value, double bound) {
  return value <= bound * (1.0 + 1e-9) + 1e-15;
}

}  // namespace

FeasibilityReport check_feasibility(const SteadyState& ss, const SatBounds& bounds) {
  const Eigen::Index n = ss.ubar_p.size();
  const Eigen::Index m = ss.ubar_e.size();
  bounds.validate(static_cast<int>(n), static_cast<int>(m));
  FeasibilityReport rep;
  rep.margin_p_upper = bounds.u_p_max - ss.ubar_p;
  rep.margin_p_lower = ss.ubar_p - bounds.u_p_min;
  rep.margin_e_upper = bounds.u_e_max - ss.ubar_e;
  rep.margin_e_lower = ss.ubar_e;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(rep.margin_p_upper(i) > 0.0)) {
      rep.binding.push_back(fmt::format("node {}: ubar_p = {:.6g} >= u_p_max = {:.6g}", i,
                                        ss.ubar_p(i), bounds.u_p_max(i)));
    }
    if (!(rep.margin_p_lower(i) > 0.0)) {
      rep.binding.push_back(fmt::format("node {}: ubar_p = {:.6g} <= u_p_min = {:.6g}", i,
                                        ss.ubar_p(i), bounds.u_p_min(i)));
    }
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    if (!(rep.margin_e_upper(k) > 0.0)) {
      rep.binding.push_back(fmt::format("edge {}: ubar_e = {:.6g} >= u_e_max = {:.6g}", k,
                                        ss.ubar_e(k), bounds.u_e_max(k)));
    }
    if (!(rep.margin_e_lower(k) > 0.0)) {
      rep.binding.push_back(fmt::format("edge {}: ubar_e = {:.6g} <= 0", k, ss.ubar_e(k)));
    }
  }
  rep.feasible = rep.binding.empty();
  return rep;
}

BoundTerms bound_terms(const Network& net, const CostModel& cost, const SteadyState& ss) {
  const int n = net.num_nodes();
  const Matrix phi_inv = inverse(ss.Phi);
  const Matrix phi_inv_qbar = phi_inv * ss.Qbar;
  const Vector qi = cost.q_inv();
  const Vector ones = Vector::Ones(n);

  BoundTerms t;
  t.norm_v = (phi_inv_qbar * ss.imbalance).norm();
  t.phi_qbar_norm = spectral_norm(phi_inv_qbar);
  t.ratio = t.phi_qbar_norm > 0.0 ? t.norm_v / t.phi_qbar_norm : kInf;
  // 1 1' Q^{-1} w = 1 (q_inv . w): norm sqrt(n) |q_inv . w|.
  t.sum_imbalance_norm = std::sqrt(static_cast<double>(n)) * std::abs(qi.dot(ss.imbalance));
  t.sum_operator_norm = spectral_norm(ones * qi.transpose());
  const double scale = std::max(1.0, cost.q.cwiseProduct(ss.dtilde).norm());
  t.self_supplied = ss.imbalance.norm() <= 1e-12 * scale;
  return t;
}

Deltas deltas(const Network& net, const CostModel& cost, const SteadyState& ss,
              const SatBounds& bounds, double theta, DeltaThetaReading reading) {
  require_theta(theta);
  const BoundTerms t = bound_terms(net, cost, ss);
  Deltas out;
  out.delta_p = std::min((bounds.u_p_max - ss.ubar_p).minCoeff(),
                         (ss.ubar_p - bounds.u_p_min).minCoeff());
  out.delta_e = std::min((bounds.u_e_max - ss.ubar_e).minCoeff(), ss.ubar_e.minCoeff()) /
                net.incidence_pinv_norm();
  if (t.phi_qbar_norm == 0.0) {
    out.delta_theta = kInf;
  } else {
    const double factor =
        reading == DeltaThetaReading::kDirect ? theta / (1.0 - theta) : (1.0 - theta) / theta;
    out.delta_theta = t.ratio * factor;
  }
  return out;
}

double default_theta(const Network& net, const CostModel& cost, const SteadyState& ss,
                     const SatBounds& bounds, double eps2, DeltaThetaReading reading) {
  const BoundTerms t = bound_terms(net, cost, ss);
  if (t.self_supplied || t.phi_qbar_norm == 0.0) return 0.5;
  if (reading == DeltaThetaReading::kInverted) {
    return std::clamp(t.ratio / (t.ratio + eps2), 0.5, 0.9999);
  }
  const Deltas dl = deltas(net, cost, ss, bounds, 0.5, reading);
  const double slack = std::min({dl.delta_p, dl.delta_e, eps2});
  if (!(slack > 0.0)) return 0.5;
  const double scaled = slack * t.phi_qbar_norm;
  return scaled / (scaled + t.norm_v);
}

double GainBounds::max_gain_ratio(double gamma_c) const {
  if (terms.self_supplied) return kInf;
  return (1.0 - theta) / gamma_c * min_slack / terms.norm_v;
}

double GainBounds::series_gain_ratio(double gamma_c) const {
  if (terms.self_supplied || terms.phi_qbar_norm == 0.0) return kInf;
  return theta / (terms.phi_qbar_norm * gamma_c);
}

GainBounds gain_bounds(const Network& net, const CostModel& cost, const SteadyState& ss,
                       const SatBounds& bounds, double eps1, double eps2,
                       std::optional<double> theta, DeltaThetaReading reading) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw ValidationError("eps1 and eps2 must be > 0");
  GainBounds gb;
  gb.theta = theta ? *theta : default_theta(net, cost, ss, bounds, eps2, reading);
  gb.terms = bound_terms(net, cost, ss);
  gb.delta = deltas(net, cost, ss, bounds, gb.theta, reading);
  const double denom = gb.terms.sum_imbalance_norm + gb.terms.sum_operator_norm * eps2;
  if (!(denom > 0.0)) throw ValidationError("gamma_c bound: zero denominator");
  gb.bound_gamma_c = cost.inv_sum() * eps1 / denom;
  gb.min_slack = std::min({gb.delta.delta_p, gb.delta.delta_e, gb.delta.delta_theta, eps2});
  return gb;
}

Gains synthesize_gains(const Network& net, const CostModel& cost,
                       const std::vector<Instance>& instances, const SatBounds& bounds,
                       double eps1, double eps2, const SynthesisOptions& options) {
  if (instances.empty()) throw ValidationError("synthesis needs at least one instance");
  if (!(options.safety > 0.0 && options.safety < 1.0)) {
    throw ValidationError("safety factor must lie in (0, 1)");
  }
  if (!(options.gamma_p > 0.0)) throw ValidationError("gamma_p must be > 0");

  // Steady inputs and every bound term are gain independent; unit gains
  // only serve to evaluate them.
  const Gains unit{1.0, 1.0, 1.0, 1.0, std::nullopt};
  FlowSelection selection{options.flow_policy, bounds.u_e_max};

  std::vector<GainBounds> per_instance;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const SteadyState ss =
        compute_core(net, cost, instances[i].d, instances[i].xbar_s, unit, selection);
    const FeasibilityReport feas = check_feasibility(ss, bounds);
    if (!feas.feasible) {
      std::string msg = fmt::format("feasibility condition violated in instance {}:", i);
      for (const auto& b : feas.binding) msg += "\n  " + b;
      throw InfeasibleError(msg);
    }
    per_instance.push_back(
        gain_bounds(net, cost, ss, bounds, eps1, eps2, options.theta, options.reading));
  }

  double bound_c = kInf;
  for (const auto& gb : per_instance) bound_c = std::min(bound_c, gb.bound_gamma_c);

  Gains g;
  g.gamma_p = options.gamma_p;
  g.gamma_e = options.gamma_e.value_or(options.gamma_p);
  if (options.gamma_c) {
    if (!(*options.gamma_c > 0.0 && *options.gamma_c < bound_c)) {
      throw GainBoundError(fmt::format("pinned gamma_c = {:.6g} violates gamma_c < {:.6g}",
                                       *options.gamma_c, bound_c));
    }
    g.gamma_c = *options.gamma_c;
  } else {
    g.gamma_c = options.safety * bound_c;
  }

  double ratio = kInf;
  for (const auto& gb : per_instance) {
    ratio = std::min({ratio, gb.max_gain_ratio(g.gamma_c), gb.series_gain_ratio(g.gamma_c)});
  }
  if (std::isinf(ratio)) {
    g.gamma_l = options.gamma_l.value_or(1.0);
  } else {
    if (!(ratio > 0.0)) throw InfeasibleError("no positive gain ratio satisfies the bounds");
    g.gamma_l = g.gamma_p * g.gamma_p / (options.safety * ratio);
  }
  g.theta = options.theta;
  g.validate();
  return g;
}

GainReport verify_gains(const Network& net, const CostModel& cost, const Gains& gains,
                        const SteadyState& ss, const HatState& hats, const SatBounds& bounds,
                        double eps1, double eps2, DeltaThetaReading reading) {
  gains.validate();
  GainReport rep;
  rep.bounds = gain_bounds(net, cost, ss, bounds, eps1, eps2, gains.theta, reading);
  rep.theta = rep.bounds.theta;
  const BoundTerms& t = rep.bounds.terms;
  const double gamma = gains.gamma_eff();
  const double gain_ratio = gains.gamma_p * gains.gamma_p / gains.gamma_l;

  rep.gamma_c_ok = gains.gamma_c < rep.bounds.bound_gamma_c;
  rep.gain_ratio_ok =
      t.self_supplied || gain_ratio < rep.bounds.max_gain_ratio(gains.gamma_c);
  rep.series_ok = t.self_supplied || gamma * t.phi_qbar_norm <= rep.theta;

  const double geometric = gamma * t.norm_v / (1.0 - rep.theta);
  rep.norm_hat_up = hats.hat_up.norm();
  rep.norm_hat_ue = hats.hat_ue.norm();
  rep.norm_hat_x = hats.hat_x.norm();
  rep.bound_hat_up = geometric;
  rep.bound_hat_ue = geometric * net.incidence_pinv_norm();
  rep.bound_hat_x = gains.gamma_c / cost.inv_sum() *
                    (t.sum_imbalance_norm + t.sum_operator_norm * geometric);
  rep.offset_bounds_ok = dominated(rep.norm_hat_up, rep.bound_hat_up) &&
                         dominated(rep.norm_hat_ue, rep.bound_hat_ue) &&
                         dominated(rep.norm_hat_x, rep.bound_hat_x);

  const double slack_p = rep.bounds.delta.delta_p;
  const double slack_e =
      std::min((bounds.u_e_max - ss.ubar_e).minCoeff(), ss.ubar_e.minCoeff());
  rep.hat_up_ok = rep.norm_hat_up < std::min(slack_p, eps2);
  rep.hat_x_ok = rep.norm_hat_x < eps1;
  rep.hat_ue_ok = rep.norm_hat_ue < slack_e;

  const ShiftedSatBounds sb = shifted_bounds(cost, ss, hats, bounds, gains);
  rep.signs_ok = (sb.xe_min.array() < 0.0).all() && (sb.xe_max.array() > 0.0).all() &&
                 (sb.xp_min.array() < 0.0).all() && (sb.xp_max.array() > 0.0).all();
  return rep;
}

}  // namespace flownet
