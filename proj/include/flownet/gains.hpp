#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flownet/controllers.hpp"
#include "flownet/gain_set.hpp"
#include "flownet/steady_state.hpp"

namespace flownet {

/// Two readings of the theta factor in delta_theta:
/// kDirect gives ratio * theta/(1-theta), kInverted gives ratio * (1-theta)/theta.
enum class DeltaThetaReading { kDirect, kInverted };

struct FeasibilityReport {
  bool feasible = false;
  Vector margin_p_upper;  // u_p_max - ubar_p
  Vector margin_p_lower;  // ubar_p - u_p_min
  Vector margin_e_upper;  // u_e_max - ubar_e
  Vector margin_e_lower;  // ubar_e
  /// Human-readable list of the violated (non-positive) constraints.
  std::vector<std::string> binding;
};

/// Strict interiority of the steady-state inputs in their boxes.
FeasibilityReport check_feasibility(const SteadyState& ss, const SatBounds& bounds);

/// Gain-independent quantities shared by the bound formulas.
struct BoundTerms {
  /// |Phi^{-1} Qbar^2 Q dtilde|
  double norm_v = 0.0;
  /// |Phi^{-1} Qbar|
  double phi_qbar_norm = 0.0;
  /// norm_v / phi_qbar_norm, +inf when the denominator vanishes.
  double ratio = 0.0;
  /// |1 1' Q^{-1} Qbar Q dtilde|
  double sum_imbalance_norm = 0.0;
  /// |1 1' Q^{-1}|
  double sum_operator_norm = 0.0;
  /// True when the imbalance vanishes and every offset is identically zero.
  bool self_supplied = false;
};

BoundTerms bound_terms(const Network& net, const CostModel& cost, const SteadyState& ss);

struct Deltas {
  double delta_p = 0.0;
  double delta_e = 0.0;
  double delta_theta = 0.0;
};

Deltas deltas(const Network& net, const CostModel& cost, const SteadyState& ss,
              const SatBounds& bounds, double theta,
              DeltaThetaReading reading = DeltaThetaReading::kDirect);

/// Default theta for one instance. kDirect: the value balancing the slack
/// limit against gamma <= theta/|Phi^{-1}Qbar|. kInverted: the value giving
/// delta_theta = eps2, clamped to [0.5, 0.9999]. 0.5 when irrelevant.
double default_theta(const Network& net, const CostModel& cost, const SteadyState& ss,
                     const SatBounds& bounds, double eps2,
                     DeltaThetaReading reading = DeltaThetaReading::kDirect);

struct GainBounds {
  double theta = 0.5;
  BoundTerms terms;
  Deltas delta;
  /// Right-hand side of the gamma_c inequality.
  double bound_gamma_c = 0.0;
  /// min{delta_p, delta_e, delta_theta, eps2}
  double min_slack = 0.0;

  /// Upper limit on gamma_p^2/gamma_l from the slack inequality for a given
  /// gamma_c. +inf for self-supplied instances.
  double max_gain_ratio(double gamma_c) const;
  /// Upper limit on gamma_p^2/gamma_l from gamma <= theta/|Phi^{-1}Qbar|.
  double series_gain_ratio(double gamma_c) const;
};

/// Throws ValidationError for non-positive eps or theta outside (0, 1).
GainBounds gain_bounds(const Network& net, const CostModel& cost, const SteadyState& ss,
                       const SatBounds& bounds, double eps1, double eps2,
                       std::optional<double> theta = std::nullopt,
                       DeltaThetaReading reading = DeltaThetaReading::kDirect);

/// One constant-disturbance interval.
struct Instance {
  Vector d;
  Vector xbar_s;
};

struct SynthesisOptions {
  std::optional<double> gamma_c;
  double gamma_p = 0.01;
  std::optional<double> gamma_e;
  /// Used only when every instance is self-supplied.
  std::optional<double> gamma_l;
  std::optional<double> theta;
  DeltaThetaReading reading = DeltaThetaReading::kDirect;
  double safety = 0.95;
  FlowSelection::Policy flow_policy = FlowSelection::Policy::kMaxMargin;
};

/// Gains satisfying every instance's inequalities with the safety margin.
/// Throws InfeasibleError naming the binding constraints, or GainBoundError
/// when a pinned gamma_c already violates its bound.
Gains synthesize_gains(const Network& net, const CostModel& cost,
                       const std::vector<Instance>& instances, const SatBounds& bounds,
                       double eps1, double eps2, const SynthesisOptions& options = {});

struct GainReport {
  double theta = 0.5;
  GainBounds bounds;

  // Sufficient inequalities.
  bool gamma_c_ok = false;
  bool gain_ratio_ok = false;
  bool series_ok = false;

  // Analytic offset bounds against the computed offsets.
  double norm_hat_up = 0.0, bound_hat_up = 0.0;
  double norm_hat_ue = 0.0, bound_hat_ue = 0.0;
  double norm_hat_x = 0.0, bound_hat_x = 0.0;
  bool offset_bounds_ok = false;

  // Conclusions: offsets inside the tolerances and the box slack.
  bool hat_up_ok = false;
  bool hat_x_ok = false;
  bool hat_ue_ok = false;

  // Shifted saturation limits straddle zero.
  bool signs_ok = false;

  bool inequalities_hold() const { return gamma_c_ok && gain_ratio_ok && series_ok; }
  bool all_pass() const {
    return inequalities_hold() && offset_bounds_ok && hat_up_ok && hat_x_ok && hat_ue_ok &&
           signs_ok;
  }
};

/// Evaluates every certificate condition; violations are reported, not thrown.
/// theta defaults to gains.theta, then to default_theta.
GainReport verify_gains(const Network& net, const CostModel& cost, const Gains& gains,
                        const SteadyState& ss, const HatState& hats, const SatBounds& bounds,
                        double eps1, double eps2,
                        DeltaThetaReading reading = DeltaThetaReading::kDirect);

}  // namespace flownet
