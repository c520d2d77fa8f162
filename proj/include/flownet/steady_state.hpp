#pragma once

#include <array>

#include "flownet/controllers.hpp"
#include "flownet/gain_set.hpp"
#include "flownet/graph.hpp"
#include "flownet/optimum.hpp"

namespace flownet {

/// How the edge integrator equilibrium is picked among all solutions of
/// gamma_e B xbar_e = (I - Q^{-1} 1 1'/(1'Q^{-1}1)) dtilde.
struct FlowSelection {
  enum class Policy {
    /// Plain least-norm solution.
    kMinimumNorm,
    /// Least-norm solution plus the circulation that maximises
    /// min_k(ubar_e_k, u_e_max_k - ubar_e_k). Equal to kMinimumNorm on trees.
    kMaxMargin,
  };
  Policy policy = Policy::kMaxMargin;
  /// Upper flow limits used by kMaxMargin; empty means unbounded.
  Vector u_e_max;
};

struct SteadyState {
  Vector dtilde;
  Vector xbar_p;
  Vector xbar_e;
  Vector ubar_p;
  Vector ubar_e;
  Matrix Qbar;
  Matrix Phi;
  double gamma_eff = 0.0;
  /// Qbar Q dtilde, the imbalance every bound scales with.
  Vector imbalance;
};

struct HatState {
  Vector hat_xp;
  Vector hat_xe;
  Vector hat_x;
  Vector hat_up;
  Vector hat_ue;

  static HatState zeros(int n, int m);
};

struct ShiftedSatBounds {
  Vector xe_min;
  Vector xe_max;
  Vector xp_min;
  Vector xp_max;
};

/// Q^{-1} 1 1' Q^{-1} / (1'Q^{-1}1) - Q^{-1}
Matrix qbar_matrix(const CostModel& cost);
/// -L_c Q + 1 1'/n
Matrix phi_matrix(const Network& net, const CostModel& cost);

/// Ideal steady state of one constant-disturbance interval. Requires both
/// graphs connected.
SteadyState compute_core(const Network& net, const CostModel& cost, const Vector& d,
                         const Vector& xbar_s, const Gains& gains,
                         const FlowSelection& selection = {});

/// Gain-dependent offsets. Throws SingularMatrixError when
/// gamma Qbar + Phi is numerically singular, which only happens for invalid
/// inputs.
HatState compute_hats(const Network& net, const CostModel& cost, const SteadyState& ss,
                      const Gains& gains);

/// Residual norms of the three offset equations:
/// B' hat_x, -gamma_e B hat_xe + gamma_p Q^{-1} hat_xp, and
/// -gamma_p Q^{-1} hat_x - gamma_l L_c hat_xp
///   - gamma_p gamma_c gamma_e Q^{-1} B (hat_xe + xbar_e).
std::array<double, 3> hat_residuals(const Network& net, const CostModel& cost,
                                    const SteadyState& ss, const HatState& hats,
                                    const Gains& gains);

/// Saturation limits expressed in incremental coordinates.
ShiftedSatBounds shifted_bounds(const CostModel& cost, const SteadyState& ss,
                                const HatState& hats, const SatBounds& bounds,
                                const Gains& gains);

}  // namespace flownet
