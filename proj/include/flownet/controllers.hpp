#pragma once

#include <limits>

#include "flownet/gain_set.hpp"
#include "flownet/graph.hpp"
#include "flownet/optimum.hpp"

namespace flownet {

/// Marks a missing bound. IEEE infinity keeps clamping exact.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Box constraints on node inputs and edge flows. The lower flow bound is
/// always zero in the saturated laws.
struct SatBounds {
  Vector u_p_min;
  Vector u_p_max;
  Vector u_e_max;

  static SatBounds unbounded(int n, int m);
  void validate(int n, int m) const;
};

/// Componentwise clamp: lo where x <= lo, hi where x >= hi, x otherwise.
Vector sat(const Vector& x, const Vector& lo, const Vector& hi);

// Unconstrained laws. y = x - xbar(t).

/// u_e = -gamma_c B'y - gamma_e x_e
Vector edge_output_unconstrained(const Network& net, const Vector& y, const Vector& x_e,
                                 const Gains& g);
/// dx_e/dt = gamma_e B'y, shared by both edge laws.
Vector edge_deriv(const Network& net, const Vector& y, const Gains& g);
/// u_p = Q^{-1}(gamma_p x_p - r)
Vector node_output_unconstrained(const Vector& x_p, const CostModel& cost, const Gains& g);
/// dx_p/dt = -gamma_l L_c x_p - gamma_p Q^{-1} y
Vector node_deriv_unconstrained(const Network& net, const Vector& y, const Vector& x_p,
                                const CostModel& cost, const Gains& g);

// Saturated laws.

/// u_e = sat(-gamma_c B'y - gamma_e x_e; 0, u_e_max)
Vector edge_output_saturated(const Network& net, const Vector& y, const Vector& x_e,
                             const Gains& g, const SatBounds& bounds);
/// u_p = sat(Q^{-1}(gamma_p x_p - r); u_p_min, u_p_max)
Vector node_output_saturated(const Vector& x_p, const CostModel& cost, const Gains& g,
                             const SatBounds& bounds);
/// Integrator bounds (Q u_p_min + r)/gamma_p and (Q u_p_max + r)/gamma_p.
std::pair<Vector, Vector> node_state_bounds(const CostModel& cost, const Gains& g,
                                            const SatBounds& bounds);
/// dx_p/dt = -gamma_l L_c sat(x_p; node_state_bounds)
///           - gamma_p Q^{-1}(y - gamma_c B u_e)
/// u_e must be the already saturated edge output at the same instant.
Vector node_deriv_saturated(const Network& net, const Vector& y, const Vector& x_p,
                            const Vector& u_e, const CostModel& cost, const Gains& g,
                            const SatBounds& bounds);

}  // namespace flownet
