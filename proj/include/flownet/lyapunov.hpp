#pragma once

#include "flownet/gain_set.hpp"
#include "flownet/graph.hpp"
#include "flownet/optimum.hpp"
#include "flownet/steady_state.hpp"

namespace flownet {

/// Deviations from the (offset) equilibrium:
/// x_t = x - xbar(t) - hat_x, xp_t = x_p - xbar_p - hat_xp,
/// xe_t = x_e - xbar_e - hat_xe. Offsets are zero for the unconstrained laws.
struct IncrementalCoords {
  Vector x_t;
  Vector xp_t;
  Vector xe_t;
};

IncrementalCoords make_incremental(const Vector& x, const Vector& xbar, const Vector& x_p,
                                   const Vector& x_e, const SteadyState& ss,
                                   const HatState& hats);

/// int_0^z sat(y; a, b) dy for a <= b, in closed form.
double sat_integral(double z, double a, double b);

/// 1/2 (|x_t|^2 + |xp_t|^2 + |xe_t|^2)
double v_unconstrained(const IncrementalCoords& inc);

/// -gamma_c |B' x_t|^2 - gamma_l |B_c' xp_t|^2
double vdot_unconstrained_formula(const Network& net, const IncrementalCoords& inc,
                                  const Gains& g);

/// Incremental dynamics of the unconstrained loop.
IncrementalCoords incremental_rhs_unconstrained(const Network& net, const CostModel& cost,
                                                const Gains& g, const IncrementalCoords& inc);

/// chi = gamma_e xe_t + gamma_c B' x_t
Vector chi(const Network& net, const IncrementalCoords& inc, const Gains& g);
/// sat(-chi; xe_min, xe_max): deviation of the realised flow from its offset steady value.
Vector sat_edge(const Network& net, const IncrementalCoords& inc, const Gains& g,
                const ShiftedSatBounds& sb);
/// sat(xp_t; xp_min, xp_max)
Vector sat_node(const IncrementalCoords& inc, const ShiftedSatBounds& sb);

/// 1/2 |x_t|^2 + sum_i int_0^{xp_t,i} sat(.; xp^-, xp^+)
///   + (1/gamma_e^2) sum_k int_0^{-chi_k} sat(.; xe^-, xe^+).
/// Throws ValidationError unless every shifted interval straddles zero.
double v_saturated(const Network& net, const IncrementalCoords& inc,
                   const ShiftedSatBounds& sb, const Gains& g);
/// Same value without the sign check, for trace output.
double v_saturated_unchecked(const Network& net, const IncrementalCoords& inc,
                             const ShiftedSatBounds& sb, const Gains& g);

/// -gamma_c |B sat_e|^2 - gamma_l |B_c' sat_p|^2. Exact only for gamma_e = 1.
double vdot_saturated_formula(const Network& net, const IncrementalCoords& inc,
                              const ShiftedSatBounds& sb, const Gains& g);
/// Exact derivative of v_saturated along incremental_rhs_saturated:
/// -(gamma_c/gamma_e^2)|B sat_e|^2 - gamma_l |B_c' sat_p|^2
///   + gamma_p gamma_c (1 - 1/gamma_e^2) sat_p' Q^{-1} B sat_e.
double vdot_saturated_exact(const Network& net, const CostModel& cost,
                            const IncrementalCoords& inc, const ShiftedSatBounds& sb,
                            const Gains& g);

/// Incremental dynamics of the saturated loop.
IncrementalCoords incremental_rhs_saturated(const Network& net, const CostModel& cost,
                                            const Gains& g, const ShiftedSatBounds& sb,
                                            const IncrementalCoords& inc);

}  // namespace flownet
