#include "flownet/lyapunov.hpp"

#include "flownet/controllers.hpp"
#include "flownet/errors.hpp"

namespace flownet {

IncrementalCoords make_incremental(const Vector& x, const Vector& xbar, const Vector& x_p,
                                   const Vector& x_e, const SteadyState& ss,
                                   const HatState& hats) {
  return IncrementalCoords{x - xbar - hats.hat_x, x_p - ss.xbar_p - hats.hat_xp,
                           x_e - ss.xbar_e - hats.hat_xe};
}

double sat_integral(double z, double a, double b) {
  if (a > b) throw ValidationError("sat_integral: a > b");
  // Continuous antiderivative of sat(.; a, b), anchored at zero.
  auto prim = [a, b](double y) {
    if (y < a) return a * y - 0.5 * a * a;
    if (y > b) return b * y - 0.5 * b * b;
    return 0.5 * y * y;
  };
  return prim(z) - prim(0.0);
}

double v_unconstrained(const IncrementalCoords& inc) {
  return 0.5 * (inc.x_t.squaredNorm() + inc.xp_t.squaredNorm() + inc.xe_t.squaredNorm());
}

double vdot_unconstrained_formula(const Network& net, const IncrementalCoords& inc,
                                  const Gains& g) {
  return -g.gamma_c * (net.incidence().transpose() * inc.x_t).squaredNorm() -
         g.gamma_l * (net.comm_incidence().transpose() * inc.xp_t).squaredNorm();
}

IncrementalCoords incremental_rhs_unconstrained(const Network& net, const CostModel& cost,
                                                const Gains& g, const IncrementalCoords& inc) {
  const Matrix& b = net.incidence();
  const Vector qi = cost.q_inv();
  const Vector bt_x = b.transpose() * inc.x_t;
  const Vector u_e = -g.gamma_c * bt_x - g.gamma_e * inc.xe_t;
  const Vector u_p = g.gamma_p * qi.cwiseProduct(inc.xp_t);
  return IncrementalCoords{
      b * u_e + u_p,
      -g.gamma_l * (net.comm_laplacian() * inc.xp_t) - g.gamma_p * qi.cwiseProduct(inc.x_t),
      g.gamma_e * bt_x};
}

Vector chi(const Network& net, const IncrementalCoords& inc, const Gains& g) {
  return g.gamma_e * inc.xe_t + g.gamma_c * (net.incidence().transpose() * inc.x_t);
}

Vector sat_edge(const Network& net, const IncrementalCoords& inc, const Gains& g,
                const ShiftedSatBounds& sb) {
  return sat(-chi(net, inc, g), sb.xe_min, sb.xe_max);
}

Vector sat_node(const IncrementalCoords& inc, const ShiftedSatBounds& sb) {
  return sat(inc.xp_t, sb.xp_min, sb.xp_max);
}

double v_saturated_unchecked(const Network& net, const IncrementalCoords& inc,
                             const ShiftedSatBounds& sb, const Gains& g) {
  double node_part = 0.0;
  for (Eigen::Index i = 0; i < inc.xp_t.size(); ++i) {
    node_part += sat_integral(inc.xp_t(i), sb.xp_min(i), sb.xp_max(i));
  }
  const Vector c = chi(net, inc, g);
  double edge_part = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    edge_part += sat_integral(-c(k), sb.xe_min(k), sb.xe_max(k));
  }
  return 0.5 * inc.x_t.squaredNorm() + node_part + edge_part / (g.gamma_e * g.gamma_e);
}

double v_saturated(const Network& net, const IncrementalCoords& inc,
                   const ShiftedSatBounds& sb, const Gains& g) {
  const bool straddles = (sb.xe_min.array() < 0.0).all() && (sb.xe_max.array() > 0.0).all() &&
                         (sb.xp_min.array() < 0.0).all() && (sb.xp_max.array() > 0.0).all();
  if (!straddles) {
    throw ValidationError(
        "saturated Lyapunov function needs shifted limits below zero and above zero");
  }
  return v_saturated_unchecked(net, inc, sb, g);
}

double vdot_saturated_formula(const Network& net, const IncrementalCoords& inc,
                              const ShiftedSatBounds& sb, const Gains& g) {
  const Vector se = sat_edge(net, inc, g, sb);
  const Vector sp = sat_node(inc, sb);
  return -g.gamma_c * (net.incidence() * se).squaredNorm() -
         g.gamma_l * (net.comm_incidence().transpose() * sp).squaredNorm();
}

double vdot_saturated_exact(const Network& net, const CostModel& cost,
                            const IncrementalCoords& inc, const ShiftedSatBounds& sb,
                            const Gains& g) {
  const Vector se = sat_edge(net, inc, g, sb);
  const Vector sp = sat_node(inc, sb);
  const Vector b_se = net.incidence() * se;
  const double ge2 = g.gamma_e * g.gamma_e;
  return -(g.gamma_c / ge2) * b_se.squaredNorm() -
         g.gamma_l * (net.comm_incidence().transpose() * sp).squaredNorm() +
         g.gamma_p * g.gamma_c * (1.0 - 1.0 / ge2) * sp.dot(cost.q_inv().cwiseProduct(b_se));
}

IncrementalCoords incremental_rhs_saturated(const Network& net, const CostModel& cost,
                                            const Gains& g, const ShiftedSatBounds& sb,
                                            const IncrementalCoords& inc) {
  const Matrix& b = net.incidence();
  const Vector qi = cost.q_inv();
  const Vector b_se = b * sat_edge(net, inc, g, sb);
  const Vector sp = sat_node(inc, sb);
  return IncrementalCoords{
      b_se + g.gamma_p * qi.cwiseProduct(sp),
      -g.gamma_l * (net.comm_laplacian() * sp) +
          g.gamma_p * g.gamma_c * qi.cwiseProduct(b_se) - g.gamma_p * qi.cwiseProduct(inc.x_t),
      g.gamma_e * (b.transpose() * inc.x_t)};
}

}  // namespace flownet
