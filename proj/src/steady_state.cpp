#include "flownet/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flownet/errors.hpp"

namespace flownet {

namespace {

// Smallest margin the max-margin circulation is asked to reach when the
// flows are unbounded above.
constexpr double kMarginFloor = 1e-6;

// Returns ubar_e + K w maximising min(ubar_e + K w, u_max - ubar_e - K w).
Vector max_margin_flow(const Vector& u0, const Matrix& kernel, const Vector& u_max) {
  const Eigen::Index m = u0.size();
  const Eigen::Index k = kernel.cols();

  struct Row {
    Vector coeff;  // over (w, t)
    double rhs;
  };
  std::vector<Row> rows;
  bool any_unbounded = false;
  for (Eigen::Index e = 0; e < m; ++e) {
    Row lower{Vector::Zero(k + 1), u0(e)};
    lower.coeff.head(k) = -kernel.row(e).transpose();
    lower.coeff(k) = 1.0;
    rows.push_back(lower);
    if (std::isfinite(u_max(e))) {
      Row upper{Vector::Zero(k + 1), u_max(e) - u0(e)};
      upper.coeff.head(k) = kernel.row(e).transpose();
      upper.coeff(k) = 1.0;
      rows.push_back(upper);
    } else {
      any_unbounded = true;
    }
  }
  if (any_unbounded) {
    Row cap{Vector::Zero(k + 1), std::max(u0.cwiseAbs().maxCoeff(), kMarginFloor)};
    cap.coeff(k) = 1.0;
    rows.push_back(cap);
  }

  // Shift t so that (w, t) = 0 is feasible.
  double shift = 0.0;
  for (const Row& row : rows) shift = std::min(shift, row.rhs);
  Matrix a(static_cast<Eigen::Index>(rows.size()), k + 1);
  Vector b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(static_cast<Eigen::Index>(i)) = rows[i].coeff.transpose();
    b(static_cast<Eigen::Index>(i)) = rows[i].rhs - shift * rows[i].coeff(k);
  }
  Vector c = Vector::Zero(k + 1);
  c(k) = 1.0;
  const LpSolution sol = maximize_lp(c, a, b);
  if (sol.status != LpSolution::Status::kOptimal) {
    throw Error("max-margin flow: linear program unbounded");
  }
  return u0 + kernel * sol.x.head(k);
}

}  // namespace

HatState HatState::zeros(int n, int m) {
  return HatState{Vector::Zero(n), Vector::Zero(m), Vector::Zero(n), Vector::Zero(n),
                  Vector::Zero(m)};
}

Matrix qbar_matrix(const CostModel& cost) {
  const Vector qi = cost.q_inv();
  return qi * qi.transpose() / qi.sum() - Matrix(qi.asDiagonal());
}

Matrix phi_matrix(const Network& net, const CostModel& cost) {
  const int n = net.num_nodes();
  return -net.comm_laplacian() * cost.Q() + Matrix::Constant(n, n, 1.0 / n);
}

SteadyState compute_core(const Network& net, const CostModel& cost, const Vector& d,
                         const Vector& xbar_s, const Gains& gains,
                         const FlowSelection& selection) {
  const int n = net.num_nodes();
  const int m = net.num_edges();
  cost.validate(n);
  gains.validate();
  if (d.size() != n || xbar_s.size() != n) {
    throw ValidationError("steady state: d and xbar_s need one entry per node");
  }
  require_finite(d, "d");
  require_finite(xbar_s, "xbar_s");
  if (!net.physical_connected()) throw ValidationError("physical graph is not connected");
  if (!net.comm_connected()) throw ValidationError("communication graph is not connected");

  const Vector qi = cost.q_inv();
  const double s = qi.sum();

  SteadyState ss;
  ss.dtilde = d - xbar_s - qi.cwiseProduct(cost.r);
  ss.Qbar = qbar_matrix(cost);
  ss.Phi = phi_matrix(net, cost);
  ss.gamma_eff = gains.gamma_eff();
  ss.imbalance = ss.Qbar * cost.q.cwiseProduct(ss.dtilde);

  ss.xbar_p = Vector::Constant(n, -ss.dtilde.sum() / (s * gains.gamma_p));
  ss.ubar_p = (gains.gamma_p * ss.xbar_p - cost.r).cwiseProduct(qi);

  // (I - Q^{-1} 1 1'/s) dtilde = -imbalance
  const Vector transport = -ss.imbalance;
  Vector xbar_e;
  try {
    xbar_e = least_norm_solve(gains.gamma_e * net.incidence(), transport);
  } catch (const InconsistentSystemError& e) {
    throw Error(std::string("steady state: edge balance unsolvable on a connected graph: ") +
                e.what());
  }
  Vector ubar_e = -gains.gamma_e * xbar_e;

  if (selection.policy == FlowSelection::Policy::kMaxMargin && net.circulations().cols() > 0 &&
      m > 0) {
    Vector u_max = selection.u_e_max.size() == 0 ? Vector::Constant(m, kUnbounded)
                                                 : selection.u_e_max;
    if (u_max.size() != m) throw ValidationError("flow selection: u_e_max needs m entries");
    ubar_e = max_margin_flow(ubar_e, net.circulations(), u_max);
    xbar_e = -ubar_e / gains.gamma_e;
  }
  ss.xbar_e = std::move(xbar_e);
  ss.ubar_e = std::move(ubar_e);
  return ss;
}

HatState compute_hats(const Network& net, const CostModel& cost, const SteadyState& ss,
                      const Gains& gains) {
  const int n = net.num_nodes();
  const double gamma = gains.gamma_eff();
  const Matrix system = gamma * ss.Qbar + ss.Phi;
  Matrix system_inv;
  try {
    system_inv = inverse(system);
  } catch (const SingularMatrixError&) {
    throw SingularMatrixError(
        "offset system gamma*Qbar + Phi is singular; it is full rank for any valid "
        "cost and connected communication graph, so check q > 0 and connectivity");
  }
  const Vector qi = cost.q_inv();
  const double s = qi.sum();
  const Vector w = system_inv * (ss.Qbar * ss.imbalance);

  HatState h;
  h.hat_xp = (gamma / gains.gamma_p) * cost.q.cwiseProduct(w);
  h.hat_xe = (gamma / gains.gamma_e) * (net.incidence_pinv() * w);
  const Vector inner = ss.imbalance - gamma * (system_inv * (ss.Qbar * ss.imbalance));
  h.hat_x = Vector::Constant(n, gains.gamma_c * qi.dot(inner) / s);
  h.hat_up = gains.gamma_p * qi.cwiseProduct(h.hat_xp);
  h.hat_ue = -gains.gamma_e * h.hat_xe;
  return h;
}

std::array<double, 3> hat_residuals(const Network& net, const CostModel& cost,
                                    const SteadyState& ss, const HatState& hats,
                                    const Gains& g) {
  const Matrix& b = net.incidence();
  const Vector qi = cost.q_inv();
  const Vector r1 = b.transpose() * hats.hat_x;
  const Vector r2 = -g.gamma_e * (b * hats.hat_xe) + g.gamma_p * qi.cwiseProduct(hats.hat_xp);
  const Vector r3 = -g.gamma_p * qi.cwiseProduct(hats.hat_x) -
                    g.gamma_l * (net.comm_laplacian() * hats.hat_xp) -
                    g.gamma_p * g.gamma_c * g.gamma_e *
                        qi.cwiseProduct(b * (hats.hat_xe + ss.xbar_e));
  return {r1.norm(), r2.norm(), r3.norm()};
}

ShiftedSatBounds shifted_bounds(const CostModel& cost, const SteadyState& ss,
                                const HatState& hats, const SatBounds& bounds,
                                const Gains& g) {
  ShiftedSatBounds out;
  out.xe_min = g.gamma_e * (ss.xbar_e + hats.hat_xe);
  out.xe_max = out.xe_min + bounds.u_e_max;
  const Vector offset = ss.xbar_p + hats.hat_xp;
  out.xp_min = (cost.q.cwiseProduct(bounds.u_p_min) + cost.r) / g.gamma_p - offset;
  out.xp_max = (cost.q.cwiseProduct(bounds.u_p_max) + cost.r) / g.gamma_p - offset;
  return out;
}

}  // namespace flownet
