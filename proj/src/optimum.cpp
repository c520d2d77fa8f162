#include "flownet/optimum.hpp"

#include "flownet/errors.hpp"

namespace flownet {

CostModel CostModel::quadratic(const Vector& q) {
  return CostModel{q, Vector::Zero(q.size()), Vector::Zero(q.size())};
}

void CostModel::validate(int n) const {
  if (q.size() != n || r.size() != n || s.size() != n) {
    throw ValidationError("cost: q, r, s must each have one entry per node");
  }
  require_finite(q, "cost.q");
  require_finite(r, "cost.r");
  require_finite(s, "cost.s");
  if ((q.array() <= 0.0).any()) {
    throw ValidationError("cost: every q_i must be strictly positive");
  }
}

double total_cost(const CostModel& cost, const Vector& u_p) {
  if (u_p.size() != cost.size()) throw ValidationError("total_cost: dimension mismatch");
  return cost.s.sum() + cost.r.dot(u_p) + 0.5 * u_p.dot(cost.q.cwiseProduct(u_p));
}

namespace {

void check_dispatch_inputs(const CostModel& cost, const Vector& d, const Vector& xbar_s) {
  cost.validate(cost.size());
  if (d.size() != cost.size() || xbar_s.size() != cost.size()) {
    throw ValidationError("dispatch: d and xbar_s must have one entry per node");
  }
  require_finite(d, "d");
  require_finite(xbar_s, "xbar_s");
}

}  // namespace

DispatchResult optimal_input(const CostModel& cost, const Vector& d, const Vector& xbar_s) {
  check_dispatch_inputs(cost, d, xbar_s);
  const Vector q_inv = cost.q_inv();
  const Vector dtilde = d - xbar_s - q_inv.cwiseProduct(cost.r);
  // -Q^{-1} (1 1'/(1'Q^{-1}1) dtilde + r)
  const double share = dtilde.sum() / q_inv.sum();
  DispatchResult out;
  out.u_p_opt = -q_inv.cwiseProduct(Vector::Constant(cost.size(), share) + cost.r);
  out.lambda = -share;
  out.cost = total_cost(cost, out.u_p_opt);
  return out;
}

DispatchResult kkt_oracle(const CostModel& cost, const Vector& d, const Vector& xbar_s) {
  check_dispatch_inputs(cost, d, xbar_s);
  const Eigen::Index n = cost.size();
  Matrix kkt = Matrix::Zero(n + 1, n + 1);
  kkt.topLeftCorner(n, n) = cost.q.asDiagonal();
  kkt.topRightCorner(n, 1).setOnes();
  kkt.bottomLeftCorner(1, n).setOnes();
  Vector rhs(n + 1);
  rhs.head(n) = -cost.r;
  rhs(n) = (xbar_s - d).sum();

  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) throw SingularMatrixError("kkt_oracle: singular KKT system");
  const Vector sol = lu.solve(rhs);

  DispatchResult out;
  out.u_p_opt = sol.head(n);
  // Stationarity Q u + r + mu 1 = 0, so the shared marginal cost is -mu.
  out.lambda = -sol(n);
  out.cost = total_cost(cost, out.u_p_opt);
  return out;
}

}  // namespace flownet
