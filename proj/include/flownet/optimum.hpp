#pragma once

#include "flownet/linalg.hpp"

namespace flownet {

/// Node cost C_i(u) = s_i + r_i u + q_i u^2 / 2 with q_i > 0.
struct CostModel {
  Vector q;
  Vector r;
  Vector s;

  /// Quadratic, linear and zero offset terms of the given size.
  static CostModel quadratic(const Vector& q);

  int size() const { return static_cast<int>(q.size()); }
  void validate(int n) const;

  Matrix Q() const { return q.asDiagonal(); }
  Matrix Q_inv() const { return q.cwiseInverse().asDiagonal(); }
  Vector q_inv() const { return q.cwiseInverse(); }
  /// 1' Q^{-1} 1.
  double inv_sum() const { return q.cwiseInverse().sum(); }
};

struct DispatchResult {
  Vector u_p_opt;
  /// Common marginal cost q_i u_i + r_i at the optimum.
  double lambda = 0.0;
  double cost = 0.0;
};

double total_cost(const CostModel& cost, const Vector& u_p);

/// Closed-form minimiser of total cost subject to 1'(u_p + d - xbar_s) = 0.
DispatchResult optimal_input(const CostModel& cost, const Vector& d, const Vector& xbar_s);

/// Same problem solved through the generic (n+1)x(n+1) KKT system. Kept
/// independent of optimal_input so each can check the other.
DispatchResult kkt_oracle(const CostModel& cost, const Vector& d, const Vector& xbar_s);

}  // namespace flownet
