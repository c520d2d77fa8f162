#include "flownet/controllers.hpp"

#include <cmath>

#include "flownet/errors.hpp"

namespace flownet {

void Gains::validate() const {
  const bool positive = gamma_e > 0.0 && gamma_c > 0.0 && gamma_p > 0.0 && gamma_l > 0.0;
  const bool finite = std::isfinite(gamma_e) && std::isfinite(gamma_c) &&
                      std::isfinite(gamma_p) && std::isfinite(gamma_l);
  if (!positive || !finite) {
    throw ValidationError("gains: gamma_e, gamma_c, gamma_p, gamma_l must be finite and > 0");
  }
  if (theta && !(*theta > 0.0 && *theta < 1.0)) {
    throw ValidationError("gains: theta must lie in (0, 1)");
  }
}

SatBounds SatBounds::unbounded(int n, int m) {
  return SatBounds{Vector::Constant(n, -kUnbounded), Vector::Constant(n, kUnbounded),
                   Vector::Constant(m, kUnbounded)};
}

void SatBounds::validate(int n, int m) const {
  if (u_p_min.size() != n || u_p_max.size() != n || u_e_max.size() != m) {
    throw ValidationError("bounds: u_p_min/u_p_max need n entries, u_e_max needs m");
  }
  if (u_p_min.hasNaN() || u_p_max.hasNaN() || u_e_max.hasNaN()) {
    throw ValidationError("bounds: NaN entry");
  }
  if (!(u_p_min.array() < u_p_max.array()).all()) {
    throw ValidationError("bounds: need u_p_min < u_p_max componentwise");
  }
  if (!(u_e_max.array() > 0.0).all()) {
    throw ValidationError("bounds: need u_e_max > 0 componentwise");
  }
}

Vector sat(const Vector& x, const Vector& lo, const Vector& hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) {
    throw ValidationError("sat: dimension mismatch");
  }
  if ((lo.array() > hi.array()).any()) throw ValidationError("sat: lo > hi");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) <= lo(i)) {
      out(i) = lo(i);
    } else if (x(i) >= hi(i)) {
      out(i) = hi(i);
    } else {
      out(i) = x(i);
    }
  }
  return out;
}

Vector edge_output_unconstrained(const Network& net, const Vector& y, const Vector& x_e,
                                 const Gains& g) {
  return -g.gamma_c * (net.incidence().transpose() * y) - g.gamma_e * x_e;
}

Vector edge_deriv(const Network& net, const Vector& y, const Gains& g) {
  return g.gamma_e * (net.incidence().transpose() * y);
}

Vector node_output_unconstrained(const Vector& x_p, const CostModel& cost, const Gains& g) {
  return (g.gamma_p * x_p - cost.r).cwiseQuotient(cost.q);
}

Vector node_deriv_unconstrained(const Network& net, const Vector& y, const Vector& x_p,
                                const CostModel& cost, const Gains& g) {
  return -g.gamma_l * (net.comm_laplacian() * x_p) - g.gamma_p * y.cwiseQuotient(cost.q);
}

Vector edge_output_saturated(const Network& net, const Vector& y, const Vector& x_e,
                             const Gains& g, const SatBounds& bounds) {
  return sat(edge_output_unconstrained(net, y, x_e, g), Vector::Zero(x_e.size()),
             bounds.u_e_max);
}

Vector node_output_saturated(const Vector& x_p, const CostModel& cost, const Gains& g,
                             const SatBounds& bounds) {
  return sat(node_output_unconstrained(x_p, cost, g), bounds.u_p_min, bounds.u_p_max);
}

std::pair<Vector, Vector> node_state_bounds(const CostModel& cost, const Gains& g,
                                            const SatBounds& bounds) {
  Vector lo = (cost.q.cwiseProduct(bounds.u_p_min) + cost.r) / g.gamma_p;
  Vector hi = (cost.q.cwiseProduct(bounds.u_p_max) + cost.r) / g.gamma_p;
  return {std::move(lo), std::move(hi)};
}

Vector node_deriv_saturated(const Network& net, const Vector& y, const Vector& x_p,
                            const Vector& u_e, const CostModel& cost, const Gains& g,
                            const SatBounds& bounds) {
  const auto [lo, hi] = node_state_bounds(cost, g, bounds);
  const Vector drive = y - g.gamma_c * (net.incidence() * u_e);
  return -g.gamma_l * (net.comm_laplacian() * sat(x_p, lo, hi)) -
         g.gamma_p * drive.cwiseQuotient(cost.q);
}

}  // namespace flownet
