#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <random>
#include <vector>

#include "flownet/controllers.hpp"
#include "flownet/gain_set.hpp"
#include "flownet/graph.hpp"
#include "flownet/optimum.hpp"
#include "flownet/simulator.hpp"
#include "flownet/steady_state.hpp"

namespace flownet::testing {

inline Vector uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline Matrix uniform_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo,
                             double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = dist(rng);
  }
  return a;
}

/// Random spanning tree plus `extra` chords, random orientation.
inline NetworkSpec random_connected(std::mt19937_64& rng, int n, int extra) {
  NetworkSpec spec;
  spec.n = n;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution flip(0.5);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    int a = order[static_cast<std::size_t>(pick(rng))];
    int b = order[static_cast<std::size_t>(i)];
    if (flip(rng)) std::swap(a, b);
    spec.edges.push_back({a, b});
  }
  std::uniform_int_distribution<int> node(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    int a = node(rng);
    int b = node(rng);
    if (a == b) continue;
    spec.edges.push_back({a, b});
  }
  return spec;
}

inline NetworkSpec ring(int n) {
  NetworkSpec spec;
  spec.n = n;
  for (int i = 0; i < n; ++i) spec.edges.push_back({i, (i + 1) % n});
  return spec;
}

inline NetworkSpec path(int n) {
  NetworkSpec spec;
  spec.n = n;
  for (int i = 0; i + 1 < n; ++i) spec.edges.push_back({i, i + 1});
  return spec;
}

/// Hand-picked gains for the four-tank schedule.
inline Gains case_study_gains() { return Gains{0.01, 0.11, 0.01, 0.53, std::nullopt}; }

/// Network, costs and schedule of the four-tank case study.
inline Scenario case_study() {
  Scenario sc;
  sc.network = ring(4);
  sc.cost = CostModel::quadratic((Vector(4) << 1.0, 0.7, 0.3, 0.1).finished());
  sc.bounds = SatBounds{Vector::Zero(4), Vector::Constant(4, 0.14), Vector::Constant(4, 0.1)};
  sc.eps1 = 1e-2;
  sc.eps2 = 1e-4;
  const Vector start = (Vector(4) << 200, 300, 400, 500).finished();
  const Vector top = Vector::Constant(4, 800.0);
  const Vector d1 = Vector::Constant(4, -0.03);
  const Vector d2 = Vector::Constant(4, -0.045);
  sc.segments.push_back({0.0, 3600.0, d1, start, Vector::Zero(4), false});
  sc.segments.push_back({3600.0, 21600.0, d1, start, (top - start) / 18000.0, false});
  sc.segments.push_back({21600.0, 25200.0, d1, top, Vector::Zero(4), false});
  sc.segments.push_back({25200.0, 86400.0, d2, top, Vector::Zero(4), false});
  sc.gains = case_study_gains();
  return sc;
}

/// Residuals of the offset equations, assembled independently of the library.
inline std::array<double, 3> residual_oracle(const Network& net, const CostModel& cost,
                                             const SteadyState& ss, const HatState& h,
                                             const Gains& g) {
  const Matrix q_inv = cost.Q_inv();
  const Matrix& b = net.incidence();
  const double a = (b.transpose() * h.hat_x).norm();
  const double c = (-g.gamma_e * b * h.hat_xe + g.gamma_p * q_inv * h.hat_xp).norm();
  const double e = (-g.gamma_p * q_inv * h.hat_x - g.gamma_l * net.comm_laplacian() * h.hat_xp -
                    g.gamma_p * g.gamma_c * g.gamma_e * q_inv * b * (h.hat_xe + ss.xbar_e))
                       .norm();
  return {a, c, e};
}

/// Random feasible instance: edges oriented along the least-norm flow, limits
/// placed around the steady inputs.
struct Feasible {
  NetworkSpec spec;
  CostModel cost;
  Vector d, xbar_s;
  SatBounds bounds;
};

inline std::optional<Feasible> random_feasible(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 7);
  const int n = size(rng);
  Feasible f;
  f.spec = random_connected(rng, n, static_cast<int>(rng() % 3));
  f.cost = CostModel{uniform_vector(rng, n, 0.2, 5), Vector::Zero(n), Vector::Zero(n)};
  f.d = uniform_vector(rng, n, -1, 0.2);
  f.xbar_s = uniform_vector(rng, n, -0.1, 0.1);
  const Gains unit{1, 1, 1, 1, std::nullopt};
  const SteadyState mn = compute_core(Network(f.spec), f.cost, f.d, f.xbar_s, unit,
                                      {FlowSelection::Policy::kMinimumNorm, {}});
  for (std::size_t k = 0; k < f.spec.edges.size(); ++k) {
    const double u = mn.ubar_e(static_cast<Eigen::Index>(k));
    if (std::abs(u) < 1e-3) return std::nullopt;
    if (u < 0) std::swap(f.spec.edges[k].tail, f.spec.edges[k].head);
  }
  const Vector flow = mn.ubar_e.cwiseAbs();
  f.bounds = SatBounds{mn.ubar_p - uniform_vector(rng, n, 0.05, 1),
                       mn.ubar_p + uniform_vector(rng, n, 0.05, 1),
                       flow + uniform_vector(rng, flow.size(), 0.05, 1)};
  return f;
}

}  // namespace flownet::testing
