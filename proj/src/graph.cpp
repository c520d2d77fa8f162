#include "flownet/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

#include "flownet/errors.hpp"

namespace flownet {

namespace {

void validate_edges(int n, std::span<const Edge> edges, const char* what) {
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n) {
      throw ValidationError(std::string(what) + " " + std::to_string(k) +
                            ": endpoint index out of range");
    }
    if (e.tail == e.head) {
      throw ValidationError(std::string(what) + " " + std::to_string(k) + ": self-loop");
    }
  }
}

std::vector<bool> reachable_from_zero(int n, std::span<const Edge> edges, bool forward,
                                      bool backward) {
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : edges) {
    if (forward) adj[e.tail].push_back(e.head);
    if (backward) adj[e.head].push_back(e.tail);
  }
  std::vector<bool> seen(n, false);
  if (n == 0) return seen;
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  return seen;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

void NetworkSpec::validate() const {
  if (n < 2) throw ValidationError("network: need at least two nodes");
  validate_edges(n, edges, "edge");
  if (comm_edges) validate_edges(n, *comm_edges, "comm edge");
}

const std::vector<Edge>& NetworkSpec::communication_edges() const {
  return comm_edges ? *comm_edges : edges;
}

Matrix build_incidence(int n, std::span<const Edge> edges) {
  if (n < 1) throw ValidationError("incidence: need at least one node");
  validate_edges(n, edges, "edge");
  Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    b(edges[k].tail, static_cast<Eigen::Index>(k)) = -1.0;
    b(edges[k].head, static_cast<Eigen::Index>(k)) = 1.0;
  }
  return b;
}

Matrix build_incidence(const NetworkSpec& spec) {
  spec.validate();
  return build_incidence(spec.n, spec.edges);
}

Matrix laplacian(const Matrix& incidence) { return incidence * incidence.transpose(); }

bool is_connected(int n, std::span<const Edge> edges) {
  return all_true(reachable_from_zero(n, edges, true, true));
}

bool is_strongly_connected(int n, std::span<const Edge> edges) {
  return all_true(reachable_from_zero(n, edges, true, false)) &&
         all_true(reachable_from_zero(n, edges, false, true));
}

int connected_components(int n, std::span<const Edge> edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  int components = n;
  for (const Edge& e : edges) {
    const int a = find(e.tail);
    const int b = find(e.head);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  b_ = build_incidence(spec_.n, spec_.edges);
  l_ = flownet::laplacian(b_);
  bc_ = build_incidence(spec_.n, spec_.communication_edges());
  lc_ = flownet::laplacian(bc_);
  b_pinv_ = pseudoinverse(b_);
  b_pinv_norm_ = spectral_norm(b_pinv_);
  kernel_ = null_space(b_, 1e-10);
}

bool Network::physical_connected() const { return is_connected(spec_.n, spec_.edges); }

bool Network::physical_strongly_connected() const {
  return is_strongly_connected(spec_.n, spec_.edges);
}

bool Network::comm_connected() const {
  return is_connected(spec_.n, spec_.communication_edges());
}

}  // namespace flownet
