#pragma once

#include <optional>
#include <span>
#include <vector>

#include "flownet/linalg.hpp"

namespace flownet {

/// Directed edge between node indices. Positive flow moves quantity from
/// tail to head.
struct Edge {
  int tail = 0;
  int head = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Physical topology plus the (undirected) communication graph. When
/// comm_edges is empty the communication graph is the undirected version
/// of the physical one.
struct NetworkSpec {
  int n = 0;
  std::vector<Edge> edges;
  std::optional<std::vector<Edge>> comm_edges;

  /// Throws ValidationError on n < 2, out-of-range indices or self-loops.
  void validate() const;

  /// The communication edge list actually in use.
  const std::vector<Edge>& communication_edges() const;
};

/// Incidence matrix (n x m): -1 at the tail, +1 at the head of each column.
Matrix build_incidence(int n, std::span<const Edge> edges);
Matrix build_incidence(const NetworkSpec& spec);

/// L = B B^T.
Matrix laplacian(const Matrix& incidence);

/// Undirected reachability from node 0.
bool is_connected(int n, std::span<const Edge> edges);
/// Both G and its reverse reach every node from node 0.
bool is_strongly_connected(int n, std::span<const Edge> edges);
/// Number of connected components, edges taken as undirected.
int connected_components(int n, std::span<const Edge> edges);

/// Validated network with its derived matrices computed once.
class Network {
 public:
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  int num_nodes() const { return spec_.n; }
  int num_edges() const { return static_cast<int>(spec_.edges.size()); }

  const Matrix& incidence() const { return b_; }
  const Matrix& laplacian() const { return l_; }
  const Matrix& comm_incidence() const { return bc_; }
  const Matrix& comm_laplacian() const { return lc_; }
  const Matrix& incidence_pinv() const { return b_pinv_; }
  double incidence_pinv_norm() const { return b_pinv_norm_; }
  /// Orthonormal basis of ker(B): the edge-space circulations.
  const Matrix& circulations() const { return kernel_; }

  bool physical_connected() const;
  bool physical_strongly_connected() const;
  bool comm_connected() const;

 private:
  NetworkSpec spec_;
  Matrix b_, l_, bc_, lc_, b_pinv_, kernel_;
  double b_pinv_norm_ = 0.0;
};

}  // namespace flownet
