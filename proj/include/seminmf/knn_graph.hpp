#pragma once

#include "seminmf/matrix_core.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace seminmf {

/// Symmetric binary p-nearest-neighbour graph over the columns of a data matrix.
///
/// w_ij = 1 when j is among the p nearest columns of i, or i among those of j.
/// Stored as one sorted neighbour list per node; the diagonal is always empty.
class NeighborGraph {
 public:
  NeighborGraph() = default;

  /// Builds a graph from an explicit undirected edge list. Duplicate edges are
  /// merged; self loops and out-of-range endpoints throw DimensionError.
  static NeighborGraph from_edges(Index n, std::size_t p,
                                  std::span<const std::pair<Index, Index>> edges);

  Index size() const { return static_cast<Index>(neighbors_.size()); }
  std::size_t p() const { return p_; }
  std::span<const Index> neighbors(Index i) const { return neighbors_[static_cast<std::size_t>(i)]; }
  bool has_edge(Index i, Index j) const;
  /// Number of unordered edges {i, j}.
  std::size_t edge_count() const;
  /// Dense 0/1 adjacency; intended for tests and small diagnostics.
  Matrix dense() const;

 private:
  std::vector<std::vector<Index>> neighbors_;
  std::size_t p_ = 0;
};

/// Edge weights W (same sparsity as the graph), degrees Dbar_ii = sum_j W_ij,
/// and the Laplacian L = Dbar - W, applied without forming dense n x n storage.
class WeightedLaplacian {
 public:
  struct Entry {
    Index col;
    double weight;
  };

  WeightedLaplacian() = default;
  explicit WeightedLaplacian(std::vector<std::vector<Entry>> rows);

  Index size() const { return static_cast<Index>(rows_.size()); }
  std::span<const Entry> row(Index i) const { return rows_[static_cast<std::size_t>(i)]; }
  const Vector& degrees() const { return degrees_; }
  double weight(Index i, Index j) const;

  /// W V
  Matrix apply_weights(const Matrix& v) const;
  /// Dbar V
  Matrix apply_degrees(const Matrix& v) const;
  /// L V = Dbar V - W V
  Matrix apply(const Matrix& v) const;

  Matrix dense_weights() const;
  Matrix dense_laplacian() const;

 private:
  std::vector<std::vector<Entry>> rows_;
  Vector degrees_;
};

/// Exact p-NN search by Euclidean distance between columns of X.
/// Ties are broken by the lower sample index. Requires 1 <= p < n.
NeighborGraph build_knn_graph(const Matrix& x, std::size_t p);

/// Number of build_knn_graph calls made by the calling thread.
std::size_t knn_graph_build_count();

/// Binary weights: W equals the adjacency.
WeightedLaplacian static_laplacian(const NeighborGraph& g);

/// W_ij = w_ij / max(||V_i - V_j||_2, eps) on the graph's edges; zeros stay zero.
WeightedLaplacian reweight_laplacian(const NeighborGraph& g, const Matrix& v,
                                     EpsilonPolicy policy = {});

/// tr(V^T L V), evaluated as tr(V^T Dbar V) - tr(V^T W V).
double graph_smoothness_l2(const Matrix& v, const WeightedLaplacian& lap);

/// sum over unordered edges {i, j} of ||V_i - V_j||_2 * w_ij.
double graph_smoothness_l21(const Matrix& v, const NeighborGraph& g);

}  // namespace seminmf
