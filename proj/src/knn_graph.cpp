#include "seminmf/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace seminmf {

namespace {

thread_local std::size_t g_build_count = 0;

double row_distance(const Matrix& v, Index i, Index j) {
  double s = 0.0;
  for (Index c = 0; c < v.cols(); ++c) {
    const double d = v(i, c) - v(j, c);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

NeighborGraph NeighborGraph::from_edges(Index n, std::size_t p,
                                        std::span<const std::pair<Index, Index>> edges) {
  if (n < 1) throw DimensionError("NeighborGraph: n must be positive");
  NeighborGraph g;
  g.p_ = p;
  g.neighbors_.assign(static_cast<std::size_t>(n), {});
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw DimensionError("NeighborGraph: edge endpoint out of range");
    }
    if (a == b) throw DimensionError("NeighborGraph: self loops are not allowed");
    g.neighbors_[static_cast<std::size_t>(a)].push_back(b);
    g.neighbors_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& row : g.neighbors_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return g;
}

bool NeighborGraph::has_edge(Index i, Index j) const {
  const auto row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), j);
}

std::size_t NeighborGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& row : neighbors_) total += row.size();
  return total / 2;
}

Matrix NeighborGraph::dense() const {
  const Index n = size();
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j : neighbors(i)) a(i, j) = 1.0;
  }
  return a;
}

NeighborGraph build_knn_graph(const Matrix& x, std::size_t p) {
  const Index n = x.cols();
  if (n < 2) throw DimensionError("build_knn_graph: need at least two samples");
  if (p < 1 || static_cast<Index>(p) >= n) {
    throw DimensionError("build_knn_graph: p must satisfy 1 <= p < n (p=" + std::to_string(p) +
                         ", n=" + std::to_string(n) + ")");
  }
  ++g_build_count;

  // Directed p-NN lists, then union-symmetrize.
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(static_cast<std::size_t>(n) * p);
  std::vector<std::pair<double, Index>> candidates(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (Index r = 0; r < x.rows(); ++r) {
        const double d = x(r, i) - x(r, j);
        s += d * d;
      }
      candidates[c++] = {s, j};
    }
    // pair ordering gives (distance, index): ties go to the lower index.
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(p),
                      candidates.end());
    for (std::size_t q = 0; q < p; ++q) edges.emplace_back(i, candidates[q].second);
  }
  return NeighborGraph::from_edges(n, p, edges);
}

std::size_t knn_graph_build_count() { return g_build_count; }

WeightedLaplacian::WeightedLaplacian(std::vector<std::vector<Entry>> rows)
    : rows_(std::move(rows)), degrees_(Vector::Zero(static_cast<Index>(rows_.size()))) {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double d = 0.0;
    for (const Entry& e : rows_[i]) d += e.weight;
    degrees_(static_cast<Index>(i)) = d;
  }
}

double WeightedLaplacian::weight(Index i, Index j) const {
  for (const Entry& e : row(i)) {
    if (e.col == j) return e.weight;
  }
  return 0.0;
}

Matrix WeightedLaplacian::apply_weights(const Matrix& v) const {
  Matrix out = Matrix::Zero(v.rows(), v.cols());
  for (Index i = 0; i < size(); ++i) {
    for (const Entry& e : row(i)) out.row(i) += e.weight * v.row(e.col);
  }
  return out;
}

Matrix WeightedLaplacian::apply_degrees(const Matrix& v) const {
  return degrees_.asDiagonal() * v;
}

Matrix WeightedLaplacian::apply(const Matrix& v) const {
  return apply_degrees(v) - apply_weights(v);
}

Matrix WeightedLaplacian::dense_weights() const {
  const Index n = size();
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (const Entry& e : row(i)) w(i, e.col) = e.weight;
  }
  return w;
}

Matrix WeightedLaplacian::dense_laplacian() const {
  Matrix l = -dense_weights();
  for (Index i = 0; i < size(); ++i) l(i, i) += degrees_(i);
  return l;
}

WeightedLaplacian static_laplacian(const NeighborGraph& g) {
  std::vector<std::vector<WeightedLaplacian::Entry>> rows(static_cast<std::size_t>(g.size()));
  for (Index i = 0; i < g.size(); ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    for (Index j : g.neighbors(i)) r.push_back({j, 1.0});
  }
  return WeightedLaplacian(std::move(rows));
}

WeightedLaplacian reweight_laplacian(const NeighborGraph& g, const Matrix& v,
                                     EpsilonPolicy policy) {
  if (v.rows() != g.size()) {
    throw DimensionError("reweight_laplacian: V must have one row per graph node");
  }
  std::vector<std::vector<WeightedLaplacian::Entry>> rows(static_cast<std::size_t>(g.size()));
  for (Index i = 0; i < g.size(); ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    for (Index j : g.neighbors(i)) {
      r.push_back({j, guarded_reciprocal(row_distance(v, i, j), policy)});
    }
  }
  return WeightedLaplacian(std::move(rows));
}

double graph_smoothness_l2(const Matrix& v, const WeightedLaplacian& lap) {
  if (v.rows() != lap.size()) {
    throw DimensionError("graph_smoothness_l2: V must have one row per graph node");
  }
  const Matrix dv = lap.apply_degrees(v);
  const Matrix wv = lap.apply_weights(v);
  double first = 0.0;
  double second = 0.0;
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      first += v(i, j) * dv(i, j);
      second += v(i, j) * wv(i, j);
    }
  }
  return first - second;
}

double graph_smoothness_l21(const Matrix& v, const NeighborGraph& g) {
  if (v.rows() != g.size()) {
    throw DimensionError("graph_smoothness_l21: V must have one row per graph node");
  }
  double total = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j : g.neighbors(i)) {
      if (j > i) total += row_distance(v, i, j);
    }
  }
  return total;
}

}  // namespace seminmf
