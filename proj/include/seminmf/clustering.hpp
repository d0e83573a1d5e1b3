#pragma once

#include "seminmf/matrix_core.hpp"

#include <cstdint>
#include <vector>

namespace seminmf {

/// Integer class labels in [0, num_classes).
struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;

  LabelVector() = default;
  /// num_classes defaults to max(label) + 1. Throws std::invalid_argument on
  /// negative labels or labels >= num_classes.
  explicit LabelVector(std::vector<int> values, int classes = -1);

  std::size_t size() const { return labels.size(); }
  int operator[](std::size_t i) const { return labels[i]; }
};

struct ClusteringResult {
  std::vector<int> assignments;
  /// One centroid per row.
  Matrix centroids;
  LabelVector mapped_labels;
  /// Within-cluster sum of squares after every Lloyd iteration.
  std::vector<double> inertia_history;
  int iterations = 0;
};

struct ClusterScores {
  double acc = 0.0;
  double nmi = 0.0;
};

/// Lloyd's k-means on the rows of `points` with k-means++ seeding.
/// Equal distances go to the lowest cluster index; an empty cluster takes the
/// point farthest from its own centroid. mapped_labels is left empty.
ClusteringResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters = 300);

/// Every member of a cluster receives the most frequent true label in that
/// cluster (ties to the smaller label).
LabelVector majority_map(const std::vector<int>& assignments, const LabelVector& truth);

double acc(const LabelVector& truth, const LabelVector& predicted);

/// Shannon entropy (base 2) of the empirical label distribution.
double entropy_bits(const std::vector<int>& labels);
double mutual_information_bits(const std::vector<int>& a, const std::vector<int>& b);

/// I(Y, C) / max(H(Y), H(C)). When both entropies vanish (both labelings
/// constant, hence the same partition) the value is 1.
double nmi(const LabelVector& truth, const LabelVector& predicted);

/// k-means on the rows of V, majority mapping, then ACC and NMI against truth.
ClusterScores evaluate(const Matrix& v, const LabelVector& truth, int k, std::uint64_t seed);

}  // namespace seminmf
