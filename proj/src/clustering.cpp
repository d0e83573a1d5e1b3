#include "seminmf/clustering.hpp"

#include "seminmf/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace seminmf {

namespace {

double squared_distance(const Matrix& points, Index row, const Matrix& centroids, Index c) {
  double s = 0.0;
  for (Index j = 0; j < points.cols(); ++j) {
    const double d = points(row, j) - centroids(c, j);
    s += d * d;
  }
  return s;
}

void check_lengths(const LabelVector& a, const LabelVector& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": label vectors differ in length");
  }
  if (a.size() == 0) throw std::invalid_argument(std::string(what) + ": empty label vectors");
}

// k-means++: first centre uniform, then proportional to squared distance to
// the nearest chosen centre.
Matrix seed_centroids(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  Index first = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] =
          std::min(nearest[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, c - 1));
      total += nearest[static_cast<std::size_t>(i)];
    }
    Index chosen = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double running = 0.0;
      for (Index i = 0; i < n; ++i) {
        running += nearest[static_cast<std::size_t>(i)];
        if (running > target) {
          chosen = i;
          break;
        }
      }
    } else {
      // All remaining points coincide with a centre.
      chosen = static_cast<Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(chosen);
  }
  return centroids;
}

}  // namespace

LabelVector::LabelVector(std::vector<int> values, int classes) : labels(std::move(values)) {
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("LabelVector: negative label");
    max_label = std::max(max_label, l);
  }
  num_classes = classes < 0 ? max_label + 1 : classes;
  if (max_label >= num_classes) {
    throw std::invalid_argument("LabelVector: label out of range");
  }
}

ClusteringResult kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iters) {
  const Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
  if (static_cast<Index>(k) > n) throw std::invalid_argument("kmeans: k exceeds the number of points");

  Rng rng(seed);
  ClusteringResult result;
  result.centroids = seed_centroids(points, k, rng);
  result.assignments.assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist(static_cast<std::size_t>(n), 0.0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, result.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, result.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      dist[static_cast<std::size_t>(i)] = best_d;
      if (result.assignments[static_cast<std::size_t>(i)] != best) {
        result.assignments[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }

    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int a : result.assignments) ++counts[static_cast<std::size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      // Move the point farthest from its centroid, taken from a cluster that
      // keeps at least one member.
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        const int owner = result.assignments[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        if (far < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      if (far < 0) break;
      --counts[static_cast<std::size_t>(result.assignments[static_cast<std::size_t>(far)])];
      result.assignments[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      dist[static_cast<std::size_t>(far)] = 0.0;
      changed = true;
    }

    Matrix sums = Matrix::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) sums.row(result.assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        result.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }

    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      inertia += squared_distance(points, i, result.centroids, result.assignments[static_cast<std::size_t>(i)]);
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) break;
  }
  return result;
}

LabelVector majority_map(const std::vector<int>& assignments, const LabelVector& truth) {
  if (assignments.size() != truth.size()) {
    throw std::invalid_argument("majority_map: assignments and labels differ in length");
  }
  std::map<int, std::vector<int>> votes;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto& tally = votes[assignments[i]];
    if (tally.empty()) tally.assign(static_cast<std::size_t>(truth.num_classes), 0);
    ++tally[static_cast<std::size_t>(truth[i])];
  }
  std::map<int, int> winner;
  for (const auto& [cluster, tally] : votes) {
    // max_element returns the first maximum, i.e. the smallest label.
    winner[cluster] = static_cast<int>(std::max_element(tally.begin(), tally.end()) - tally.begin());
  }
  std::vector<int> mapped(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) mapped[i] = winner[assignments[i]];
  return LabelVector(std::move(mapped), truth.num_classes);
}

double acc(const LabelVector& truth, const LabelVector& predicted) {
  check_lengths(truth, predicted, "acc");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double entropy_bits(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double mutual_information_bits(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mutual_information: length mismatch");
  std::map<int, std::size_t> ca;
  std::map<int, std::size_t> cb;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++joint[{a[i], b[i]}];
  }
  const double n = static_cast<double>(a.size());
  double info = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(ca[key.first]) / n;
    const double py = static_cast<double>(cb[key.second]) / n;
    info += pxy * std::log2(pxy / (px * py));
  }
  return std::max(info, 0.0);
}

double nmi(const LabelVector& truth, const LabelVector& predicted) {
  check_lengths(truth, predicted, "nmi");
  const double hy = entropy_bits(truth.labels);
  const double hc = entropy_bits(predicted.labels);
  const double denom = std::max(hy, hc);
  if (denom <= 0.0) return 1.0;
  const double value = mutual_information_bits(truth.labels, predicted.labels) / denom;
  return std::clamp(value, 0.0, 1.0);
}

ClusterScores evaluate(const Matrix& v, const LabelVector& truth, int k, std::uint64_t seed) {
  if (static_cast<std::size_t>(v.rows()) != truth.size()) {
    throw DimensionError("evaluate: V must have one row per labelled sample");
  }
  const ClusteringResult clusters = kmeans(v, k, seed);
  const LabelVector mapped = majority_map(clusters.assignments, truth);
  return {acc(truth, mapped), nmi(truth, mapped)};
}

}  // namespace seminmf
