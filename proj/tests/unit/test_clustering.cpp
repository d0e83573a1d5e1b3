#include "seminmf/clustering.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

using namespace seminmf;
using testing_support::uniform_matrix;

namespace {

std::vector<int> bits(unsigned code, int len) {
  std::vector<int> out(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>((code >> i) & 1u);
  return out;
}

// Independent route: 2x2 contingency table, natural logs converted to bits,
// I = H(Y) + H(C) - H(Y, C).
double nmi_table_oracle(const std::vector<int>& y, const std::vector<int>& c) {
  std::array<std::array<double, 2>, 2> joint{};
  for (std::size_t i = 0; i < y.size(); ++i) joint[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(c[i])] += 1;
  const double n = static_cast<double>(y.size());
  const auto h = [n](const std::vector<double>& counts) {
    double s = 0.0;
    for (double k : counts) {
      if (k > 0) s -= (k / n) * std::log(k / n);
    }
    return s / std::log(2.0);
  };
  const double hy = h({joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]});
  const double hc = h({joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]});
  const double hyc = h({joint[0][0], joint[0][1], joint[1][0], joint[1][1]});
  const double denom = std::max(hy, hc);
  if (denom == 0.0) return 1.0;
  return (hy + hc - hyc) / denom;
}

double acc_oracle(const std::vector<int>& y, const std::vector<int>& c) {
  int hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += y[i] == c[i];
  return hits / static_cast<double>(y.size());
}

LabelVector random_labels(Rng& rng, std::size_t n, int classes) {
  std::vector<int> l(n);
  for (auto& v : l) v = static_cast<int>(rng.index(static_cast<std::uint64_t>(classes)));
  return LabelVector(l, classes);
}

LabelVector permuted(const LabelVector& in, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(in.num_classes));
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
  std::vector<int> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = perm[static_cast<std::size_t>(in[i])];
  return LabelVector(out, in.num_classes);
}

}  // namespace

TEST_CASE("LabelVector checks") {
  CHECK(LabelVector({0, 2, 1}).num_classes == 3);
  CHECK(LabelVector({0, 0}, 4).num_classes == 4);
  CHECK_THROWS_AS(LabelVector({0, -1}), std::invalid_argument);
  CHECK_THROWS_AS(LabelVector({0, 3}, 2), std::invalid_argument);
}

TEST_CASE("acc examples") {
  const LabelVector y({1, 1, 2, 2});
  CHECK(acc(y, y) == 1.0);
  CHECK(acc(y, LabelVector({1, 2, 2, 2})) == 0.75);
  CHECK(acc(LabelVector({0, 0, 1, 1}), LabelVector({1, 1, 0, 0})) == 0.0);
  CHECK_THROWS_AS(acc(y, LabelVector({1, 1})), std::invalid_argument);
}

TEST_CASE("nmi examples") {
  const LabelVector y({0, 0, 1, 1, 2});
  CHECK(nmi(y, y) == doctest::Approx(1.0));
  CHECK(nmi(LabelVector({0, 0, 1, 1}), LabelVector({0, 0, 0, 0}, 2)) == 0.0);
  CHECK(nmi(LabelVector({0, 0, 1, 1}), LabelVector({0, 1, 0, 1})) == doctest::Approx(0.0));
  CHECK(nmi(LabelVector({0, 0, 1, 1}), LabelVector({0, 0, 0, 1})) == doctest::Approx(0.31127812445913294).epsilon(1e-14));
  // Both labelings constant: the same single-block partition.
  CHECK(nmi(LabelVector({1, 1, 1}, 2), LabelVector({0, 0, 0}, 2)) == 1.0);
  CHECK_THROWS_AS(nmi(y, LabelVector({0})), std::invalid_argument);
}

TEST_CASE("exhaustive 4-sample, 2-class tables") {
  int pairs = 0;
  for (unsigned yc = 0; yc < 16; ++yc) {
    for (unsigned cc = 0; cc < 16; ++cc) {
      const std::vector<int> y = bits(yc, 4);
      const std::vector<int> c = bits(cc, 4);
      const LabelVector ly(y, 2);
      const LabelVector lc(c, 2);
      CHECK(acc(ly, lc) == acc_oracle(y, c));
      CHECK(nmi(ly, lc) == doctest::Approx(nmi_table_oracle(y, c)).epsilon(1e-12));
      ++pairs;
    }
  }
  CHECK(pairs == 256);
}

TEST_CASE("nmi permutation invariance fuzz") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.index(40));
    const int ky = 1 + static_cast<int>(rng.index(5));
    const int kc = 1 + static_cast<int>(rng.index(5));
    const LabelVector y = random_labels(rng, n, ky);
    const LabelVector c = random_labels(rng, n, kc);
    const double base = nmi(y, c);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    CHECK(nmi(permuted(y, rng), permuted(c, rng)) == doctest::Approx(base).epsilon(1e-12));
    CHECK(nmi(c, y) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("entropy identities") {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.index(50));
    const int ky = 1 + static_cast<int>(rng.index(6));
    const LabelVector y = random_labels(rng, n, ky);
    const LabelVector c = random_labels(rng, n, 1 + static_cast<int>(rng.index(6)));
    const double hy = entropy_bits(y.labels);
    const double hc = entropy_bits(c.labels);
    CHECK(hy >= 0.0);
    CHECK(hy <= std::log2(static_cast<double>(ky)) + 1e-12);
    CHECK(mutual_information_bits(y.labels, c.labels) <= std::min(hy, hc) + 1e-12);
  }
}

TEST_CASE("majority_map examples") {
  const LabelVector truth({1, 1, 2}, 3);
  CHECK(majority_map({0, 0, 0}, truth).labels == std::vector<int>{1, 1, 1});
  const LabelVector tie({1, 2}, 3);
  CHECK(majority_map({4, 4}, tie).labels == std::vector<int>{1, 1});
  const LabelVector two({0, 0, 0, 1}, 2);
  CHECK(majority_map({0, 1, 2, 2}, two).labels == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("majority mapping never underperforms the single-cluster baseline") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.index(60));
    const LabelVector y = random_labels(rng, n, 3);
    std::vector<int> assign(n);
    for (auto& a : assign) a = static_cast<int>(rng.index(5));
    const double mapped = acc(y, majority_map(assign, y));
    const double baseline = acc(y, majority_map(std::vector<int>(n, 0), y));
    CHECK(mapped >= baseline);
  }
}

TEST_CASE("kmeans with k = 1 returns the mean") {
  const Matrix pts = uniform_matrix(20, 3, -1.0, 1.0, 1);
  const ClusteringResult r = kmeans(pts, 1, 5);
  CHECK(std::all_of(r.assignments.begin(), r.assignments.end(), [](int a) { return a == 0; }));
  CHECK(testing_support::max_abs_diff(r.centroids.row(0), pts.colwise().mean()) < 1e-12);
}

TEST_CASE("kmeans separates two far blobs") {
  Rng rng(3);
  Matrix pts(40, 2);
  for (Index i = 0; i < 40; ++i) {
    const double offset = i < 20 ? 0.0 : 100.0;
    pts(i, 0) = offset + 0.1 * rng.gaussian();
    pts(i, 1) = offset + 0.1 * rng.gaussian();
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ClusteringResult r = kmeans(pts, 2, seed);
    for (Index i = 1; i < 40; ++i) {
      CHECK((r.assignments[static_cast<std::size_t>(i)] == r.assignments[0]) == (i < 20));
    }
  }
}

TEST_CASE("kmeans with k = n has zero inertia") {
  const Matrix pts = uniform_matrix(8, 2, -1.0, 1.0, 2);
  const ClusteringResult r = kmeans(pts, 8, 9);
  CHECK(r.inertia_history.back() == doctest::Approx(0.0));
  std::vector<int> sorted = r.assignments;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());
  CHECK_THROWS_AS(kmeans(pts, 9, 1), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(pts, 0, 1), std::invalid_argument);
}

TEST_CASE("kmeans inertia is nonincreasing and no cluster is left empty") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix pts = uniform_matrix(60, 3, 0.0, 1.0, seed + 40);
    const ClusteringResult r = kmeans(pts, 6, seed);
    for (std::size_t t = 1; t < r.inertia_history.size(); ++t) {
      CHECK(r.inertia_history[t] <= r.inertia_history[t - 1] * (1 + 1e-12));
    }
    std::vector<int> counts(6, 0);
    for (int a : r.assignments) ++counts[static_cast<std::size_t>(a)];
    CHECK(*std::min_element(counts.begin(), counts.end()) > 0);
  }
}

TEST_CASE("kmeans repairs empty clusters on duplicated points") {
  Matrix pts(6, 1);
  pts << 0, 0, 0, 0, 1, 1;
  const ClusteringResult r = kmeans(pts, 3, 1);
  std::vector<int> counts(3, 0);
  for (int a : r.assignments) ++counts[static_cast<std::size_t>(a)];
  CHECK(*std::min_element(counts.begin(), counts.end()) > 0);
}

TEST_CASE("evaluate") {
  Matrix onehot = Matrix::Zero(9, 3);
  std::vector<int> lab(9);
  for (Index i = 0; i < 9; ++i) {
    lab[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
    onehot(i, i % 3) = 1.0;
  }
  const LabelVector truth(lab, 3);
  const ClusterScores s = evaluate(onehot, truth, 3, 4);
  CHECK(s.acc == 1.0);
  CHECK(s.nmi == doctest::Approx(1.0));

  const LabelVector skew({0, 0, 0, 1, 1, 2}, 3);
  const ClusterScores flat = evaluate(Matrix::Constant(6, 2, 0.3), skew, 2, 4);
  CHECK(flat.acc == doctest::Approx(0.5));

  const Matrix v = uniform_matrix(30, 3, 0.0, 1.0, 5);
  Rng rng(6);
  const LabelVector rl = random_labels(rng, 30, 2);
  const ClusterScores a = evaluate(v, rl, 4, 77);
  const ClusterScores b = evaluate(v, rl, 4, 77);
  CHECK(a.acc == b.acc);
  CHECK(a.nmi == b.nmi);
  CHECK_THROWS_AS(evaluate(v, truth, 3, 1), DimensionError);
}
