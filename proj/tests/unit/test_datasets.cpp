#include "seminmf/datasets.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

using namespace seminmf;

namespace {

LabeledDataset parse(const std::string& text, const CsvOptions& opt = {}) {
  std::istringstream in(text);
  return parse_dataset(in, "inline", opt);
}

struct Moments {
  double mean = 0, sd = 0, skew = 0, excess_kurtosis = 0;
};

Moments moments(const Matrix& m) {
  const double n = static_cast<double>(m.size());
  Moments r;
  for (Index i = 0; i < m.size(); ++i) r.mean += m.data()[i];
  r.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (Index i = 0; i < m.size(); ++i) {
    const double d = m.data()[i] - r.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  r.sd = std::sqrt(m2);
  r.skew = m3 / std::pow(m2, 1.5);
  r.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return r;
}

}  // namespace

TEST_CASE("two-row csv") {
  const LabeledDataset ds = parse("1,2,g\n3,4,b\n");
  Matrix expected(2, 2);
  expected << 1, 3, 2, 4;
  CHECK(ds.x == expected);
  CHECK(ds.labels.labels == std::vector<int>{0, 1});
  CHECK(ds.labels.num_classes == 2);
  CHECK(ds.label_names == std::vector<std::string>{"g", "b"});
}

TEST_CASE("csv options and header lines") {
  const LabeledDataset ds = parse("# comment\n\nb;1.5;2\n a ; -3 ;4e-1\n", CsvOptions{0, ';'});
  CHECK(ds.x.rows() == 2);
  CHECK(ds.x(0, 1) == -3.0);
  CHECK(ds.x(1, 1) == 0.4);
  CHECK(ds.labels.labels == std::vector<int>{0, 1});
  const LabeledDataset ordered = parse("# labels=b,g\n1,g\n2,b\n");
  CHECK(ordered.labels.labels == std::vector<int>{1, 0});
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(parse("1,2,g\n3,b\n"), DataError);
  CHECK_THROWS_AS(parse("1,x,g\n"), DataError);
  CHECK_THROWS_AS(parse("1,2,g\n", CsvOptions{5, ','}), DataError);
  CHECK_THROWS_AS(parse("# only a header\n"), DataError);
  CHECK_THROWS_AS(parse("1,nan,g\n"), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("ionosphere shape") {
  const LabeledDataset ds = load_csv(std::string(SEMINMF_DATA_DIR) + "/ionosphere.csv");
  CHECK(ds.x.cols() == 351);
  CHECK(ds.x.rows() == 34);
  CHECK(ds.labels.num_classes == 2);
  CHECK(ds.name == "ionosphere");
}

TEST_CASE("dataset round trip is bit-identical") {
  Rng rng(4);
  LabeledDataset ds;
  ds.name = "rt";
  ds.x.resize(5, 7);
  for (Index i = 0; i < ds.x.size(); ++i) ds.x.data()[i] = rng.gaussian() * std::pow(10.0, rng.uniform(-8, 8));
  ds.labels = LabelVector({2, 0, 1, 1, 0, 2, 2}, 3);
  ds.label_names = {"x", "y", "z"};
  std::ostringstream out;
  write_dataset_csv(out, ds);
  std::istringstream in(out.str());
  const LabeledDataset back = parse_dataset(in, "rt");
  CHECK(back.x == ds.x);
  CHECK(back.labels.labels == ds.labels.labels);
  CHECK(back.label_names == ds.label_names);

  const LabeledDataset iono = load_csv(std::string(SEMINMF_DATA_DIR) + "/ionosphere.csv");
  std::ostringstream out2;
  write_dataset_csv(out2, iono);
  std::istringstream in2(out2.str());
  const LabeledDataset iono_back = parse_dataset(in2, "ionosphere");
  CHECK(iono_back.x == iono.x);
  CHECK(iono_back.labels.labels == iono.labels.labels);
}

TEST_CASE("matrix csv round trip") {
  const Matrix m = testing_support::uniform_matrix(4, 3, -1e3, 1e3, 9);
  std::ostringstream out;
  write_matrix_csv(out, m);
  CHECK(out.str().rfind("# rows=4 cols=3\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_matrix_csv(in) == m);
  std::istringstream bad("# rows=2 cols=2\n1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), DataError);
  std::istringstream noheader("1,2\n");
  CHECK_THROWS_AS(read_matrix_csv(noheader), DataError);
}

TEST_CASE("gaussian noise") {
  const Matrix x = testing_support::uniform_matrix(10, 8, -1, 1, 1);
  CHECK(add_gaussian_noise(x, {0.0, 0.0, 5}) == x);

  const Matrix zero = Matrix::Zero(400, 250);
  const Matrix noise = add_gaussian_noise(zero, {0.3, 0.0, 17});
  const Moments mo = moments(noise);
  const double n = static_cast<double>(noise.size());
  CHECK(std::abs(mo.mean) < 3 * 0.3 / std::sqrt(n));
  CHECK(std::abs(mo.sd - 0.3) < 0.01 * 0.3);
  CHECK(std::abs(mo.skew) < 0.05);
  CHECK(std::abs(mo.excess_kurtosis) < 0.1);

  CHECK(add_gaussian_noise(x, {0.1, 0.0, 1}) == add_gaussian_noise(x, {0.1, 0.0, 1}));
  CHECK(add_gaussian_noise(x, {0.1, 0.0, 1}) != add_gaussian_noise(x, {0.1, 0.0, 2}));
  CHECK_THROWS_AS(add_gaussian_noise(x, {-0.1, 0.0, 1}), std::invalid_argument);
}

TEST_CASE("subsample") {
  LabeledDataset ds;
  ds.x.resize(2, 10);
  std::vector<int> lab(10);
  for (Index j = 0; j < 10; ++j) {
    ds.x(0, j) = static_cast<double>(j);
    ds.x(1, j) = static_cast<double>(10 * j);
    lab[static_cast<std::size_t>(j)] = static_cast<int>(j % 3);
  }
  ds.labels = LabelVector(lab, 3);

  const LabeledDataset all = subsample(ds, 1.0, 3);
  CHECK(all.x == ds.x);
  CHECK(all.labels.labels == ds.labels.labels);

  const LabeledDataset nine = subsample(ds, 0.9, 3);
  CHECK(nine.x.cols() == 9);
  for (Index j = 0; j < 9; ++j) {
    const int original = static_cast<int>(nine.x(0, j));
    CHECK(nine.x(1, j) == 10.0 * original);
    CHECK(nine.labels[static_cast<std::size_t>(j)] == original % 3);
    if (j > 0) CHECK(nine.x(0, j) > nine.x(0, j - 1));
  }
  CHECK(subsample(ds, 0.9, 3).x == nine.x);
  CHECK(subsample(ds, 0.5, 3).x != subsample(ds, 0.5, 4).x);
  CHECK_THROWS_AS(subsample(ds, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(subsample(ds, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(subsample(ds, 0.05, 1), DataError);
}

TEST_CASE("random_matrix") {
  const Matrix m = random_matrix(1000, 1000, -1.0, 1.0, 8);
  CHECK(m.minCoeff() >= -1.0);
  CHECK(m.maxCoeff() < 1.0);
  CHECK(std::abs(m.mean()) < 0.01);
  CHECK(random_matrix(3, 3, 0, 1, 5) == random_matrix(3, 3, 0, 1, 5));
  CHECK(random_matrix(3, 3, 0, 1, 5) != random_matrix(3, 3, 0, 1, 6));
  CHECK_THROWS_AS(random_matrix(3, 3, 1, 1, 5), std::invalid_argument);
}

TEST_CASE("synthetic_exact") {
  const SyntheticInstance s = synthetic_exact(60, 30, 5, 3);
  CHECK(l21_norm(s.x - s.u_true * s.v_true.transpose()) == 0.0);
  CHECK(s.v_true.minCoeff() >= 0.0);
  CHECK(s.u_true.minCoeff() < 0.0);
  const Eigen::JacobiSVD<Matrix> svd(s.x);
  const auto sv = svd.singularValues();
  for (Index i = 5; i < sv.size(); ++i) CHECK(sv(i) < 1e-8 * sv(0));

  const SyntheticInstance big = synthetic_exact(10000, 128, 16, 1);
  CHECK(big.x.rows() == 10000);
  CHECK(big.x.cols() == 128);
  CHECK(big.u_true.cols() == 16);
  CHECK_THROWS_AS(synthetic_exact(10, 5, 5, 1), DimensionError);
}
