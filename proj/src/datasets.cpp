#include "seminmf/datasets.hpp"

#include "seminmf/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace seminmf {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string where(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line) + ": ";
}

}  // namespace

LabeledDataset parse_dataset(std::istream& in, const std::string& name, const CsvOptions& options) {
  LabeledDataset ds;
  ds.name = name;
  std::map<std::string, int, std::less<>> label_ids;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::optional<std::size_t> width;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      const std::string_view body = trim(text.substr(1));
      if (body.rfind("labels=", 0) == 0) {
        for (std::string_view l : split(body.substr(7), ',')) {
          if (l.empty()) continue;
          if (label_ids.count(l) != 0) throw DataError(where(name, line_no) + "duplicate label in header");
          label_ids.emplace(std::string(l), static_cast<int>(ds.label_names.size()));
          ds.label_names.emplace_back(l);
        }
      }
      continue;
    }
    const auto fields = split(text, options.delimiter);
    if (!width) {
      width = fields.size();
      if (*width < 2) throw DataError(where(name, line_no) + "need at least one feature and a label");
      if (options.label_column && *options.label_column >= *width) {
        throw DataError(where(name, line_no) + "label column " + std::to_string(*options.label_column) +
                        " does not exist");
      }
    } else if (fields.size() != *width) {
      throw DataError(where(name, line_no) + "expected " + std::to_string(*width) + " fields, found " +
                      std::to_string(fields.size()));
    }
    const std::size_t label_col = options.label_column.value_or(*width - 1);
    std::vector<double> row;
    row.reserve(*width - 1);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) continue;
      double v = 0.0;
      if (!parse_number(fields[c], v) || !std::isfinite(v)) {
        throw DataError(where(name, line_no) + "non-numeric feature '" + std::string(fields[c]) + "'");
      }
      row.push_back(v);
    }
    const std::string_view label = fields[label_col];
    if (label.empty()) throw DataError(where(name, line_no) + "empty label");
    auto it = label_ids.find(label);
    if (it == label_ids.end()) {
      it = label_ids.emplace(std::string(label), static_cast<int>(ds.label_names.size())).first;
      ds.label_names.emplace_back(label);
    }
    labels.push_back(it->second);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(name + ": no samples");

  const Index m = static_cast<Index>(rows.front().size());
  const Index n = static_cast<Index>(rows.size());
  ds.x.resize(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) ds.x(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  ds.labels = LabelVector(std::move(labels), static_cast<int>(ds.label_names.size()));
  return ds;
}

LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_dataset(in, path.stem().string(), options);
}

void write_dataset_csv(std::ostream& out, const LabeledDataset& ds) {
  if (ds.labels.size() != static_cast<std::size_t>(ds.x.cols())) {
    throw DimensionError("write_dataset_csv: label count does not match the sample count");
  }
  out << "# labels=";
  for (int l = 0; l < ds.labels.num_classes; ++l) {
    if (l > 0) out << ',';
    out << (static_cast<std::size_t>(l) < ds.label_names.size() ? ds.label_names[static_cast<std::size_t>(l)]
                                                              : std::to_string(l));
  }
  out << '\n';
  for (Index j = 0; j < ds.x.cols(); ++j) {
    for (Index i = 0; i < ds.x.rows(); ++i) out << format_real(ds.x(i, j)) << ',';
    const int l = ds.labels[static_cast<std::size_t>(j)];
    out << (static_cast<std::size_t>(l) < ds.label_names.size() ? ds.label_names[static_cast<std::size_t>(l)]
                                                              : std::to_string(l))
        << '\n';
  }
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << "# rows=" << m.rows() << " cols=" << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_matrix_csv(out, m);
}

Matrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("matrix csv: missing header");
  long long rows = -1;
  long long cols = -1;
  if (std::sscanf(line.c_str(), "# rows=%lld cols=%lld", &rows, &cols) != 2 || rows < 0 || cols < 0) {
    throw DataError("matrix csv: header must be '# rows=<m> cols=<n>'");
  }
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError("matrix csv: expected " + std::to_string(rows) + " rows");
    const auto fields = split(trim(line), ',');
    if (static_cast<long long>(fields.size()) != cols) {
      throw DataError("matrix csv: row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                      " values, expected " + std::to_string(cols));
    }
    for (long long j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_number(fields[static_cast<std::size_t>(j)], v)) {
        throw DataError("matrix csv: non-numeric value in row " + std::to_string(i));
      }
      m(i, j) = v;
    }
  }
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_matrix_csv(in);
}

Matrix add_gaussian_noise(const Matrix& x, const NoiseSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw std::invalid_argument("noise sigma must be finite and >= 0");
  }
  if (spec.sigma == 0.0 && spec.mu == 0.0) return x;
  Rng rng(spec.seed);
  Matrix out = x;
  for (Index j = 0; j < out.cols(); ++j) {
    for (Index i = 0; i < out.rows(); ++i) out(i, j) += spec.mu + spec.sigma * rng.gaussian();
  }
  return out;
}

LabeledDataset subsample(const LabeledDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("subsample fraction must lie in (0, 1]");
  }
  const std::size_t n = static_cast<std::size_t>(ds.x.cols());
  const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (keep == 0) throw DataError("subsample: no samples selected");

  // Partial Fisher-Yates, then restore the original order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    std::swap(order[i], order[j]);
  }
  order.resize(keep);
  std::sort(order.begin(), order.end());

  LabeledDataset out;
  out.name = ds.name;
  out.label_names = ds.label_names;
  out.x.resize(ds.x.rows(), static_cast<Index>(keep));
  std::vector<int> labels(keep);
  for (std::size_t c = 0; c < keep; ++c) {
    out.x.col(static_cast<Index>(c)) = ds.x.col(static_cast<Index>(order[c]));
    labels[c] = ds.labels[order[c]];
  }
  out.labels = LabelVector(std::move(labels), ds.labels.num_classes);
  return out;
}

Matrix random_matrix(Index m, Index n, double lo, double hi, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("random_matrix: dimensions must be positive");
  if (!(lo < hi)) throw std::invalid_argument("random_matrix: need lo < hi");
  Rng rng(seed);
  Matrix out(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) out(i, j) = rng.uniform(lo, hi);
  }
  return out;
}

SyntheticInstance synthetic_exact(Index m, Index n, Index k, std::uint64_t seed) {
  if (k < 1 || k >= std::min(m, n)) throw DimensionError("synthetic_exact: need 1 <= k < min(m, n)");
  SyntheticInstance s;
  s.u_true = random_matrix(m, k, -1.0, 1.0, derive_seed(seed, 0));
  s.v_true = random_matrix(n, k, 0.0, 1.0, derive_seed(seed, 1));
  s.x = s.u_true * s.v_true.transpose();
  return s;
}

}  // namespace seminmf
