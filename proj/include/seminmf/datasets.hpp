#pragma once

#include "seminmf/clustering.hpp"
#include "seminmf/matrix_core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace seminmf {

/// Features x samples data matrix with one label per column.
struct LabeledDataset {
  Matrix x;
  LabelVector labels;
  std::string name;
  /// Original label text, indexed by integer label.
  std::vector<std::string> label_names;
};

struct CsvOptions {
  /// Zero-based label column; empty means the last column.
  std::optional<std::size_t> label_column;
  char delimiter = ',';
};

/// Row-per-instance text: one sample per line, one label column. Lines that
/// start with '#' are header comments; `# labels=a,b,...` fixes the label
/// order, otherwise labels are numbered by first appearance. Blank lines are
/// skipped. Throws DataError on ragged rows, non-numeric features, a missing
/// label column or an unreadable file.
LabeledDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
LabeledDataset parse_dataset(std::istream& in, const std::string& name,
                             const CsvOptions& options = {});

/// Inverse of load_csv: writes the `# labels=` header, then one line per sample.
void write_dataset_csv(std::ostream& out, const LabeledDataset& ds);

/// `# rows=<m> cols=<n>` followed by m comma-separated lines.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);

struct NoiseSpec {
  double sigma = 0.0;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

/// X + N(mu, sigma^2) drawn entrywise in column-major order. sigma = 0
/// returns X unchanged. Throws std::invalid_argument when sigma < 0.
Matrix add_gaussian_noise(const Matrix& x, const NoiseSpec& spec);

/// floor(fraction * n) samples without replacement, kept in their original
/// order. Throws std::invalid_argument unless 0 < fraction <= 1 and DataError
/// when the result would be empty.
LabeledDataset subsample(const LabeledDataset& ds, double fraction, std::uint64_t seed);

/// Entries i.i.d. uniform on [lo, hi), column-major.
Matrix random_matrix(Index m, Index n, double lo, double hi, std::uint64_t seed);

struct SyntheticInstance {
  Matrix x;
  Matrix u_true;
  Matrix v_true;
};

/// U_true uniform on [-1, 1], V_true uniform on [0, 1], X = U_true V_true^T.
SyntheticInstance synthetic_exact(Index m, Index n, Index k, std::uint64_t seed);

}  // namespace seminmf
