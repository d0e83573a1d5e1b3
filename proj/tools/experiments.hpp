#pragma once

#include "seminmf/datasets.hpp"
#include "seminmf/solvers.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seminmf::cli {

/// Bad flags or inconsistent options (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  std::vector<Algorithm> algorithms{Algorithm::l21snf};
  std::optional<std::filesystem::path> data;
  CsvOptions csv;
  /// m, n, k of an exact instance X = U V^T.
  std::optional<std::array<Index, 3>> synthetic;
  /// m, n of a uniform [-1, 1] matrix.
  std::optional<std::array<Index, 2>> random;
  std::vector<Index> k_list{5};
  std::vector<double> alpha_list{0.0};
  std::vector<double> beta_list{0.0};
  std::vector<double> sigma_list{0.0};
  int runs = 20;
  double fraction = 0.9;
  int max_iters = 500;
  std::size_t p = 5;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  double early_stop_tol = 0.0;
  /// Resample the noise field for every run; otherwise one field per sigma.
  bool noise_per_run = true;
  unsigned threads = 1;
};

int cmd_factorize(const ExperimentSpec& spec);
/// Labelled sweep over every (algorithm, k, alpha, beta, sigma) cell.
int cmd_evaluate(const ExperimentSpec& spec);
int cmd_grid_search(const ExperimentSpec& spec);
int cmd_noise_sweep(const ExperimentSpec& spec);
int cmd_converge(const ExperimentSpec& spec);
int cmd_synthetic(const ExperimentSpec& spec);

/// Mean and sample (n - 1) standard deviation; SD is empty for fewer than two values.
struct MeanSd {
  double mean = 0.0;
  std::optional<double> sd;
};
MeanSd mean_sd(const std::vector<double>& values);

/// `<k>_<alpha>_<beta>_<sigma>` with shortest round-trip numbers.
std::string cell_name(Index k, double alpha, double beta, double sigma);

/// First t with J(t) <= J_final + 0.01 |J_final|.
int first_within_one_percent(const std::vector<double>& objective);

}  // namespace seminmf::cli
