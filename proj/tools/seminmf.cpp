// seminmf: run the factorization solvers and the clustering protocol from the shell.
#include "experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

using namespace seminmf;
using namespace seminmf::cli;

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream field(item);
    T value{};
    field >> value;
    if (field.fail() || !(field >> std::ws).eof()) throw UsageError(std::string("bad value '") + item + "' for " + flag);
    out.push_back(value);
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return out;
}

unsigned thread_cap() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SEMINMF_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return n;
}

struct RawFlags {
  std::string algo;
  std::string data;
  std::string synthetic;
  std::string random;
  std::string k;
  std::string alpha;
  std::string beta;
  std::string sigma;
  int runs = 20;
  double fraction = 0.9;
  int iters = 500;
  std::size_t p = 5;
  std::uint64_t seed = 0;
  std::string out;
  double early_stop_tol = 0.0;
  std::string noise_mode = "per-run";
  int label_column = -1;
  char delimiter = ',';
};

void add_common(CLI::App* cmd, RawFlags& f) {
  cmd->add_option("--algo", f.algo, "Comma list of nmf, snf, grsnf, l21snf");
  cmd->add_option("--data", f.data, "CSV dataset, one sample per row, label in the last column");
  cmd->add_option("--synthetic", f.synthetic, "m,n,k exact instance X = U V^T");
  cmd->add_option("--random", f.random, "m,n uniform [-1, 1] matrix");
  cmd->add_option("--k", f.k, "Comma list of factor ranks");
  cmd->add_option("--alpha", f.alpha, "Comma list of graph weights");
  cmd->add_option("--beta", f.beta, "Comma list of column-sparsity weights");
  cmd->add_option("--sigma", f.sigma, "Comma list of Gaussian noise levels");
  cmd->add_option("--runs", f.runs, "Runs per cell (seeds base + i)");
  cmd->add_option("--fraction", f.fraction, "Fraction of samples kept per run");
  cmd->add_option("--iters", f.iters, "Iterations per run");
  cmd->add_option("--p", f.p, "Nearest neighbours in the graph");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--early-stop-tol", f.early_stop_tol, "Relative objective change that stops a run; 0 disables");
  cmd->add_option("--noise-mode", f.noise_mode, "per-run or fixed")->check(CLI::IsMember({"per-run", "fixed"}));
  cmd->add_option("--label-column", f.label_column, "Zero-based label column (default: last)");
  cmd->add_option("--delimiter", f.delimiter, "Field delimiter");
}

ExperimentSpec build_spec(const CLI::App& cmd, const RawFlags& f) {
  ExperimentSpec s;
  const std::string name = cmd.get_name();
  const bool synthetic_cmd = name == "synthetic";
  const bool grid_cmd = name == "grid-search";
  if (!f.algo.empty()) {
    s.algorithms.clear();
    for (const std::string& a : parse_list<std::string>(f.algo, "--algo")) {
      try {
        s.algorithms.push_back(parse_algorithm(a));
      } catch (const std::invalid_argument&) {
        throw UsageError("unknown algorithm '" + a + "'");
      }
    }
  } else if (synthetic_cmd) {
    s.algorithms = {Algorithm::l21snf, Algorithm::snf};
  }
  if (!f.data.empty()) s.data = f.data;
  if (!f.synthetic.empty()) {
    const auto v = parse_list<Index>(f.synthetic, "--synthetic");
    if (v.size() != 3) throw UsageError("--synthetic takes m,n,k");
    s.synthetic = std::array<Index, 3>{v[0], v[1], v[2]};
  }
  if (!f.random.empty()) {
    const auto v = parse_list<Index>(f.random, "--random");
    if (v.size() != 2) throw UsageError("--random takes m,n");
    s.random = std::array<Index, 2>{v[0], v[1]};
  }
  if (!f.k.empty()) {
    s.k_list = parse_list<Index>(f.k, "--k");
  } else if (s.synthetic) {
    s.k_list = {(*s.synthetic)[2]};
  }
  if (!f.alpha.empty()) {
    s.alpha_list = parse_list<double>(f.alpha, "--alpha");
  } else if (grid_cmd) {
    s.alpha_list = {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0};
  }
  if (!f.beta.empty()) {
    s.beta_list = parse_list<double>(f.beta, "--beta");
  } else if (grid_cmd) {
    s.beta_list = {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1000.0};
  }
  if (!f.sigma.empty()) {
    s.sigma_list = parse_list<double>(f.sigma, "--sigma");
  } else if (synthetic_cmd) {
    s.sigma_list = {0.0, 0.02, 0.04};
  }
  s.runs = cmd.count("--runs") > 0 || !synthetic_cmd ? f.runs : 5;
  s.fraction = f.fraction;
  s.max_iters = f.iters;
  s.p = f.p;
  s.seed = f.seed;
  s.out = f.out;
  s.early_stop_tol = f.early_stop_tol;
  s.noise_per_run = f.noise_mode == "per-run";
  if (f.label_column >= 0) s.csv.label_column = static_cast<std::size_t>(f.label_column);
  s.csv.delimiter = f.delimiter;
  s.threads = thread_cap();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-nonnegative matrix factorization solvers and clustering experiments"};
  app.require_subcommand(1);
  RawFlags flags;
  struct Entry {
    CLI::App* cmd;
    int (*fn)(const ExperimentSpec&);
  };
  const std::vector<Entry> commands = {
      {app.add_subcommand("factorize", "Factorize one dataset and write U, V and the history"), cmd_factorize},
      {app.add_subcommand("evaluate", "Cluster with the 20-run subsample protocol"), cmd_evaluate},
      {app.add_subcommand("grid-search", "Sweep (alpha, beta) and flag the best cell"), cmd_grid_search},
      {app.add_subcommand("noise-sweep", "Evaluate across Gaussian noise levels"), cmd_noise_sweep},
      {app.add_subcommand("converge", "Log the objective history of one run"), cmd_converge},
      {app.add_subcommand("synthetic", "Relative-error study on generated matrices"), cmd_synthetic},
  };
  for (const Entry& e : commands) add_common(e.cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const Entry& e : commands) {
      if (e.cmd->parsed()) return e.fn(build_spec(*e.cmd, flags));
    }
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }
}
