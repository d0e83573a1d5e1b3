#include "experiments.hpp"

#include "seminmf/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

namespace seminmf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Inputs {
  std::optional<LabeledDataset> dataset;
  std::string name;
};

struct CellKey {
  Algorithm algorithm;
  Index k;
  double alpha;
  double beta;
  double sigma;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  std::optional<ClusterScores> scores;
  double final_objective = 0.0;
  double final_relative_error = 0.0;
  bool monotone = true;
  int first_violation = -1;
  int iterations = 0;
  double wall_time_s = 0.0;
  double ms_per_iteration = 0.0;
  std::size_t graph_edges = 0;
  int ridge_events = 0;
};

Inputs load_dataset(const ExperimentSpec& spec, bool need_labels) {
  const int sources = static_cast<int>(spec.data.has_value()) + static_cast<int>(spec.synthetic.has_value()) +
                      static_cast<int>(spec.random.has_value());
  if (sources != 1) throw UsageError("give exactly one of --data, --synthetic or --random");
  if (need_labels && !spec.data) throw UsageError("this command needs a labelled dataset (--data)");
  Inputs in;
  if (spec.data) {
    in.dataset = load_csv(*spec.data, spec.csv);
    in.name = in.dataset->name;
  } else if (spec.synthetic) {
    in.name = "synthetic";
  } else {
    in.name = "random";
  }
  return in;
}

// The data matrix for a synthetic or random spec at a given seed.
Matrix generated_matrix(const ExperimentSpec& spec, std::uint64_t seed) {
  const std::uint64_t s = derive_seed(seed, stream::instance);
  if (spec.synthetic) {
    const auto& [m, n, k] = *spec.synthetic;
    return synthetic_exact(m, n, k, s).x;
  }
  const auto& [m, n] = *spec.random;
  return random_matrix(m, n, -1.0, 1.0, s);
}

std::pair<Index, Index> generated_shape(const ExperimentSpec& spec) {
  if (spec.synthetic) {
    const auto& [m, n, k] = *spec.synthetic;
    if (k < 1 || k >= std::min(m, n)) throw UsageError("--synthetic needs 1 <= k < min(m, n)");
    return {m, n};
  }
  const auto& [m, n] = *spec.random;
  if (m < 2 || n < 2) throw UsageError("--random needs m, n >= 2");
  return {m, n};
}

void require_single_cell(const ExperimentSpec& spec, const char* command) {
  if (spec.algorithms.size() != 1 || spec.k_list.size() != 1 || spec.alpha_list.size() != 1 ||
      spec.beta_list.size() != 1 || spec.sigma_list.size() != 1) {
    throw UsageError(std::string(command) + " takes a single algorithm, k, alpha, beta and sigma");
  }
}

void require_lists(const ExperimentSpec& spec) {
  if (spec.algorithms.empty() || spec.k_list.empty() || spec.alpha_list.empty() || spec.beta_list.empty() ||
      spec.sigma_list.empty()) {
    throw UsageError("algorithm, k, alpha, beta and sigma lists must be nonempty");
  }
  if (spec.runs < 1) throw UsageError("--runs must be at least 1");
  if (spec.out.empty()) throw UsageError("--out is required");
  for (double s : spec.sigma_list) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("sigma values must be finite and >= 0");
  }
}

SolverConfig make_config(const ExperimentSpec& spec, const CellKey& cell, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.algorithm = cell.algorithm;
  cfg.k = cell.k;
  cfg.alpha = cell.alpha;
  cfg.beta = cell.beta;
  cfg.p = spec.p;
  cfg.max_iters = spec.max_iters;
  cfg.seed = seed;
  cfg.early_stop_tol = spec.early_stop_tol;
  return cfg;
}

void validate_config(const SolverConfig& cfg, Index m, Index n) {
  try {
    cfg.validate(m, n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<CellKey> enumerate_cells(const ExperimentSpec& spec) {
  std::vector<CellKey> cells;
  for (Algorithm a : spec.algorithms) {
    for (Index k : spec.k_list) {
      for (double alpha : spec.alpha_list) {
        for (double beta : spec.beta_list) {
          for (double sigma : spec.sigma_list) cells.push_back({a, k, alpha, beta, sigma});
        }
      }
    }
  }
  return cells;
}

fs::path cell_dir(const ExperimentSpec& spec, const CellKey& c) {
  fs::path dir = spec.out / "cells" / cell_name(c.k, c.alpha, c.beta, c.sigma);
  if (spec.algorithms.size() > 1) dir /= std::string(to_string(c.algorithm));
  return dir;
}

void prepare_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw DataError("cannot create output directory " + out.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
}

// Runs job(i) for i in [0, count) on up to `threads` workers. The exception of
// the lowest failing index is rethrown.
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F job) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RunRecord summarize_run(const SolverResult& r, int run, std::uint64_t seed) {
  RunRecord rec;
  rec.run = run;
  rec.seed = seed;
  rec.scores = r.scores;
  rec.final_objective = r.objective_history.back();
  rec.final_relative_error = r.relative_error_history.back();
  rec.monotone = r.monotone;
  rec.first_violation = r.first_violation;
  rec.iterations = r.iterations;
  rec.wall_time_s = r.wall_time_s;
  rec.ms_per_iteration =
      r.iterations > 0 ? (r.elapsed_ms.back() - r.elapsed_ms.front()) / r.iterations : 0.0;
  rec.graph_edges = r.graph_edges;
  rec.ridge_events = r.ridge_events;
  return rec;
}

void write_history(const fs::path& path, const SolverResult& r) {
  std::ofstream f = open_out(path);
  write_history_csv(f, r);
}

json stats_json(const std::vector<double>& values) {
  const MeanSd ms = mean_sd(values);
  json j;
  j["mean"] = ms.mean;
  j["sd"] = ms.sd ? json(*ms.sd) : json(nullptr);
  j["values"] = values;
  return j;
}

json cell_json(const CellKey& c) {
  return json{{"algorithm", std::string(to_string(c.algorithm))},
              {"k", c.k},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"sigma", c.sigma}};
}

json config_json(const ExperimentSpec& spec, const std::string& command, const std::string& name) {
  json algos = json::array();
  for (Algorithm a : spec.algorithms) algos.push_back(std::string(to_string(a)));
  return json{{"command", command},
              {"dataset", name},
              {"algorithms", algos},
              {"k", spec.k_list},
              {"alpha", spec.alpha_list},
              {"beta", spec.beta_list},
              {"sigma", spec.sigma_list},
              {"runs", spec.runs},
              {"fraction", spec.fraction},
              {"iters", spec.max_iters},
              {"p", spec.p},
              {"seed", spec.seed},
              {"early_stop_tol", spec.early_stop_tol},
              {"noise_mode", spec.noise_per_run ? "per-run" : "fixed"}};
}

std::string csv_real(double v) { return format_real(v); }

enum class SweepKind { evaluate, grid, noise };

struct CellSummary {
  CellKey key;
  std::vector<RunRecord> runs;
  MeanSd acc;
  MeanSd nmi;
  bool best = false;
};

std::string sd_text(const MeanSd& m) { return m.sd ? csv_real(*m.sd) : std::string(); }

int labelled_sweep(const ExperimentSpec& spec, SweepKind kind) {
  require_lists(spec);
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) throw UsageError("--fraction must lie in (0, 1]");
  const Inputs in = load_dataset(spec, true);
  const LabeledDataset& ds = *in.dataset;
  const Index m = ds.x.rows();
  const Index n_sub = static_cast<Index>(std::floor(spec.fraction * static_cast<double>(ds.x.cols())));
  const std::vector<CellKey> cells = enumerate_cells(spec);
  for (const CellKey& c : cells) validate_config(make_config(spec, c, 0), m, n_sub);
  if (n_sub < 1) throw UsageError("--fraction leaves no samples");

  prepare_out_dir(spec.out);
  for (const CellKey& c : cells) fs::create_directories(cell_dir(spec, c));

  const std::size_t runs = static_cast<std::size_t>(spec.runs);
  std::vector<RunRecord> records(cells.size() * runs);
  parallel_for(records.size(), spec.threads, [&](std::size_t job) {
    const CellKey& c = cells[job / runs];
    const int run = static_cast<int>(job % runs);
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(run);
    // Noise and subset depend only on the run (and sigma), so every algorithm
    // and parameter pair sees the same instances.
    const std::uint64_t noise_seed = derive_seed(spec.noise_per_run ? seed : spec.seed, stream::noise);
    LabeledDataset noisy = ds;
    noisy.x = add_gaussian_noise(ds.x, {c.sigma, 0.0, noise_seed});
    const LabeledDataset sub = subsample(noisy, spec.fraction, derive_seed(seed, stream::subsample));
    const SolverResult r = seminmf::run(sub.x, make_config(spec, c, seed), sub.labels);
    write_history(cell_dir(spec, c) / ("run" + std::to_string(run) + ".csv"), r);
    records[job] = summarize_run(r, run, seed);
  });

  std::vector<CellSummary> summaries;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellSummary s;
    s.key = cells[i];
    s.runs.assign(records.begin() + static_cast<std::ptrdiff_t>(i * runs),
                  records.begin() + static_cast<std::ptrdiff_t>((i + 1) * runs));
    std::vector<double> accs;
    std::vector<double> nmis;
    for (const RunRecord& r : s.runs) {
      accs.push_back(r.scores->acc);
      nmis.push_back(r.scores->nmi);
    }
    s.acc = mean_sd(accs);
    s.nmi = mean_sd(nmis);
    summaries.push_back(std::move(s));
  }

  // Best cell per (algorithm, k, sigma): highest mean ACC, then mean NMI.
  if (kind == SweepKind::grid) {
    std::map<std::tuple<int, Index, double>, std::size_t> best;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
      const CellKey& c = summaries[i].key;
      const auto key = std::make_tuple(static_cast<int>(c.algorithm), c.k, c.sigma);
      const auto it = best.find(key);
      if (it == best.end()) {
        best.emplace(key, i);
        continue;
      }
      const CellSummary& cur = summaries[it->second];
      const CellSummary& cand = summaries[i];
      if (cand.acc.mean > cur.acc.mean || (cand.acc.mean == cur.acc.mean && cand.nmi.mean > cur.nmi.mean)) {
        it->second = i;
      }
    }
    for (const auto& [key, idx] : best) summaries[idx].best = true;
  }

  json cells_json = json::array();
  for (const CellSummary& s : summaries) {
    std::vector<double> accs;
    std::vector<double> nmis;
    std::vector<double> rel;
    std::vector<double> wall;
    bool monotone = true;
    for (const RunRecord& r : s.runs) {
      accs.push_back(r.scores->acc);
      nmis.push_back(r.scores->nmi);
      rel.push_back(r.final_relative_error);
      wall.push_back(r.wall_time_s);
      monotone = monotone && r.monotone;
    }
    json j = cell_json(s.key);
    j["runs"] = s.runs.size();
    j["acc"] = stats_json(accs);
    j["nmi"] = stats_json(nmis);
    j["final_relative_error"] = stats_json(rel);
    j["wall_time_s"] = stats_json(wall);
    j["monotone"] = monotone;
    j["graph_edges"] = s.runs.front().graph_edges;
    if (kind == SweepKind::grid) j["best"] = s.best;
    cells_json.push_back(std::move(j));

    std::ofstream f = open_out(cell_dir(spec, s.key) / "runs.csv");
    f << "run,seed,acc,nmi,final_objective,final_rel_error,monotone,iterations,ridge_events,wall_time_s\n";
    for (const RunRecord& r : s.runs) {
      f << r.run << ',' << r.seed << ',' << csv_real(r.scores->acc) << ',' << csv_real(r.scores->nmi) << ','
        << csv_real(r.final_objective) << ',' << csv_real(r.final_relative_error) << ',' << (r.monotone ? 1 : 0)
        << ',' << r.iterations << ',' << r.ridge_events << ',' << csv_real(r.wall_time_s) << '\n';
    }
  }

  const char* command = kind == SweepKind::grid ? "grid-search" : kind == SweepKind::noise ? "noise-sweep" : "evaluate";
  json summary = config_json(spec, command, in.name);
  summary["samples"] = ds.x.cols();
  summary["features"] = m;
  summary["classes"] = ds.labels.num_classes;
  summary["cells"] = cells_json;

  {
    std::ofstream table = open_out(spec.out / "cells.csv");
    table << "algorithm,k,alpha,beta,sigma,acc_mean,acc_sd,nmi_mean,nmi_sd";
    if (kind == SweepKind::grid) table << ",best";
    table << '\n';
    for (const CellSummary& s : summaries) {
      table << to_string(s.key.algorithm) << ',' << s.key.k << ',' << csv_real(s.key.alpha) << ','
            << csv_real(s.key.beta) << ',' << csv_real(s.key.sigma) << ',' << csv_real(s.acc.mean) << ','
            << sd_text(s.acc) << ',' << csv_real(s.nmi.mean) << ',' << sd_text(s.nmi);
      if (kind == SweepKind::grid) table << ',' << (s.best ? 1 : 0);
      table << '\n';
    }
  }

  if (kind == SweepKind::noise) {
    // Endpoint comparison per (algorithm, k, alpha, beta): smallest vs largest sigma.
    const double lo = *std::min_element(spec.sigma_list.begin(), spec.sigma_list.end());
    const double hi = *std::max_element(spec.sigma_list.begin(), spec.sigma_list.end());
    json trend = json::array();
    std::map<std::tuple<int, Index, double, double>, std::pair<double, double>> ends;
    for (const CellSummary& s : summaries) {
      const auto key = std::make_tuple(static_cast<int>(s.key.algorithm), s.key.k, s.key.alpha, s.key.beta);
      if (s.key.sigma == lo) ends[key].first = s.acc.mean;
      if (s.key.sigma == hi) ends[key].second = s.acc.mean;
    }
    for (const CellSummary& s : summaries) {
      if (s.key.sigma != lo) continue;
      const auto key = std::make_tuple(static_cast<int>(s.key.algorithm), s.key.k, s.key.alpha, s.key.beta);
      json t = cell_json(s.key);
      t.erase("sigma");
      t["sigma_low"] = lo;
      t["sigma_high"] = hi;
      t["acc_low"] = ends[key].first;
      t["acc_high"] = ends[key].second;
      t["decreased"] = ends[key].second < ends[key].first;
      trend.push_back(std::move(t));
    }
    summary["trend"] = trend;
  }
  if (kind == SweepKind::grid) {
    json best = json::array();
    for (const CellSummary& s : summaries) {
      if (!s.best) continue;
      json b = cell_json(s.key);
      b["acc_mean"] = s.acc.mean;
      b["nmi_mean"] = s.nmi.mean;
      best.push_back(std::move(b));
    }
    summary["best"] = best;
  }
  write_json(spec.out / "summary.json", summary);

  for (const CellSummary& s : summaries) {
    std::cout << to_string(s.key.algorithm) << " k=" << s.key.k << " alpha=" << csv_real(s.key.alpha)
              << " beta=" << csv_real(s.key.beta) << " sigma=" << csv_real(s.key.sigma)
              << "  ACC " << 100.0 * s.acc.mean << " +- " << 100.0 * s.acc.sd.value_or(0.0) << "  NMI "
              << 100.0 * s.nmi.mean << " +- " << 100.0 * s.nmi.sd.value_or(0.0) << (s.best ? "  [best]" : "")
              << '\n';
  }
  return 0;
}

// Loads or generates the single data matrix used by factorize and converge.
Matrix single_matrix(const ExperimentSpec& spec, const Inputs& in) {
  if (in.dataset) return in.dataset->x;
  return generated_matrix(spec, spec.seed);
}

}  // namespace

MeanSd mean_sd(const std::vector<double>& values) {
  MeanSd out;
  if (values.empty()) return out;
  double s = 0.0;
  for (double v : values) s += v;
  out.mean = s / static_cast<double>(values.size());
  if (values.size() > 1) {
    double q = 0.0;
    for (double v : values) q += (v - out.mean) * (v - out.mean);
    out.sd = std::sqrt(q / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::string cell_name(Index k, double alpha, double beta, double sigma) {
  return std::to_string(k) + "_" + format_real(alpha) + "_" + format_real(beta) + "_" + format_real(sigma);
}

int first_within_one_percent(const std::vector<double>& objective) {
  if (objective.empty()) return -1;
  const double target = objective.back() + 0.01 * std::abs(objective.back());
  for (std::size_t t = 0; t < objective.size(); ++t) {
    if (objective[t] <= target) return static_cast<int>(t);
  }
  return static_cast<int>(objective.size()) - 1;
}

int cmd_evaluate(const ExperimentSpec& spec) { return labelled_sweep(spec, SweepKind::evaluate); }
int cmd_grid_search(const ExperimentSpec& spec) { return labelled_sweep(spec, SweepKind::grid); }
int cmd_noise_sweep(const ExperimentSpec& spec) { return labelled_sweep(spec, SweepKind::noise); }

int cmd_factorize(const ExperimentSpec& spec) {
  require_lists(spec);
  require_single_cell(spec, "factorize");
  const Inputs in = load_dataset(spec, false);
  if (!in.dataset) generated_shape(spec);
  const CellKey cell{spec.algorithms.front(), spec.k_list.front(), spec.alpha_list.front(),
                     spec.beta_list.front(), spec.sigma_list.front()};
  const SolverConfig cfg = make_config(spec, cell, spec.seed);
  Matrix x = single_matrix(spec, in);
  x = add_gaussian_noise(x, {cell.sigma, 0.0, derive_seed(spec.seed, stream::noise)});
  validate_config(cfg, x.rows(), x.cols());

  std::optional<LabelVector> labels;
  if (in.dataset) labels = in.dataset->labels;
  const SolverResult r = run(x, cfg, labels);

  prepare_out_dir(spec.out);
  write_history(spec.out / "history.csv", r);
  write_matrix_csv(spec.out / "U.csv", r.factors.u);
  write_matrix_csv(spec.out / "V.csv", r.factors.v);
  json summary = config_json(spec, "factorize", in.name);
  summary["samples"] = x.cols();
  summary["features"] = x.rows();
  summary["iterations"] = r.iterations;
  summary["final_objective"] = r.objective_history.back();
  summary["final_relative_error"] = r.relative_error_history.back();
  summary["monotone"] = r.monotone;
  summary["first_violation"] = r.first_violation;
  summary["ridge_events"] = r.ridge_events;
  summary["graph_edges"] = r.graph_edges;
  summary["wall_time_s"] = r.wall_time_s;
  if (r.scores) summary["scores"] = {{"acc", r.scores->acc}, {"nmi", r.scores->nmi}};
  write_json(spec.out / "summary.json", summary);
  std::cout << to_string(cell.algorithm) << ": " << r.iterations << " iterations, objective "
            << format_real(r.objective_history.back()) << ", relative error "
            << format_real(r.relative_error_history.back()) << (r.monotone ? "" : ", NOT monotone") << '\n';
  return 0;
}

int cmd_converge(const ExperimentSpec& spec) {
  require_lists(spec);
  require_single_cell(spec, "converge");
  const Inputs in = load_dataset(spec, false);
  if (!in.dataset) generated_shape(spec);
  const CellKey cell{spec.algorithms.front(), spec.k_list.front(), spec.alpha_list.front(),
                     spec.beta_list.front(), spec.sigma_list.front()};
  const SolverConfig cfg = make_config(spec, cell, spec.seed);
  Matrix x = single_matrix(spec, in);
  x = add_gaussian_noise(x, {cell.sigma, 0.0, derive_seed(spec.seed, stream::noise)});
  validate_config(cfg, x.rows(), x.cols());
  const SolverResult r = run(x, cfg);

  prepare_out_dir(spec.out);
  write_history(spec.out / "history.csv", r);
  const int within = first_within_one_percent(r.objective_history);
  json summary = config_json(spec, "converge", in.name);
  summary["iterations"] = r.iterations;
  summary["initial_objective"] = r.objective_history.front();
  summary["final_objective"] = r.objective_history.back();
  summary["final_relative_error"] = r.relative_error_history.back();
  summary["first_within_1pct"] = within;
  summary["monotone"] = r.monotone;
  summary["first_violation"] = r.first_violation;
  summary["wall_time_s"] = r.wall_time_s;
  write_json(spec.out / "summary.json", summary);
  std::cout << to_string(cell.algorithm) << ": objective " << format_real(r.objective_history.front()) << " -> "
            << format_real(r.objective_history.back()) << ", within 1% of final at t=" << within
            << (r.monotone ? "" : ", NOT monotone") << '\n';
  return 0;
}

int cmd_synthetic(const ExperimentSpec& spec) {
  require_lists(spec);
  const Inputs in = load_dataset(spec, false);
  if (in.dataset) throw UsageError("synthetic takes --synthetic m,n,k or --random m,n, not --data");
  const auto [m, n] = generated_shape(spec);
  const std::vector<CellKey> cells = enumerate_cells(spec);
  for (const CellKey& c : cells) validate_config(make_config(spec, c, 0), m, n);

  prepare_out_dir(spec.out);
  for (const CellKey& c : cells) fs::create_directories(cell_dir(spec, c));

  const std::size_t runs = static_cast<std::size_t>(spec.runs);
  std::vector<RunRecord> records(cells.size() * runs);
  parallel_for(records.size(), spec.threads, [&](std::size_t job) {
    const CellKey& c = cells[job / runs];
    const int run = static_cast<int>(job % runs);
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(run);
    const std::uint64_t noise_seed = derive_seed(spec.noise_per_run ? seed : spec.seed, stream::noise);
    const Matrix x = add_gaussian_noise(generated_matrix(spec, seed), {c.sigma, 0.0, noise_seed});
    const SolverResult r = seminmf::run(x, make_config(spec, c, seed));
    write_history(cell_dir(spec, c) / ("run" + std::to_string(run) + ".csv"), r);
    records[job] = summarize_run(r, run, seed);
  });

  json cells_json = json::array();
  std::map<std::tuple<Index, double, double, double>, std::map<int, std::vector<double>>> by_algorithm;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellKey& c = cells[i];
    std::vector<double> rel;
    std::vector<double> wall;
    std::vector<double> per_iter;
    bool monotone = true;
    std::ofstream f = open_out(cell_dir(spec, c) / "runs.csv");
    f << "run,seed,final_rel_error,final_objective,monotone,iterations,ridge_events,wall_time_s,ms_per_iteration\n";
    for (std::size_t r = 0; r < runs; ++r) {
      const RunRecord& rec = records[i * runs + r];
      rel.push_back(rec.final_relative_error);
      wall.push_back(rec.wall_time_s);
      per_iter.push_back(rec.ms_per_iteration);
      monotone = monotone && rec.monotone;
      f << rec.run << ',' << rec.seed << ',' << csv_real(rec.final_relative_error) << ','
        << csv_real(rec.final_objective) << ',' << (rec.monotone ? 1 : 0) << ',' << rec.iterations << ','
        << rec.ridge_events << ',' << csv_real(rec.wall_time_s) << ',' << csv_real(rec.ms_per_iteration) << '\n';
    }
    by_algorithm[std::make_tuple(c.k, c.alpha, c.beta, c.sigma)][static_cast<int>(c.algorithm)] = rel;
    json j = cell_json(c);
    j["runs"] = runs;
    j["final_relative_error"] = stats_json(rel);
    j["max_final_relative_error"] = *std::max_element(rel.begin(), rel.end());
    j["all_below_1e-3"] = std::all_of(rel.begin(), rel.end(), [](double v) { return v < 1e-3; });
    j["monotone"] = monotone;
    j["wall_time_s"] = stats_json(wall);
    j["ms_per_iteration"] = stats_json(per_iter);
    cells_json.push_back(std::move(j));
    std::cout << to_string(c.algorithm) << " k=" << c.k << " sigma=" << csv_real(c.sigma)
              << "  final relative error mean " << format_real(mean_sd(rel).mean) << " max "
              << format_real(*std::max_element(rel.begin(), rel.end())) << (monotone ? "" : "  NOT monotone")
              << '\n';
  }

  json comparisons = json::array();
  for (const auto& [key, algos] : by_algorithm) {
    const auto l21 = algos.find(static_cast<int>(Algorithm::l21snf));
    const auto snf = algos.find(static_cast<int>(Algorithm::snf));
    if (l21 == algos.end() || snf == algos.end()) continue;
    bool all = true;
    for (std::size_t r = 0; r < runs; ++r) all = all && l21->second[r] <= snf->second[r];
    comparisons.push_back({{"k", std::get<0>(key)},
                           {"alpha", std::get<1>(key)},
                           {"beta", std::get<2>(key)},
                           {"sigma", std::get<3>(key)},
                           {"l21snf_le_snf_every_seed", all}});
  }

  json summary = config_json(spec, "synthetic", in.name);
  summary["rows"] = m;
  summary["cols"] = n;
  if (spec.synthetic) summary["instance_rank"] = (*spec.synthetic)[2];
  summary["cells"] = cells_json;
  summary["comparisons"] = comparisons;
  write_json(spec.out / "summary.json", summary);
  return 0;
}

}  // namespace seminmf::cli
