#pragma once

#include "seminmf/clustering.hpp"
#include "seminmf/knn_graph.hpp"
#include "seminmf/matrix_core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seminmf {

enum class Algorithm { nmf, snf, grsnf, l21snf };

std::string_view to_string(Algorithm a);
/// Accepts "nmf", "snf", "grsnf", "l21snf"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);
/// GR SNF and L2,1 SNF need the p-NN graph.
bool uses_graph(Algorithm a);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::l21snf;
  Index k = 5;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t p = 5;
  int max_iters = 500;
  EpsilonPolicy epsilon{};
  std::uint64_t seed = 0;
  /// Defaults to [-1, 1], or [0, 1] for NMF.
  std::optional<Interval> init_u_range;
  Interval init_v_range{0.0, 1.0};
  /// Stop once |J(t) - J(t-1)| / J(t-1) < tol. Zero disables early stopping.
  double early_stop_tol = 0.0;

  Interval u_range() const;
  /// Throws DimensionError / std::invalid_argument on an unusable configuration.
  void validate(Index m, Index n) const;
};

/// X ~ U V^T with U (m x k) and V (n x k, nonnegative).
struct FactorPair {
  Matrix u;
  Matrix v;
};

/// The diagonal and graph weights that turn the objective into a weighted
/// trace: D (n entries), Dhat (k entries) and the Laplacian. For NMF and SNF
/// they are identities (D = Dhat = 1, no graph); for GR SNF D = 1 and
/// Dhat = 0.5 / ||U_i||; for L2,1 SNF D = 1/||X_i - U V_i^T||, Dhat = 1/||U_i||
/// and the Laplacian is reweighted by 1/||V_i - V_j||.
struct ProxyWeights {
  Vector d;
  Vector dhat;
  WeightedLaplacian lap;
};

struct SolverState {
  int t = 0;
  FactorPair factors;
  ProxyWeights weights;
  /// Number of U updates that needed a ridge term to solve.
  int ridge_events = 0;
  std::vector<double> objective_history;
  std::vector<double> proxy_history;
};

/// Omega = U^T U and Phi = X^T U with their sign splits.
struct UpdateWorkspace {
  Matrix omega;
  SignSplit omega_parts;
  Matrix phi;
  SignSplit phi_parts;

  static UpdateWorkspace from(const Matrix& x, const Matrix& u);
};

struct NumericalError : std::runtime_error {
  NumericalError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Uniform draws from the configured ranges; U entries first (column-major), then V.
FactorPair init_factors(const SolverConfig& cfg, Index m, Index n);

/// Weights for `algorithm` evaluated at `factors`. `graph` may be null for NMF/SNF.
ProxyWeights compute_weights(Algorithm algorithm, const Matrix& x, const FactorPair& factors,
                             const NeighborGraph* graph, EpsilonPolicy policy = {});

SolverState initial_state(Algorithm algorithm, const Matrix& x, FactorPair factors,
                          const NeighborGraph* graph, EpsilonPolicy policy = {});

// One iteration each: U first with the held weights, then V with the new U and
// the same held weights, then the weights are recomputed at the new factors.
SolverState nmf_step(const Matrix& x, const SolverState& state, EpsilonPolicy policy = {});
SolverState snf_step(const Matrix& x, const SolverState& state, EpsilonPolicy policy = {});
SolverState grsnf_step(const Matrix& x, const SolverState& state, double alpha, double beta,
                       EpsilonPolicy policy = {});
SolverState l21snf_step(const Matrix& x, const NeighborGraph& graph, const SolverState& state,
                        double alpha, double beta, EpsilonPolicy policy = {});

/// beta * Dhat + V^T D V, the matrix inverted by the U update.
Matrix u_system_matrix(const Matrix& v, const Vector& d, const Vector& dhat, double beta);

/// The algorithm's own objective J(U, V). `graph` is required when alpha > 0
/// for GR SNF and L2,1 SNF.
double objective(Algorithm algorithm, const Matrix& x, const FactorPair& factors,
                 const NeighborGraph* graph, double alpha, double beta);

/// tr[(X - U V^T) D (X - U V^T)^T] + alpha tr[V^T L V] + beta tr[U Dhat U^T]
/// with caller-supplied weights.
double proxy_loss_with(const Matrix& x, const FactorPair& factors, const ProxyWeights& w,
                       double alpha, double beta);

/// L2,1 SNF proxy loss with D, Dhat and L computed at (U, V). Equals the L2,1
/// objective whenever no epsilon clamp is active.
double proxy_loss(const Matrix& x, const FactorPair& factors, const NeighborGraph& graph,
                  double alpha, double beta, EpsilonPolicy policy = {});

/// F(V) = tr[X D X^T] - 2 tr[V^T D X^T U] + tr[U^T U V^T D V] + alpha tr[V^T L V]
/// with D and L held.
double truncated_proxy(const Matrix& x, const Matrix& u, const Matrix& v, double alpha,
                       const Vector& d_held, const WeightedLaplacian& lap_held);

/// Upper bound A(V, V') on truncated_proxy built from the log and quadratic
/// majorizers of each term. Requires V' > 0 wherever V > 0; entries with
/// V_ij = V'_ij = 0 contribute nothing. Throws DegenerateError otherwise.
double auxiliary_value(const Matrix& v, const Matrix& v_prev, const Matrix& x, const Matrix& u,
                       double alpha, const Vector& d_held, const WeightedLaplacian& lap_held);

/// max_ij |(-D X^T U + D V U^T U + alpha L V)_ij * V_ij^2| with caller weights.
double kkt_residual_with(const Matrix& x, const FactorPair& factors, const Vector& d,
                         const WeightedLaplacian* lap, double alpha);

/// KKT residual with the L2,1 SNF weights computed at (U, V).
double kkt_residual(const Matrix& x, const FactorPair& factors, const NeighborGraph* graph,
                    double alpha, EpsilonPolicy policy = {});

struct SolverResult {
  FactorPair factors;
  /// One entry per evaluated iterate, starting with t = 0.
  std::vector<double> objective_history;
  std::vector<double> proxy_history;
  std::vector<double> kkt_history;
  std::vector<double> relative_error_history;
  std::vector<double> elapsed_ms;
  double wall_time_s = 0.0;
  int iterations = 0;
  bool monotone = true;
  int first_violation = -1;
  int ridge_events = 0;
  std::size_t graph_builds = 0;
  std::size_t graph_edges = 0;
  std::optional<ClusterScores> scores;
};

/// J(t+1) <= J(t) * (1 + 1e-12) + 1e-9.
bool within_monotone_slack(double previous, double next);

/// Full solve: builds the graph once (GR/L2,1 SNF), iterates cfg.max_iters steps
/// or until early stop, and records one history row per iterate. When labels are
/// given the final V is clustered with k-means (k = cfg.k).
SolverResult run(const Matrix& x, const SolverConfig& cfg,
                 const std::optional<LabelVector>& labels = std::nullopt);

/// CSV with header `t,objective,proxy,kkt,rel_error,elapsed_ms`.
void write_history_csv(std::ostream& out, const SolverResult& result);

}  // namespace seminmf
