#include "seminmf/solvers.hpp"

#include "seminmf/random.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace seminmf {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

double squared_sum(const Matrix& m) {
  double s = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  }
  return s;
}

double trace_product(const Matrix& a, const Matrix& b) {
  // tr(A^T B) summed column by column.
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) s += a(i, j) * b(i, j);
  }
  return s;
}

Matrix residual(const Matrix& x, const FactorPair& f) { return x - f.u * f.v.transpose(); }

void check_factor_shapes(const Matrix& x, const FactorPair& f, const char* what) {
  if (f.u.rows() != x.rows() || f.v.rows() != x.cols() || f.u.cols() != f.v.cols()) {
    throw DimensionError(std::string(what) + ": X, U, V dimensions do not conform");
  }
}

bool has_graph_terms(double alpha, const WeightedLaplacian& lap) {
  return alpha != 0.0 && lap.size() > 0;
}

void require_laplacian(double alpha, const WeightedLaplacian& lap, Index n, const char* what) {
  if (alpha == 0.0) return;
  if (lap.size() != n) {
    throw DimensionError(std::string(what) + ": alpha > 0 requires a graph over the samples");
  }
}

// U = (X D V) (beta Dhat + V^T D V)^{-1}. Counts a ridge event when the
// system is singular to working precision.
Matrix solve_u(const Matrix& x, const Matrix& v, const Vector& d, const Vector& dhat, double beta,
               int& ridge_events) {
  const Matrix dv = d.asDiagonal() * v;
  const Matrix rhs = x * dv;
  Matrix system = u_system_matrix(v, d, dhat, beta);
  Eigen::LDLT<Matrix> ldlt(system);
  const double tiny = std::numeric_limits<double>::epsilon();
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > tiny)) {
    const double trace = system.trace();
    const double ridge =
        trace > 0.0 ? 1e-12 * trace / static_cast<double>(system.rows()) : EpsilonPolicy{}.epsilon;
    system.diagonal().array() += ridge;
    ldlt.compute(system);
    ++ridge_events;
  }
  // The system matrix is symmetric, so solving M Y = rhs^T gives Y = U^T.
  return ldlt.solve(rhs.transpose()).transpose();
}

// Shared square-root multiplier for SNF, GR SNF and L2,1 SNF:
// V *= sqrt((D Phi+ + D V Omega- + alpha W V) / (D Phi- + D V Omega+ + alpha Dbar V)).
Matrix v_update(const Matrix& v, const UpdateWorkspace& ws, const Vector& d,
                const WeightedLaplacian& lap, double alpha, EpsilonPolicy policy) {
  const Matrix v_omega_neg = v * ws.omega_parts.negative;
  const Matrix v_omega_pos = v * ws.omega_parts.positive;
  const bool graph = has_graph_terms(alpha, lap);
  Matrix wv;
  Matrix dbar_v;
  if (graph) {
    wv = lap.apply_weights(v);
    dbar_v = lap.apply_degrees(v);
  }
  Matrix out(v.rows(), v.cols());
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      double num = d(i) * ws.phi_parts.positive(i, j) + d(i) * v_omega_neg(i, j);
      double den = d(i) * ws.phi_parts.negative(i, j) + d(i) * v_omega_pos(i, j);
      if (graph) {
        num += alpha * wv(i, j);
        den += alpha * dbar_v(i, j);
      }
      if (den < policy.epsilon) den = policy.epsilon;
      out(i, j) = v(i, j) * std::sqrt(num / den);
    }
  }
  return out;
}

SolverState advance(const SolverState& state, FactorPair next, ProxyWeights weights,
                    int ridge_events) {
  SolverState out;
  out.t = state.t + 1;
  out.factors = std::move(next);
  out.weights = std::move(weights);
  out.ridge_events = state.ridge_events + ridge_events;
  out.objective_history = state.objective_history;
  out.proxy_history = state.proxy_history;
  return out;
}

Vector ones(Index n) { return Vector::Ones(n); }

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::nmf:
      return "nmf";
    case Algorithm::snf:
      return "snf";
    case Algorithm::grsnf:
      return "grsnf";
    case Algorithm::l21snf:
      return "l21snf";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "nmf") return Algorithm::nmf;
  if (name == "snf") return Algorithm::snf;
  if (name == "grsnf") return Algorithm::grsnf;
  if (name == "l21snf") return Algorithm::l21snf;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected nmf, snf, grsnf or l21snf)");
}

bool uses_graph(Algorithm a) { return a == Algorithm::grsnf || a == Algorithm::l21snf; }

Interval SolverConfig::u_range() const {
  if (init_u_range) return *init_u_range;
  return algorithm == Algorithm::nmf ? Interval{0.0, 1.0} : Interval{-1.0, 1.0};
}

void SolverConfig::validate(Index m, Index n) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k >= std::min(m, n)) {
    throw DimensionError("k must be smaller than min(m, n) (k=" + std::to_string(k) +
                         ", m=" + std::to_string(m) + ", n=" + std::to_string(n) + ")");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(early_stop_tol >= 0.0)) throw std::invalid_argument("early_stop_tol must be >= 0");
  const Interval ur = u_range();
  for (const Interval& r : {ur, init_v_range}) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
      throw std::invalid_argument("initialization range must satisfy lo < hi");
    }
  }
  if (init_v_range.lo < 0.0) throw std::invalid_argument("V initialization range must be nonnegative");
  if (algorithm == Algorithm::nmf && ur.lo < 0.0) {
    throw std::invalid_argument("NMF requires a nonnegative U initialization range");
  }
  if (uses_graph(algorithm) && (p < 1 || static_cast<Index>(p) >= n)) {
    throw DimensionError("p must satisfy 1 <= p < n");
  }
}

UpdateWorkspace UpdateWorkspace::from(const Matrix& x, const Matrix& u) {
  UpdateWorkspace ws;
  ws.omega = symmetrized(u.transpose() * u);
  ws.omega_parts = split_signs(ws.omega);
  ws.phi = x.transpose() * u;
  ws.phi_parts = split_signs(ws.phi);
  return ws;
}

FactorPair init_factors(const SolverConfig& cfg, Index m, Index n) {
  Rng rng(derive_seed(cfg.seed, stream::init));
  const Interval ur = cfg.u_range();
  FactorPair f{Matrix(m, cfg.k), Matrix(n, cfg.k)};
  for (Index j = 0; j < cfg.k; ++j) {
    for (Index i = 0; i < m; ++i) f.u(i, j) = rng.uniform(ur.lo, ur.hi);
  }
  for (Index j = 0; j < cfg.k; ++j) {
    for (Index i = 0; i < n; ++i) f.v(i, j) = rng.uniform(cfg.init_v_range.lo, cfg.init_v_range.hi);
  }
  return f;
}

ProxyWeights compute_weights(Algorithm algorithm, const Matrix& x, const FactorPair& factors,
                             const NeighborGraph* graph, EpsilonPolicy policy) {
  check_factor_shapes(x, factors, "compute_weights");
  const Index n = x.cols();
  const Index k = factors.u.cols();
  const bool have_graph = graph != nullptr && graph->size() > 0;
  if (have_graph && graph->size() != n) {
    throw DimensionError("compute_weights: graph size does not match the sample count");
  }
  ProxyWeights w;
  switch (algorithm) {
    case Algorithm::nmf:
    case Algorithm::snf:
      w.d = ones(n);
      w.dhat = ones(k);
      break;
    case Algorithm::grsnf: {
      w.d = ones(n);
      const Vector norms = column_norms(factors.u);
      w.dhat.resize(k);
      for (Index i = 0; i < k; ++i) w.dhat(i) = 0.5 * guarded_reciprocal(norms(i), policy);
      if (have_graph) w.lap = static_laplacian(*graph);
      break;
    }
    case Algorithm::l21snf: {
      const Vector res_norms = column_norms(residual(x, factors));
      w.d.resize(n);
      for (Index i = 0; i < n; ++i) w.d(i) = guarded_reciprocal(res_norms(i), policy);
      const Vector norms = column_norms(factors.u);
      w.dhat.resize(k);
      for (Index i = 0; i < k; ++i) w.dhat(i) = guarded_reciprocal(norms(i), policy);
      if (have_graph) w.lap = reweight_laplacian(*graph, factors.v, policy);
      break;
    }
  }
  return w;
}

SolverState initial_state(Algorithm algorithm, const Matrix& x, FactorPair factors,
                          const NeighborGraph* graph, EpsilonPolicy policy) {
  SolverState s;
  s.weights = compute_weights(algorithm, x, factors, graph, policy);
  s.factors = std::move(factors);
  return s;
}

Matrix u_system_matrix(const Matrix& v, const Vector& d, const Vector& dhat, double beta) {
  if (d.size() != v.rows() || dhat.size() != v.cols()) {
    throw DimensionError("u_system_matrix: weight lengths do not match V");
  }
  Matrix m = symmetrized(v.transpose() * (d.asDiagonal() * v));
  for (Index i = 0; i < m.rows(); ++i) m(i, i) += beta * dhat(i);
  return m;
}

SolverState nmf_step(const Matrix& x, const SolverState& state, EpsilonPolicy policy) {
  const FactorPair& f = state.factors;
  check_factor_shapes(x, f, "nmf_step");
  const Matrix xv = x * f.v;
  const Matrix u_vtv = f.u * (f.v.transpose() * f.v);
  FactorPair next{Matrix(f.u.rows(), f.u.cols()), Matrix(f.v.rows(), f.v.cols())};
  for (Index j = 0; j < f.u.cols(); ++j) {
    for (Index i = 0; i < f.u.rows(); ++i) {
      const double den = u_vtv(i, j) < policy.epsilon ? policy.epsilon : u_vtv(i, j);
      next.u(i, j) = f.u(i, j) * (xv(i, j) / den);
    }
  }
  const Matrix xtu = x.transpose() * next.u;
  // The V denominator uses the previous V with the new U.
  const Matrix v_utu = f.v * (next.u.transpose() * next.u);
  for (Index j = 0; j < f.v.cols(); ++j) {
    for (Index i = 0; i < f.v.rows(); ++i) {
      const double den = v_utu(i, j) < policy.epsilon ? policy.epsilon : v_utu(i, j);
      next.v(i, j) = f.v(i, j) * (xtu(i, j) / den);
    }
  }
  ProxyWeights w = compute_weights(Algorithm::nmf, x, next, nullptr, policy);
  return advance(state, std::move(next), std::move(w), 0);
}

SolverState snf_step(const Matrix& x, const SolverState& state, EpsilonPolicy policy) {
  const FactorPair& f = state.factors;
  check_factor_shapes(x, f, "snf_step");
  const Vector d = ones(x.cols());
  int ridge = 0;
  FactorPair next;
  next.u = solve_u(x, f.v, d, ones(f.v.cols()), 0.0, ridge);
  const UpdateWorkspace ws = UpdateWorkspace::from(x, next.u);
  next.v = v_update(f.v, ws, d, WeightedLaplacian{}, 0.0, policy);
  ProxyWeights w = compute_weights(Algorithm::snf, x, next, nullptr, policy);
  return advance(state, std::move(next), std::move(w), ridge);
}

SolverState grsnf_step(const Matrix& x, const SolverState& state, double alpha, double beta,
                       EpsilonPolicy policy) {
  const FactorPair& f = state.factors;
  check_factor_shapes(x, f, "grsnf_step");
  const ProxyWeights& held = state.weights;
  require_laplacian(alpha, held.lap, x.cols(), "grsnf_step");
  const Vector d = ones(x.cols());
  int ridge = 0;
  FactorPair next;
  next.u = solve_u(x, f.v, d, held.dhat, beta, ridge);
  const UpdateWorkspace ws = UpdateWorkspace::from(x, next.u);
  next.v = v_update(f.v, ws, d, held.lap, alpha, policy);

  // The binary graph is static; only Dhat follows U.
  ProxyWeights w;
  w.d = d;
  const Vector norms = column_norms(next.u);
  w.dhat.resize(norms.size());
  for (Index i = 0; i < norms.size(); ++i) w.dhat(i) = 0.5 * guarded_reciprocal(norms(i), policy);
  w.lap = held.lap;
  return advance(state, std::move(next), std::move(w), ridge);
}

SolverState l21snf_step(const Matrix& x, const NeighborGraph& graph, const SolverState& state,
                        double alpha, double beta, EpsilonPolicy policy) {
  const FactorPair& f = state.factors;
  check_factor_shapes(x, f, "l21snf_step");
  const ProxyWeights& held = state.weights;
  require_laplacian(alpha, held.lap, x.cols(), "l21snf_step");
  int ridge = 0;
  FactorPair next;
  next.u = solve_u(x, f.v, held.d, held.dhat, beta, ridge);
  const UpdateWorkspace ws = UpdateWorkspace::from(x, next.u);
  next.v = v_update(f.v, ws, held.d, held.lap, alpha, policy);
  ProxyWeights w = compute_weights(Algorithm::l21snf, x, next, &graph, policy);
  return advance(state, std::move(next), std::move(w), ridge);
}

double objective(Algorithm algorithm, const Matrix& x, const FactorPair& factors,
                 const NeighborGraph* graph, double alpha, double beta) {
  check_factor_shapes(x, factors, "objective");
  const Matrix e = residual(x, factors);
  const bool need_graph = uses_graph(algorithm) && alpha != 0.0;
  if (need_graph && (graph == nullptr || graph->size() != x.cols())) {
    throw DimensionError("objective: alpha > 0 requires a graph over the samples");
  }
  switch (algorithm) {
    case Algorithm::nmf:
    case Algorithm::snf:
      return squared_sum(e);
    case Algorithm::grsnf: {
      double value = squared_sum(e);
      if (need_graph) value += alpha * graph_smoothness_l2(factors.v, static_laplacian(*graph));
      if (beta != 0.0) value += beta * l21_norm(factors.u);
      return value;
    }
    case Algorithm::l21snf: {
      double value = l21_norm(e);
      if (need_graph) value += alpha * graph_smoothness_l21(factors.v, *graph);
      if (beta != 0.0) value += beta * l21_norm(factors.u);
      return value;
    }
  }
  return 0.0;
}

double proxy_loss_with(const Matrix& x, const FactorPair& factors, const ProxyWeights& w,
                       double alpha, double beta) {
  check_factor_shapes(x, factors, "proxy_loss");
  if (w.d.size() != x.cols() || w.dhat.size() != factors.u.cols()) {
    throw DimensionError("proxy_loss: weight lengths do not match the factors");
  }
  require_laplacian(alpha, w.lap, x.cols(), "proxy_loss");
  const Matrix e = residual(x, factors);
  double fit = 0.0;
  for (Index j = 0; j < e.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < e.rows(); ++i) s += e(i, j) * e(i, j);
    fit += w.d(j) * s;
  }
  double value = fit;
  if (alpha != 0.0) value += alpha * graph_smoothness_l2(factors.v, w.lap);
  if (beta != 0.0) {
    double sparse = 0.0;
    for (Index c = 0; c < factors.u.cols(); ++c) {
      double s = 0.0;
      for (Index i = 0; i < factors.u.rows(); ++i) s += factors.u(i, c) * factors.u(i, c);
      sparse += w.dhat(c) * s;
    }
    value += beta * sparse;
  }
  return value;
}

double proxy_loss(const Matrix& x, const FactorPair& factors, const NeighborGraph& graph,
                  double alpha, double beta, EpsilonPolicy policy) {
  const ProxyWeights w = compute_weights(Algorithm::l21snf, x, factors, &graph, policy);
  return proxy_loss_with(x, factors, w, alpha, beta);
}

double truncated_proxy(const Matrix& x, const Matrix& u, const Matrix& v, double alpha,
                       const Vector& d_held, const WeightedLaplacian& lap_held) {
  check_factor_shapes(x, FactorPair{u, v}, "truncated_proxy");
  if (d_held.size() != x.cols()) throw DimensionError("truncated_proxy: D has the wrong length");
  require_laplacian(alpha, lap_held, x.cols(), "truncated_proxy");
  const Matrix xd = x * d_held.asDiagonal();
  const Matrix dv = d_held.asDiagonal() * v;
  const double t1 = trace_product(xd, x);
  const double t2 = trace_product(dv, x.transpose() * u);
  const double t3 = trace_product(u.transpose() * u, v.transpose() * dv);
  double value = t1 - 2.0 * t2 + t3;
  if (alpha != 0.0) value += alpha * graph_smoothness_l2(v, lap_held);
  return value;
}

double auxiliary_value(const Matrix& v, const Matrix& v_prev, const Matrix& x, const Matrix& u,
                       double alpha, const Vector& d_held, const WeightedLaplacian& lap_held) {
  check_factor_shapes(x, FactorPair{u, v}, "auxiliary_value");
  if (v_prev.rows() != v.rows() || v_prev.cols() != v.cols()) {
    throw DimensionError("auxiliary_value: V and V' differ in shape");
  }
  if (d_held.size() != x.cols()) throw DimensionError("auxiliary_value: D has the wrong length");
  require_laplacian(alpha, lap_held, x.cols(), "auxiliary_value");
  const Index n = v.rows();
  const Index k = v.cols();
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      const bool a = v(i, j) > 0.0;
      const bool b = v_prev(i, j) > 0.0;
      if (v(i, j) < 0.0 || v_prev(i, j) < 0.0 || a != b) {
        throw DegenerateError("auxiliary_value: V and V' must share the same positive support");
      }
    }
  }
  const UpdateWorkspace ws = UpdateWorkspace::from(x, u);
  const Matrix dvp_omega_pos = d_held.asDiagonal() * (v_prev * ws.omega_parts.positive);

  double value = trace_product(x * d_held.asDiagonal(), x);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double vp = v_prev(i, j);
      if (vp == 0.0) continue;
      const double vv = v(i, j);
      value += d_held(i) * ws.phi_parts.negative(i, j) * (vv * vv + vp * vp) / vp;
      value += dvp_omega_pos(i, j) * vv * vv / vp;
      value -= 2.0 * d_held(i) * ws.phi_parts.positive(i, j) * vp * (1.0 + std::log(vv / vp));
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (v_prev(i, j) == 0.0) continue;
      for (Index c = 0; c < k; ++c) {
        if (v_prev(i, c) == 0.0) continue;
        const double coeff = d_held(i) * v_prev(i, c) * ws.omega_parts.negative(c, j) * v_prev(i, j);
        if (coeff == 0.0) continue;
        const double ratio = (v(i, c) * v(i, j)) / (v_prev(i, c) * v_prev(i, j));
        value -= coeff * (1.0 + std::log(ratio));
      }
    }
  }
  if (alpha != 0.0) {
    const Matrix dbar_vp = lap_held.apply_degrees(v_prev);
    for (Index j = 0; j < k; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double vp = v_prev(i, j);
        if (vp == 0.0) continue;
        value += alpha * dbar_vp(i, j) * v(i, j) * v(i, j) / vp;
      }
    }
    for (Index i = 0; i < n; ++i) {
      for (const auto& e : lap_held.row(i)) {
        for (Index j = 0; j < k; ++j) {
          const double coeff = e.weight * v_prev(e.col, j) * v_prev(i, j);
          if (coeff == 0.0) continue;
          const double ratio = (v(e.col, j) * v(i, j)) / (v_prev(e.col, j) * v_prev(i, j));
          value -= alpha * coeff * (1.0 + std::log(ratio));
        }
      }
    }
  }
  return value;
}

double kkt_residual_with(const Matrix& x, const FactorPair& factors, const Vector& d,
                         const WeightedLaplacian* lap, double alpha) {
  check_factor_shapes(x, factors, "kkt_residual");
  if (d.size() != x.cols()) throw DimensionError("kkt_residual: D has the wrong length");
  const Matrix& u = factors.u;
  const Matrix& v = factors.v;
  Matrix g = d.asDiagonal() * (v * (u.transpose() * u) - x.transpose() * u);
  if (alpha != 0.0) {
    if (lap == nullptr || lap->size() != x.cols()) {
      throw DimensionError("kkt_residual: alpha > 0 requires a graph over the samples");
    }
    g += alpha * lap->apply(v);
  }
  double worst = 0.0;
  for (Index j = 0; j < g.cols(); ++j) {
    for (Index i = 0; i < g.rows(); ++i) {
      const double r = std::abs(g(i, j) * v(i, j) * v(i, j));
      if (r > worst) worst = r;
    }
  }
  return worst;
}

double kkt_residual(const Matrix& x, const FactorPair& factors, const NeighborGraph* graph,
                    double alpha, EpsilonPolicy policy) {
  const ProxyWeights w = compute_weights(Algorithm::l21snf, x, factors, graph, policy);
  return kkt_residual_with(x, factors, w.d, &w.lap, alpha);
}

bool within_monotone_slack(double previous, double next) {
  return next <= previous * (1.0 + 1e-12) + 1e-9;
}

SolverResult run(const Matrix& x, const SolverConfig& cfg, const std::optional<LabelVector>& labels) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - start).count();
  };

  require_valid(x, "run");
  cfg.validate(x.rows(), x.cols());
  if (cfg.algorithm == Algorithm::nmf && (x.array() < 0.0).any()) {
    throw DataError("NMF requires a nonnegative data matrix");
  }
  if (!(l21_norm(x) > 0.0)) throw DataError("data matrix is identically zero");
  if (labels && labels->size() != static_cast<std::size_t>(x.cols())) {
    throw DimensionError("run: label count does not match the sample count");
  }

  SolverResult result;
  NeighborGraph graph;
  const std::size_t builds_before = knn_graph_build_count();
  if (uses_graph(cfg.algorithm)) {
    graph = build_knn_graph(x, cfg.p);
    result.graph_edges = graph.edge_count();
  }
  const NeighborGraph* graph_ptr = uses_graph(cfg.algorithm) ? &graph : nullptr;

  SolverState state =
      initial_state(cfg.algorithm, x, init_factors(cfg, x.rows(), x.cols()), graph_ptr, cfg.epsilon);
  const double kkt_alpha = uses_graph(cfg.algorithm) ? cfg.alpha : 0.0;

  const auto record = [&](const SolverState& s) {
    const double obj = objective(cfg.algorithm, x, s.factors, graph_ptr, cfg.alpha, cfg.beta);
    result.objective_history.push_back(obj);
    result.proxy_history.push_back(proxy_loss_with(x, s.factors, s.weights, kkt_alpha, cfg.beta));
    result.kkt_history.push_back(
        kkt_residual_with(x, s.factors, s.weights.d, &s.weights.lap, kkt_alpha));
    result.relative_error_history.push_back(relative_error(x, s.factors.u, s.factors.v));
    result.elapsed_ms.push_back(elapsed_ms());
    return obj;
  };

  double previous = record(state);
  for (int t = 0; t < cfg.max_iters; ++t) {
    switch (cfg.algorithm) {
      case Algorithm::nmf:
        state = nmf_step(x, state, cfg.epsilon);
        break;
      case Algorithm::snf:
        state = snf_step(x, state, cfg.epsilon);
        break;
      case Algorithm::grsnf:
        state = grsnf_step(x, state, cfg.alpha, cfg.beta, cfg.epsilon);
        break;
      case Algorithm::l21snf:
        state = l21snf_step(x, graph, state, cfg.alpha, cfg.beta, cfg.epsilon);
        break;
    }
    if (!all_finite(state.factors.u) || !all_finite(state.factors.v)) {
      throw NumericalError("non-finite factor entry at iteration " + std::to_string(state.t),
                           state.t);
    }
    const double current = record(state);
    if (!std::isfinite(current)) {
      throw NumericalError("non-finite objective at iteration " + std::to_string(state.t), state.t);
    }
    if (!within_monotone_slack(previous, current) && result.monotone) {
      result.monotone = false;
      result.first_violation = state.t;
    }
    const bool stop = cfg.early_stop_tol > 0.0 && previous > 0.0 &&
                      std::abs(current - previous) / previous < cfg.early_stop_tol;
    previous = current;
    if (stop) break;
  }

  result.iterations = state.t;
  result.ridge_events = state.ridge_events;
  result.graph_builds = knn_graph_build_count() - builds_before;
  result.factors = std::move(state.factors);
  if (labels) {
    result.scores = evaluate(result.factors.v, *labels, static_cast<int>(cfg.k),
                             derive_seed(cfg.seed, stream::kmeans));
  }
  result.wall_time_s = elapsed_ms() / 1000.0;
  return result;
}

void write_history_csv(std::ostream& out, const SolverResult& result) {
  out << "t,objective,proxy,kkt,rel_error,elapsed_ms\n";
  for (std::size_t t = 0; t < result.objective_history.size(); ++t) {
    out << t << ',' << format_real(result.objective_history[t]) << ','
        << format_real(result.proxy_history[t]) << ',' << format_real(result.kkt_history[t]) << ','
        << format_real(result.relative_error_history[t]) << ',' << format_real(result.elapsed_ms[t])
        << '\n';
  }
}

}  // namespace seminmf
