#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ntc/ip_model.hpp"
#include "ntc/objective.hpp"
#include "ntc/observed.hpp"
#include "ntc/separation.hpp"
#include "ntc/simplex.hpp"
#include "ntc/variant.hpp"
#include "ntc/vertex.hpp"

namespace ntc {

enum class StepType { kSigd, kNag, kBpcg, kOracle, kOracleExact };

inline const char* to_string(StepType s) {
  switch (s) {
    case StepType::kSigd: return "sigd";
    case StepType::kNag: return "nag";
    case StepType::kBpcg: return "bpcg";
    case StepType::kOracle: return "lpsep";
    case StepType::kOracleExact: return "lpsep_exact";
  }
  return "?";
}

/// Snapshot handed to the per-iteration hook after each step. Spans point
/// into solver storage and are only valid during the call.
struct IterationTrace {
  long long iteration = 0;
  StepType step = StepType::kSigd;
  std::optional<OracleStatus> oracle_status;
  double obj_value = 0.0;
  double phi = 0.0;
  double best_bound = 0.0;
  int active_size = 0;
  std::span<const double> pro;       // pre-step dot products with active vertices
  std::span<const double> gradient;  // pre-step gradient c
  std::span<const double> iterate;   // post-step normalized iterate
  std::span<const double> weights;   // post-step simplex weights
  const ActiveSet* active = nullptr; // post-step active set
};

struct SolveHooks {
  std::function<void(const IterationTrace&)> on_iteration;
  /// Called with the LP text of the integer program each time the exact
  /// oracle runs (drives --dump-ip).
  std::function<void(long long iteration, std::string_view lp)> on_exact_ip;
};

struct SolveStats {
  long long iterations = 0;
  long long descent_steps = 0;   // SiGD, NAG, or BPCG steps
  long long oracle_calls = 0;    // weak-separation invocations
  long long exact_ip_calls = 0;  // exact integer solves
};

struct SolveResult {
  std::vector<double> completed;  // full tensor, scaled by lambda
  double objective = 0.0;
  double best_bound = 0.0;
  double certified_gap = 0.0;
  double phi = 0.0;
  int active_size = 0;
  SolveStats stats;
  double wall_seconds = 0.0;
};

struct SolveOptions {
  int altmin_restarts = 100;
  int max_rho = kDefaultMaxRho;
  int nag_inner_cap = 100;
  long long max_iterations = 50'000'000;
};

/// Full solver state; the step functions below mutate it. Exposed so the
/// individual steps can be driven and inspected directly.
struct SolverState {
  const ObservedData* data = nullptr;
  std::optional<PatternIndex> pattern;  // built when the variant uses Pattern
  LossContext ctx;
  VariantConfig variant;
  double tol = 1e-4;
  SolveOptions options;
  std::mt19937_64 rng;

  ActiveSet active{false, 0};
  std::vector<double> iterate;  // normalized iterate over U, in [0, 1]
  double obj_value = 0.0;
  double phi = std::numeric_limits<double>::infinity();
  double best_bound = 0.0;
  long long iteration = 0;
  SolveStats stats;
  bool first_oracle_done = false;

  // NAG momentum, kept across descent steps until the active set changes.
  std::vector<double> nag_prev;
  double nag_t = 1.0;
  std::uint64_t active_epoch = 0;
  std::uint64_t nag_epoch = ~0ULL;

  // scratch
  std::vector<double> scaled_point;
  std::vector<double> grad;
  std::vector<double> scaled_grad;
  std::vector<double> pro;

  double lambda() const { return ctx.lambda; }
};

namespace detail {

inline double loss_at_scaled(SolverState& s, std::span<const double> q) {
  s.scaled_point.resize(q.size());
  for (std::size_t t = 0; t < q.size(); ++t) {
    s.scaled_point[t] = s.lambda() * q[t];
  }
  return loss(s.scaled_point, s.ctx);
}

// Exact line search between normalized points; eta applies unchanged in
// normalized space because lambda scales both endpoints.
inline double line_search_eta_normalized(SolverState& s,
                                         std::span<const double> from,
                                         std::span<const double> to) {
  thread_local std::vector<double> a, b;
  a.resize(from.size());
  b.resize(to.size());
  for (std::size_t t = 0; t < from.size(); ++t) {
    a[t] = s.lambda() * from[t];
    b[t] = s.lambda() * to[t];
  }
  return exact_line_search_eta(a, b, s.ctx);
}

}  // namespace detail

inline SolverState make_solver_state(const ObservedData& data, double lambda,
                                     double tol, const VariantConfig& variant,
                                     std::uint64_t seed,
                                     const SolveOptions& options = {}) {
  validate(variant);
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  SolverState s;
  s.data = &data;
  s.ctx = make_loss_context(data, lambda);
  s.variant = variant;
  s.tol = tol;
  s.options = options;
  s.rng.seed(seed);
  if (variant.pattern) s.pattern.emplace(build_pattern_index(data));

  s.active = ActiveSet(variant.sparse, data.u());
  s.active.add(make_vertex(all_ones_thetas(data.shape()), data), 1.0);
  s.iterate.assign(static_cast<std::size_t>(data.u()), 1.0);
  s.obj_value = detail::loss_at_scaled(s, s.iterate);
  return s;
}

/// Simplex gradient descent: one descent step on the active-set weights.
/// `pro` holds the dot products of the scaled gradient with each active
/// vertex.
inline void sigd_step(SolverState& s, std::span<const double> pro) {
  const int k = s.active.size();
  auto& gamma = s.active.weights();

  double mean = 0.0;
  for (int j = 0; j < k; ++j) mean += pro[static_cast<std::size_t>(j)];
  mean /= static_cast<double>(k);

  std::vector<double> d(static_cast<std::size_t>(k));
  bool all_zero = true;
  for (int j = 0; j < k; ++j) {
    d[static_cast<std::size_t>(j)] = pro[static_cast<std::size_t>(j)] - mean;
    if (d[static_cast<std::size_t>(j)] != 0.0) all_zero = false;
  }

  ++s.stats.descent_steps;

  if (all_zero) {
    // Constant pro: the first active vertex is taken only if it does not
    // increase the objective (it cannot when k == 1, where this is a no-op).
    const Vertex& v0 = s.active.vertex(0);
    const double cand = detail::loss_at_scaled(s, v0.values_on_u);
    if (cand <= s.obj_value) {
      s.iterate = v0.values_on_u;
      s.obj_value = cand;
      for (int j = k - 1; j >= 1; --j) s.active.remove(j);
      s.active.weights()[0] = 1.0;
      if (k > 1) ++s.active_epoch;
    }
    return;
  }

  const RatioStep step = max_feasible_step(gamma, d);
  if (step.blocking < 0) return;  // rounding left no positive direction entry
  std::vector<double> direction;
  s.active.combine(d, direction);

  std::vector<double> candidate(s.iterate.size());
  for (std::size_t t = 0; t < s.iterate.size(); ++t) {
    candidate[t] = s.iterate[t] - step.eta * direction[t];
  }

  const double cand_loss = detail::loss_at_scaled(s, candidate);
  if (cand_loss <= s.obj_value) {
    s.iterate = std::move(candidate);
    s.obj_value = cand_loss;
    for (int j = 0; j < k; ++j) {
      gamma[static_cast<std::size_t>(j)] -=
          step.eta * d[static_cast<std::size_t>(j)];
      if (gamma[static_cast<std::size_t>(j)] < 0.0) {
        gamma[static_cast<std::size_t>(j)] = 0.0;
      }
    }
    gamma[static_cast<std::size_t>(step.blocking)] = 0.0;
    s.active.drop_zero_weights();
    ++s.active_epoch;
  } else {
    const double eta = detail::line_search_eta_normalized(s, s.iterate, candidate);
    for (std::size_t t = 0; t < s.iterate.size(); ++t) {
      s.iterate[t] += eta * (candidate[t] - s.iterate[t]);
    }
    for (int j = 0; j < k; ++j) {
      gamma[static_cast<std::size_t>(j)] -=
          eta * step.eta * d[static_cast<std::size_t>(j)];
    }
    s.obj_value = detail::loss_at_scaled(s, s.iterate);
  }
}

/// Nesterov-accelerated projected gradient descent over the weight simplex.
/// Momentum restarts whenever the active set changed since the last call.
inline void nag_descent(SolverState& s) {
  const int k = s.active.size();
  ++s.stats.descent_steps;
  if (k == 1) return;

  auto& gamma = s.active.weights();
  if (s.nag_epoch != s.active_epoch ||
      static_cast<int>(s.nag_prev.size()) != k) {
    s.nag_prev = gamma;
    s.nag_t = 1.0;
    s.nag_epoch = s.active_epoch;
  }

  const double lam = s.lambda();
  const double n = static_cast<double>(s.ctx.n);

  // 1/L step size from the largest multiplicity-weighted row sum; doubled
  // by backtracking when the quadratic model underestimates curvature.
  double row_bound = 0.0;
  for (int j = 0; j < k; ++j) {
    row_bound = std::max(row_bound, s.active.weighted_row_sum(j, s.ctx.mult));
  }
  double L = std::max(2.0 * lam * lam * row_bound / n, 1e-12);

  std::vector<double> q;
  auto g_value = [&](std::span<const double> w) {
    s.active.combine(w, q);
    return detail::loss_at_scaled(s, q);
  };
  std::vector<double> gq, gc, gw;
  auto g_gradient = [&](std::span<const double> w, std::vector<double>& out) {
    s.active.combine(w, gq);
    gw.resize(gq.size());
    for (std::size_t t = 0; t < gq.size(); ++t) gw[t] = lam * gq[t];
    gradient(gw, s.ctx, gc);
    for (double& c : gc) c *= lam;
    s.active.pro(gc, out);
  };

  std::vector<double> x = gamma;
  std::vector<double> x_prev = s.nag_prev;
  double t_cur = s.nag_t;
  double g_cur = s.obj_value;
  std::vector<double> best_x = x;
  double best_g = g_cur;

  std::vector<double> y(x.size()), grad_y(x.size()), p(x.size());
  for (int it = 0; it < s.options.nag_inner_cap; ++it) {
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_cur * t_cur));
    const double beta = (t_cur - 1.0) / t_next;
    for (std::size_t j = 0; j < x.size(); ++j) {
      y[j] = x[j] + beta * (x[j] - x_prev[j]);
    }
    const double g_y = g_value(y);
    g_gradient(y, grad_y);

    double g_p = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      p = y;
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= grad_y[j] / L;
      project_to_simplex(p);
      g_p = g_value(p);
      double model = g_y;
      double dist2 = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double diff = p[j] - y[j];
        model += grad_y[j] * diff;
        dist2 += diff * diff;
      }
      model += 0.5 * L * dist2;
      if (g_p <= model + 1e-15 * (1.0 + std::abs(model))) break;
      L *= 2.0;
    }

    x_prev = x;
    x = p;
    t_cur = t_next;
    if (g_p < best_g) {
      best_g = g_p;
      best_x = x;
    }
    const double improvement = g_cur - g_p;
    g_cur = g_p;
    if (std::abs(improvement) < s.tol / 10.0) break;
  }

  s.nag_prev = x_prev;
  s.nag_t = t_cur;
  s.nag_epoch = s.active_epoch;

  if (best_g <= s.obj_value) {
    gamma = best_x;
    s.active.combine(gamma, s.iterate);
    s.obj_value = detail::loss_at_scaled(s, s.iterate);
  }
}

/// Pairwise step: weight transfer from the away vertex (largest pro) to the
/// local Frank-Wolfe vertex (smallest pro), with exact line search over the
/// transfer amount.
inline void bpcg_step(SolverState& s, std::span<const double> pro) {
  const int k = s.active.size();
  ++s.stats.descent_steps;
  int away = 0, local_fw = 0;
  for (int j = 1; j < k; ++j) {
    if (pro[static_cast<std::size_t>(j)] > pro[static_cast<std::size_t>(away)]) {
      away = j;
    }
    if (pro[static_cast<std::size_t>(j)] <
        pro[static_cast<std::size_t>(local_fw)]) {
      local_fw = j;
    }
  }
  if (away == local_fw) return;

  auto& gamma = s.active.weights();
  const double gamma_a = gamma[static_cast<std::size_t>(away)];

  std::vector<double> to = s.iterate;
  s.active.add_scaled_row(local_fw, gamma_a, to);
  s.active.add_scaled_row(away, -gamma_a, to);

  const double eta = detail::line_search_eta_normalized(s, s.iterate, to);
  const double transfer = eta * gamma_a;
  if (eta == 1.0) {
    s.iterate = std::move(to);
  } else {
    s.active.add_scaled_row(local_fw, transfer, s.iterate);
    s.active.add_scaled_row(away, -transfer, s.iterate);
  }
  gamma[static_cast<std::size_t>(local_fw)] += transfer;
  gamma[static_cast<std::size_t>(away)] = eta == 1.0 ? 0.0 : gamma_a - transfer;
  if (gamma[static_cast<std::size_t>(away)] == 0.0) {
    s.active.remove(away);
    ++s.active_epoch;
  }
  s.obj_value = detail::loss_at_scaled(s, s.iterate);
}

namespace detail {

// Moves the iterate toward a vertex by exact line search and blends the
// weights; merges the vertex if it is already active.
inline void blend_vertex(SolverState& s, Vertex v) {
  const double eta =
      detail::line_search_eta_normalized(s, s.iterate, v.values_on_u);
  if (eta == 0.0) return;
  auto& gamma = s.active.weights();
  if (eta == 1.0) {
    s.iterate = v.values_on_u;
  } else {
    for (std::size_t t = 0; t < s.iterate.size(); ++t) {
      s.iterate[t] += eta * (v.values_on_u[t] - s.iterate[t]);
    }
  }
  for (double& g : gamma) g *= (1.0 - eta);
  const int existing = s.active.find(v.thetas);
  if (existing >= 0) {
    gamma[static_cast<std::size_t>(existing)] += eta;
  } else {
    s.active.add(std::move(v), eta);
    ++s.active_epoch;
  }
  if (eta == 1.0) {
    s.active.drop_zero_weights();
    ++s.active_epoch;
  }
}

}  // namespace detail

/// Weak-separation oracle step. Updates the gap estimate and, on exact
/// answers, the certified lower bound; always line-searches toward the
/// returned vertex when it improves.
inline OracleStatus lpsep_step(SolverState& s, std::span<const double> scaled_grad,
                               bool force_exact,
                               const SolveHooks& hooks = {}) {
  OracleRequest request;
  request.scaled_gradient = scaled_grad;
  double cmin = 0.0;
  for (std::size_t t = 0; t < s.iterate.size(); ++t) {
    cmin += scaled_grad[t] * s.iterate[t];
  }
  request.cmin = cmin;
  request.gap = s.phi;
  request.tol = s.tol;

  SeparationConfig config;
  config.restarts = force_exact ? 0 : s.options.altmin_restarts;
  config.all_ones_first = !s.first_oracle_done;
  config.max_rho = s.options.max_rho;

  const AltMinMode mode = s.pattern ? AltMinMode::kPattern
                          : s.variant.index ? AltMinMode::kIndexRebuild
                                            : AltMinMode::kNaive;
  OracleAnswer answer = weak_separation(
      request, *s.data, s.pattern ? &*s.pattern : nullptr, mode, s.rng, config);
  s.first_oracle_done = true;
  ++s.stats.oracle_calls;

  switch (answer.status) {
    case OracleStatus::kSeparatedAtTarget:
      detail::blend_vertex(s, std::move(answer.vertex));
      break;
    case OracleStatus::kSeparatedBelowTarget:
      detail::blend_vertex(s, std::move(answer.vertex));
      s.phi = std::max(answer.improvement, s.phi / 2.0);
      break;
    case OracleStatus::kExactMinimum: {
      ++s.stats.exact_ip_calls;
      if (hooks.on_exact_ip) {
        hooks.on_exact_ip(s.iteration,
                          emit_ip_model(scaled_grad, *s.data, s.lambda()));
      }
      // First-order convexity bound: f* >= f(x) - g*.
      s.best_bound = std::max(s.best_bound, s.obj_value - answer.improvement);
      s.phi = answer.improvement / 2.0;
      if (answer.improvement > 0.0) {
        detail::blend_vertex(s, std::move(answer.vertex));
      }
      break;
    }
  }
  s.obj_value = detail::loss_at_scaled(s, s.iterate);
  return answer.status;
}

namespace detail {

inline void accumulate_rank_one(std::vector<double>& out, double coef,
                                const ThetaSet& thetas, const Shape& shape) {
  std::vector<double> buf{coef};
  for (int k = 0; k < shape.order(); ++k) {
    const auto& theta = thetas[static_cast<std::size_t>(k)];
    std::vector<double> next(buf.size() * theta.size(), 0.0);
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (buf[i] == 0.0) continue;
      for (std::size_t v = 0; v < theta.size(); ++v) {
        if (theta[v]) next[i * theta.size() + v] = buf[i];
      }
    }
    buf = std::move(next);
  }
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] += buf[i];
}

}  // namespace detail

/// Full tensor reconstructed from the active thetas, scaled by lambda.
inline std::vector<double> reconstruct_full(const ActiveSet& active,
                                            double lambda, const Shape& shape) {
  std::vector<double> out(static_cast<std::size_t>(shape.pi()), 0.0);
  for (int j = 0; j < active.size(); ++j) {
    const double coef = lambda * active.weights()[static_cast<std::size_t>(j)];
    if (coef == 0.0) continue;
    detail::accumulate_rank_one(out, coef, active.vertex(j).thetas, shape);
  }
  return out;
}

/// Blended conditional gradients driver. Alternates cheap descent steps over
/// the active set with weak-separation oracle calls gated by the gap
/// estimate, and stops once the certified gap objVal - bestbd (or the gap
/// estimate, after an exact certification call) falls below tol.
inline SolveResult solve(const ObservedData& data, double lambda, double tol,
                         const VariantConfig& variant, std::uint64_t seed,
                         const SolveOptions& options = {},
                         const SolveHooks& hooks = {}) {
  const auto start_time = std::chrono::steady_clock::now();
  SolverState s = make_solver_state(data, lambda, tol, variant, seed, options);

  while (true) {
    if (s.obj_value - s.best_bound < tol) break;

    if (++s.iteration > options.max_iterations) {
      throw std::runtime_error("solve: iteration limit reached at iteration " +
                               std::to_string(s.iteration));
    }

    // Gradient at the current (unnormalized) iterate, then scaled so that
    // dot products with normalized vertices are in objective units.
    s.scaled_point.resize(s.iterate.size());
    for (std::size_t t = 0; t < s.iterate.size(); ++t) {
      s.scaled_point[t] = lambda * s.iterate[t];
    }
    gradient(s.scaled_point, s.ctx, s.grad);
    s.scaled_grad.resize(s.grad.size());
    for (std::size_t t = 0; t < s.grad.size(); ++t) {
      s.scaled_grad[t] = lambda * s.grad[t];
    }

    s.active.pro(s.scaled_grad, s.pro);

    StepType step_type;
    std::optional<OracleStatus> oracle_status;

    if (s.phi < tol) {
      // The gap estimate says we are done but the bound is not certified
      // yet; resolve with an exact oracle call.
      oracle_status = lpsep_step(s, s.scaled_grad, /*force_exact=*/true, hooks);
      step_type = StepType::kOracleExact;
    } else {
      int away = 0, local_fw = 0;
      for (int j = 1; j < s.active.size(); ++j) {
        if (s.pro[static_cast<std::size_t>(j)] >
            s.pro[static_cast<std::size_t>(away)]) {
          away = j;
        }
        if (s.pro[static_cast<std::size_t>(j)] <
            s.pro[static_cast<std::size_t>(local_fw)]) {
          local_fw = j;
        }
      }
      const double local_gap = s.pro[static_cast<std::size_t>(away)] -
                               s.pro[static_cast<std::size_t>(local_fw)];
      if (local_gap >= s.phi) {
        if (s.variant.bpcg) {
          bpcg_step(s, s.pro);
          step_type = StepType::kBpcg;
        } else if (s.variant.nag) {
          nag_descent(s);
          step_type = StepType::kNag;
        } else {
          sigd_step(s, s.pro);
          step_type = StepType::kSigd;
        }
      } else {
        oracle_status = lpsep_step(s, s.scaled_grad, /*force_exact=*/false, hooks);
        step_type = oracle_status == OracleStatus::kExactMinimum
                        ? StepType::kOracleExact
                        : StepType::kOracle;
      }
    }

    if (hooks.on_iteration) {
      IterationTrace trace;
      trace.iteration = s.iteration;
      trace.step = step_type;
      trace.oracle_status = oracle_status;
      trace.obj_value = s.obj_value;
      trace.phi = s.phi;
      trace.best_bound = s.best_bound;
      trace.active_size = s.active.size();
      trace.pro = s.pro;
      trace.gradient = s.grad;
      trace.iterate = s.iterate;
      trace.weights = s.active.weights();
      trace.active = &s.active;
      hooks.on_iteration(trace);
    }
  }

  SolveResult result;
  result.objective = s.obj_value;
  result.best_bound = s.best_bound;
  result.certified_gap = s.obj_value - s.best_bound;
  result.phi = s.phi;
  result.active_size = s.active.size();
  result.stats = s.stats;
  result.stats.iterations = s.iteration;
  result.completed = reconstruct_full(s.active, lambda, data.shape());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    start_time)
          .count();
  if (result.wall_seconds <= 0.0) result.wall_seconds = 1e-9;
  return result;
}

}  // namespace ntc
