#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ntc/altmin.hpp"
#include "ntc/exact_oracle.hpp"
#include "ntc/observed.hpp"
#include "ntc/rng.hpp"
#include "ntc/vertex.hpp"

namespace ntc {

enum class OracleStatus {
  kSeparatedAtTarget,    // improvement >= gap target
  kSeparatedBelowTarget, // positive improvement below the target
  kExactMinimum,         // certified global minimizer
};

inline const char* to_string(OracleStatus s) {
  switch (s) {
    case OracleStatus::kSeparatedAtTarget: return "at_target";
    case OracleStatus::kSeparatedBelowTarget: return "below_target";
    case OracleStatus::kExactMinimum: return "exact";
  }
  return "?";
}

struct OracleRequest {
  std::span<const double> scaled_gradient;
  double cmin = 0.0;  // <scaled_gradient, current iterate>
  double gap = std::numeric_limits<double>::infinity();  // target improvement
  double tol = 0.0;   // alternating-minimization sweep tolerance
};

struct OracleAnswer {
  Vertex vertex;
  double improvement = 0.0;  // cmin - <scaled_gradient, vertex>
  OracleStatus status = OracleStatus::kExactMinimum;
};

enum class AltMinMode {
  kNaive,         // per-position loop
  kIndexRebuild,  // position lists rebuilt per call
  kPattern,       // precomputed PatternIndex
};

struct SeparationConfig {
  int restarts = 100;
  bool all_ones_first = false;  // first restart starts from all-ones thetas
  int max_rho = kDefaultMaxRho;
};

namespace detail {

inline ThetaSet random_thetas(const Shape& shape, std::mt19937_64& rng) {
  ThetaSet thetas(static_cast<std::size_t>(shape.order()));
  for (int k = 0; k < shape.order(); ++k) {
    auto& theta = thetas[static_cast<std::size_t>(k)];
    theta.resize(static_cast<std::size_t>(shape.dim(k)));
    for (auto& bit : theta) bit = coin(rng) ? 1 : 0;
  }
  return thetas;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Weak-separation oracle: restarts the alternating-minimization heuristic
/// until a vertex improves the linearized objective by at least the gap
/// target. If all restarts fall short but the best vertex still improves,
/// that vertex is returned as a below-target answer; otherwise the exact
/// solver decides. An infinite gap target disables the heuristic exit, so
/// the answer is always exact in that case.
inline OracleAnswer weak_separation(const OracleRequest& request,
                                    const ObservedData& data,
                                    const PatternIndex* pattern,
                                    AltMinMode mode, std::mt19937_64& rng,
                                    const SeparationConfig& config = {}) {
  std::optional<PatternIndex> local;
  if (mode == AltMinMode::kIndexRebuild) {
    local.emplace(build_pattern_index(data));
    pattern = &*local;
  }

  const bool finite_gap = std::isfinite(request.gap);
  std::optional<Vertex> best;
  double best_improvement = 0.0;

  for (int rep = 0; rep < config.restarts; ++rep) {
    ThetaSet start = (rep == 0 && config.all_ones_first)
                         ? all_ones_thetas(data.shape())
                         : detail::random_thetas(data.shape(), rng);
    Vertex v = mode == AltMinMode::kNaive
                   ? altmin(start, request.scaled_gradient, data, request.tol)
                   : altmin(start, request.scaled_gradient, *pattern, data,
                            request.tol);
    const double improvement =
        request.cmin - detail::dot(request.scaled_gradient, v.values_on_u);
    if (finite_gap && improvement >= request.gap) {
      return {std::move(v), improvement, OracleStatus::kSeparatedAtTarget};
    }
    if (!best || improvement > best_improvement) {
      best_improvement = improvement;
      best = std::move(v);
    }
  }

  if (finite_gap && best && best_improvement > 0.0) {
    return {std::move(*best), best_improvement,
            OracleStatus::kSeparatedBelowTarget};
  }

  ExactOracleResult exact =
      exact_vertex_min(request.scaled_gradient, data, config.max_rho);
  return {std::move(exact.vertex), request.cmin - exact.objective,
          OracleStatus::kExactMinimum};
}

}  // namespace ntc
