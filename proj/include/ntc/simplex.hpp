#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace ntc {

/// Euclidean projection onto the probability simplex (sort-and-threshold).
inline void project_to_simplex(std::vector<double>& x) {
  std::vector<double> sorted(x);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double threshold = 0.0;
  int support = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate =
        (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] > candidate) {
      threshold = candidate;
      support = static_cast<int>(i + 1);
    }
  }
  (void)support;
  for (double& v : x) v = std::max(0.0, v - threshold);
}

struct RatioStep {
  double eta = 0.0;
  int blocking = -1;  // coordinate annihilated at eta; -1 if d has no positive entry
};

/// Largest eta >= 0 with gamma - eta * d >= 0, plus the coordinate that
/// reaches zero there. The minimizing index is reported so the caller can
/// zero it exactly instead of leaving float dust.
inline RatioStep max_feasible_step(std::span<const double> gamma,
                                   std::span<const double> d) {
  RatioStep step;
  double best = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] > 0.0) {
      const double ratio = gamma[i] / d[i];
      if (step.blocking < 0 || ratio < best) {
        best = ratio;
        step.blocking = static_cast<int>(i);
      }
    }
  }
  step.eta = step.blocking >= 0 ? best : 0.0;
  return step;
}

}  // namespace ntc
