#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ntc/observed.hpp"

namespace ntc {

/// Aggregated data for the quadratic loss on observed entries. Working per
/// unique index keeps every inner loop at length u; duplicates enter through
/// y_sum and mult.
struct LossContext {
  std::vector<double> y_sum;  // per unique index: sum of y over duplicates
  std::vector<double> mult;   // per unique index: sample count
  double sum_y_squared = 0.0;
  long long n = 0;
  double lambda = 1.0;
};

inline LossContext make_loss_context(const ObservedData& data, double lambda) {
  if (lambda <= 0.0) {
    throw std::invalid_argument("lambda must be positive");
  }
  if (data.n() < 1) {
    throw std::invalid_argument("loss needs at least one sample");
  }
  LossContext ctx;
  ctx.lambda = lambda;
  ctx.n = data.n();
  ctx.y_sum.assign(static_cast<std::size_t>(data.u()), 0.0);
  ctx.mult.resize(static_cast<std::size_t>(data.u()));
  for (int t = 0; t < data.u(); ++t) {
    ctx.mult[static_cast<std::size_t>(t)] =
        static_cast<double>(data.multiplicity(t));
  }
  for (long long i = 0; i < data.n(); ++i) {
    const double y = data.sample_value(i);
    ctx.y_sum[static_cast<std::size_t>(data.sample_position(i))] += y;
    ctx.sum_y_squared += y * y;
  }
  return ctx;
}

inline void check_point_length(std::span<const double> point,
                               const LossContext& ctx) {
  if (point.size() != ctx.y_sum.size()) {
    throw std::invalid_argument("point length does not match |U|");
  }
}

/// (1/n) sum_i (y<i> - psi_{x<i>})^2, evaluated through the aggregated form.
inline double loss(std::span<const double> point, const LossContext& ctx) {
  check_point_length(point, ctx);
  double cross = 0.0;
  double quad = 0.0;
  for (std::size_t t = 0; t < point.size(); ++t) {
    cross += point[t] * ctx.y_sum[t];
    quad += ctx.mult[t] * point[t] * point[t];
  }
  return (ctx.sum_y_squared - 2.0 * cross + quad) / static_cast<double>(ctx.n);
}

/// Gradient of the loss at `point`: c_t = (2/n)(mult_t * point_t - y_sum_t).
inline void gradient(std::span<const double> point, const LossContext& ctx,
                     std::vector<double>& out) {
  check_point_length(point, ctx);
  out.resize(point.size());
  const double scale = 2.0 / static_cast<double>(ctx.n);
  for (std::size_t t = 0; t < point.size(); ++t) {
    out[t] = scale * (ctx.mult[t] * point[t] - ctx.y_sum[t]);
  }
}

inline std::vector<double> gradient(std::span<const double> point,
                                    const LossContext& ctx) {
  std::vector<double> out;
  gradient(point, ctx, out);
  return out;
}

/// Minimizer of the loss over the segment from `from` to `to`, clipped to
/// [0, 1]. A degenerate segment (zero curvature) returns 0 so descent is
/// preserved.
inline double exact_line_search_eta(std::span<const double> from,
                                    std::span<const double> to,
                                    const LossContext& ctx) {
  check_point_length(from, ctx);
  check_point_length(to, ctx);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < from.size(); ++t) {
    const double d = to[t] - from[t];
    num += d * (ctx.y_sum[t] - ctx.mult[t] * from[t]);
    den += ctx.mult[t] * d * d;
  }
  if (den == 0.0) return 0.0;
  const double eta = num / den;
  if (eta < 0.0) return 0.0;
  if (eta > 1.0) return 1.0;
  return eta;
}

struct LineSearchResult {
  double eta = 0.0;
  std::vector<double> point;
};

inline LineSearchResult exact_line_search(std::span<const double> from,
                                          std::span<const double> to,
                                          const LossContext& ctx) {
  LineSearchResult res;
  res.eta = exact_line_search_eta(from, to, ctx);
  res.point.resize(from.size());
  for (std::size_t t = 0; t < from.size(); ++t) {
    res.point[t] = from[t] + res.eta * (to[t] - from[t]);
  }
  return res;
}

/// Normalized mean squared error ||estimate - truth||_F^2 / ||truth||_F^2.
inline double nmse(std::span<const double> estimate,
                   std::span<const double> truth) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("nmse: size mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) {
    throw std::invalid_argument("nmse: truth has zero norm");
  }
  return num / den;
}

}  // namespace ntc
