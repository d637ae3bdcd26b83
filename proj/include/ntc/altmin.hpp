#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ntc/observed.hpp"
#include "ntc/vertex.hpp"

namespace ntc {

/// Mode-k coefficient vector of the alternating-minimization subproblem:
/// ctilde_j = sum over positions t with (U_t)_k = j of
/// scaled_gradient_t * prod_{l != k} theta_l[(U_t)_l].
/// Computed by a single loop over all u positions.
inline std::vector<double> altmin_step_naive(int mode, const ThetaSet& thetas,
                                             std::span<const double> scaled_gradient,
                                             const ObservedData& data) {
  check_theta_dims(thetas, data.shape());
  const int p = data.order();
  std::vector<double> ctilde(static_cast<std::size_t>(data.shape().dim(mode)),
                             0.0);
  for (int t = 0; t < data.u(); ++t) {
    std::uint8_t prod = 1;
    for (int l = 0; l < p; ++l) {
      if (l == mode) continue;
      prod &= thetas[static_cast<std::size_t>(l)]
                    [static_cast<std::size_t>(data.coord(t, l))];
      if (!prod) break;
    }
    if (prod) {
      ctilde[static_cast<std::size_t>(data.coord(t, mode))] +=
          scaled_gradient[static_cast<std::size_t>(t)];
    }
  }
  return ctilde;
}

namespace detail {

// Per-position count of modes whose theta bit is 0. A position contributes
// to the mode-k sum iff its only zero (if any) sits in mode k, which turns
// the inner product loop into one integer compare per position.
inline std::vector<std::uint8_t> zero_counts(const ThetaSet& thetas,
                                             const PatternIndex& pattern) {
  std::vector<std::uint8_t> z(static_cast<std::size_t>(pattern.u()), 0);
  for (int k = 0; k < pattern.order(); ++k) {
    const auto& theta = thetas[static_cast<std::size_t>(k)];
    const auto& col = pattern.mode_coords(k);
    for (int t = 0; t < pattern.u(); ++t) {
      z[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(
          z[static_cast<std::size_t>(t)] +
          (theta[static_cast<std::size_t>(col[static_cast<std::size_t>(t)])] ? 0
                                                                             : 1));
    }
  }
  return z;
}

inline void mode_coefficients(int mode, const ThetaSet& thetas,
                              std::span<const double> scaled_gradient,
                              const PatternIndex& pattern,
                              std::span<const std::uint8_t> z,
                              std::vector<double>& ctilde) {
  const int rk = pattern.dim(mode);
  ctilde.assign(static_cast<std::size_t>(rk), 0.0);
  const auto& theta = thetas[static_cast<std::size_t>(mode)];
  for (int j = 0; j < rk; ++j) {
    // If theta_k[j] is set it contributes no zero itself, so positions with
    // z == 0 qualify; if it is clear, the single zero must be mode k.
    const std::uint8_t target = theta[static_cast<std::size_t>(j)] ? 0 : 1;
    double s = 0.0;
    for (int t : pattern.positions(mode, j)) {
      if (z[static_cast<std::size_t>(t)] == target) {
        s += scaled_gradient[static_cast<std::size_t>(t)];
      }
    }
    ctilde[static_cast<std::size_t>(j)] = s;
  }
}

// Applies the sign rule to ctilde, updates theta and the zero counts.
// Returns the mode objective sum_j min(0, ctilde_j).
inline double apply_sign_rule(int mode, ThetaSet& thetas,
                              const PatternIndex& pattern,
                              std::span<const double> ctilde,
                              std::vector<std::uint8_t>& z) {
  auto& theta = thetas[static_cast<std::size_t>(mode)];
  double obj = 0.0;
  for (int j = 0; j < pattern.dim(mode); ++j) {
    const std::uint8_t bit = ctilde[static_cast<std::size_t>(j)] < 0.0 ? 1 : 0;
    if (bit) obj += ctilde[static_cast<std::size_t>(j)];
    const std::uint8_t old = theta[static_cast<std::size_t>(j)];
    if (bit != old) {
      theta[static_cast<std::size_t>(j)] = bit;
      const int delta = bit ? -1 : 1;
      for (int t : pattern.positions(mode, j)) {
        z[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(
            static_cast<int>(z[static_cast<std::size_t>(t)]) + delta);
      }
    }
  }
  return obj;
}

}  // namespace detail

/// Same result as altmin_step_naive, but iterating over j in [r_k] through
/// the precomputed position lists.
inline std::vector<double> altmin_step_indexed(int mode, const ThetaSet& thetas,
                                               std::span<const double> scaled_gradient,
                                               const PatternIndex& pattern) {
  const std::vector<std::uint8_t> z = detail::zero_counts(thetas, pattern);
  std::vector<double> ctilde;
  detail::mode_coefficients(mode, thetas, scaled_gradient, pattern, z, ctilde);
  return ctilde;
}

namespace detail {

inline double theta_objective(const ThetaSet& thetas,
                              std::span<const double> scaled_gradient,
                              const ObservedData& data) {
  double obj = 0.0;
  const int p = data.order();
  for (int t = 0; t < data.u(); ++t) {
    std::uint8_t prod = 1;
    for (int k = 0; k < p; ++k) {
      prod &= thetas[static_cast<std::size_t>(k)]
                    [static_cast<std::size_t>(data.coord(t, k))];
      if (!prod) break;
    }
    if (prod) obj += scaled_gradient[static_cast<std::size_t>(t)];
  }
  return obj;
}

constexpr int kAltminSweepCap = 10000;

}  // namespace detail

/// Alternating minimization of <scaled_gradient, v(theta)> over binary
/// theta. Cycles modes 1..p; each mode sets theta_j = 1 iff ctilde_j < 0
/// (ties go to 0). Sweeps repeat until the objective improves by less than
/// tol. Naive path: per-mode work is a loop over all u positions.
inline Vertex altmin(const ThetaSet& start, std::span<const double> scaled_gradient,
                     const ObservedData& data, double tol) {
  check_theta_dims(start, data.shape());
  ThetaSet thetas = start;
  const int p = data.order();
  double prev = detail::theta_objective(thetas, scaled_gradient, data);
  for (int sweep = 0; sweep < detail::kAltminSweepCap; ++sweep) {
    double last_mode_obj = prev;
    for (int k = 0; k < p; ++k) {
      const std::vector<double> ctilde =
          altmin_step_naive(k, thetas, scaled_gradient, data);
      auto& theta = thetas[static_cast<std::size_t>(k)];
      last_mode_obj = 0.0;
      for (std::size_t j = 0; j < ctilde.size(); ++j) {
        theta[j] = ctilde[j] < 0.0 ? 1 : 0;
        if (theta[j]) last_mode_obj += ctilde[j];
      }
    }
    if (prev - last_mode_obj < tol) break;
    prev = last_mode_obj;
  }
  return make_vertex(std::move(thetas), data);
}

/// Indexed path: identical sweeps, but each mode update walks the pattern
/// lists with incrementally maintained zero counts.
inline Vertex altmin(const ThetaSet& start, std::span<const double> scaled_gradient,
                     const PatternIndex& pattern, const ObservedData& data,
                     double tol) {
  check_theta_dims(start, data.shape());
  ThetaSet thetas = start;
  const int p = pattern.order();
  std::vector<std::uint8_t> z = detail::zero_counts(thetas, pattern);

  double prev = 0.0;
  for (int t = 0; t < pattern.u(); ++t) {
    if (z[static_cast<std::size_t>(t)] == 0) {
      prev += scaled_gradient[static_cast<std::size_t>(t)];
    }
  }

  std::vector<double> ctilde;
  for (int sweep = 0; sweep < detail::kAltminSweepCap; ++sweep) {
    double last_mode_obj = prev;
    for (int k = 0; k < p; ++k) {
      detail::mode_coefficients(k, thetas, scaled_gradient, pattern, z, ctilde);
      last_mode_obj = detail::apply_sign_rule(k, thetas, pattern, ctilde, z);
    }
    if (prev - last_mode_obj < tol) break;
    prev = last_mode_obj;
  }

  Vertex v;
  v.values_on_u.resize(static_cast<std::size_t>(pattern.u()));
  for (int t = 0; t < pattern.u(); ++t) {
    v.values_on_u[static_cast<std::size_t>(t)] =
        z[static_cast<std::size_t>(t)] == 0 ? 1.0 : 0.0;
  }
  v.thetas = std::move(thetas);
  return v;
}

}  // namespace ntc
