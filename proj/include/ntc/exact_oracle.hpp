#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntc/altmin.hpp"
#include "ntc/observed.hpp"
#include "ntc/vertex.hpp"

namespace ntc {

struct ExactOracleResult {
  Vertex vertex;
  double objective = 0.0;
  long long nodes = 0;
};

namespace detail {

struct BnbCoordinate {
  int mode = 0;
  int index = 0;
};

class BranchAndBound {
 public:
  BranchAndBound(std::span<const double> c, const ObservedData& data,
                 const PatternIndex& pattern)
      : c_(c), data_(data), pattern_(pattern) {}

  ExactOracleResult run() {
    order_ = coordinate_order();
    assignment_.assign(order_.size(), -1);
    zeros_.assign(static_cast<std::size_t>(data_.u()), 0);

    double root_bound = 0.0;
    for (int t = 0; t < data_.u(); ++t) {
      root_bound += std::min(0.0, c_[static_cast<std::size_t>(t)]);
    }

    // The zero vertex is always feasible with value 0.
    best_value_ = 0.0;
    best_thetas_ = all_zeros_thetas(data_.shape());

    // Seed the incumbent with one alternating-minimization pass so pruning
    // starts from a competitive value.
    Vertex seeded =
        altmin(all_ones_thetas(data_.shape()), c_, pattern_, data_, 0.0);
    const double seeded_value =
        detail::theta_objective(seeded.thetas, c_, data_);
    if (seeded_value < best_value_) {
      best_value_ = seeded_value;
      best_thetas_ = seeded.thetas;
    }

    dfs(0, root_bound);

    ExactOracleResult res;
    res.vertex = make_vertex(std::move(best_thetas_), data_);
    res.objective = best_value_;
    res.nodes = nodes_;
    return res;
  }

 private:
  // Modes in decreasing r_k, coordinates by decreasing total |c| over the
  // positions they touch; coordinates touching nothing are left at 0.
  // Ordering is a heuristic only.
  std::vector<BnbCoordinate> coordinate_order() const {
    std::vector<int> modes(static_cast<std::size_t>(data_.order()));
    for (int k = 0; k < data_.order(); ++k) {
      modes[static_cast<std::size_t>(k)] = k;
    }
    std::stable_sort(modes.begin(), modes.end(), [&](int a, int b) {
      return data_.shape().dim(a) > data_.shape().dim(b);
    });

    std::vector<BnbCoordinate> order;
    for (int k : modes) {
      std::vector<std::pair<double, int>> impact;
      for (int j = 0; j < data_.shape().dim(k); ++j) {
        if (pattern_.positions(k, j).empty()) continue;
        double s = 0.0;
        for (int t : pattern_.positions(k, j)) {
          s += std::abs(c_[static_cast<std::size_t>(t)]);
        }
        impact.emplace_back(s, j);
      }
      std::stable_sort(impact.begin(), impact.end(),
                       [](const auto& a, const auto& b) {
                         return a.first > b.first;
                       });
      for (const auto& [s, j] : impact) {
        (void)s;
        order.push_back({k, j});
      }
    }
    return order;
  }

  // Leaf value recomputed from scratch in position order; the incremental
  // bound only drives pruning decisions.
  double leaf_value() const {
    double v = 0.0;
    for (int t = 0; t < data_.u(); ++t) {
      if (zeros_[static_cast<std::size_t>(t)] == 0) {
        v += c_[static_cast<std::size_t>(t)];
      }
    }
    return v;
  }

  // Fixes a coordinate to 0 and returns the negative mass it removed from
  // the bound.
  double fix_zero(const BnbCoordinate& coord) {
    double delta = 0.0;
    for (int t : pattern_.positions(coord.mode, coord.index)) {
      if (zeros_[static_cast<std::size_t>(t)] == 0) {
        delta += std::min(0.0, c_[static_cast<std::size_t>(t)]);
      }
      ++zeros_[static_cast<std::size_t>(t)];
    }
    return delta;
  }

  void unfix_zero(const BnbCoordinate& coord) {
    for (int t : pattern_.positions(coord.mode, coord.index)) {
      --zeros_[static_cast<std::size_t>(t)];
    }
  }

  // `bound` is the alive negative mass: every completion below this node
  // keeps a subset of the alive positions, so its value is at least this.
  void dfs(std::size_t depth, double bound) {
    ++nodes_;
    if (bound >= best_value_) return;
    if (depth == order_.size()) {
      const double v = leaf_value();
      if (v < best_value_) {
        best_value_ = v;
        record_assignment();
      }
      return;
    }
    const BnbCoordinate& coord = order_[depth];

    assignment_[depth] = 1;
    dfs(depth + 1, bound);

    const double delta = fix_zero(coord);
    assignment_[depth] = 0;
    dfs(depth + 1, bound - delta);
    unfix_zero(coord);
    assignment_[depth] = -1;
  }

  void record_assignment() {
    best_thetas_ = all_zeros_thetas(data_.shape());
    for (std::size_t i = 0; i < order_.size(); ++i) {
      if (assignment_[i] == 1) {
        best_thetas_[static_cast<std::size_t>(order_[i].mode)]
                    [static_cast<std::size_t>(order_[i].index)] = 1;
      }
    }
  }

  std::span<const double> c_;
  const ObservedData& data_;
  const PatternIndex& pattern_;
  std::vector<BnbCoordinate> order_;
  std::vector<int> assignment_;
  std::vector<std::uint16_t> zeros_;
  double best_value_ = 0.0;
  ThetaSet best_thetas_;
  long long nodes_ = 0;
};

}  // namespace detail

constexpr int kDefaultMaxRho = 60;

/// Global minimizer of <scaled_gradient, v> over the normalized vertex set
/// projected onto U, by branch-and-bound over the rho binary theta
/// coordinates. Guarded: refuses instances with rho beyond `max_rho`.
inline ExactOracleResult exact_vertex_min(std::span<const double> scaled_gradient,
                                          const ObservedData& data,
                                          int max_rho = kDefaultMaxRho) {
  if (data.shape().rho() > max_rho) {
    throw std::domain_error(
        "instance too large for exact oracle: rho = " +
        std::to_string(data.shape().rho()) + " exceeds guard " +
        std::to_string(max_rho));
  }
  if (static_cast<int>(scaled_gradient.size()) != data.u()) {
    throw std::invalid_argument("exact_vertex_min: gradient length mismatch");
  }
  const PatternIndex pattern = build_pattern_index(data);
  detail::BranchAndBound bnb(scaled_gradient, data, pattern);
  return bnb.run();
}

}  // namespace ntc
