#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "ntc/observed.hpp"

namespace ntc {

/// Binary mode vectors (theta^(1), ..., theta^(p)); entries are 0 or 1.
using ThetaSet = std::vector<std::vector<std::uint8_t>>;

inline ThetaSet all_ones_thetas(const Shape& shape) {
  ThetaSet thetas(static_cast<std::size_t>(shape.order()));
  for (int k = 0; k < shape.order(); ++k) {
    thetas[static_cast<std::size_t>(k)].assign(
        static_cast<std::size_t>(shape.dim(k)), 1);
  }
  return thetas;
}

inline ThetaSet all_zeros_thetas(const Shape& shape) {
  ThetaSet thetas(static_cast<std::size_t>(shape.order()));
  for (int k = 0; k < shape.order(); ++k) {
    thetas[static_cast<std::size_t>(k)].assign(
        static_cast<std::size_t>(shape.dim(k)), 0);
  }
  return thetas;
}

inline void check_theta_dims(const ThetaSet& thetas, const Shape& shape) {
  if (static_cast<int>(thetas.size()) != shape.order()) {
    throw std::invalid_argument("theta set order mismatch");
  }
  for (int k = 0; k < shape.order(); ++k) {
    if (static_cast<int>(thetas[static_cast<std::size_t>(k)].size()) !=
        shape.dim(k)) {
      throw std::invalid_argument("theta length mismatch in mode " +
                                  std::to_string(k + 1));
    }
  }
}

/// Entry t is the product of the theta bits selected by the t-th unique
/// index, so the result is a 0/1 vector of length u.
inline std::vector<double> vertex_values_on_u(const ThetaSet& thetas,
                                              const ObservedData& data) {
  check_theta_dims(thetas, data.shape());
  const int p = data.order();
  std::vector<double> values(static_cast<std::size_t>(data.u()));
  for (int t = 0; t < data.u(); ++t) {
    std::uint8_t prod = 1;
    for (int k = 0; k < p; ++k) {
      prod &= thetas[static_cast<std::size_t>(k)]
                    [static_cast<std::size_t>(data.coord(t, k))];
      if (!prod) break;
    }
    values[static_cast<std::size_t>(t)] = prod ? 1.0 : 0.0;
  }
  return values;
}

/// One element of the normalized vertex set: p binary mode vectors plus the
/// projection of the induced rank-1 tensor onto U.
struct Vertex {
  ThetaSet thetas;
  std::vector<double> values_on_u;
};

inline Vertex make_vertex(ThetaSet thetas, const ObservedData& data) {
  Vertex v;
  v.values_on_u = vertex_values_on_u(thetas, data);
  v.thetas = std::move(thetas);
  return v;
}

inline bool same_thetas(const ThetaSet& a, const ThetaSet& b) {
  return a == b;
}

/// Active vertex set: vertices, simplex weights, and the vertex-value
/// matrix over U (k x u, row j = vertex j). The matrix is stored dense or
/// row-compressed sparse; rows are binary, so the sparse form keeps only
/// the positions with value 1.
class ActiveSet {
 public:
  ActiveSet(bool sparse, int u) : sparse_(sparse), u_(u) {}

  int size() const { return static_cast<int>(vertices_.size()); }
  int u() const { return u_; }
  bool sparse_storage() const { return sparse_; }

  const Vertex& vertex(int j) const {
    return vertices_[static_cast<std::size_t>(j)];
  }

  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Index of a vertex with exactly equal thetas, or -1.
  int find(const ThetaSet& thetas) const {
    for (std::size_t j = 0; j < vertices_.size(); ++j) {
      if (same_thetas(vertices_[j].thetas, thetas)) {
        return static_cast<int>(j);
      }
    }
    return -1;
  }

  void add(Vertex v, double weight) {
    if (static_cast<int>(v.values_on_u.size()) != u_) {
      throw std::invalid_argument("ActiveSet: vertex length mismatch");
    }
    if (sparse_) {
      std::vector<int> row;
      for (int t = 0; t < u_; ++t) {
        if (v.values_on_u[static_cast<std::size_t>(t)] != 0.0) {
          row.push_back(t);
        }
      }
      rows_.push_back(std::move(row));
    } else {
      dense_.insert(dense_.end(), v.values_on_u.begin(), v.values_on_u.end());
    }
    vertices_.push_back(std::move(v));
    weights_.push_back(weight);
  }

  void remove(int j) {
    const auto sj = static_cast<std::size_t>(j);
    vertices_.erase(vertices_.begin() + static_cast<std::ptrdiff_t>(sj));
    weights_.erase(weights_.begin() + static_cast<std::ptrdiff_t>(sj));
    if (sparse_) {
      rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(sj));
    } else {
      dense_.erase(dense_.begin() + static_cast<std::ptrdiff_t>(
                                        sj * static_cast<std::size_t>(u_)),
                   dense_.begin() + static_cast<std::ptrdiff_t>(
                                        (sj + 1) * static_cast<std::size_t>(u_)));
    }
  }

  /// Drops every vertex whose weight is exactly zero.
  void drop_zero_weights() {
    for (int j = size() - 1; j >= 0; --j) {
      if (weights_[static_cast<std::size_t>(j)] == 0.0) remove(j);
    }
  }

  /// out[j] = <row_j, w>.
  void pro(std::span<const double> w, std::vector<double>& out) const {
    out.assign(vertices_.size(), 0.0);
    if (sparse_) {
      for (std::size_t j = 0; j < rows_.size(); ++j) {
        double s = 0.0;
        for (int t : rows_[j]) s += w[static_cast<std::size_t>(t)];
        out[j] = s;
      }
    } else {
      for (std::size_t j = 0; j < vertices_.size(); ++j) {
        const double* row = dense_.data() + j * static_cast<std::size_t>(u_);
        double s = 0.0;
        for (int t = 0; t < u_; ++t) {
          s += row[static_cast<std::size_t>(t)] * w[static_cast<std::size_t>(t)];
        }
        out[j] = s;
      }
    }
  }

  /// out = sum_j coef[j] * row_j.
  void combine(std::span<const double> coef, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(u_), 0.0);
    if (sparse_) {
      for (std::size_t j = 0; j < rows_.size(); ++j) {
        const double c = coef[j];
        if (c == 0.0) continue;
        for (int t : rows_[j]) out[static_cast<std::size_t>(t)] += c;
      }
    } else {
      for (std::size_t j = 0; j < vertices_.size(); ++j) {
        const double c = coef[j];
        if (c == 0.0) continue;
        const double* row = dense_.data() + j * static_cast<std::size_t>(u_);
        for (int t = 0; t < u_; ++t) {
          out[static_cast<std::size_t>(t)] += c * row[static_cast<std::size_t>(t)];
        }
      }
    }
  }

  /// x += s * row_j.
  void add_scaled_row(int j, double s, std::span<double> x) const {
    if (s == 0.0) return;
    if (sparse_) {
      for (int t : rows_[static_cast<std::size_t>(j)]) {
        x[static_cast<std::size_t>(t)] += s;
      }
    } else {
      const double* row =
          dense_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(u_);
      for (int t = 0; t < u_; ++t) {
        x[static_cast<std::size_t>(t)] += s * row[static_cast<std::size_t>(t)];
      }
    }
  }

  /// Multiplicity-weighted row sum: sum_t mult[t] * row_j[t].
  double weighted_row_sum(int j, std::span<const double> mult) const {
    double s = 0.0;
    if (sparse_) {
      for (int t : rows_[static_cast<std::size_t>(j)]) {
        s += mult[static_cast<std::size_t>(t)];
      }
    } else {
      const double* row =
          dense_.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(u_);
      for (int t = 0; t < u_; ++t) {
        s += row[static_cast<std::size_t>(t)] * mult[static_cast<std::size_t>(t)];
      }
    }
    return s;
  }

 private:
  bool sparse_;
  int u_;
  std::vector<Vertex> vertices_;
  std::vector<double> weights_;
  std::vector<double> dense_;           // k x u row-major (dense mode)
  std::vector<std::vector<int>> rows_;  // per-row positions with value 1 (sparse mode)
};

}  // namespace ntc
