#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ntc/shape.hpp"

namespace ntc {

/// One observed entry: 0-based coordinates plus the observed value.
struct Observation {
  std::vector<int> index;
  double value = 0.0;
};

/// The sample set {(x<i>, y<i>)} together with the deduplicated index set U.
/// Duplicate indices are kept with multiplicities: the loss sums over all n
/// samples, so the aggregated forms weight each unique index by its count.
/// U is ordered by first appearance.
class ObservedData {
 public:
  ObservedData(Shape shape, const std::vector<Observation>& samples)
      : shape_(std::move(shape)) {
    const int p = shape_.order();
    n_ = static_cast<long long>(samples.size());
    sample_coords_.reserve(samples.size() * static_cast<std::size_t>(p));
    sample_value_.reserve(samples.size());
    sample_position_.reserve(samples.size());

    std::unordered_map<long long, int> seen;
    for (const Observation& obs : samples) {
      if (static_cast<int>(obs.index.size()) != p) {
        throw std::invalid_argument("ObservedData: index order mismatch");
      }
      if (!shape_.contains(obs.index)) {
        throw std::out_of_range("ObservedData: sample index out of range");
      }
      const long long lin = shape_.linear_index(obs.index);
      auto [it, inserted] = seen.emplace(lin, u_);
      int pos = it->second;
      if (inserted) {
        ++u_;
        unique_coords_.insert(unique_coords_.end(), obs.index.begin(),
                              obs.index.end());
        multiplicity_.push_back(0);
      }
      ++multiplicity_[static_cast<std::size_t>(pos)];
      sample_coords_.insert(sample_coords_.end(), obs.index.begin(),
                            obs.index.end());
      sample_value_.push_back(obs.value);
      sample_position_.push_back(pos);
    }
  }

  const Shape& shape() const { return shape_; }
  int order() const { return shape_.order(); }
  long long n() const { return n_; }
  int u() const { return u_; }

  /// Mode-k coordinate of the t-th unique index.
  int coord(int t, int k) const {
    return unique_coords_[static_cast<std::size_t>(t) *
                              static_cast<std::size_t>(shape_.order()) +
                          static_cast<std::size_t>(k)];
  }

  std::span<const int> unique_index(int t) const {
    const auto p = static_cast<std::size_t>(shape_.order());
    return {unique_coords_.data() + static_cast<std::size_t>(t) * p, p};
  }

  long long multiplicity(int t) const {
    return multiplicity_[static_cast<std::size_t>(t)];
  }

  /// Position in U of the i-th sample.
  int sample_position(long long i) const {
    return sample_position_[static_cast<std::size_t>(i)];
  }

  double sample_value(long long i) const {
    return sample_value_[static_cast<std::size_t>(i)];
  }

  std::span<const int> sample_index(long long i) const {
    const auto p = static_cast<std::size_t>(shape_.order());
    return {sample_coords_.data() + static_cast<std::size_t>(i) * p, p};
  }

 private:
  Shape shape_;
  long long n_ = 0;
  int u_ = 0;
  std::vector<int> unique_coords_;    // u * p, row-major
  std::vector<long long> multiplicity_;
  std::vector<int> sample_coords_;    // n * p, row-major
  std::vector<double> sample_value_;
  std::vector<int> sample_position_;  // n, position in U
};

/// Precomputed observation-pattern structure: for each mode k and index
/// value j, the sorted list of positions t in U with (U_t)_k = j, plus a
/// columnwise copy of the U coordinates. Built once per instance; the
/// per-mode position lists are what make the r_k-loop formulation of the
/// alternating-minimization step cheap.
class PatternIndex {
 public:
  PatternIndex() = default;

  int order() const { return static_cast<int>(offsets_.size()); }
  int dim(int k) const {
    return static_cast<int>(offsets_[static_cast<std::size_t>(k)].size()) - 1;
  }
  int u() const { return u_; }

  /// Positions t with (U_t)_k = j, ascending.
  std::span<const int> positions(int k, int j) const {
    const auto& off = offsets_[static_cast<std::size_t>(k)];
    const auto& pos = positions_[static_cast<std::size_t>(k)];
    return {pos.data() + off[static_cast<std::size_t>(j)],
            static_cast<std::size_t>(off[static_cast<std::size_t>(j) + 1] -
                                     off[static_cast<std::size_t>(j)])};
  }

  /// Mode-k coordinates of all positions, columnwise.
  const std::vector<int>& mode_coords(int k) const {
    return coords_[static_cast<std::size_t>(k)];
  }

  int coord(int k, int t) const {
    return coords_[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
  }

  static PatternIndex build(const ObservedData& data) {
    PatternIndex idx;
    const int p = data.order();
    const int u = data.u();
    idx.u_ = u;
    idx.offsets_.resize(static_cast<std::size_t>(p));
    idx.positions_.resize(static_cast<std::size_t>(p));
    idx.coords_.resize(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
      const int rk = data.shape().dim(k);
      auto& off = idx.offsets_[static_cast<std::size_t>(k)];
      auto& pos = idx.positions_[static_cast<std::size_t>(k)];
      auto& col = idx.coords_[static_cast<std::size_t>(k)];
      off.assign(static_cast<std::size_t>(rk) + 1, 0);
      pos.resize(static_cast<std::size_t>(u));
      col.resize(static_cast<std::size_t>(u));
      for (int t = 0; t < u; ++t) {
        col[static_cast<std::size_t>(t)] = data.coord(t, k);
        ++off[static_cast<std::size_t>(data.coord(t, k)) + 1];
      }
      for (int j = 0; j < rk; ++j) {
        off[static_cast<std::size_t>(j) + 1] += off[static_cast<std::size_t>(j)];
      }
      std::vector<int> cursor(off.begin(), off.end() - 1);
      for (int t = 0; t < u; ++t) {
        pos[static_cast<std::size_t>(
            cursor[static_cast<std::size_t>(col[static_cast<std::size_t>(t)])]++)] = t;
      }
    }
    return idx;
  }

 private:
  int u_ = 0;
  std::vector<std::vector<int>> offsets_;    // per mode: r_k + 1
  std::vector<std::vector<int>> positions_;  // per mode: u entries
  std::vector<std::vector<int>> coords_;     // per mode: u entries
};

inline PatternIndex build_pattern_index(const ObservedData& data) {
  return PatternIndex::build(data);
}

}  // namespace ntc
