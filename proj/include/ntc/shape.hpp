#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ntc {

/// Tensor shape (r_1, ..., r_p). All indices are 0-based internally;
/// file formats use 1-based indices and convert at the boundary.
class Shape {
 public:
  Shape() = default;

  explicit Shape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
      throw std::invalid_argument("Shape: order must be at least 1");
    }
    for (int r : dims_) {
      if (r < 1) {
        throw std::invalid_argument("Shape: every dimension must be >= 1");
      }
    }
  }

  int order() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& dims() const { return dims_; }

  /// Sum of dimensions: the number of binary vertex coordinates.
  long long rho() const {
    long long s = 0;
    for (int r : dims_) s += r;
    return s;
  }

  /// Product of dimensions: the total number of tensor entries.
  long long pi() const {
    long long p = 1;
    for (int r : dims_) {
      if (p > (1LL << 62) / r) {
        throw std::overflow_error("Shape: entry count overflows");
      }
      p *= r;
    }
    return p;
  }

  bool contains(std::span<const int> coords) const {
    if (coords.size() != dims_.size()) return false;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (coords[k] < 0 || coords[k] >= dims_[k]) return false;
    }
    return true;
  }

  /// Row-major linear index of a coordinate tuple.
  long long linear_index(std::span<const int> coords) const {
    long long idx = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      idx = idx * dims_[k] + coords[k];
    }
    return idx;
  }

  void decode(long long linear, std::span<int> coords) const {
    for (int k = order() - 1; k >= 0; --k) {
      coords[static_cast<std::size_t>(k)] =
          static_cast<int>(linear % dims_[static_cast<std::size_t>(k)]);
      linear /= dims_[static_cast<std::size_t>(k)];
    }
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (k > 0) s += 'x';
      s += std::to_string(dims_[k]);
    }
    return s;
  }

  friend bool operator==(const Shape& a, const Shape& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
};

}  // namespace ntc
