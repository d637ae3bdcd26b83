#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ntc/observed.hpp"
#include "ntc/rng.hpp"
#include "ntc/shape.hpp"

namespace ntc {

/// Instance recipe. The truth tensor is a sum of `rank` rank-1 tensors with
/// factor entries i.i.d. Uniform[0,1]; samples are drawn uniformly with
/// replacement (or enumerated once each when `enumerate_all` is set) and
/// perturbed by Gaussian noise. lambda = rank * max entry, which bounds the
/// gauge norm through the rank surrogate inequality.
struct GeneratorSpec {
  Shape shape;
  int rank = 1;
  long long n = 1;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  bool enumerate_all = false;
};

struct GeneratedInstance {
  GeneratorSpec spec;
  std::vector<std::vector<std::vector<double>>> factors;  // [rank][mode][i]
  std::vector<double> truth;  // full tensor, row-major
  std::vector<Observation> samples;
  double lambda = 0.0;

  ObservedData observed() const { return ObservedData(spec.shape, samples); }
};

inline GeneratedInstance generate(const GeneratorSpec& spec) {
  if (spec.rank < 1) throw std::invalid_argument("generate: rank must be >= 1");
  if (spec.n < 1) throw std::invalid_argument("generate: n must be >= 1");
  if (spec.noise_sd < 0.0) {
    throw std::invalid_argument("generate: noise_sd must be >= 0");
  }
  const long long pi = spec.shape.pi();
  if (spec.enumerate_all && spec.n != pi) {
    throw std::invalid_argument(
        "generate: enumeration mode requires n == number of entries");
  }

  GeneratedInstance inst;
  inst.spec = spec;
  std::mt19937_64 rng(spec.seed);

  const int p = spec.shape.order();
  inst.factors.resize(static_cast<std::size_t>(spec.rank));
  for (int j = 0; j < spec.rank; ++j) {
    auto& factor = inst.factors[static_cast<std::size_t>(j)];
    factor.resize(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
      auto& vec = factor[static_cast<std::size_t>(k)];
      vec.resize(static_cast<std::size_t>(spec.shape.dim(k)));
      for (double& v : vec) v = uniform01(rng);
    }
  }

  inst.truth.assign(static_cast<std::size_t>(pi), 0.0);
  for (int j = 0; j < spec.rank; ++j) {
    std::vector<double> buf{1.0};
    for (int k = 0; k < p; ++k) {
      const auto& vec =
          inst.factors[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      std::vector<double> next(buf.size() * vec.size());
      for (std::size_t i = 0; i < buf.size(); ++i) {
        for (std::size_t v = 0; v < vec.size(); ++v) {
          next[i * vec.size() + v] = buf[i] * vec[v];
        }
      }
      buf = std::move(next);
    }
    for (std::size_t i = 0; i < buf.size(); ++i) inst.truth[i] += buf[i];
  }

  const double max_entry =
      *std::max_element(inst.truth.begin(), inst.truth.end());
  inst.lambda = static_cast<double>(spec.rank) * max_entry;
  if (!(inst.lambda > 0.0)) {
    throw std::runtime_error("generate: degenerate instance with zero truth");
  }

  inst.samples.reserve(static_cast<std::size_t>(spec.n));
  std::vector<int> coords(static_cast<std::size_t>(p));
  for (long long i = 0; i < spec.n; ++i) {
    const long long lin =
        spec.enumerate_all
            ? i
            : static_cast<long long>(
                  uniform_below(rng, static_cast<std::uint64_t>(pi)));
    spec.shape.decode(lin, coords);
    double y = inst.truth[static_cast<std::size_t>(lin)];
    if (spec.noise_sd > 0.0) y += spec.noise_sd * gaussian(rng);
    inst.samples.push_back({coords, y});
  }
  return inst;
}

}  // namespace ntc
