#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ntc/generator.hpp"
#include "ntc/observed.hpp"
#include "ntc/shape.hpp"

namespace ntc {

/// Generator metadata carried inside instance files so that benchmark runs
/// are auditable and the truth tensor can be rebuilt for NMSE evaluation.
struct InstanceMeta {
  int rank = 0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  bool enumerate_all = false;
  double lambda = 0.0;
  std::vector<std::vector<std::vector<double>>> factors;

  std::vector<double> rebuild_truth(const Shape& shape) const {
    std::vector<double> truth(static_cast<std::size_t>(shape.pi()), 0.0);
    for (const auto& factor : factors) {
      std::vector<double> buf{1.0};
      for (int k = 0; k < shape.order(); ++k) {
        const auto& vec = factor[static_cast<std::size_t>(k)];
        std::vector<double> next(buf.size() * vec.size());
        for (std::size_t i = 0; i < buf.size(); ++i) {
          for (std::size_t v = 0; v < vec.size(); ++v) {
            next[i * vec.size() + v] = buf[i] * vec[v];
          }
        }
        buf = std::move(next);
      }
      for (std::size_t i = 0; i < buf.size(); ++i) truth[i] += buf[i];
    }
    return truth;
  }
};

struct LoadedInstance {
  Shape shape;
  std::vector<Observation> samples;
  std::optional<InstanceMeta> meta;

  ObservedData observed() const { return ObservedData(shape, samples); }
};

/// Instance files are UTF-8 JSON with 1-based indices:
/// { "dims": [r1,...,rp], "samples": [ { "x": [x1,...,xp], "y": v }, ... ] }.
inline nlohmann::json instance_to_json(const Shape& shape,
                                       const std::vector<Observation>& samples,
                                       const InstanceMeta* meta = nullptr) {
  nlohmann::json j;
  j["dims"] = shape.dims();
  nlohmann::json arr = nlohmann::json::array();
  for (const Observation& obs : samples) {
    std::vector<int> one_based(obs.index.size());
    for (std::size_t k = 0; k < obs.index.size(); ++k) {
      one_based[k] = obs.index[k] + 1;
    }
    arr.push_back({{"x", one_based}, {"y", obs.value}});
  }
  j["samples"] = std::move(arr);
  if (meta != nullptr) {
    j["generator"] = {{"rank", meta->rank},
                      {"noise_sd", meta->noise_sd},
                      {"seed", meta->seed},
                      {"enumerate_all", meta->enumerate_all},
                      {"lambda", meta->lambda},
                      {"factors", meta->factors}};
  }
  return j;
}

inline nlohmann::json instance_to_json(const GeneratedInstance& inst) {
  InstanceMeta meta;
  meta.rank = inst.spec.rank;
  meta.noise_sd = inst.spec.noise_sd;
  meta.seed = inst.spec.seed;
  meta.enumerate_all = inst.spec.enumerate_all;
  meta.lambda = inst.lambda;
  meta.factors = inst.factors;
  return instance_to_json(inst.spec.shape, inst.samples, &meta);
}

inline LoadedInstance instance_from_json(const nlohmann::json& j) {
  if (!j.contains("dims") || !j["dims"].is_array()) {
    throw std::invalid_argument("instance: missing dims array");
  }
  LoadedInstance inst;
  inst.shape = Shape(j["dims"].get<std::vector<int>>());
  if (!j.contains("samples") || !j["samples"].is_array()) {
    throw std::invalid_argument("instance: missing samples array");
  }
  const int p = inst.shape.order();
  for (const auto& entry : j["samples"]) {
    Observation obs;
    obs.index = entry.at("x").get<std::vector<int>>();
    if (static_cast<int>(obs.index.size()) != p) {
      throw std::invalid_argument("instance: sample index order mismatch");
    }
    for (int k = 0; k < p; ++k) {
      const int xk = obs.index[static_cast<std::size_t>(k)];
      if (xk < 1 || xk > inst.shape.dim(k)) {
        throw std::out_of_range("instance: index " + std::to_string(xk) +
                                " out of range in mode " + std::to_string(k + 1));
      }
      obs.index[static_cast<std::size_t>(k)] = xk - 1;
    }
    obs.value = entry.at("y").get<double>();
    inst.samples.push_back(std::move(obs));
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    InstanceMeta meta;
    meta.rank = g.value("rank", 0);
    meta.noise_sd = g.value("noise_sd", 0.0);
    meta.seed = g.value("seed", std::uint64_t{0});
    meta.enumerate_all = g.value("enumerate_all", false);
    meta.lambda = g.value("lambda", 0.0);
    if (g.contains("factors")) {
      meta.factors =
          g["factors"].get<std::vector<std::vector<std::vector<double>>>>();
    }
    inst.meta = std::move(meta);
  }
  return inst;
}

inline void save_instance(const std::string& path,
                          const GeneratedInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(inst).dump(2) << '\n';
}

inline LoadedInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return instance_from_json(j);
}

}  // namespace ntc
