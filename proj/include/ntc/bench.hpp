#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ntc/generator.hpp"
#include "ntc/objective.hpp"
#include "ntc/rng.hpp"
#include "ntc/solver.hpp"
#include "ntc/variant.hpp"

namespace ntc {

/// One benchmark solve. Columns of results.csv, in order.
struct RunRecord {
  std::string instance_id;
  std::string dims;
  long long n = 0;
  int version = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double nmse = 0.0;
  double time_s = 0.0;
  long long iterations = 0;
  long long sigd_steps = 0;
  long long oracle_calls = 0;
  long long exact_ip_calls = 0;
  double final_gap = 0.0;
};

struct GuardReport {
  std::string instance_id;
  std::string reason;
};

enum class Suite {
  kOrder3,             // r x r x r, n = 500, r in {10,...,100} (scaled)
  kIncreasingOrder,    // 10^p, n = 10,000, p in {4,...,8}
  kIncreasingSamples6, // 10^6 with n in {1e2, 1e3, 1e4, 1e5}
  kIncreasingSamples7, // 10^7 with n in {1e3, 1e4, 1e5}
};

inline Suite suite_from_name(const std::string& name) {
  if (name == "order3") return Suite::kOrder3;
  if (name == "increasing-order") return Suite::kIncreasingOrder;
  if (name == "increasing-samples-6") return Suite::kIncreasingSamples6;
  if (name == "increasing-samples-7") return Suite::kIncreasingSamples7;
  throw std::invalid_argument("unknown suite: " + name);
}

struct BenchConfig {
  std::vector<int> versions{0};
  int reps = 20;
  double scale = 1.0;
  std::uint64_t seed = 1;
  int rank = 3;
  double noise_sd = 0.02;
  double tol = 1e-4;
  int max_rho = kDefaultMaxRho;
  // Desk-scale grid caps; cells beyond them are reported and skipped.
  int max_r = std::numeric_limits<int>::max();
  int max_p = std::numeric_limits<int>::max();
  long long max_n = std::numeric_limits<long long>::max();
  int jobs = 1;
};

struct SuiteResult {
  std::vector<RunRecord> records;
  std::vector<GuardReport> skipped;
};

namespace detail {

struct BenchCell {
  std::string id;
  Shape shape;
  long long n = 0;
};

inline int scaled_dim(int r, double scale) {
  return std::max(2, static_cast<int>(std::llround(r * scale)));
}

inline std::vector<BenchCell> suite_cells(Suite suite, double scale) {
  std::vector<BenchCell> cells;
  switch (suite) {
    case Suite::kOrder3:
      for (int r = 10; r <= 100; r += 10) {
        const int rs = scaled_dim(r, scale);
        cells.push_back({"order3_r" + std::to_string(rs),
                         Shape({rs, rs, rs}), 500});
      }
      break;
    case Suite::kIncreasingOrder:
      for (int p = 4; p <= 8; ++p) {
        const int rs = scaled_dim(10, scale);
        cells.push_back({"incorder_p" + std::to_string(p),
                         Shape(std::vector<int>(static_cast<std::size_t>(p), rs)),
                         10000});
      }
      break;
    case Suite::kIncreasingSamples6:
      for (long long n : {100LL, 1000LL, 10000LL, 100000LL}) {
        const int rs = scaled_dim(10, scale);
        cells.push_back({"incn6_n" + std::to_string(n),
                         Shape(std::vector<int>(6, rs)), n});
      }
      break;
    case Suite::kIncreasingSamples7:
      for (long long n : {1000LL, 10000LL, 100000LL}) {
        const int rs = scaled_dim(10, scale);
        cells.push_back({"incn7_n" + std::to_string(n),
                         Shape(std::vector<int>(7, rs)), n});
      }
      break;
  }
  return cells;
}

inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Runs a benchmark family: per cell, `reps` instances are generated with
/// derived seeds (shared across versions so NMSE is comparable), each solved
/// under every requested version. Cells violating the guards are reported
/// and skipped; the rest of the grid continues. Records are ordered by
/// (instance, version, repetition) regardless of scheduling.
inline SuiteResult run_suite(Suite suite, const BenchConfig& config) {
  SuiteResult result;
  std::vector<detail::BenchCell> cells;
  for (auto& cell : detail::suite_cells(suite, config.scale)) {
    bool max_dim_ok = true;
    for (int k = 0; k < cell.shape.order(); ++k) {
      if (cell.shape.dim(k) > config.max_r) max_dim_ok = false;
    }
    if (!max_dim_ok) {
      result.skipped.push_back(
          {cell.id, "dimension exceeds cap " + std::to_string(config.max_r)});
    } else if (cell.shape.order() > config.max_p) {
      result.skipped.push_back(
          {cell.id, "order exceeds cap " + std::to_string(config.max_p)});
    } else if (cell.n > config.max_n) {
      result.skipped.push_back(
          {cell.id, "sample count exceeds cap " + std::to_string(config.max_n)});
    } else if (cell.shape.rho() > config.max_rho) {
      result.skipped.push_back(
          {cell.id, "rho = " + std::to_string(cell.shape.rho()) +
                        " exceeds exact-oracle guard " +
                        std::to_string(config.max_rho)});
    } else {
      cells.push_back(std::move(cell));
    }
  }

  std::vector<int> versions = config.versions;
  std::sort(versions.begin(), versions.end());
  versions.erase(std::unique(versions.begin(), versions.end()), versions.end());

  const std::size_t cell_count = cells.size();
  const std::size_t version_count = versions.size();
  const std::size_t rep_count = static_cast<std::size_t>(config.reps);
  result.records.resize(cell_count * version_count * rep_count);

  // Work unit = (cell, rep): one generated instance solved by all versions.
  struct Unit {
    std::size_t cell;
    int rep;
  };
  std::vector<Unit> units;
  units.reserve(cell_count * rep_count);
  for (std::size_t c = 0; c < cell_count; ++c) {
    for (int rep = 0; rep < config.reps; ++rep) {
      units.push_back({c, rep});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= units.size()) break;
      const Unit unit = units[i];
      const detail::BenchCell& cell = cells[unit.cell];

      GeneratorSpec spec;
      spec.shape = cell.shape;
      spec.rank = config.rank;
      spec.n = cell.n;
      spec.noise_sd = config.noise_sd;
      spec.seed = derive_seed(config.seed, detail::hash_string(cell.id),
                              static_cast<std::uint64_t>(unit.rep));
      const GeneratedInstance inst = generate(spec);
      const ObservedData data = inst.observed();

      for (std::size_t v = 0; v < version_count; ++v) {
        const int version = versions[v];
        const std::uint64_t solver_seed =
            derive_seed(spec.seed, static_cast<std::uint64_t>(version) + 101);
        SolveOptions options;
        options.max_rho = config.max_rho;
        const SolveResult solved = solve(data, inst.lambda, config.tol,
                                         make_variant(version), solver_seed,
                                         options);
        RunRecord rec;
        rec.instance_id = cell.id;
        rec.dims = cell.shape.to_string();
        rec.n = cell.n;
        rec.version = version;
        rec.rep = unit.rep;
        rec.seed = solver_seed;
        rec.nmse = nmse(solved.completed, inst.truth);
        rec.time_s = solved.wall_seconds;
        rec.iterations = solved.stats.iterations;
        rec.sigd_steps = solved.stats.descent_steps;
        rec.oracle_calls = solved.stats.oracle_calls;
        rec.exact_ip_calls = solved.stats.exact_ip_calls;
        rec.final_gap = solved.certified_gap;
        result.records[(unit.cell * version_count + v) * rep_count +
                       static_cast<std::size_t>(unit.rep)] = std::move(rec);
      }
    }
  };

  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

inline constexpr const char* kResultsHeader =
    "instance_id,dims,n,version,rep,seed,nmse,time_s,iterations,sigd_steps,"
    "oracle_calls,exact_ip_calls,final_gap";

inline void write_results_csv(std::ostream& out,
                              const std::vector<RunRecord>& records) {
  out << kResultsHeader << '\n';
  char buf[64];
  for (const RunRecord& r : records) {
    out << r.instance_id << ',' << r.dims << ',' << r.n << ',' << r.version
        << ',' << r.rep << ',' << r.seed << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.nmse);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6f", r.time_s);
    out << buf << ',' << r.iterations << ',' << r.sigd_steps << ','
        << r.oracle_calls << ',' << r.exact_ip_calls << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.final_gap);
    out << buf << '\n';
  }
}

inline std::vector<RunRecord> read_results_csv(std::istream& in) {
  std::vector<RunRecord> records;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("results csv: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 13) {
      throw std::invalid_argument("results csv: malformed row: " + line);
    }
    RunRecord r;
    r.instance_id = fields[0];
    r.dims = fields[1];
    r.n = std::stoll(fields[2]);
    r.version = std::stoi(fields[3]);
    r.rep = std::stoi(fields[4]);
    r.seed = std::stoull(fields[5]);
    r.nmse = std::stod(fields[6]);
    r.time_s = std::stod(fields[7]);
    r.iterations = std::stoll(fields[8]);
    r.sigd_steps = std::stoll(fields[9]);
    r.oracle_calls = std::stoll(fields[10]);
    r.exact_ip_calls = std::stoll(fields[11]);
    r.final_gap = std::stod(fields[12]);
    records.push_back(std::move(r));
  }
  return records;
}

/// Per-(instance, version) summary statistics.
struct SummaryRow {
  std::string instance_id;
  std::string dims;
  long long n = 0;
  int version = 0;
  int reps = 0;
  double nmse_mean = 0.0;
  double nmse_se = 0.0;
  double time_mean = 0.0;
  double time_se = 0.0;
  double time_min = 0.0;
  double time_median = 0.0;
  double time_max = 0.0;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Standard error: sample standard deviation / sqrt(count); 0 for one value.
inline double se_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return sd / std::sqrt(static_cast<double>(v.size()));
}

// Lower-middle element for even counts.
inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

}  // namespace detail

inline std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: empty record set");
  }
  // Group by (instance, version), keeping first-appearance instance order.
  std::vector<std::pair<std::string, int>> keys;
  std::map<std::pair<std::string, int>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    const auto key = std::make_pair(r.instance_id, r.version);
    auto [it, inserted] = groups.emplace(key, std::vector<const RunRecord*>{});
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : keys) {
    const auto& group = groups[key];
    SummaryRow row;
    row.instance_id = key.first;
    row.version = key.second;
    row.dims = group.front()->dims;
    row.n = group.front()->n;
    row.reps = static_cast<int>(group.size());
    std::vector<double> nmses, times;
    for (const RunRecord* r : group) {
      nmses.push_back(r->nmse);
      times.push_back(r->time_s);
    }
    row.nmse_mean = detail::mean_of(nmses);
    row.nmse_se = detail::se_of(nmses, row.nmse_mean);
    row.time_mean = detail::mean_of(times);
    row.time_se = detail::se_of(times, row.time_mean);
    row.time_min = *std::min_element(times.begin(), times.end());
    row.time_median = detail::median_of(times);
    row.time_max = *std::max_element(times.begin(), times.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<SummaryRow>& rows) {
  out << "instance_id,dims,n,version,reps,nmse_mean,nmse_se,time_mean,"
         "time_se,time_min,time_median,time_max\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    out << buf << sep;
  };
  for (const SummaryRow& r : rows) {
    out << r.instance_id << ',' << r.dims << ',' << r.n << ',' << r.version
        << ',' << r.reps << ',';
    put(r.nmse_mean, ',');
    put(r.nmse_se, ',');
    put(r.time_mean, ',');
    put(r.time_se, ',');
    put(r.time_min, ',');
    put(r.time_median, ',');
    put(r.time_max, '\n');
  }
}

namespace detail {

// "order3_r12" -> family "order3", x = 12; "incn6_n1000" -> ("incn6", 1000).
inline bool split_instance_id(const std::string& id, std::string& family,
                              long long& x) {
  const auto pos = id.rfind('_');
  if (pos == std::string::npos) return false;
  family = id.substr(0, pos);
  std::string tail = id.substr(pos + 1);
  std::size_t digits = 0;
  while (digits < tail.size() && !std::isdigit(static_cast<unsigned char>(
                                     tail[digits]))) {
    ++digits;
  }
  if (digits == tail.size()) return false;
  x = std::stoll(tail.substr(digits));
  return true;
}

}  // namespace detail

/// One CSV per suite family with the figure content: x (size, order, or
/// sample count), version, NMSE mean/SE, time mean/SE.
inline std::map<std::string, std::string> plot_data_csvs(
    const std::vector<SummaryRow>& rows) {
  std::map<std::string, std::string> files;
  char buf[64];
  for (const SummaryRow& row : rows) {
    std::string family;
    long long x = 0;
    if (!detail::split_instance_id(row.instance_id, family, x)) {
      family = row.instance_id;
      x = 0;
    }
    auto [it, inserted] = files.emplace(family, std::string());
    if (inserted) {
      it->second = "x,version,nmse_mean,nmse_se,time_mean,time_se\n";
    }
    it->second += std::to_string(x) + ',' + std::to_string(row.version) + ',';
    std::snprintf(buf, sizeof(buf), "%.10g", row.nmse_mean);
    it->second += std::string(buf) + ',';
    std::snprintf(buf, sizeof(buf), "%.10g", row.nmse_se);
    it->second += std::string(buf) + ',';
    std::snprintf(buf, sizeof(buf), "%.10g", row.time_mean);
    it->second += std::string(buf) + ',';
    std::snprintf(buf, sizeof(buf), "%.10g", row.time_se);
    it->second += std::string(buf) + '\n';
  }
  return files;
}

}  // namespace ntc
