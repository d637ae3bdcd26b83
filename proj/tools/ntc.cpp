// Command-line front end: instance generation, single solves, benchmark
// suites, and result aggregation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ntc/ntc.hpp"

namespace {

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    dims.push_back(std::stoi(token));
  }
  return dims;
}

std::vector<int> parse_versions(const std::string& text) {
  std::vector<int> versions;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto dash = token.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int lo = std::stoi(token.substr(0, dash));
      const int hi = std::stoi(token.substr(dash + 1));
      for (int v = lo; v <= hi; ++v) versions.push_back(v);
    } else {
      versions.push_back(std::stoi(token));
    }
  }
  std::sort(versions.begin(), versions.end());
  versions.erase(std::unique(versions.begin(), versions.end()),
                 versions.end());
  return versions;
}

int run_gen(const std::string& dims_text, int rank, long long n, double noise,
            std::uint64_t seed, bool enumerate_all, const std::string& out) {
  ntc::GeneratorSpec spec;
  spec.shape = ntc::Shape(parse_dims(dims_text));
  spec.rank = rank;
  spec.n = enumerate_all ? spec.shape.pi() : n;
  spec.noise_sd = noise;
  spec.seed = seed;
  spec.enumerate_all = enumerate_all;
  const ntc::GeneratedInstance inst = ntc::generate(spec);
  ntc::save_instance(out, inst);
  std::cout << "wrote " << out << ": dims " << spec.shape.to_string()
            << ", rank " << rank << ", n " << spec.n << ", lambda "
            << inst.lambda << "\n";
  return 0;
}

int run_solve(const std::string& input, int version,
              const std::string& lambda_text, double tol, std::uint64_t seed,
              const std::string& trace_path, bool dump_ip, int max_rho,
              int restarts) {
  const ntc::LoadedInstance loaded = ntc::load_instance(input);
  const ntc::ObservedData data = loaded.observed();

  double lambda = 0.0;
  if (lambda_text == "auto") {
    if (loaded.meta && loaded.meta->lambda > 0.0) {
      lambda = loaded.meta->lambda;
    } else {
      // Without generator metadata fall back to the largest observed value,
      // the smallest radius consistent with max-norm <= gauge norm.
      double max_y = 0.0;
      for (const auto& s : loaded.samples) max_y = std::max(max_y, s.value);
      if (max_y <= 0.0) {
        std::cerr << "cannot infer lambda: no positive observations\n";
        return 1;
      }
      lambda = max_y;
    }
  } else {
    lambda = std::stod(lambda_text);
  }

  ntc::SolveOptions options;
  options.max_rho = max_rho;
  options.altmin_restarts = restarts;

  std::ofstream trace;
  ntc::SolveHooks hooks;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) {
      std::cerr << "cannot open trace file " << trace_path << "\n";
      return 1;
    }
    trace << "iteration,step_type,objVal,phi,bestbd,active_set_size\n";
    hooks.on_iteration = [&trace](const ntc::IterationTrace& row) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%lld,%s,%.10g,%.10g,%.10g,%d\n",
                    static_cast<long long>(row.iteration),
                    ntc::to_string(row.step), row.obj_value, row.phi,
                    row.best_bound, row.active_size);
      trace << buf;
    };
  }
  if (dump_ip) {
    hooks.on_exact_ip = [](long long iteration, std::string_view lp) {
      const std::string name = "oracle_" + std::to_string(iteration) + ".lp";
      std::ofstream out(name);
      out << lp;
      std::cout << "wrote " << name << "\n";
    };
  }

  const ntc::SolveResult result =
      ntc::solve(data, lambda, tol, ntc::make_variant(version), seed, options,
                 hooks);

  std::cout << "instance      " << data.shape().to_string() << ", n = "
            << data.n() << ", u = " << data.u() << "\n";
  std::cout << "version       " << version << "\n";
  std::cout << "lambda        " << lambda << "\n";
  std::cout << "objective     " << result.objective << "\n";
  std::cout << "best bound    " << result.best_bound << "\n";
  std::cout << "certified gap " << result.certified_gap << "\n";
  std::cout << "iterations    " << result.stats.iterations << " ("
            << result.stats.descent_steps << " descent, "
            << result.stats.oracle_calls << " oracle, "
            << result.stats.exact_ip_calls << " exact)\n";
  std::cout << "active set    " << result.active_size << " vertices\n";
  std::cout << "time          " << result.wall_seconds << " s\n";
  if (loaded.meta && !loaded.meta->factors.empty()) {
    const std::vector<double> truth =
        loaded.meta->rebuild_truth(data.shape());
    std::cout << "nmse          " << ntc::nmse(result.completed, truth)
              << "\n";
  }
  return 0;
}

int run_bench(const std::string& suite_name, const std::string& versions_text,
              int reps, double scale, std::uint64_t seed, int rank,
              double noise, double tol, int max_rho, int jobs, bool full,
              const std::string& out) {
  ntc::BenchConfig config;
  config.versions = parse_versions(versions_text);
  config.reps = reps;
  config.scale = scale;
  config.seed = seed;
  config.rank = rank;
  config.noise_sd = noise;
  config.tol = tol;
  config.max_rho = max_rho;
  config.jobs = jobs;
  if (!full) {
    // Desk-scale defaults; --full runs the complete published grid.
    config.max_r = 40;
    config.max_p = 6;
    config.max_n = 100000;
  }

  const ntc::SuiteResult result =
      ntc::run_suite(ntc::suite_from_name(suite_name), config);
  for (const auto& skip : result.skipped) {
    std::cerr << "skipped " << skip.instance_id << ": " << skip.reason << "\n";
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "cannot open " << out << "\n";
    return 1;
  }
  ntc::write_results_csv(file, result.records);
  std::cout << "wrote " << out << " (" << result.records.size()
            << " records, " << result.skipped.size() << " cells skipped)\n";
  return 0;
}

int run_report(const std::string& input, const std::string& out,
               const std::string& plot_dir) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "cannot open " << input << "\n";
    return 1;
  }
  const std::vector<ntc::RunRecord> records = ntc::read_results_csv(in);
  const std::vector<ntc::SummaryRow> rows = ntc::aggregate(records);
  std::ofstream file(out);
  if (!file) {
    std::cerr << "cannot open " << out << "\n";
    return 1;
  }
  ntc::write_summary_csv(file, rows);
  std::cout << "wrote " << out << " (" << rows.size() << " rows)\n";
  if (!plot_dir.empty()) {
    std::filesystem::create_directories(plot_dir);
    for (const auto& [family, csv] : ntc::plot_data_csvs(rows)) {
      const std::string path = plot_dir + "/" + family + ".csv";
      std::ofstream plot(path);
      plot << csv;
      std::cout << "wrote " << path << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegative tensor completion by blended conditional gradients"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  std::string gen_dims = "10,10,10";
  int gen_rank = 3;
  long long gen_n = 500;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 7;
  bool gen_enumerate = false;
  std::string gen_out = "inst.json";
  gen->add_option("--dims", gen_dims, "comma-separated dimensions");
  gen->add_option("--rank", gen_rank, "true nonnegative rank");
  gen->add_option("--n", gen_n, "sample count");
  gen->add_option("--noise", gen_noise, "additive Gaussian noise sd");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--enumerate", gen_enumerate,
                "sample every entry exactly once (n = total entries)");
  gen->add_option("-o,--out", gen_out, "output instance file");

  // solve
  auto* solve = app.add_subcommand("solve", "solve one instance");
  std::string solve_in;
  int solve_version = 1;
  std::string solve_lambda = "auto";
  double solve_tol = 1e-4;
  std::uint64_t solve_seed = 7;
  std::string solve_trace;
  bool solve_dump_ip = false;
  int solve_max_rho = ntc::kDefaultMaxRho;
  int solve_restarts = 100;
  solve->add_option("-i,--input", solve_in, "instance file")->required();
  solve->add_option("--version", solve_version, "variant version 0-10");
  solve->add_option("--lambda", solve_lambda, "ball radius or 'auto'");
  solve->add_option("--tol", solve_tol, "termination tolerance");
  solve->add_option("--seed", solve_seed, "solver seed");
  solve->add_option("--trace", solve_trace, "per-iteration trace CSV");
  solve->add_flag("--dump-ip", solve_dump_ip,
                  "write oracle_<iter>.lp at each exact oracle call");
  solve->add_option("--max-rho", solve_max_rho, "exact oracle size guard");
  solve->add_option("--restarts", solve_restarts,
                    "alternating-minimization restarts per oracle call");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  std::string bench_suite = "order3";
  std::string bench_versions = "0-10";
  int bench_reps = 20;
  double bench_scale = 1.0;
  std::uint64_t bench_seed = 1;
  int bench_rank = 3;
  double bench_noise = 0.02;
  double bench_tol = 1e-4;
  int bench_max_rho = ntc::kDefaultMaxRho;
  int bench_jobs = 1;
  bool bench_full = false;
  std::string bench_out = "results.csv";
  bench->add_option("--suite", bench_suite,
                    "order3 | increasing-order | increasing-samples-6 | "
                    "increasing-samples-7");
  bench->add_option("--versions", bench_versions, "e.g. 0-10 or 0,1,8");
  bench->add_option("--reps", bench_reps, "repetitions per cell");
  bench->add_option("--scale", bench_scale, "dimension scale factor");
  bench->add_option("--seed", bench_seed, "master seed");
  bench->add_option("--rank", bench_rank, "instance rank");
  bench->add_option("--noise", bench_noise, "instance noise sd");
  bench->add_option("--tol", bench_tol, "solver tolerance");
  bench->add_option("--max-rho", bench_max_rho, "exact oracle size guard");
  bench->add_option("--jobs", bench_jobs, "parallel workers");
  bench->add_flag("--full", bench_full, "lift desk-scale grid caps");
  bench->add_option("-o,--out", bench_out, "results CSV path");

  // report
  auto* report = app.add_subcommand("report", "aggregate results");
  std::string report_in = "results.csv";
  std::string report_out = "summary.csv";
  std::string report_plots;
  report->add_option("-i,--input", report_in, "results CSV");
  report->add_option("-o,--out", report_out, "summary CSV");
  report->add_option("--plot-data", report_plots,
                     "directory for per-family plot CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return run_gen(gen_dims, gen_rank, gen_n, gen_noise, gen_seed,
                     gen_enumerate, gen_out);
    }
    if (solve->parsed()) {
      return run_solve(solve_in, solve_version, solve_lambda, solve_tol,
                       solve_seed, solve_trace, solve_dump_ip, solve_max_rho,
                       solve_restarts);
    }
    if (bench->parsed()) {
      return run_bench(bench_suite, bench_versions, bench_reps, bench_scale,
                       bench_seed, bench_rank, bench_noise, bench_tol,
                       bench_max_rho, bench_jobs, bench_full, bench_out);
    }
    if (report->parsed()) {
      return run_report(report_in, report_out, report_plots);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
