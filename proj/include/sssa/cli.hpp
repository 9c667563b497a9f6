#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sssa/bench.hpp"
#include "sssa/errors.hpp"
#include "sssa/log.hpp"
#include "sssa/matrix_io.hpp"
#include "sssa/model.hpp"
#include "sssa/solver.hpp"
#include "sssa/synthgen.hpp"

namespace sssa {

namespace cli_detail {

inline nlohmann::json load_config(const std::string& path) {
  if (path.empty()) {
    return nlohmann::json::object();
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path);
  }
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config " + path + ": " + e.what());
  }
}

inline std::vector<std::string> split_formats(const std::string& emit) {
  std::vector<std::string> formats;
  std::stringstream ss(emit);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) {
      formats.push_back(item);
    }
  }
  return formats;
}

struct SolveOptions {
  std::string config_path;
  std::string method;  // flag > config file > "multi-sssa"
  std::string dict_path;
  std::string signals_path;
  std::string out_dir = ".";
  std::optional<double> lambda1, lambda2, mu1, mu2, eps;
  std::optional<int> iter_max, k_max, max_atoms;
};

inline void run_solve(const SolveOptions& opt) {
  const nlohmann::json config = load_config(opt.config_path);
  const std::string method_str =
      !opt.method.empty() ? opt.method
                          : config.value("method", std::string("multi-sssa"));
  const Method method = method_from_name(method_str);

  const std::string dict_path =
      !opt.dict_path.empty() ? opt.dict_path : config.value("dict", "");
  const std::string signals_path = !opt.signals_path.empty()
                                       ? opt.signals_path
                                       : config.value("signals", "");
  if (dict_path.empty() || signals_path.empty()) {
    throw InvalidConfig("solve: --dict and --signals (or config entries) are "
                        "required");
  }

  const Dictionary dict = normalize_dictionary(read_matrix_csv(dict_path));
  const SignalSet signals{read_matrix_csv(signals_path)};
  if (dict.channels() != signals.channels()) {
    throw DimensionMismatch(
        "dictionary has " + std::to_string(dict.channels()) +
        " channels (rows of " + dict_path + ") but signals have " +
        std::to_string(signals.channels()) + " (rows of " + signals_path +
        ")");
  }

  SolverConfig solver = solver_config_from_json(
      config.contains("solver") ? config.at("solver") : config);
  if (opt.lambda1) solver.lambda1 = *opt.lambda1;
  if (opt.lambda2) solver.lambda2 = *opt.lambda2;
  if (opt.mu1) solver.mu1 = *opt.mu1;
  if (opt.mu2) solver.mu2 = *opt.mu2;
  if (opt.eps) solver.eps = *opt.eps;
  if (opt.iter_max) solver.iter_max = *opt.iter_max;
  if (opt.k_max) solver.k_max = *opt.k_max;

  ProxConfig prox = prox_config_from_json(
      config.contains("prox") ? config.at("prox") : config);
  prox.lambda = solver.lambda1;

  GreedyConfig greedy;
  greedy.max_atoms = static_cast<int>(
      std::min(dict.channels(), dict.atom_count()));
  if (config.contains("max_atoms")) {
    greedy.max_atoms = config.at("max_atoms").get<int>();
  }
  if (opt.max_atoms) {
    greedy.max_atoms = *opt.max_atoms;
  }

  const std::filesystem::path out_dir(opt.out_dir);
  std::filesystem::create_directories(out_dir);

  nlohmann::json stats{{"method", method_str}};
  CoefficientMatrix x;
  switch (method) {
    case Method::kMultiSssa: {
      ProblemInstance inst = make_problem(
          dict, signals, build_difference_operator(signals.time_steps()));
      const Solution solution = multi_sssa_solve(inst, solver);
      x = solution.x;
      stats["iterations"] = solution.iterations;
      stats["converged"] = solution.converged;
      stats["residual_a"] = solution.residual_a;
      stats["residual_b"] = solution.residual_b;
      stats["objective"] = solution.objective_trace.empty()
                               ? objective_value(inst, x, solver.lambda1,
                                                 solver.lambda2)
                               : solution.objective_trace.back();
      stats["objective_trace"] = solution.objective_trace;
      stats["lambda1"] = solver.lambda1;
      stats["lambda2"] = solver.lambda2;
      break;
    }
    case Method::kOmp: {
      x.resize(dict.atom_count(), signals.time_steps());
      for (Eigen::Index t = 0; t < signals.time_steps(); ++t) {
        x.col(t) = omp(signals.samples.col(t), dict, greedy);
      }
      stats["max_atoms"] = greedy.max_atoms;
      stats["objective"] = (signals.samples - dict.atoms * x).squaredNorm();
      break;
    }
    case Method::kSomp: {
      x = somp(signals, dict, greedy);
      stats["max_atoms"] = greedy.max_atoms;
      stats["objective"] = (signals.samples - dict.atoms * x).squaredNorm();
      break;
    }
    case Method::kLasso: {
      x = fista_lasso(signals, dict, prox);
      stats["lambda"] = prox.lambda;
      stats["objective"] = (signals.samples - dict.atoms * x).squaredNorm() +
                           prox.lambda * x.cwiseAbs().sum();
      break;
    }
    case Method::kGroupLasso: {
      x = fista_group_lasso(signals, dict, prox);
      stats["lambda"] = prox.lambda;
      stats["objective"] = (signals.samples - dict.atoms * x).squaredNorm() +
                           prox.lambda * x.rowwise().norm().sum();
      break;
    }
  }

  write_matrix_csv(out_dir / "coeffs.csv", x);
  std::ofstream stats_out(out_dir / "solve_stats.json");
  if (!stats_out) {
    throw IoError("cannot write " + (out_dir / "solve_stats.json").string());
  }
  stats_out << stats.dump(2) << '\n';
  log_info("solve: wrote " + (out_dir / "coeffs.csv").string());
}

}  // namespace cli_detail

// Entry point behind the `sssa` binary. Exit codes: 0 success, 1 usage
// error, 2 data/dimension error, 3 solver failure.
inline int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Sparse structured approximation of multi-channel signals"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  // generate
  auto* generate =
      app.add_subcommand("generate", "Write a synthetic train/test dataset");
  std::string gen_config, gen_out = "dataset";
  std::uint64_t gen_seed = 0;
  generate->add_option("--config", gen_config, "JSON generator config");
  generate->add_option("--out", gen_out, "output directory");
  auto* gen_seed_opt =
      generate->add_option("--seed", gen_seed, "override the config seed");

  // solve
  auto* solve = app.add_subcommand(
      "solve", "Run one method on a dictionary and signal file");
  cli_detail::SolveOptions solve_opt;
  double lambda1 = 0, lambda2 = 0, mu1 = 0, mu2 = 0, eps = 0;
  int iter_max = 0, k_max = 0, max_atoms = 0;
  solve->add_option("--config", solve_opt.config_path, "JSON solver config");
  solve->add_option("--method", solve_opt.method,
                    "multi-sssa|omp|somp|lasso|group-lasso");
  solve->add_option("--dict", solve_opt.dict_path, "dictionary CSV (C x N)");
  solve->add_option("--signals", solve_opt.signals_path,
                    "signal CSV (C x T)");
  solve->add_option("--out", solve_opt.out_dir, "output directory")
      ->default_val(".");
  auto* l1o = solve->add_option("--lambda1", lambda1, "sparsity weight");
  auto* l2o = solve->add_option("--lambda2", lambda2, "TV weight");
  auto* m1o = solve->add_option("--mu1", mu1, "penalty weight for A=X");
  auto* m2o = solve->add_option("--mu2", mu2, "penalty weight for B=XP");
  auto* epso = solve->add_option("--eps", eps, "stopping tolerance");
  auto* imo = solve->add_option("--iter-max", iter_max, "outer iterations");
  auto* kmo = solve->add_option("--k-max", k_max, "inner sweeps");
  auto* mao = solve->add_option("--max-atoms", max_atoms,
                                "greedy support budget (omp/somp)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the competence-map grid");
  std::string bench_emit = "csv,pgm";
  int jobs = 1;
  bench->add_option("--config", config_path, "JSON grid config");
  bench->add_option("--out", out_dir, "output directory")->required();
  bench->add_option("--jobs", jobs, "cell worker count")->default_val(1);
  bench->add_option("--emit", bench_emit, "map formats: csv,pgm")
      ->default_val("csv,pgm");
  auto* bench_seed_opt =
      bench->add_option("--seed", seed, "override the config seed");

  // report
  auto* report =
      app.add_subcommand("report", "Render maps from a bench output");
  std::string report_in, report_out, report_emit = "csv,pgm";
  report->add_option("--in", report_in, "bench output directory")->required();
  report->add_option("--out", report_out,
                     "target directory (default: --in)");
  report->add_option("--emit", report_emit, "map formats: csv,pgm")
      ->default_val("csv,pgm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      GenConfig cfg =
          gen_config_from_json(cli_detail::load_config(gen_config));
      if (gen_seed_opt->count() > 0) {
        cfg.seed = gen_seed;
      }
      cfg.validate();
      write_dataset_dir(gen_out, generate_train_test(cfg));
      log_info("generate: wrote dataset to " + gen_out);
    } else if (solve->parsed()) {
      if (l1o->count()) solve_opt.lambda1 = lambda1;
      if (l2o->count()) solve_opt.lambda2 = lambda2;
      if (m1o->count()) solve_opt.mu1 = mu1;
      if (m2o->count()) solve_opt.mu2 = mu2;
      if (epso->count()) solve_opt.eps = eps;
      if (imo->count()) solve_opt.iter_max = iter_max;
      if (kmo->count()) solve_opt.k_max = k_max;
      if (mao->count()) solve_opt.max_atoms = max_atoms;
      cli_detail::run_solve(solve_opt);
    } else if (bench->parsed()) {
      GridSpec grid =
          grid_spec_from_json(cli_detail::load_config(config_path));
      if (bench_seed_opt->count() > 0) {
        grid.base.seed = seed;
      }
      grid.validate();
      const std::vector<CellResult> cells = run_grid(grid, jobs);
      emit_report(grid, cells, out_dir,
                  cli_detail::split_formats(bench_emit));
      log_info("bench: wrote results to " + out_dir);
    } else if (report->parsed()) {
      const auto [grid, cells] =
          read_results_csv(std::filesystem::path(report_in) / "results.csv");
      const std::string target = report_out.empty() ? report_in : report_out;
      emit_maps(grid, cells, target,
                cli_detail::split_formats(report_emit));
      log_info("report: wrote maps to " + target);
    }
  } catch (const InvalidConfig& e) {
    log_error(e.what());
    return 1;
  } catch (const NotPositiveDefinite& e) {
    log_error(e.what());
    return 3;
  } catch (const NonFinite& e) {
    log_error(e.what());
    return 3;
  } catch (const Error& e) {
    log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 3;
  }
  return 0;
}

inline int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sssa");
  for (const std::string& arg : args) {
    argv.push_back(arg.c_str());
  }
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace sssa
