#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sssa/baselines.hpp"
#include "sssa/errors.hpp"
#include "sssa/log.hpp"
#include "sssa/matrix_io.hpp"
#include "sssa/model.hpp"
#include "sssa/solver.hpp"
#include "sssa/stats.hpp"
#include "sssa/synthgen.hpp"

namespace sssa {

enum class Method { kMultiSssa, kOmp, kSomp, kLasso, kGroupLasso };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::kMultiSssa:
      return "multi-sssa";
    case Method::kOmp:
      return "omp";
    case Method::kSomp:
      return "somp";
    case Method::kLasso:
      return "lasso";
    case Method::kGroupLasso:
      return "group-lasso";
  }
  return "?";
}

inline Method method_from_name(const std::string& name) {
  if (name == "multi-sssa") {
    return Method::kMultiSssa;
  }
  if (name == "omp") {
    return Method::kOmp;
  }
  if (name == "somp") {
    return Method::kSomp;
  }
  if (name == "lasso") {
    return Method::kLasso;
  }
  if (name == "group-lasso") {
    return Method::kGroupLasso;
  }
  throw InvalidConfig("unknown method '" + name + "'");
}

// One grid point of a method's hyperparameter search. multi-sssa reads
// (lambda1, lambda2); lasso and group-lasso read lambda from hp1; omp and
// somp read max_atoms from hp1. hp2 is 0 when unused.
struct HyperPoint {
  double hp1 = 0.0;
  double hp2 = 0.0;
};

struct GridSpec {
  std::vector<int> na_values = {5, 15, 25};
  std::vector<std::pair<double, double>> duration_pairs = {
      {0.1, 0.15}, {0.5, 0.55}, {0.9, 0.95}};
  GenConfig base;  // n_a / d_min / d_max are overwritten per cell
  std::vector<Method> methods = {Method::kMultiSssa, Method::kOmp,
                                 Method::kSomp, Method::kLasso,
                                 Method::kGroupLasso};
  std::map<Method, std::vector<HyperPoint>> hyper_grids;
  SolverConfig solver;   // lambda1/lambda2 overwritten by the search
  ProxConfig prox;       // lambda overwritten by the search

  Eigen::Index cell_count() const {
    return static_cast<Eigen::Index>(na_values.size() *
                                     duration_pairs.size());
  }

  void validate() const {
    if (na_values.empty() || duration_pairs.empty() || methods.empty()) {
      throw InvalidConfig("grid: na_values, duration_pairs, methods must be "
                          "non-empty");
    }
    for (const auto& [dmin, dmax] : duration_pairs) {
      if (!(0.0 <= dmin && dmin <= dmax && dmax <= 1.0)) {
        throw InvalidConfig("grid: need 0 <= d_min <= d_max <= 1");
      }
    }
    if (std::find(methods.begin(), methods.end(), Method::kMultiSssa) ==
        methods.end()) {
      throw InvalidConfig("grid: methods must include multi-sssa (all "
                          "comparisons are against it)");
    }
    for (Method m : methods) {
      auto it = hyper_grids.find(m);
      if (it == hyper_grids.end() || it->second.empty()) {
        throw InvalidConfig(std::string("grid: empty hyperparameter grid for ") +
                            method_name(m));
      }
    }
  }
};

// Log-spaced default lambda grid spanning shrink-to-zero to almost
// unregularized.
inline std::vector<double> default_lambda_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 10.0};
}

inline std::vector<int> default_atom_grid(int atom_count) {
  std::vector<int> grid = {1, 2, 4, 8, 16};
  grid.erase(std::remove_if(grid.begin(), grid.end(),
                            [atom_count](int a) { return a >= atom_count; }),
             grid.end());
  grid.push_back(atom_count);
  return grid;
}

inline std::map<Method, std::vector<HyperPoint>> default_hyper_grids(
    int atom_count) {
  std::map<Method, std::vector<HyperPoint>> grids;
  std::vector<HyperPoint> sssa;
  for (double l1 : default_lambda_grid()) {
    for (double l2 : default_lambda_grid()) {
      sssa.push_back({l1, l2});
    }
  }
  grids[Method::kMultiSssa] = std::move(sssa);
  std::vector<HyperPoint> lambdas;
  for (double l : default_lambda_grid()) {
    lambdas.push_back({l, 0.0});
  }
  grids[Method::kLasso] = lambdas;
  grids[Method::kGroupLasso] = lambdas;
  std::vector<HyperPoint> atoms;
  for (int a : default_atom_grid(atom_count)) {
    atoms.push_back({static_cast<double>(a), 0.0});
  }
  grids[Method::kOmp] = atoms;
  grids[Method::kSomp] = std::move(atoms);
  return grids;
}

// Desk-scale defaults; the paper-scale grid is reachable through the JSON
// config (see README).
inline GridSpec default_grid_spec() {
  GridSpec grid;
  grid.base.channels = 10;
  grid.base.atom_count = 20;
  grid.base.time_steps = 100;
  grid.base.signal_count = 20;
  grid.base.seed = 1;
  grid.hyper_grids = default_hyper_grids(grid.base.atom_count);
  grid.prox.max_iters = 1500;
  grid.prox.rel_tol = 1e-9;
  return grid;
}

struct MethodCellOutcome {
  Method method = Method::kMultiSssa;
  HyperPoint chosen;
  std::vector<double> distances;  // one per test signal
  double mean_dist = 0.0;
  double std_dist = 0.0;
  double t_vs_sssa = 0.0;
  double p_vs_sssa = 1.0;
  bool significant = false;
};

struct CellResult {
  int na_index = 0;   // 0-based grid coordinates
  int dur_index = 0;
  int na = 0;
  double d_min = 0.0;
  double d_max = 0.0;
  bool valid = true;
  std::string diagnostic;
  std::vector<MethodCellOutcome> methods;
};

// Relative Frobenius distance ||X - X_hat|| / ||X||.
inline double dist(const CoefficientMatrix& x_true,
                   const CoefficientMatrix& x_est) {
  if (x_true.rows() != x_est.rows() || x_true.cols() != x_est.cols()) {
    throw DimensionMismatch("dist: shapes differ");
  }
  const double denom = x_true.norm();
  if (denom == 0.0) {
    throw ZeroReference("dist: reference matrix is zero");
  }
  return (x_true - x_est).norm() / denom;
}

// Runs one method with fixed hyperparameters on one signal set.
inline CoefficientMatrix estimate_method(Method method, const HyperPoint& hp,
                                         const Dictionary& dict,
                                         const SignalSet& signals,
                                         const GridSpec& grid) {
  switch (method) {
    case Method::kMultiSssa: {
      SolverConfig cfg = grid.solver;
      cfg.lambda1 = hp.hp1;
      cfg.lambda2 = hp.hp2;
      ProblemInstance inst = make_problem(
          dict, signals, build_difference_operator(signals.time_steps()));
      return multi_sssa_solve(inst, cfg).x;
    }
    case Method::kOmp: {
      GreedyConfig cfg;
      cfg.max_atoms = static_cast<int>(hp.hp1);
      CoefficientMatrix x(dict.atom_count(), signals.time_steps());
      for (Eigen::Index t = 0; t < signals.time_steps(); ++t) {
        x.col(t) = omp(signals.samples.col(t), dict, cfg);
      }
      return x;
    }
    case Method::kSomp: {
      GreedyConfig cfg;
      cfg.max_atoms = static_cast<int>(hp.hp1);
      return somp(signals, dict, cfg);
    }
    case Method::kLasso: {
      ProxConfig cfg = grid.prox;
      cfg.lambda = hp.hp1;
      return fista_lasso(signals, dict, cfg);
    }
    case Method::kGroupLasso: {
      ProxConfig cfg = grid.prox;
      cfg.lambda = hp.hp1;
      return fista_group_lasso(signals, dict, cfg);
    }
  }
  throw InvalidConfig("estimate_method: unhandled method");
}

// Mean distance of a method at fixed hyperparameters over a dataset.
inline double mean_dataset_dist(Method method, const HyperPoint& hp,
                                const Dataset& ds, const GridSpec& grid) {
  double total = 0.0;
  for (std::size_t k = 0; k < ds.signals.size(); ++k) {
    const CoefficientMatrix estimate =
        estimate_method(method, hp, ds.dictionary, ds.signals[k], grid);
    total += dist(ds.true_coeffs[k], estimate);
  }
  return total / static_cast<double>(ds.signals.size());
}

// Grid point minimizing mean train distance; ties go to the smallest hp1,
// then hp2.
inline HyperPoint hyper_search(Method method, const Dataset& train,
                               const std::vector<HyperPoint>& points,
                               const GridSpec& grid) {
  if (points.empty()) {
    throw InvalidConfig("hyper_search: empty grid");
  }
  std::vector<HyperPoint> ordered = points;
  std::sort(ordered.begin(), ordered.end(),
            [](const HyperPoint& a, const HyperPoint& b) {
              return a.hp1 != b.hp1 ? a.hp1 < b.hp1 : a.hp2 < b.hp2;
            });
  HyperPoint best = ordered.front();
  double best_mean = std::numeric_limits<double>::infinity();
  for (const HyperPoint& hp : ordered) {
    const double mean = mean_dataset_dist(method, hp, train, grid);
    log_debug(std::string(method_name(method)) + " hp=(" +
              format_double(hp.hp1) + "," + format_double(hp.hp2) +
              ") train mean dist " + format_double(mean));
    if (mean < best_mean) {
      best_mean = mean;
      best = hp;
    }
  }
  return best;
}

inline CellResult run_cell(const GridSpec& grid, int na_index, int dur_index) {
  grid.validate();
  if (na_index < 0 || na_index >= static_cast<int>(grid.na_values.size()) ||
      dur_index < 0 ||
      dur_index >= static_cast<int>(grid.duration_pairs.size())) {
    throw IndexOutOfRange("run_cell: cell (" + std::to_string(na_index) +
                          "," + std::to_string(dur_index) + ") outside grid");
  }

  CellResult cell;
  cell.na_index = na_index;
  cell.dur_index = dur_index;
  cell.na = grid.na_values[static_cast<std::size_t>(na_index)];
  const auto [d_min, d_max] =
      grid.duration_pairs[static_cast<std::size_t>(dur_index)];
  cell.d_min = d_min;
  cell.d_max = d_max;

  GenConfig cfg = grid.base;
  cfg.activities_per_signal = cell.na;
  cfg.d_min = d_min;
  cfg.d_max = d_max;
  // Seeds depend only on cell coordinates, never on worker schedule.
  cfg.seed = derive_seed(grid.base.seed, static_cast<std::uint64_t>(na_index),
                         static_cast<std::uint64_t>(dur_index));

  try {
    const TrainTestBundle bundle = generate_train_test(cfg);
    for (Method method : grid.methods) {
      MethodCellOutcome outcome;
      outcome.method = method;
      outcome.chosen = hyper_search(method, bundle.train,
                                    grid.hyper_grids.at(method), grid);
      outcome.distances.reserve(bundle.test.signals.size());
      for (std::size_t k = 0; k < bundle.test.signals.size(); ++k) {
        const CoefficientMatrix estimate =
            estimate_method(method, outcome.chosen, bundle.test.dictionary,
                            bundle.test.signals[k], grid);
        outcome.distances.push_back(
            dist(bundle.test.true_coeffs[k], estimate));
      }
      double mean = 0.0;
      for (double d : outcome.distances) {
        mean += d;
      }
      mean /= static_cast<double>(outcome.distances.size());
      double ss = 0.0;
      for (double d : outcome.distances) {
        ss += (d - mean) * (d - mean);
      }
      outcome.mean_dist = mean;
      outcome.std_dist = outcome.distances.size() > 1
                             ? std::sqrt(ss / static_cast<double>(
                                                  outcome.distances.size() - 1))
                             : 0.0;
      cell.methods.push_back(std::move(outcome));
    }

    const auto sssa_it =
        std::find_if(cell.methods.begin(), cell.methods.end(),
                     [](const MethodCellOutcome& o) {
                       return o.method == Method::kMultiSssa;
                     });
    for (MethodCellOutcome& outcome : cell.methods) {
      const TTestResult tt =
          paired_t_test(outcome.distances, sssa_it->distances);
      outcome.t_vs_sssa = tt.t;
      outcome.p_vs_sssa = tt.p;
      outcome.significant = tt.p < 0.05;
    }
  } catch (const ZeroReference& e) {
    cell.valid = false;
    cell.diagnostic = e.what();
    cell.methods.clear();
  } catch (const Error& e) {
    throw Error("cell (na=" + std::to_string(cell.na) + ", d=[" +
                format_double(cell.d_min) + "," + format_double(cell.d_max) +
                "]): " + e.what());
  }
  log_info("cell (" + std::to_string(na_index) + "," +
           std::to_string(dur_index) + ") done" +
           (cell.valid ? "" : " (invalid: " + cell.diagnostic + ")"));
  return cell;
}

// Runs every cell, optionally on a small worker pool. Output order and
// content are independent of the worker count.
inline std::vector<CellResult> run_grid(const GridSpec& grid, int jobs = 1) {
  grid.validate();
  const int n_dur = static_cast<int>(grid.duration_pairs.size());
  const int total = static_cast<int>(grid.cell_count());
  std::vector<CellResult> cells(static_cast<std::size_t>(total));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int index = next.fetch_add(1);
      if (index >= total) {
        return;
      }
      try {
        cells[static_cast<std::size_t>(index)] =
            run_cell(grid, index / n_dur, index % n_dur);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int i = 0; i < jobs; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return cells;
}

// Per-baseline difference matrices (baseline mean - multi-SSSA mean; negative
// means multi-SSSA wins) plus significance masks and the multi-SSSA mean map.
struct CompetenceMap {
  Eigen::MatrixXd sssa_mean;
  std::map<Method, Eigen::MatrixXd> difference;
  std::map<Method, Eigen::MatrixXi> significant;
};

inline CompetenceMap competence_map(const GridSpec& grid,
                                    const std::vector<CellResult>& cells) {
  const Eigen::Index rows = static_cast<Eigen::Index>(grid.na_values.size());
  const Eigen::Index cols =
      static_cast<Eigen::Index>(grid.duration_pairs.size());
  if (static_cast<Eigen::Index>(cells.size()) != rows * cols) {
    throw IncompleteGrid("competence_map: expected " +
                         std::to_string(rows * cols) + " cells, got " +
                         std::to_string(cells.size()));
  }
  std::vector<bool> seen(cells.size(), false);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  CompetenceMap map;
  map.sssa_mean = Eigen::MatrixXd::Constant(rows, cols, nan);
  for (Method m : grid.methods) {
    if (m == Method::kMultiSssa) {
      continue;
    }
    map.difference[m] = Eigen::MatrixXd::Constant(rows, cols, nan);
    map.significant[m] = Eigen::MatrixXi::Zero(rows, cols);
  }

  for (const CellResult& cell : cells) {
    const Eigen::Index i = cell.na_index;
    const Eigen::Index j = cell.dur_index;
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw IncompleteGrid("competence_map: cell outside grid");
    }
    seen[static_cast<std::size_t>(i * cols + j)] = true;
    if (!cell.valid) {
      continue;
    }
    double sssa_mean = nan;
    for (const MethodCellOutcome& outcome : cell.methods) {
      if (outcome.method == Method::kMultiSssa) {
        sssa_mean = outcome.mean_dist;
      }
    }
    map.sssa_mean(i, j) = sssa_mean;
    for (const MethodCellOutcome& outcome : cell.methods) {
      if (outcome.method == Method::kMultiSssa) {
        continue;
      }
      map.difference[outcome.method](i, j) = outcome.mean_dist - sssa_mean;
      map.significant[outcome.method](i, j) = outcome.significant ? 1 : 0;
    }
  }
  for (bool s : seen) {
    if (!s) {
      throw IncompleteGrid("competence_map: missing cell result");
    }
  }
  return map;
}

inline const char* results_csv_header() {
  return "na_index,dur_index,na,dmin,dmax,method,hp1,hp2,mean_dist,std_dist,"
         "t_vs_sssa,p_vs_sssa,significant";
}

// results.csv: one row per cell x method, 1-based grid indices.
inline void write_results_csv(const std::filesystem::path& path,
                              const std::vector<CellResult>& cells) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << results_csv_header() << '\n';
  for (const CellResult& cell : cells) {
    if (!cell.valid) {
      out << cell.na_index + 1 << ',' << cell.dur_index + 1 << ',' << cell.na
          << ',' << format_double(cell.d_min) << ','
          << format_double(cell.d_max) << ",invalid,nan,nan,nan,nan,nan,nan,0"
          << '\n';
      continue;
    }
    for (const MethodCellOutcome& outcome : cell.methods) {
      out << cell.na_index + 1 << ',' << cell.dur_index + 1 << ',' << cell.na
          << ',' << format_double(cell.d_min) << ','
          << format_double(cell.d_max) << ',' << method_name(outcome.method)
          << ',' << format_double(outcome.chosen.hp1) << ','
          << format_double(outcome.chosen.hp2) << ','
          << format_double(outcome.mean_dist) << ','
          << format_double(outcome.std_dist) << ','
          << format_double(outcome.t_vs_sssa) << ','
          << format_double(outcome.p_vs_sssa) << ','
          << (outcome.significant ? 1 : 0) << '\n';
    }
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

namespace detail {

inline void write_map_pgm(const std::filesystem::path& base,
                          const Eigen::MatrixXd& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::isnan(m(i, j))) {
        continue;
      }
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
  }
  if (!(lo <= hi)) {
    lo = hi = 0.0;  // all cells invalid
  }
  Eigen::MatrixXd clean = m;
  for (Eigen::Index i = 0; i < clean.rows(); ++i) {
    for (Eigen::Index j = 0; j < clean.cols(); ++j) {
      if (std::isnan(clean(i, j))) {
        clean(i, j) = lo;  // invalid cells render as black
      }
    }
  }
  std::filesystem::path pgm = base;
  pgm += ".pgm";
  write_matrix_pgm(pgm, clean, lo, hi);

  nlohmann::json meta{
      {"min", lo},
      {"max", hi},
      {"rows", m.rows()},
      {"cols", m.cols()},
      {"mapping",
       "pixel = round(255 * (value - min) / (max - min)); 0 when max == min"},
  };
  std::filesystem::path meta_path = base;
  meta_path += ".pgm.meta.json";
  std::ofstream out(meta_path);
  if (!out) {
    throw IoError("cannot write " + meta_path.string());
  }
  out << meta.dump(2) << '\n';
}

}  // namespace detail

// Competence-map matrices: map_sssa (mean distances) and map_<baseline>
// (mean-difference) as CSV and/or PGM, with mask_<baseline>.csv holding the
// significance flags.
inline void emit_maps(const GridSpec& grid,
                      const std::vector<CellResult>& cells,
                      const std::filesystem::path& out_dir,
                      const std::vector<std::string>& formats) {
  std::filesystem::create_directories(out_dir);
  if (formats.empty()) {
    return;
  }
  bool csv = false;
  bool pgm = false;
  for (const std::string& f : formats) {
    if (f == "csv") {
      csv = true;
    } else if (f == "pgm") {
      pgm = true;
    } else {
      throw InvalidConfig("emit_report: unknown format '" + f + "'");
    }
  }

  const CompetenceMap map = competence_map(grid, cells);
  auto emit = [&](const std::string& stem, const Eigen::MatrixXd& m) {
    if (csv) {
      write_matrix_csv(out_dir / (stem + ".csv"), m);
    }
    if (pgm) {
      detail::write_map_pgm(out_dir / stem, m);
    }
  };
  emit("map_sssa", map.sssa_mean);
  for (const auto& [method, diff] : map.difference) {
    emit(std::string("map_") + method_name(method), diff);
    if (csv) {
      write_matrix_csv(out_dir / (std::string("mask_") + method_name(method) +
                                  ".csv"),
                       map.significant.at(method).cast<double>());
    }
  }
}

// Full benchmark report: results.csv plus the requested map files.
inline void emit_report(const GridSpec& grid,
                        const std::vector<CellResult>& cells,
                        const std::filesystem::path& out_dir,
                        const std::vector<std::string>& formats) {
  std::filesystem::create_directories(out_dir);
  write_results_csv(out_dir / "results.csv", cells);
  emit_maps(grid, cells, out_dir, formats);
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j,
                                            SolverConfig cfg = {}) {
  cfg.lambda1 = j.value("lambda1", cfg.lambda1);
  cfg.lambda2 = j.value("lambda2", cfg.lambda2);
  cfg.mu1 = j.value("mu1", cfg.mu1);
  cfg.mu2 = j.value("mu2", cfg.mu2);
  cfg.eps = j.value("eps", cfg.eps);
  cfg.iter_max = j.value("iter_max", cfg.iter_max);
  cfg.k_max = j.value("k_max", cfg.k_max);
  return cfg;
}

inline ProxConfig prox_config_from_json(const nlohmann::json& j,
                                        ProxConfig cfg = {}) {
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.rel_tol = j.value("rel_tol", cfg.rel_tol);
  if (j.contains("step") && j.at("step").is_number()) {
    cfg.step = j.at("step").get<double>();
  }
  return cfg;
}

// Bench config: grid shape, generator fields (C/N/T/K/seed/...), per-method
// hyperparameter grids, and solver/prox settings. Every field is optional
// and falls back to the desk-scale defaults. In "max_atoms" lists, values
// < 1 stand for N.
inline GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec grid = default_grid_spec();
  if (j.contains("na_values")) {
    grid.na_values = j.at("na_values").get<std::vector<int>>();
  }
  if (j.contains("duration_pairs")) {
    grid.duration_pairs.clear();
    for (const auto& pair : j.at("duration_pairs")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw InvalidConfig("grid: duration_pairs entries must be [min, max]");
      }
      grid.duration_pairs.emplace_back(pair[0].get<double>(),
                                       pair[1].get<double>());
    }
  }
  grid.base = gen_config_from_json(j, grid.base);
  if (j.contains("methods")) {
    grid.methods.clear();
    for (const auto& name : j.at("methods")) {
      grid.methods.push_back(method_from_name(name.get<std::string>()));
    }
  }
  grid.hyper_grids = default_hyper_grids(grid.base.atom_count);
  if (j.contains("hyper_grids")) {
    for (const auto& [name, spec] : j.at("hyper_grids").items()) {
      const Method method = method_from_name(name);
      std::vector<HyperPoint> points;
      if (method == Method::kMultiSssa) {
        const auto l1 = spec.at("lambda1").get<std::vector<double>>();
        const auto l2 = spec.at("lambda2").get<std::vector<double>>();
        for (double a : l1) {
          for (double b : l2) {
            points.push_back({a, b});
          }
        }
      } else if (method == Method::kOmp || method == Method::kSomp) {
        for (int a : spec.at("max_atoms").get<std::vector<int>>()) {
          points.push_back(
              {static_cast<double>(a < 1 ? grid.base.atom_count : a), 0.0});
        }
      } else {
        for (double l : spec.at("lambda").get<std::vector<double>>()) {
          points.push_back({l, 0.0});
        }
      }
      grid.hyper_grids[method] = std::move(points);
    }
  }
  if (j.contains("solver")) {
    grid.solver = solver_config_from_json(j.at("solver"), grid.solver);
  }
  if (j.contains("prox")) {
    grid.prox = prox_config_from_json(j.at("prox"), grid.prox);
  }
  return grid;
}

// Rebuilds enough of the cell results from results.csv to re-render maps.
inline std::pair<GridSpec, std::vector<CellResult>> read_results_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header()) {
    throw IoError(path.string() + ": missing or unexpected header");
  }

  struct Row {
    int na_index, dur_index, na;
    double d_min, d_max;
    std::string method;
    double hp1, hp2, mean, stddev, t, p;
    int significant;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(ss, cell, ',')) {
      fields.push_back(cell);
    }
    if (fields.size() != 13) {
      throw IoError(path.string() + ": malformed row '" + line + "'");
    }
    Row row;
    try {
      row.na_index = std::stoi(fields[0]) - 1;
      row.dur_index = std::stoi(fields[1]) - 1;
      row.na = std::stoi(fields[2]);
      row.d_min = std::stod(fields[3]);
      row.d_max = std::stod(fields[4]);
      row.method = fields[5];
      row.hp1 = std::stod(fields[6]);
      row.hp2 = std::stod(fields[7]);
      row.mean = std::stod(fields[8]);
      row.stddev = std::stod(fields[9]);
      row.t = std::stod(fields[10]);
      row.p = std::stod(fields[11]);
      row.significant = std::stoi(fields[12]);
    } catch (const std::exception&) {
      throw IoError(path.string() + ": malformed row '" + line + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw IoError(path.string() + ": no data rows");
  }

  GridSpec grid;
  grid.na_values.clear();
  grid.duration_pairs.clear();
  std::map<std::pair<int, int>, CellResult> cell_map;
  std::vector<std::string> method_order;
  for (const Row& row : rows) {
    if (row.na_index + 1 > static_cast<int>(grid.na_values.size())) {
      grid.na_values.resize(static_cast<std::size_t>(row.na_index) + 1, 0);
    }
    grid.na_values[static_cast<std::size_t>(row.na_index)] = row.na;
    if (row.dur_index + 1 > static_cast<int>(grid.duration_pairs.size())) {
      grid.duration_pairs.resize(static_cast<std::size_t>(row.dur_index) + 1,
                                 {0.0, 0.0});
    }
    grid.duration_pairs[static_cast<std::size_t>(row.dur_index)] = {row.d_min,
                                                                    row.d_max};
    CellResult& cell = cell_map[{row.na_index, row.dur_index}];
    cell.na_index = row.na_index;
    cell.dur_index = row.dur_index;
    cell.na = row.na;
    cell.d_min = row.d_min;
    cell.d_max = row.d_max;
    if (row.method == "invalid") {
      cell.valid = false;
      continue;
    }
    if (std::find(method_order.begin(), method_order.end(), row.method) ==
        method_order.end()) {
      method_order.push_back(row.method);
    }
    MethodCellOutcome outcome;
    outcome.method = method_from_name(row.method);
    outcome.chosen = {row.hp1, row.hp2};
    outcome.mean_dist = row.mean;
    outcome.std_dist = row.stddev;
    outcome.t_vs_sssa = row.t;
    outcome.p_vs_sssa = row.p;
    outcome.significant = row.significant != 0;
    cell.methods.push_back(std::move(outcome));
  }

  grid.methods.clear();
  for (const std::string& name : method_order) {
    grid.methods.push_back(method_from_name(name));
  }
  std::vector<CellResult> cells;
  cells.reserve(cell_map.size());
  for (auto& [coords, cell] : cell_map) {
    cells.push_back(std::move(cell));
  }
  return {std::move(grid), std::move(cells)};
}

}  // namespace sssa
