#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sssa/errors.hpp"
#include "sssa/matrix_io.hpp"
#include "sssa/model.hpp"
#include "sssa/rng.hpp"

namespace sssa {

// One box-shaped coefficient pattern: weight `a` on atom `ind` (1-based)
// over the window of duration fraction `d` centered at `m`.
struct Activity {
  int ind = 1;
  double m = 0.0;
  double d = 0.0;
  double a = 0.0;
};

struct GenConfig {
  int channels = 20;                    // C
  int atom_count = 40;                  // N
  int time_steps = 300;                 // T
  int signal_count = 100;               // K
  int activities_per_signal = 20;       // n_a
  double d_min = 0.1;
  double d_max = 0.15;
  double weight_std = std::sqrt(2.0);   // a ~ N(0, 2) read as variance 2
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (channels < 1 || atom_count < 1 || time_steps < 1 || signal_count < 1) {
      throw InvalidConfig("synthgen: C, N, T, K must be positive");
    }
    if (activities_per_signal < 0) {
      throw InvalidConfig("synthgen: n_a must be >= 0");
    }
    if (!(0.0 <= d_min && d_min <= d_max && d_max <= 1.0)) {
      throw InvalidConfig("synthgen: need 0 <= d_min <= d_max <= 1");
    }
    if (weight_std <= 0.0) {
      throw InvalidConfig("synthgen: weight_std must be > 0");
    }
    if (noise_std < 0.0) {
      throw InvalidConfig("synthgen: noise_std must be >= 0");
    }
  }
};

struct Dataset {
  Dictionary dictionary;
  std::vector<CoefficientMatrix> true_coeffs;
  std::vector<SignalSet> signals;
  GenConfig config;
};

// Seed-stream tags. A dataset's dictionary and each signal pair get
// independent derived streams, so regeneration of any part is reproducible.
namespace seed_tag {
inline constexpr std::uint64_t kDictionary = 0;
inline constexpr std::uint64_t kTrainSplit = 1;
inline constexpr std::uint64_t kTestSplit = 2;
inline constexpr std::uint64_t kActivities = 0;
inline constexpr std::uint64_t kNoise = 1;
}  // namespace seed_tag

inline Dictionary generate_dictionary(int channels, int atom_count,
                                      std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  Eigen::MatrixXd raw(channels, atom_count);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
      raw(i, j) = rng.normal();
    }
  }
  return normalize_dictionary(raw);
}

// Heaviside-window indicator: row `ind` is 1 on integer columns j (1-based)
// with m - dT/2 <= j < m + dT/2, using the H(0) = 1 convention.
inline Eigen::MatrixXd activity_matrix(const Activity& act, int atom_count,
                                       int time_steps) {
  if (act.ind < 1 || act.ind > atom_count) {
    throw IndexOutOfRange("activity index " + std::to_string(act.ind) +
                          " outside {1.." + std::to_string(atom_count) + "}");
  }
  Eigen::MatrixXd pattern = Eigen::MatrixXd::Zero(atom_count, time_steps);
  const double half_width = act.d * time_steps / 2.0;
  const double lo = act.m - half_width;
  const double hi = act.m + half_width;
  for (int j = 1; j <= time_steps; ++j) {
    if (lo <= j && j < hi) {
      pattern(act.ind - 1, j - 1) = 1.0;
    }
  }
  return pattern;
}

// X = sum_i a_i * activity(ind_i, m_i, d_i). Per activity the stream yields
// ind, m, d, a in that order.
inline CoefficientMatrix generate_decomposition(const GenConfig& cfg,
                                                std::uint64_t seed) {
  cfg.validate();
  Xoshiro256StarStar rng(seed);
  CoefficientMatrix x =
      Eigen::MatrixXd::Zero(cfg.atom_count, cfg.time_steps);
  for (int i = 0; i < cfg.activities_per_signal; ++i) {
    Activity act;
    act.ind = rng.uniform_index(cfg.atom_count);
    act.m = rng.uniform(0.0, static_cast<double>(cfg.time_steps));
    act.d = rng.uniform(cfg.d_min, cfg.d_max);
    act.a = rng.normal(0.0, cfg.weight_std);
    x += act.a * activity_matrix(act, cfg.atom_count, cfg.time_steps);
  }
  return x;
}

// Y = Phi X + E with i.i.d. Gaussian noise of the given standard deviation.
inline SignalSet synthesize(const Dictionary& dict, const CoefficientMatrix& x,
                            double noise_std, std::uint64_t seed) {
  if (x.rows() != dict.atom_count()) {
    throw DimensionMismatch("synthesize: coefficient rows " +
                            std::to_string(x.rows()) + " != atom count " +
                            std::to_string(dict.atom_count()));
  }
  Eigen::MatrixXd y = dict.atoms * x;
  if (noise_std > 0.0) {
    Xoshiro256StarStar rng(seed);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      for (Eigen::Index j = 0; j < y.cols(); ++j) {
        y(i, j) += rng.normal(0.0, noise_std);
      }
    }
  }
  return SignalSet{std::move(y)};
}

namespace detail {

inline Dataset generate_split(const GenConfig& cfg, const Dictionary& dict,
                              std::uint64_t split_seed) {
  Dataset ds;
  ds.dictionary = dict;
  ds.config = cfg;
  ds.true_coeffs.reserve(static_cast<std::size_t>(cfg.signal_count));
  ds.signals.reserve(static_cast<std::size_t>(cfg.signal_count));
  for (int k = 1; k <= cfg.signal_count; ++k) {
    const std::uint64_t pair_seed = derive_seed(split_seed, k);
    CoefficientMatrix x = generate_decomposition(
        cfg, derive_seed(pair_seed, seed_tag::kActivities));
    SignalSet y = synthesize(ds.dictionary, x, cfg.noise_std,
                             derive_seed(pair_seed, seed_tag::kNoise));
    ds.true_coeffs.push_back(std::move(x));
    ds.signals.push_back(std::move(y));
  }
  return ds;
}

}  // namespace detail

// One dictionary plus K independent (X, Y) pairs. Pair k draws from the
// stream derive(derive(seed, train-split), k).
inline Dataset generate_dataset(const GenConfig& cfg) {
  cfg.validate();
  const Dictionary dict = generate_dictionary(
      cfg.channels, cfg.atom_count,
      derive_seed(cfg.seed, seed_tag::kDictionary));
  return detail::generate_split(cfg, dict, derive_seed(cfg.seed, seed_tag::kTrainSplit));
}

// Train and test splits sharing one dictionary, the layout the benchmark and
// the dataset directory format use. The train split coincides with
// generate_dataset(cfg) on the same seed.
struct TrainTestBundle {
  Dataset train;
  Dataset test;
};

inline TrainTestBundle generate_train_test(const GenConfig& cfg) {
  cfg.validate();
  const Dictionary dict = generate_dictionary(
      cfg.channels, cfg.atom_count,
      derive_seed(cfg.seed, seed_tag::kDictionary));
  TrainTestBundle bundle;
  bundle.train = detail::generate_split(
      cfg, dict, derive_seed(cfg.seed, seed_tag::kTrainSplit));
  bundle.test = detail::generate_split(
      cfg, dict, derive_seed(cfg.seed, seed_tag::kTestSplit));
  return bundle;
}

inline nlohmann::json gen_config_to_json(const GenConfig& cfg) {
  return nlohmann::json{
      {"C", cfg.channels},
      {"N", cfg.atom_count},
      {"T", cfg.time_steps},
      {"K", cfg.signal_count},
      {"n_a", cfg.activities_per_signal},
      {"d_min", cfg.d_min},
      {"d_max", cfg.d_max},
      {"weight_std", cfg.weight_std},
      {"noise_std", cfg.noise_std},
      {"seed", cfg.seed},
  };
}

inline GenConfig gen_config_from_json(const nlohmann::json& j,
                                      GenConfig cfg = {}) {
  cfg.channels = j.value("C", cfg.channels);
  cfg.atom_count = j.value("N", cfg.atom_count);
  cfg.time_steps = j.value("T", cfg.time_steps);
  cfg.signal_count = j.value("K", cfg.signal_count);
  cfg.activities_per_signal = j.value("n_a", cfg.activities_per_signal);
  cfg.d_min = j.value("d_min", cfg.d_min);
  cfg.d_max = j.value("d_max", cfg.d_max);
  cfg.weight_std = j.value("weight_std", cfg.weight_std);
  cfg.noise_std = j.value("noise_std", cfg.noise_std);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

// Directory layout: manifest.json, dict.csv, train/{coeffs,signals}_<k>.csv,
// test/{coeffs,signals}_<k>.csv with k in 1..K.
inline void write_dataset_dir(const std::filesystem::path& dir,
                              const TrainTestBundle& bundle) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "test");

  nlohmann::json manifest{
      {"format_version", 1},
      {"prng", rng_algorithm_name()},
      {"config", gen_config_to_json(bundle.train.config)},
  };
  std::ofstream out(dir / "manifest.json");
  if (!out) {
    throw IoError("cannot write " + (dir / "manifest.json").string());
  }
  out << manifest.dump(2) << '\n';

  write_matrix_csv(dir / "dict.csv", bundle.train.dictionary.atoms);
  auto write_split = [&dir](const Dataset& ds, const std::string& name) {
    for (std::size_t k = 0; k < ds.true_coeffs.size(); ++k) {
      const std::string idx = std::to_string(k + 1);
      write_matrix_csv(dir / name / ("coeffs_" + idx + ".csv"),
                       ds.true_coeffs[k]);
      write_matrix_csv(dir / name / ("signals_" + idx + ".csv"),
                       ds.signals[k].samples);
    }
  };
  write_split(bundle.train, "train");
  write_split(bundle.test, "test");
}

inline TrainTestBundle read_dataset_dir(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) {
    throw IoError("cannot read " + (dir / "manifest.json").string());
  }
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest.json: " + std::string(e.what()));
  }
  const GenConfig cfg = gen_config_from_json(manifest.at("config"));

  TrainTestBundle bundle;
  Dictionary dict{read_matrix_csv(dir / "dict.csv")};
  auto read_split = [&](const std::string& name) {
    Dataset ds;
    ds.dictionary = dict;
    ds.config = cfg;
    for (int k = 1; k <= cfg.signal_count; ++k) {
      const std::string idx = std::to_string(k);
      ds.true_coeffs.push_back(
          read_matrix_csv(dir / name / ("coeffs_" + idx + ".csv")));
      ds.signals.push_back(SignalSet{
          read_matrix_csv(dir / name / ("signals_" + idx + ".csv"))});
    }
    return ds;
  };
  bundle.train = read_split("train");
  bundle.test = read_split("test");
  return bundle;
}

}  // namespace sssa
