#include "sssa/synthgen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sssa/model.hpp"
#include "test_util.hpp"

namespace sssa {
namespace {

namespace fs = std::filesystem;

double mutual_coherence(const Eigen::MatrixXd& atoms) {
  const Eigen::MatrixXd gram = atoms.transpose() * atoms;
  double best = 0.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      best = std::max(best, std::abs(gram(i, j)));
    }
  }
  return best;
}

TEST(GenerateDictionary, UnitColumns) {
  const Dictionary dict = generate_dictionary(7, 13, 5);
  for (Eigen::Index n = 0; n < 13; ++n) {
    EXPECT_NEAR(dict.atoms.col(n).norm(), 1.0, 1e-12);
  }
}

TEST(GenerateDictionary, DeterministicPerSeed) {
  const Dictionary a = generate_dictionary(6, 10, 77);
  const Dictionary b = generate_dictionary(6, 10, 77);
  EXPECT_TRUE(a.atoms.isApprox(b.atoms, 0.0));
  const Dictionary c = generate_dictionary(6, 10, 78);
  EXPECT_FALSE(a.atoms.isApprox(c.atoms, 0.0));
}

TEST(GenerateDictionary, CoherenceMatchesRecordedMean) {
  // Gaussian 20x40 dictionaries: observed mean mutual coherence over seeds
  // 0..99, frozen from a reference run of this generator.
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    mean += mutual_coherence(generate_dictionary(20, 40, seed).atoms);
  }
  mean /= 100.0;
  EXPECT_NEAR(mean, 0.673620085418811, 1e-12);
  EXPECT_LT(mean, 0.7);
}

TEST(ActivityMatrix, ZeroDurationIsEmpty) {
  const Activity act{3, 10.0, 0.0, 1.0};
  EXPECT_TRUE((activity_matrix(act, 8, 20).array() == 0.0).all());
}

TEST(ActivityMatrix, FullDurationCoversAlmostEverything) {
  // With m = T/2 and d = 1 the window is [0, T): the half-open right edge
  // leaves column T empty.
  const int t = 12;
  const Activity act{2, t / 2.0, 1.0, 1.0};
  const Eigen::MatrixXd m = activity_matrix(act, 4, t);
  for (int j = 1; j <= t; ++j) {
    EXPECT_DOUBLE_EQ(m(1, j - 1), j < t ? 1.0 : 0.0) << "column " << j;
  }
  // Shifting the center by half a step covers the whole row.
  const Activity shifted{2, t / 2.0 + 0.5, 1.0, 1.0};
  EXPECT_TRUE(
      (activity_matrix(shifted, 4, t).row(1).array() == 1.0).all());
}

TEST(ActivityMatrix, WindowEnumeration) {
  const Activity act{3, 50.0, 0.2, 1.0};
  const Eigen::MatrixXd m = activity_matrix(act, 8, 100);
  // d*T/2 = 10, so columns 40..59 (1-based) are active.
  for (int j = 1; j <= 100; ++j) {
    const bool active = 40 <= j && j < 60;
    EXPECT_DOUBLE_EQ(m(2, j - 1), active ? 1.0 : 0.0) << "column " << j;
  }
  EXPECT_DOUBLE_EQ(m.sum(), 20.0);
  for (int row : {0, 1, 3, 4, 5, 6, 7}) {
    EXPECT_TRUE((m.row(row).array() == 0.0).all());
  }
}

TEST(ActivityMatrix, RejectsBadIndex) {
  EXPECT_THROW(activity_matrix(Activity{0, 1.0, 0.5, 1.0}, 4, 10),
               IndexOutOfRange);
  EXPECT_THROW(activity_matrix(Activity{5, 1.0, 0.5, 1.0}, 4, 10),
               IndexOutOfRange);
}

// Columns t (0-based) where X(:, t) != X(:, t-1).
int breakpoint_count(const Eigen::MatrixXd& x) {
  int count = 0;
  for (Eigen::Index t = 1; t < x.cols(); ++t) {
    if ((x.col(t) - x.col(t - 1)).cwiseAbs().maxCoeff() > 0.0) {
      ++count;
    }
  }
  return count;
}

TEST(GenerateDecomposition, NoActivitiesGiveZero) {
  GenConfig cfg;
  cfg.atom_count = 6;
  cfg.time_steps = 30;
  cfg.activities_per_signal = 0;
  EXPECT_TRUE((generate_decomposition(cfg, 1).array() == 0.0).all());
}

TEST(GenerateDecomposition, SingleActivityIsOneBox) {
  GenConfig cfg;
  cfg.atom_count = 6;
  cfg.time_steps = 50;
  cfg.activities_per_signal = 1;
  cfg.d_min = 0.3;
  cfg.d_max = 0.6;
  const CoefficientMatrix x = generate_decomposition(cfg, 9);
  int nonzero_rows = 0;
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    if (x.row(n).cwiseAbs().maxCoeff() > 0.0) {
      ++nonzero_rows;
    }
  }
  EXPECT_EQ(nonzero_rows, 1);
  EXPECT_LE(breakpoint_count(x), 2);
}

TEST(GenerateDecomposition, BreakpointCountBounded) {
  GenConfig cfg;
  cfg.atom_count = 40;
  cfg.time_steps = 300;
  cfg.activities_per_signal = 30;
  const CoefficientMatrix x = generate_decomposition(cfg, 11);
  EXPECT_LE(breakpoint_count(x), 2 * 30);
}

TEST(Synthesize, NoiselessIsExactProduct) {
  const Dictionary dict = generate_dictionary(5, 9, 21);
  const Eigen::MatrixXd x = test::random_matrix(9, 7, 22);
  const SignalSet y = synthesize(dict, x, 0.0, 23);
  EXPECT_TRUE(y.samples.isApprox(dict.atoms * x, 0.0));
}

TEST(Synthesize, NoiseVarianceNearOne) {
  const Dictionary dict = generate_dictionary(20, 10, 31);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 500);
  const SignalSet y = synthesize(dict, x, 1.0, 32);
  const double variance =
      y.samples.squaredNorm() / static_cast<double>(y.samples.size());
  EXPECT_NEAR(variance, 1.0, 0.1);
}

TEST(Synthesize, DeterministicPerSeed) {
  const Dictionary dict = generate_dictionary(4, 7, 41);
  const Eigen::MatrixXd x = test::random_matrix(7, 6, 42);
  EXPECT_TRUE(
      synthesize(dict, x, 0.5, 43).samples.isApprox(
          synthesize(dict, x, 0.5, 43).samples, 0.0));
}

TEST(Synthesize, RejectsWrongShape) {
  const Dictionary dict = generate_dictionary(4, 7, 51);
  EXPECT_THROW(synthesize(dict, Eigen::MatrixXd::Zero(6, 5), 0.0, 52),
               DimensionMismatch);
}

GenConfig small_config(std::uint64_t seed) {
  GenConfig cfg;
  cfg.channels = 5;
  cfg.atom_count = 8;
  cfg.time_steps = 40;
  cfg.signal_count = 3;
  cfg.activities_per_signal = 4;
  cfg.d_min = 0.2;
  cfg.d_max = 0.4;
  cfg.seed = seed;
  return cfg;
}

TEST(GenerateDataset, SingleSignal) {
  GenConfig cfg = small_config(61);
  cfg.signal_count = 1;
  const Dataset ds = generate_dataset(cfg);
  EXPECT_EQ(ds.true_coeffs.size(), 1u);
  EXPECT_EQ(ds.signals.size(), 1u);
}

TEST(GenerateDataset, DeterministicAndSeedSensitive) {
  const Dataset a = generate_dataset(small_config(62));
  const Dataset b = generate_dataset(small_config(62));
  EXPECT_TRUE(a.dictionary.atoms.isApprox(b.dictionary.atoms, 0.0));
  for (std::size_t k = 0; k < a.true_coeffs.size(); ++k) {
    EXPECT_TRUE(a.true_coeffs[k].isApprox(b.true_coeffs[k], 0.0));
    EXPECT_TRUE(a.signals[k].samples.isApprox(b.signals[k].samples, 0.0));
  }
  const Dataset c = generate_dataset(small_config(63));
  EXPECT_FALSE(a.dictionary.atoms.isApprox(c.dictionary.atoms, 0.0));
}

TEST(GenerateDataset, NoiselessSignalsMatchCoefficients) {
  const Dataset ds = generate_dataset(small_config(64));
  const ProblemInstance inst =
      make_problem(ds.dictionary, ds.signals[0],
                   build_difference_operator(ds.config.time_steps));
  EXPECT_DOUBLE_EQ(objective_value(inst, ds.true_coeffs[0], 0.0, 0.0), 0.0);
}

TEST(TrainTest, TrainSplitEqualsStandaloneDataset) {
  const GenConfig cfg = small_config(65);
  const TrainTestBundle bundle = generate_train_test(cfg);
  const Dataset ds = generate_dataset(cfg);
  EXPECT_TRUE(bundle.train.dictionary.atoms.isApprox(ds.dictionary.atoms, 0.0));
  for (std::size_t k = 0; k < ds.true_coeffs.size(); ++k) {
    EXPECT_TRUE(bundle.train.true_coeffs[k].isApprox(ds.true_coeffs[k], 0.0));
  }
  // Test split shares the dictionary but draws different signals.
  EXPECT_TRUE(
      bundle.test.dictionary.atoms.isApprox(bundle.train.dictionary.atoms, 0.0));
  EXPECT_FALSE(
      bundle.test.true_coeffs[0].isApprox(bundle.train.true_coeffs[0], 0.0));
}

TEST(DatasetDir, RoundTrip) {
  const fs::path dir = fs::temp_directory_path() /
                       ("sssa_ds_" + std::to_string(::getpid()));
  const GenConfig cfg = small_config(66);
  const TrainTestBundle bundle = generate_train_test(cfg);
  write_dataset_dir(dir, bundle);

  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "dict.csv"));
  EXPECT_TRUE(fs::exists(dir / "train" / "coeffs_1.csv"));
  EXPECT_TRUE(fs::exists(dir / "train" / "signals_3.csv"));
  EXPECT_TRUE(fs::exists(dir / "test" / "signals_1.csv"));

  std::ifstream in(dir / "manifest.json");
  nlohmann::json manifest;
  in >> manifest;
  EXPECT_EQ(manifest.at("format_version").get<int>(), 1);
  EXPECT_EQ(manifest.at("prng").get<std::string>(), rng_algorithm_name());
  EXPECT_EQ(manifest.at("config").at("seed").get<std::uint64_t>(), cfg.seed);

  const TrainTestBundle back = read_dataset_dir(dir);
  EXPECT_TRUE(back.train.dictionary.atoms.isApprox(
      bundle.train.dictionary.atoms, 0.0));
  for (std::size_t k = 0; k < bundle.train.true_coeffs.size(); ++k) {
    EXPECT_TRUE(
        back.train.true_coeffs[k].isApprox(bundle.train.true_coeffs[k], 0.0));
    EXPECT_TRUE(back.test.signals[k].samples.isApprox(
        bundle.test.signals[k].samples, 0.0));
  }
  fs::remove_all(dir);
}

TEST(GenConfig, RejectsBadDurations) {
  GenConfig cfg = small_config(67);
  cfg.d_min = 0.6;
  cfg.d_max = 0.4;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
  cfg.d_min = 0.2;
  cfg.d_max = 1.2;
  EXPECT_THROW(cfg.validate(), InvalidConfig);
}

}  // namespace
}  // namespace sssa
