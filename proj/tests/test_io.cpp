#include "sssa/matrix_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"

namespace sssa {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sssa_io_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, CsvRoundTripIsExact) {
  const Eigen::MatrixXd m = test::random_matrix(7, 5, 99);
  write_matrix_csv(dir_ / "m.csv", m);
  const Eigen::MatrixXd back = read_matrix_csv(dir_ / "m.csv");
  ASSERT_EQ(back.rows(), m.rows());
  ASSERT_EQ(back.cols(), m.cols());
  // 17 significant digits round-trip doubles exactly.
  EXPECT_TRUE((back.array() == m.array()).all());
}

TEST_F(IoTest, CsvRejectsRaggedRows) {
  std::ofstream out(dir_ / "ragged.csv");
  out << "1,2,3\n1,2\n";
  out.close();
  EXPECT_THROW(read_matrix_csv(dir_ / "ragged.csv"), IoError);
}

TEST_F(IoTest, CsvRejectsMissingFile) {
  EXPECT_THROW(read_matrix_csv(dir_ / "absent.csv"), IoError);
}

TEST_F(IoTest, CsvRejectsGarbage) {
  std::ofstream out(dir_ / "bad.csv");
  out << "1,two,3\n";
  out.close();
  EXPECT_THROW(read_matrix_csv(dir_ / "bad.csv"), IoError);
}

TEST_F(IoTest, PgmAffineMapping) {
  Eigen::MatrixXd m(2, 3);
  m << 0.0, 0.5, 1.0, 0.25, 0.75, 1.0;
  write_matrix_pgm(dir_ / "m.pgm", m, 0.0, 1.0);
  const Eigen::MatrixXd pixels = read_matrix_pgm(dir_ / "m.pgm");
  ASSERT_EQ(pixels.rows(), 2);
  ASSERT_EQ(pixels.cols(), 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      EXPECT_EQ(pixels(i, j), std::lround(255.0 * m(i, j)));
    }
  }
}

TEST_F(IoTest, PgmConstantMatrixIsBlack) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Constant(2, 2, 3.5);
  write_matrix_pgm(dir_ / "c.pgm", m, 3.5, 3.5);
  const Eigen::MatrixXd pixels = read_matrix_pgm(dir_ / "c.pgm");
  EXPECT_TRUE((pixels.array() == 0).all());
}

TEST_F(IoTest, WritesAreByteIdentical) {
  const Eigen::MatrixXd m = test::random_matrix(4, 4, 5);
  write_matrix_csv(dir_ / "a.csv", m);
  write_matrix_csv(dir_ / "b.csv", m);
  std::ifstream a(dir_ / "a.csv"), b(dir_ / "b.csv");
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  EXPECT_EQ(sa, sb);
}

}  // namespace
}  // namespace sssa
