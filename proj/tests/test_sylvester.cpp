#include "sssa/sylvester.hpp"

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "sssa/model.hpp"
#include "test_util.hpp"

namespace sssa {
namespace {

TEST(SymEig, AlreadyDiagonal) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 3.0;
  const SymEig eig = sym_eig(s);
  EXPECT_NEAR(eig.d(0), 2.0, 1e-14);
  EXPECT_NEAR(eig.d(1), 3.0, 1e-14);
  // Eigenvectors are axis-aligned up to sign.
  EXPECT_NEAR(std::abs(eig.q(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(eig.q(1, 1)), 1.0, 1e-14);
}

TEST(SymEig, ExchangeMatrix) {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  const SymEig eig = sym_eig(s);
  EXPECT_NEAR(eig.d(0), -1.0, 1e-14);
  EXPECT_NEAR(eig.d(1), 1.0, 1e-14);
}

TEST(SymEig, RandomReconstruction) {
  const Eigen::MatrixXd s = test::random_symmetric(6, 31);
  const SymEig eig = sym_eig(s);
  const Eigen::MatrixXd rebuilt =
      eig.q * eig.d.asDiagonal() * eig.q.transpose();
  EXPECT_LE((rebuilt - s).norm(), 1e-9 * s.norm());
  const Eigen::MatrixXd gram = eig.q.transpose() * eig.q;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-10 * 6);
  for (Eigen::Index i = 1; i < eig.d.size(); ++i) {
    EXPECT_LE(eig.d(i - 1), eig.d(i));
  }
}

TEST(SymEig, RejectsNonSquare) {
  EXPECT_THROW(sym_eig(Eigen::MatrixXd::Zero(2, 3)), NotSquare);
}

TEST(SymEig, RejectsNonFinite) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(sym_eig(s), NonFinite);
}

TEST(PrecomputeFactors, OrthonormalDictionaryGivesScaledIdentity) {
  const double mu1 = 0.5;
  const Eigen::MatrixXd phi = test::random_orthogonal(4, 21);
  const Eigen::MatrixXd w = 2.0 * phi.transpose() * phi +
                            mu1 * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
  const SylvesterFactors factors = precompute_factors(w, z);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(factors.d_w(i), 2.0 + mu1, 1e-12);
  }
  for (Eigen::Index t = 0; t < 3; ++t) {
    EXPECT_NEAR(factors.d_z(t), 0.0, 1e-15);
    for (Eigen::Index i = 0; i < 4; ++i) {
      EXPECT_NEAR(factors.inv_diag(i, t), 1.0 / (2.0 + mu1), 1e-12);
    }
  }
}

TEST(PrecomputeFactors, ChainLaplacianEigenvalues) {
  // P P^T for T=3 is the path-graph Laplacian with eigenvalues 0, 1, 3.
  const DifferenceOperator p = build_difference_operator(3);
  const Eigen::MatrixXd z = p.matrix * p.matrix.transpose();
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  ASSERT_TRUE(z.isApprox(expected, 1e-15));
  const SylvesterFactors factors =
      precompute_factors(Eigen::MatrixXd::Identity(2, 2), z);
  EXPECT_NEAR(factors.d_z(0), 0.0, 1e-12);
  EXPECT_NEAR(factors.d_z(1), 1.0, 1e-12);
  EXPECT_NEAR(factors.d_z(2), 3.0, 1e-12);
}

TEST(PrecomputeFactors, RejectsSingularW) {
  // mu1 = 0 with a rank-deficient Phi^T Phi leaves W singular.
  Eigen::MatrixXd phi(2, 3);
  phi << 1, 0, 1, 0, 1, 0;
  const Eigen::MatrixXd w = 2.0 * phi.transpose() * phi;
  EXPECT_THROW(precompute_factors(w, Eigen::MatrixXd::Zero(3, 3)),
               NotPositiveDefinite);
}

TEST(SolveSylvester, ScalarCase) {
  Eigen::MatrixXd w(1, 1), z(1, 1), m(1, 1);
  w << 2.0;
  z << 3.0;
  m << 10.0;
  const SylvesterFactors factors = precompute_factors(w, z);
  const CoefficientMatrix x = solve_sylvester(factors, m);
  EXPECT_NEAR(x(0, 0), 2.0, 1e-14);
}

TEST(SolveSylvester, ZeroZReducesToLinearSolve) {
  const Eigen::MatrixXd w = test::random_symmetric(5, 41) +
                            6.0 * Eigen::MatrixXd::Identity(5, 5);
  const Eigen::MatrixXd m = test::random_matrix(5, 4, 42);
  const SylvesterFactors factors =
      precompute_factors(w, Eigen::MatrixXd::Zero(4, 4));
  const CoefficientMatrix x = solve_sylvester(factors, m);
  const Eigen::MatrixXd direct = w.partialPivLu().solve(m);
  EXPECT_LE((x - direct).norm(), 1e-10 * direct.norm());
}

TEST(SolveSylvester, MatchesKroneckerOracle) {
  const Eigen::Index n = 6, t = 5;
  const Dictionary dict = test::random_dictionary(4, n, 51);
  const Eigen::MatrixXd w = 2.0 * dict.atoms.transpose() * dict.atoms +
                            Eigen::MatrixXd::Identity(n, n);
  const DifferenceOperator p = build_difference_operator(t);
  const Eigen::MatrixXd z = p.matrix * p.matrix.transpose();
  const Eigen::MatrixXd m = test::random_matrix(n, t, 52);
  const SylvesterFactors factors = precompute_factors(w, z);
  const CoefficientMatrix x = solve_sylvester(factors, m);
  const Eigen::MatrixXd expected = oracle::kronecker_sylvester_solve(w, z, m);
  EXPECT_LE((x - expected).norm(), 1e-8 * expected.norm());
}

TEST(SolveSylvester, RejectsWrongShape) {
  const SylvesterFactors factors = precompute_factors(
      Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(4, 4));
  EXPECT_THROW(solve_sylvester(factors, Eigen::MatrixXd::Zero(3, 5)),
               DimensionMismatch);
}

TEST(SolveSylvester, ResidualSmallOnRandomInstances) {
  Xoshiro256StarStar rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_index(10));
    const Eigen::Index t = 2 + static_cast<Eigen::Index>(rng.uniform_index(8));
    const double mu1 = rng.uniform(0.1, 5.0);
    const double mu2 = rng.uniform(0.1, 5.0);
    const Dictionary dict =
        test::random_dictionary(3 + trial % 4, n, 700 + trial);
    const Eigen::MatrixXd w = 2.0 * dict.atoms.transpose() * dict.atoms +
                              mu1 * Eigen::MatrixXd::Identity(n, n);
    const DifferenceOperator p = build_difference_operator(t);
    const Eigen::MatrixXd z = mu2 * p.matrix * p.matrix.transpose();
    const Eigen::MatrixXd m = test::random_matrix(n, t, 800 + trial);
    const SylvesterFactors factors = precompute_factors(w, z);
    const CoefficientMatrix x = solve_sylvester(factors, m);
    EXPECT_LE((w * x + x * z - m).norm(), 1e-8 * m.norm());
  }
}

TEST(SolveSylvester, LinearInRightHandSide) {
  const Eigen::MatrixXd w = test::random_symmetric(5, 71) +
                            5.0 * Eigen::MatrixXd::Identity(5, 5);
  const DifferenceOperator p = build_difference_operator(6);
  const Eigen::MatrixXd z = p.matrix * p.matrix.transpose();
  const SylvesterFactors factors = precompute_factors(w, z);
  const Eigen::MatrixXd m1 = test::random_matrix(5, 6, 72);
  const Eigen::MatrixXd m2 = test::random_matrix(5, 6, 73);
  const double alpha = 1.7, beta = -0.4;
  const CoefficientMatrix combined =
      solve_sylvester(factors, alpha * m1 + beta * m2);
  const CoefficientMatrix separate = alpha * solve_sylvester(factors, m1) +
                                     beta * solve_sylvester(factors, m2);
  EXPECT_LE((combined - separate).norm(),
            1e-9 * std::max(1.0, separate.norm()));
}

}  // namespace
}  // namespace sssa
