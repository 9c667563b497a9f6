#pragma once

#include <Eigen/Dense>
#include <string>

#include "sssa/errors.hpp"
#include "sssa/model.hpp"

namespace sssa {

// Eigendecomposition S = Q diag(d) Q^T of a symmetric matrix, eigenvalues
// ascending.
struct SymEig {
  Eigen::MatrixXd q;
  Eigen::VectorXd d;
};

inline SymEig sym_eig(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) {
    throw NotSquare("sym_eig: matrix is " + std::to_string(s.rows()) + "x" +
                    std::to_string(s.cols()));
  }
  if (!all_finite(s)) {
    throw NonFinite("sym_eig: matrix contains non-finite entries");
  }
  // Symmetrize to absorb round-off before factorizing.
  Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error("sym_eig: eigendecomposition failed to converge");
  }
  return SymEig{es.eigenvectors(), es.eigenvalues()};
}

// One-time diagonalization of W (N x N, positive definite) and Z (T x T,
// positive semidefinite) plus the table of reciprocals 1 / (d_w(n) + d_z(t))
// used by every subsequent Sylvester solve W X + X Z = M.
struct SylvesterFactors {
  Eigen::MatrixXd f;       // eigenvectors of W
  Eigen::VectorXd d_w;     // eigenvalues of W, ascending
  Eigen::MatrixXd g;       // eigenvectors of Z
  Eigen::VectorXd d_z;     // eigenvalues of Z, ascending
  Eigen::MatrixXd inv_diag;  // N x T, entry (n,t) = 1 / (d_w(n) + d_z(t))

  Eigen::Index rows() const { return f.rows(); }
  Eigen::Index cols() const { return g.rows(); }
};

inline SylvesterFactors precompute_factors(const Eigen::MatrixXd& w,
                                           const Eigen::MatrixXd& z) {
  SymEig ew = sym_eig(w);
  SymEig ez = sym_eig(z);

  const double w_max = ew.d(ew.d.size() - 1);
  if (ew.d(0) <= 1e-12 * w_max) {
    throw NotPositiveDefinite(
        "precompute_factors: W has minimum eigenvalue " +
        std::to_string(ew.d(0)) + " (max " + std::to_string(w_max) + ")");
  }
  for (Eigen::Index t = 0; t < ez.d.size(); ++t) {
    if (ez.d(t) < -1e-10) {
      throw NotPositiveDefinite(
          "precompute_factors: Z has eigenvalue " + std::to_string(ez.d(t)) +
          ", not positive semidefinite");
    }
    if (ez.d(t) < 0.0) {
      ez.d(t) = 0.0;  // round-off noise in P P^T
    }
  }

  const Eigen::Index n = ew.d.size();
  const Eigen::Index t_count = ez.d.size();
  Eigen::MatrixXd inv_diag(n, t_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      inv_diag(i, t) = 1.0 / (ew.d(i) + ez.d(t));
    }
  }
  return SylvesterFactors{std::move(ew.q), std::move(ew.d), std::move(ez.q),
                          std::move(ez.d), std::move(inv_diag)};
}

// Solves W X + X Z = M through the precomputed diagonalizations:
// X = F ((F^T M G) .* inv_diag) G^T.
inline CoefficientMatrix solve_sylvester(const SylvesterFactors& factors,
                                         const Eigen::MatrixXd& m) {
  if (m.rows() != factors.rows() || m.cols() != factors.cols()) {
    throw DimensionMismatch("solve_sylvester: right-hand side is " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", factors expect " +
                            std::to_string(factors.rows()) + "x" +
                            std::to_string(factors.cols()));
  }
  Eigen::MatrixXd transformed = factors.f.transpose() * m * factors.g;
  transformed.array() *= factors.inv_diag.array();
  return factors.f * transformed * factors.g.transpose();
}

}  // namespace sssa
