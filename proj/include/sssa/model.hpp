#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "sssa/errors.hpp"

namespace sssa {

// Decomposition weights (X in the problem statement), also reused for the
// solver auxiliaries A, B and the Bregman duals.
using CoefficientMatrix = Eigen::MatrixXd;

inline bool all_finite(const Eigen::MatrixXd& m) {
  return m.allFinite();
}

// C x N dictionary of unit-norm atoms.
struct Dictionary {
  Eigen::MatrixXd atoms;

  Eigen::Index channels() const { return atoms.rows(); }
  Eigen::Index atom_count() const { return atoms.cols(); }
};

// T consecutive C-dimensional signal samples, one per column.
struct SignalSet {
  Eigen::MatrixXd samples;

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index time_steps() const { return samples.cols(); }
};

// T x (T-1) consecutive-difference operator: column k of X * P equals
// X(:, k+1) - X(:, k).
struct DifferenceOperator {
  Eigen::MatrixXd matrix;

  Eigen::Index time_steps() const { return matrix.rows(); }
};

struct ProblemInstance {
  Dictionary dictionary;
  SignalSet signals;
  DifferenceOperator structure;
};

inline ProblemInstance make_problem(Dictionary dict, SignalSet signals,
                                    DifferenceOperator structure) {
  if (dict.channels() != signals.channels()) {
    throw DimensionMismatch("dictionary has " +
                            std::to_string(dict.channels()) +
                            " channels but signals have " +
                            std::to_string(signals.channels()));
  }
  if (structure.time_steps() != signals.time_steps()) {
    throw DimensionMismatch("difference operator covers " +
                            std::to_string(structure.time_steps()) +
                            " time steps but signals have " +
                            std::to_string(signals.time_steps()));
  }
  return ProblemInstance{std::move(dict), std::move(signals),
                         std::move(structure)};
}

// Scales every column of `raw` to unit l2 norm.
inline Dictionary normalize_dictionary(const Eigen::MatrixXd& raw) {
  if (!all_finite(raw)) {
    throw NonFinite("dictionary input contains non-finite entries");
  }
  Eigen::MatrixXd atoms = raw;
  for (Eigen::Index n = 0; n < atoms.cols(); ++n) {
    const double norm = atoms.col(n).norm();
    if (norm < 1e-300) {
      throw ZeroAtom("dictionary column " + std::to_string(n + 1) +
                     " has (near-)zero norm");
    }
    atoms.col(n) /= norm;
  }
  return Dictionary{std::move(atoms)};
}

inline DifferenceOperator build_difference_operator(Eigen::Index time_steps) {
  if (time_steps < 2) {
    throw InvalidT("difference operator needs T >= 2, got " +
                   std::to_string(time_steps));
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(time_steps, time_steps - 1);
  for (Eigen::Index k = 0; k < time_steps - 1; ++k) {
    p(k, k) = -1.0;
    p(k + 1, k) = 1.0;
  }
  return DifferenceOperator{std::move(p)};
}

// X * P without forming the product: column k is X(:,k+1) - X(:,k).
inline Eigen::MatrixXd apply_difference(const Eigen::MatrixXd& x) {
  return x.rightCols(x.cols() - 1) - x.leftCols(x.cols() - 1);
}

// U * P^T for U with T-1 columns: spreads each difference column back onto
// its two neighbouring time steps.
inline Eigen::MatrixXd apply_difference_transpose(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(u.rows(), u.cols() + 1);
  out.leftCols(u.cols()) = -u;
  out.rightCols(u.cols()) += u;
  return out;
}

// ||Y - Phi X||_2^2 + lambda1 ||X||_1 + lambda2 ||X P||_1
inline double objective_value(const ProblemInstance& inst,
                              const CoefficientMatrix& x, double lambda1,
                              double lambda2) {
  if (x.rows() != inst.dictionary.atom_count() ||
      x.cols() != inst.signals.time_steps()) {
    throw DimensionMismatch(
        "coefficients are " + std::to_string(x.rows()) + "x" +
        std::to_string(x.cols()) + " but the problem needs " +
        std::to_string(inst.dictionary.atom_count()) + "x" +
        std::to_string(inst.signals.time_steps()));
  }
  const double fit =
      (inst.signals.samples - inst.dictionary.atoms * x).squaredNorm();
  const double l1 = x.cwiseAbs().sum();
  const double tv = apply_difference(x).cwiseAbs().sum();
  return fit + lambda1 * l1 + lambda2 * tv;
}

// ||X_new - X_old||_2 / ||X_new||_2, the stopping quantity of the outer
// iteration. Returns +inf when only the denominator vanishes.
inline double relative_change(const CoefficientMatrix& x_new,
                              const CoefficientMatrix& x_old) {
  if (x_new.rows() != x_old.rows() || x_new.cols() != x_old.cols()) {
    throw DimensionMismatch("relative_change: shapes differ");
  }
  const double diff = (x_new - x_old).norm();
  const double denom = x_new.norm();
  if (denom == 0.0) {
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return diff / denom;
}

}  // namespace sssa
