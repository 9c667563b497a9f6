#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sssa/errors.hpp"
#include "sssa/model.hpp"
#include "sssa/sylvester.hpp"

namespace sssa {

struct SolverConfig {
  double lambda1 = 0.1;   // sparsity weight
  double lambda2 = 0.1;   // total-variation weight
  double mu1 = 1.0;       // penalty weight for A = X
  double mu2 = 1.0;       // penalty weight for B = X P
  double eps = 1e-5;      // relative-change stopping tolerance
  int iter_max = 500;
  int k_max = 1;          // inner sweeps per outer iteration

  void validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0) {
      throw InvalidConfig("solver: lambda1 and lambda2 must be >= 0");
    }
    if (mu1 <= 0.0 || mu2 <= 0.0) {
      throw InvalidConfig("solver: mu1 and mu2 must be > 0");
    }
    if (eps <= 0.0) {
      throw InvalidConfig("solver: eps must be > 0");
    }
    if (iter_max < 1 || k_max < 1) {
      throw InvalidConfig("solver: iterMax and kMax must be >= 1");
    }
  }
};

// Split-Bregman iterate: primal X, auxiliaries A (~X) and B (~XP), duals.
struct SolverState {
  CoefficientMatrix x;    // N x T
  CoefficientMatrix a;    // N x T
  CoefficientMatrix b;    // N x (T-1)
  CoefficientMatrix d_a;  // N x T
  CoefficientMatrix d_b;  // N x (T-1)
  int iteration = 0;
  double last_relative_change = std::numeric_limits<double>::infinity();
};

struct Solution {
  CoefficientMatrix x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
  double residual_a = 0.0;  // final ||X - A||_2
  double residual_b = 0.0;  // final ||X P - B||_2
};

// Entrywise sign(v) * max(|v| - kappa, 0); the exact minimizer of
// kappa ||A||_1 + 1/2 ||A - V||_2^2.
inline Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& v, double kappa) {
  if (kappa < 0.0) {
    throw NegativeThreshold("soft_threshold: kappa = " +
                            std::to_string(kappa));
  }
  return v.unaryExpr([kappa](double value) {
    const double mag = std::abs(value) - kappa;
    return mag > 0.0 ? (value > 0.0 ? mag : -mag) : 0.0;
  });
}

// Everything the inner sweep reuses across iterations.
struct SolverCaches {
  Eigen::MatrixXd two_phi_t_y;  // 2 Phi^T Y
};

// Solves the X-subproblem: with W = 2 Phi^T Phi + mu1 I and Z = mu2 P P^T,
// the stationarity condition is the Sylvester equation
//   W X + X Z = 2 Phi^T Y - mu1 (D_A - A) - mu2 (D_B - B) P^T.
inline CoefficientMatrix x_update(const SolverState& state,
                                  const SylvesterFactors& factors,
                                  const Eigen::MatrixXd& two_phi_t_y,
                                  const SolverConfig& cfg) {
  if (two_phi_t_y.rows() != state.a.rows() ||
      two_phi_t_y.cols() != state.a.cols()) {
    throw DimensionMismatch("x_update: cached Phi^T Y shape mismatch");
  }
  Eigen::MatrixXd m = two_phi_t_y - cfg.mu1 * (state.d_a - state.a) -
                      cfg.mu2 * apply_difference_transpose(state.d_b - state.b);
  return solve_sylvester(factors, m);
}

// kMax repetitions of {X-update; A <- shrink(X + D_A); B <- shrink(XP + D_B)}
// with the duals held fixed.
inline SolverState inner_sweep(SolverState state,
                               const SylvesterFactors& factors,
                               const SolverCaches& caches,
                               const SolverConfig& cfg) {
  for (int k = 0; k < cfg.k_max; ++k) {
    state.x = x_update(state, factors, caches.two_phi_t_y, cfg);
    state.a = soft_threshold(state.x + state.d_a, cfg.lambda1 / cfg.mu1);
    state.b = soft_threshold(apply_difference(state.x) + state.d_b,
                             cfg.lambda2 / cfg.mu2);
  }
  return state;
}

inline SolverState dual_update(SolverState state) {
  state.d_a += state.x - state.a;
  state.d_b += apply_difference(state.x) - state.b;
  return state;
}

inline Solution multi_sssa_solve(
    const ProblemInstance& inst, const SolverConfig& cfg,
    const std::optional<CoefficientMatrix>& x0 = std::nullopt) {
  cfg.validate();
  const Eigen::MatrixXd& phi = inst.dictionary.atoms;
  const Eigen::MatrixXd& y = inst.signals.samples;
  const Eigen::Index n = phi.cols();
  const Eigen::Index t = y.cols();
  if (t < 2) {
    throw InvalidT("multi_sssa_solve: needs at least 2 time steps");
  }

  SolverState state;
  if (x0) {
    if (x0->rows() != n || x0->cols() != t) {
      throw DimensionMismatch("multi_sssa_solve: X0 shape mismatch");
    }
    state.x = *x0;
  } else {
    state.x = Eigen::MatrixXd::Zero(n, t);
  }
  state.a = state.x;
  state.b = apply_difference(state.x);
  state.d_a = Eigen::MatrixXd::Zero(n, t);
  state.d_b = Eigen::MatrixXd::Zero(n, t - 1);

  // W and Z do not depend on the iterate; diagonalize once.
  const Eigen::MatrixXd w =
      2.0 * (phi.transpose() * phi) + cfg.mu1 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd& p = inst.structure.matrix;
  const Eigen::MatrixXd z = cfg.mu2 * (p * p.transpose());
  const SylvesterFactors factors = precompute_factors(w, z);
  const SolverCaches caches{2.0 * (phi.transpose() * y)};

  Solution solution;
  solution.objective_trace.reserve(cfg.iter_max);
  for (int it = 0; it < cfg.iter_max; ++it) {
    const CoefficientMatrix x_prev = state.x;
    state = inner_sweep(std::move(state), factors, caches, cfg);
    state = dual_update(std::move(state));
    state.iteration = it + 1;
    if (!all_finite(state.x) || !all_finite(state.a) || !all_finite(state.b) ||
        !all_finite(state.d_a) || !all_finite(state.d_b)) {
      throw NonFinite(
          "multi_sssa_solve: iterate left the finite range at iteration " +
          std::to_string(state.iteration) +
          " (mu too small or data badly scaled?)");
    }
    solution.objective_trace.push_back(
        objective_value(inst, state.x, cfg.lambda1, cfg.lambda2));
    state.last_relative_change = relative_change(state.x, x_prev);
    solution.iterations = state.iteration;
    if (state.last_relative_change < cfg.eps) {
      solution.converged = true;
      break;
    }
  }

  solution.x = std::move(state.x);
  solution.residual_a = (solution.x - state.a).norm();
  solution.residual_b = (apply_difference(solution.x) - state.b).norm();
  return solution;
}

}  // namespace sssa
