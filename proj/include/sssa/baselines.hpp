#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sssa/errors.hpp"
#include "sssa/model.hpp"
#include "sssa/solver.hpp"

namespace sssa {

struct GreedyConfig {
  int max_atoms = 1;
  double residual_tol = 0.0;

  void validate(Eigen::Index atom_count) const {
    if (max_atoms < 1 || max_atoms > atom_count) {
      throw InvalidConfig("greedy: max_atoms must be in {1..N}");
    }
    if (residual_tol < 0.0) {
      throw InvalidConfig("greedy: residual_tol must be >= 0");
    }
  }
};

struct ProxConfig {
  double lambda = 0.1;
  int max_iters = 1000;
  double rel_tol = 1e-8;
  std::optional<double> step;  // absent = 1 / (2 sigma_max(Phi)^2)

  void validate() const {
    if (lambda < 0.0) {
      throw InvalidConfig("prox: lambda must be >= 0");
    }
    if (max_iters < 1) {
      throw InvalidConfig("prox: max_iters must be >= 1");
    }
    if (rel_tol <= 0.0) {
      throw InvalidConfig("prox: rel_tol must be > 0");
    }
    if (step && *step <= 0.0) {
      throw InvalidConfig("prox: step must be > 0");
    }
  }
};

// Largest singular value of Phi via power iteration on Phi^T Phi,
// 1e-8 relative tolerance, 1000 iteration cap.
inline double spectral_norm(const Eigen::MatrixXd& phi) {
  const Eigen::MatrixXd gram = phi.transpose() * phi;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows());
  v.normalize();
  double value = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd next = gram * v;
    const double next_value = next.norm();
    if (next_value == 0.0) {
      return 0.0;
    }
    v = next / next_value;
    if (std::abs(next_value - value) <= 1e-8 * next_value) {
      value = next_value;
      break;
    }
    value = next_value;
  }
  return std::sqrt(value);
}

namespace detail {

// Least-squares refit of y on the selected atoms; returns the dense
// coefficient vector (zeros off-support).
inline Eigen::VectorXd refit_support(const Eigen::MatrixXd& phi,
                                     const Eigen::VectorXd& y,
                                     const std::vector<Eigen::Index>& support) {
  Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index j = 0; j < sub.cols(); ++j) {
    sub.col(j) = phi.col(support[static_cast<std::size_t>(j)]);
  }
  Eigen::VectorXd coeffs = sub.colPivHouseholderQr().solve(y);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(phi.cols());
  for (std::size_t j = 0; j < support.size(); ++j) {
    x(support[j]) = coeffs(static_cast<Eigen::Index>(j));
  }
  return x;
}

}  // namespace detail

// Orthogonal matching pursuit on a single signal: greedy atom selection by
// largest |correlation| with the residual, full least-squares refit on the
// support each step.
inline Eigen::VectorXd omp(const Eigen::VectorXd& y, const Dictionary& dict,
                           const GreedyConfig& cfg) {
  const Eigen::MatrixXd& phi = dict.atoms;
  cfg.validate(phi.cols());
  if (y.size() != phi.rows()) {
    throw DimensionMismatch("omp: signal has " + std::to_string(y.size()) +
                            " entries, dictionary has " +
                            std::to_string(phi.rows()) + " channels");
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(phi.cols());
  Eigen::VectorXd residual = y;
  std::vector<Eigen::Index> support;
  std::vector<bool> used(static_cast<std::size_t>(phi.cols()), false);
  const double stop_norm =
      std::max(cfg.residual_tol, 1e-13 * y.norm());

  while (static_cast<int>(support.size()) < cfg.max_atoms &&
         residual.norm() > stop_norm) {
    const Eigen::VectorXd correlations = phi.transpose() * residual;
    Eigen::Index best = -1;
    double best_value = 0.0;
    for (Eigen::Index n = 0; n < correlations.size(); ++n) {
      if (used[static_cast<std::size_t>(n)]) {
        continue;
      }
      const double value = std::abs(correlations(n));
      if (value > best_value) {
        best_value = value;
        best = n;
      }
    }
    if (best < 0 || best_value == 0.0) {
      break;  // residual is orthogonal to every remaining atom
    }
    used[static_cast<std::size_t>(best)] = true;
    support.push_back(best);
    x = detail::refit_support(phi, y, support);
    residual = y - phi * x;
  }
  return x;
}

// Simultaneous OMP: one shared support for all T columns, selected by the
// l2 norm of each atom's correlations with the residual matrix.
inline CoefficientMatrix somp(const SignalSet& signals, const Dictionary& dict,
                              const GreedyConfig& cfg) {
  const Eigen::MatrixXd& phi = dict.atoms;
  cfg.validate(phi.cols());
  if (signals.channels() != phi.rows()) {
    throw DimensionMismatch("somp: channel counts differ");
  }
  const Eigen::MatrixXd& y = signals.samples;

  CoefficientMatrix x = Eigen::MatrixXd::Zero(phi.cols(), y.cols());
  Eigen::MatrixXd residual = y;
  std::vector<Eigen::Index> support;
  std::vector<bool> used(static_cast<std::size_t>(phi.cols()), false);
  const double stop_norm = std::max(cfg.residual_tol, 1e-13 * y.norm());

  auto max_column_residual = [&residual]() {
    return residual.colwise().norm().maxCoeff();
  };

  while (static_cast<int>(support.size()) < cfg.max_atoms &&
         max_column_residual() > stop_norm) {
    const Eigen::MatrixXd correlations = phi.transpose() * residual;
    Eigen::Index best = -1;
    double best_value = 0.0;
    for (Eigen::Index n = 0; n < correlations.rows(); ++n) {
      if (used[static_cast<std::size_t>(n)]) {
        continue;
      }
      const double value = correlations.row(n).norm();
      if (value > best_value) {
        best_value = value;
        best = n;
      }
    }
    if (best < 0 || best_value == 0.0) {
      break;
    }
    used[static_cast<std::size_t>(best)] = true;
    support.push_back(best);

    Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
    for (Eigen::Index j = 0; j < sub.cols(); ++j) {
      sub.col(j) = phi.col(support[static_cast<std::size_t>(j)]);
    }
    const Eigen::MatrixXd coeffs = sub.colPivHouseholderQr().solve(y);
    x.setZero();
    for (std::size_t j = 0; j < support.size(); ++j) {
      x.row(support[j]) = coeffs.row(static_cast<Eigen::Index>(j));
    }
    residual = y - phi * x;
  }
  return x;
}

namespace detail {

// FISTA on 1/2-free least squares plus a penalty handled by `prox`:
// minimizes ||Y - Phi X||_2^2 + penalty(X).
template <typename Prox, typename Penalty>
CoefficientMatrix fista(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& y,
                        const ProxConfig& cfg, Prox prox, Penalty penalty) {
  cfg.validate();
  if (y.rows() != phi.rows()) {
    throw DimensionMismatch("fista: channel counts differ");
  }
  const double sigma = spectral_norm(phi);
  const double step = cfg.step ? *cfg.step
                               : (sigma > 0.0 ? 1.0 / (2.0 * sigma * sigma)
                                              : 1.0);

  CoefficientMatrix x = Eigen::MatrixXd::Zero(phi.cols(), y.cols());
  CoefficientMatrix momentum = x;
  double t_k = 1.0;
  double objective = y.squaredNorm() + penalty(x);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const Eigen::MatrixXd gradient =
        2.0 * (phi.transpose() * (phi * momentum - y));
    const CoefficientMatrix x_next = prox(momentum - step * gradient, step);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
    momentum = x_next + ((t_k - 1.0) / t_next) * (x_next - x);
    x = x_next;
    t_k = t_next;

    const double next_objective =
        (y - phi * x).squaredNorm() + penalty(x);
    const double change = std::abs(objective - next_objective);
    objective = next_objective;
    if (change <= cfg.rel_tol * std::max(1.0, std::abs(objective))) {
      break;
    }
  }
  return x;
}

}  // namespace detail

// Column-separable LASSO min ||Y - Phi X||_2^2 + lambda ||X||_1 by FISTA.
inline CoefficientMatrix fista_lasso(const SignalSet& signals,
                                     const Dictionary& dict,
                                     const ProxConfig& cfg) {
  const double lambda = cfg.lambda;
  return detail::fista(
      dict.atoms, signals.samples, cfg,
      [lambda](const Eigen::MatrixXd& v, double step) {
        return soft_threshold(v, step * lambda);
      },
      [lambda](const Eigen::MatrixXd& x) {
        return lambda * x.cwiseAbs().sum();
      });
}

// Group LASSO with rows as groups: min ||Y - Phi X||_2^2 +
// lambda sum_n ||X(n,:)||_2. The proximal step shrinks whole rows.
inline CoefficientMatrix fista_group_lasso(const SignalSet& signals,
                                           const Dictionary& dict,
                                           const ProxConfig& cfg) {
  const double lambda = cfg.lambda;
  auto group_prox = [lambda](const Eigen::MatrixXd& v, double step) {
    Eigen::MatrixXd out = v;
    const double kappa = step * lambda;
    for (Eigen::Index n = 0; n < out.rows(); ++n) {
      const double norm = out.row(n).norm();
      if (norm <= kappa) {
        out.row(n).setZero();
      } else {
        out.row(n) *= 1.0 - kappa / norm;
      }
    }
    return out;
  };
  auto group_penalty = [lambda](const Eigen::MatrixXd& x) {
    return lambda * x.rowwise().norm().sum();
  };
  return detail::fista(dict.atoms, signals.samples, cfg, group_prox,
                       group_penalty);
}

}  // namespace sssa
