#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sssa/model.hpp"
#include "sssa/rng.hpp"

namespace sssa::test {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
  Xoshiro256StarStar rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.normal();
    }
  }
  return m;
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  Eigen::MatrixXd m = random_matrix(n, n, seed);
  return 0.5 * (m + m.transpose());
}

inline Dictionary random_dictionary(Eigen::Index channels, Eigen::Index atoms,
                                    std::uint64_t seed) {
  return normalize_dictionary(random_matrix(channels, atoms, seed));
}

// Random orthogonal matrix from the QR factorization of a Gaussian draw.
inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  const Eigen::MatrixXd m = random_matrix(n, n, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ();
}

}  // namespace sssa::test
