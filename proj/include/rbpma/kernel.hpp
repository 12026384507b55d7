#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "rbpma/matrix.hpp"

namespace rbpma {

/// Gaussian kernel similarity A_ij = exp(-||x_i - x_j||^2 / sigma^2) with
/// sigma^2 the mean squared pairwise distance, 2/(n(n-1)) * sum_{i<j} d_ij^2.
/// The diagonal is exactly 1. Coincident points keep similarity 1 even when
/// sigma^2 degenerates to zero; distinct points then get similarity 0.
inline SymmetricMatrix gaussian_kernel(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2)
    throw std::invalid_argument("gaussian_kernel: need at least 2 samples");
  if (!samples.allFinite())
    throw std::invalid_argument("gaussian_kernel: non-finite sample");

  Eigen::MatrixXd dist2(n, n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    dist2(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (samples.row(i) - samples.row(j)).squaredNorm();
      dist2(i, j) = d2;
      dist2(j, i) = d2;
      total += d2;
    }
  }
  const double sigma2 =
      2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));

  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double value;
      if (dist2(i, j) == 0.0)
        value = 1.0;
      else if (sigma2 == 0.0)
        value = 0.0;
      else
        value = std::exp(-dist2(i, j) / sigma2);
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  return SymmetricMatrix(std::move(a));
}

}  // namespace rbpma
