#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbpma/matrix.hpp"

namespace rbpma {

/// Entrywise box [alpha, beta]. alpha == beta is allowed (a point box).
struct BoxBounds {
  double alpha;
  double beta;

  BoxBounds(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!std::isfinite(alpha) || !std::isfinite(beta))
      throw std::invalid_argument("BoxBounds: bounds must be finite");
    if (alpha > beta)
      throw std::invalid_argument("BoxBounds: alpha > beta");
  }

  bool contains(double x) const { return alpha <= x && x <= beta; }
};

// Squared distance to the box:
//   g(x) = (min{x - alpha, 0})^2 + (min{beta - x, 0})^2.
// Zero exactly on [alpha, beta], quadratic outside, C^1 everywhere.
inline double box_penalty(double x, const BoxBounds& b) {
  const double lo = std::min(x - b.alpha, 0.0);
  const double hi = std::min(b.beta - x, 0.0);
  return lo * lo + hi * hi;
}

// g'(x) = 2 min{x - alpha, 0} - 2 min{beta - x, 0}; Lipschitz with constant 2.
inline double box_penalty_grad(double x, const BoxBounds& b) {
  return 2.0 * std::min(x - b.alpha, 0.0) - 2.0 * std::min(b.beta - x, 0.0);
}

inline double box_project(double x, const BoxBounds& b) {
  return std::min(std::max(x, b.alpha), b.beta);
}

// argmin_y (y - v)^2 + tau * g(y)  =  (v + tau * clamp(v)) / (1 + tau).
inline double box_penalty_prox(double v, const BoxBounds& b, double tau) {
  if (!(tau > 0.0))
    throw std::invalid_argument("box_penalty_prox: tau must be positive");
  return (v + tau * box_project(v, b)) / (1.0 + tau);
}

inline SymmetricMatrix box_project(const SymmetricMatrix& v, const BoxBounds& b) {
  Eigen::MatrixXd out = v.mat().cwiseMax(b.alpha).cwiseMin(b.beta);
  return SymmetricMatrix(std::move(out));
}

inline SymmetricMatrix box_penalty_prox(const SymmetricMatrix& v,
                                        const BoxBounds& b, double tau) {
  if (!(tau > 0.0))
    throw std::invalid_argument("box_penalty_prox: tau must be positive");
  Eigen::MatrixXd clipped = v.mat().cwiseMax(b.alpha).cwiseMin(b.beta);
  Eigen::MatrixXd out = (v.mat() + tau * clipped) / (1.0 + tau);
  return SymmetricMatrix(std::move(out));
}

// sum_ij g(X_ij); zero iff every entry lies in the box.
inline double penalty_sum(const SymmetricMatrix& x, const BoxBounds& b) {
  double total = 0.0;
  const Eigen::MatrixXd& m = x.mat();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      total += box_penalty(m(i, j), b);
  return total;
}

}  // namespace rbpma
