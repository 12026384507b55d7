#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbpma/errors.hpp"
#include "rbpma/matrix.hpp"

namespace rbpma {

/// n x k matrix with orthonormal columns (U^T U = I_k within 1e-10 per entry).
class OrthonormalBasis {
 public:
  explicit OrthonormalBasis(Eigen::MatrixXd columns) : u_(std::move(columns)) {
    if (u_.rows() < 1 || u_.cols() < 1 || u_.cols() > u_.rows())
      throw std::invalid_argument("OrthonormalBasis: need 1 <= k <= n");
    Eigen::MatrixXd gram = u_.transpose() * u_;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("OrthonormalBasis: columns not orthonormal");
  }

  Eigen::Index n() const { return u_.rows(); }
  Eigen::Index k() const { return u_.cols(); }
  const Eigen::MatrixXd& mat() const { return u_; }

 private:
  Eigen::MatrixXd u_;
};

/// Rank-k orthogonal projection X = U U^T, materialized. Symmetry is exact,
/// idempotence and trace(X) = k follow from the certified basis.
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(OrthonormalBasis basis)
      : basis_(std::move(basis)) {
    Eigen::MatrixXd x = basis_.mat() * basis_.mat().transpose();
    x_ = (x + x.transpose()) / 2.0;
    const double k = static_cast<double>(basis_.k());
    if (std::abs(x_.trace() - k) > 1e-8)
      throw std::invalid_argument("ProjectionMatrix: trace deviates from rank");
  }

  Eigen::Index n() const { return x_.rows(); }
  Eigen::Index rank() const { return basis_.k(); }
  const OrthonormalBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& mat() const { return x_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return x_(i, j); }

  SymmetricMatrix as_symmetric() const { return SymmetricMatrix(x_); }

 private:
  OrthonormalBasis basis_;
  Eigen::MatrixXd x_;
};

namespace detail {

// Cyclic Jacobi fallback. The default tridiagonal-QL solver can exhaust its
// sweep budget on spectra clustered to machine precision (e.g. matrices that
// are themselves projections); Jacobi handles those. Returns false only if
// the off-diagonal mass fails to vanish within max_sweeps.
inline bool jacobi_eigensolve(const Eigen::MatrixXd& m, Eigen::VectorXd& evals,
                              Eigen::MatrixXd& evecs, int max_sweeps = 64) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd a = m;
  evecs = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= 1e-15 * scale * static_cast<double>(n)) {
      evals = a.diagonal();
      return true;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vip = evecs(i, p), viq = evecs(i, q);
          evecs(i, p) = c * vip - s * viq;
          evecs(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  double off = 0.0;
  for (Eigen::Index p = 0; p < n - 1; ++p)
    for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
  evals = a.diagonal();
  return std::sqrt(off) <= 1e-12 * scale * static_cast<double>(n);
}

// Deterministic sign: make each column's largest-magnitude entry positive
// (first such entry on ties).
inline void fix_column_signs(Eigen::MatrixXd& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index imax = 0;
    double amax = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (u(imax, j) < 0.0) u.col(j) = -u.col(j);
  }
}

}  // namespace detail

/// Eigenvectors of the k algebraically largest eigenvalues, eigenvalue order
/// descending. With degenerate eigenvalues at the k/k+1 boundary any valid
/// basis may be returned.
inline OrthonormalBasis top_k_eigenvectors(const SymmetricMatrix& m,
                                           Eigen::Index k) {
  const Eigen::Index n = m.n();
  if (k < 1 || k > n)
    throw std::invalid_argument("top_k_eigenvectors: k out of range");
  Eigen::MatrixXd u(n, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.mat());
  if (solver.info() == Eigen::Success) {
    // Eigen sorts ascending; reverse the last k columns.
    for (Eigen::Index j = 0; j < k; ++j)
      u.col(j) = solver.eigenvectors().col(n - 1 - j);
  } else {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    if (!detail::jacobi_eigensolve(m.mat(), evals, evecs))
      throw NumericalError("top_k_eigenvectors: eigensolver did not converge",
                           64L * static_cast<long>(n) * (n - 1) / 2);
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&evals](Eigen::Index a, Eigen::Index b) {
                       return evals(a) > evals(b);
                     });
    for (Eigen::Index j = 0; j < k; ++j)
      u.col(j) = evecs.col(order[static_cast<size_t>(j)]);
  }
  detail::fix_column_signs(u);
  return OrthonormalBasis(std::move(u));
}

/// Nearest rank-k projection to m in Frobenius norm; equivalently the
/// maximizer of <X, m> over rank-k projections.
inline ProjectionMatrix top_k_projection(const SymmetricMatrix& m,
                                         Eigen::Index k) {
  return ProjectionMatrix(top_k_eigenvectors(m, k));
}

/// ||P - Q||_F; zero iff the two projections coincide.
inline double subspace_distance(const ProjectionMatrix& p,
                                const ProjectionMatrix& q) {
  if (p.n() != q.n())
    throw std::invalid_argument("subspace_distance: dimension mismatch");
  return (p.mat() - q.mat()).norm();
}

}  // namespace rbpma
