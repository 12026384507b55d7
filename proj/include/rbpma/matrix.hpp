#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rbpma {

/// Dense real symmetric matrix. Entries (i,j) and (j,i) are bitwise equal
/// after construction and all entries are finite.
class SymmetricMatrix {
 public:
  enum class OnAsymmetric {
    reject,      // throw if the input is not exactly symmetric
    symmetrize,  // replace M by (M + M^T) / 2
  };

  SymmetricMatrix() = default;

  explicit SymmetricMatrix(Eigen::MatrixXd m,
                           OnAsymmetric mode = OnAsymmetric::reject)
      : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw std::invalid_argument("SymmetricMatrix: matrix is not square");
    if (m_.rows() == 0)
      throw std::invalid_argument("SymmetricMatrix: matrix is empty");
    if (!m_.allFinite())
      throw std::invalid_argument("SymmetricMatrix: non-finite entry");
    if (mode == OnAsymmetric::symmetrize) {
      m_ = ((m_ + m_.transpose()) / 2.0).eval();
    } else {
      for (Eigen::Index j = 0; j < m_.cols(); ++j)
        for (Eigen::Index i = j + 1; i < m_.rows(); ++i)
          if (m_(i, j) != m_(j, i))
            throw std::invalid_argument("SymmetricMatrix: input not symmetric");
    }
  }

  static SymmetricMatrix zero(Eigen::Index n) {
    return SymmetricMatrix(Eigen::MatrixXd::Zero(n, n));
  }

  static SymmetricMatrix identity(Eigen::Index n) {
    return SymmetricMatrix(Eigen::MatrixXd::Identity(n, n));
  }

  Eigen::Index n() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

inline void require_same_dim(const SymmetricMatrix& a, const SymmetricMatrix& b,
                             const char* where) {
  if (a.n() != b.n())
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
}

}  // namespace rbpma
