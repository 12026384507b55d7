#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbpma/matrix.hpp"
#include "rbpma/spectral.hpp"

namespace rbpma {

/// Cluster assignment per node; values in [0, k).
using LabelVector = std::vector<int>;

/// Stochastic block model: group sizes n_1..n_K and a symmetric K x K
/// connectivity matrix psi with entries in [0, 1].
struct BlockModel {
  std::vector<Eigen::Index> sizes;
  Eigen::MatrixXd psi;

  BlockModel(std::vector<Eigen::Index> sizes_, Eigen::MatrixXd psi_)
      : sizes(std::move(sizes_)), psi(std::move(psi_)) {
    if (sizes.empty())
      throw std::invalid_argument("BlockModel: no groups");
    for (Eigen::Index s : sizes)
      if (s < 1) throw std::invalid_argument("BlockModel: group size < 1");
    const auto kk = static_cast<Eigen::Index>(sizes.size());
    if (psi.rows() != kk || psi.cols() != kk)
      throw std::invalid_argument("BlockModel: psi shape does not match sizes");
    for (Eigen::Index j = 0; j < kk; ++j)
      for (Eigen::Index i = 0; i < kk; ++i) {
        if (psi(i, j) != psi(j, i))
          throw std::invalid_argument("BlockModel: psi not symmetric");
        if (!(psi(i, j) >= 0.0 && psi(i, j) <= 1.0))
          throw std::invalid_argument("BlockModel: psi entry outside [0,1]");
      }
  }

  /// Uniform connectivity: psi_diag on the diagonal, psi_offdiag elsewhere.
  static BlockModel uniform(std::vector<Eigen::Index> sizes_, double psi_diag,
                            double psi_offdiag) {
    const auto kk = static_cast<Eigen::Index>(sizes_.size());
    Eigen::MatrixXd psi =
        Eigen::MatrixXd::Constant(kk, kk, psi_offdiag);
    psi.diagonal().setConstant(psi_diag);
    return BlockModel(std::move(sizes_), std::move(psi));
  }

  Eigen::Index n() const {
    return std::accumulate(sizes.begin(), sizes.end(), Eigen::Index{0});
  }
  Eigen::Index k() const { return static_cast<Eigen::Index>(sizes.size()); }
};

/// Binary n x K membership matrix; exactly one 1 per row.
class AssignmentMatrix {
 public:
  explicit AssignmentMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.cols() < 1)
      throw std::invalid_argument("AssignmentMatrix: empty");
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      int ones = 0;
      for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        const double e = m_(i, j);
        if (e != 0.0 && e != 1.0)
          throw std::invalid_argument("AssignmentMatrix: non-binary entry");
        if (e == 1.0) ++ones;
      }
      if (ones != 1)
        throw std::invalid_argument("AssignmentMatrix: row must have one 1");
    }
  }

  Eigen::Index n() const { return m_.rows(); }
  Eigen::Index k() const { return m_.cols(); }
  const Eigen::MatrixXd& mat() const { return m_; }

  /// Count of members per group (column sums).
  std::vector<Eigen::Index> group_sizes() const {
    std::vector<Eigen::Index> sizes(static_cast<size_t>(k()), 0);
    for (Eigen::Index i = 0; i < n(); ++i)
      for (Eigen::Index j = 0; j < k(); ++j)
        if (m_(i, j) == 1.0) ++sizes[static_cast<size_t>(j)];
    return sizes;
  }

 private:
  Eigen::MatrixXd m_;
};

inline AssignmentMatrix labels_to_assignment(const LabelVector& labels,
                                             Eigen::Index k) {
  if (labels.empty())
    throw std::invalid_argument("labels_to_assignment: empty labels");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(labels.size()), k);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k)
      throw std::invalid_argument("labels_to_assignment: label out of range");
    m(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return AssignmentMatrix(std::move(m));
}

inline LabelVector assignment_to_labels(const AssignmentMatrix& theta) {
  LabelVector labels(static_cast<size_t>(theta.n()), 0);
  for (Eigen::Index i = 0; i < theta.n(); ++i)
    for (Eigen::Index j = 0; j < theta.k(); ++j)
      if (theta.mat()(i, j) == 1.0) labels[static_cast<size_t>(i)] = static_cast<int>(j);
  return labels;
}

/// Ground-truth labels of a block model: nodes ordered by group,
/// group g covering indices [sum sizes_<g, sum sizes_<=g).
inline LabelVector ground_truth_labels(const BlockModel& m) {
  LabelVector labels;
  labels.reserve(static_cast<size_t>(m.n()));
  for (size_t g = 0; g < m.sizes.size(); ++g)
    for (Eigen::Index i = 0; i < m.sizes[g]; ++i)
      labels.push_back(static_cast<int>(g));
  return labels;
}

inline AssignmentMatrix assignment_for(const BlockModel& m) {
  return labels_to_assignment(ground_truth_labels(m), m.k());
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; bit-identical on every
// platform since mt19937_64 output is fully specified.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Bernoulli adjacency sample. The upper triangle (diagonal included) is
/// drawn row by row with A_ij ~ Bernoulli(psi_{g(i) g(j)}) and mirrored.
/// Identical seeds give identical matrices. Replicate r of an experiment
/// uses seed base_seed + r.
inline SymmetricMatrix sample_adjacency(const BlockModel& m, std::uint64_t seed,
                                        bool zero_diagonal = false) {
  const Eigen::Index n = m.n();
  const LabelVector g = ground_truth_labels(m);
  std::mt19937_64 gen(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double p = m.psi(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)]);
      const double value = detail::uniform01(gen) < p ? 1.0 : 0.0;
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  if (zero_diagonal) a.diagonal().setZero();
  return SymmetricMatrix(std::move(a));
}

/// E A = Theta Psi Theta^T, the block-constant expectation of the sample.
inline SymmetricMatrix expected_adjacency(const BlockModel& m) {
  const Eigen::Index n = m.n();
  const LabelVector g = ground_truth_labels(m);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = m.psi(g[static_cast<size_t>(i)], g[static_cast<size_t>(j)]);
  return SymmetricMatrix(std::move(a));
}

/// Projection onto the column space of Theta: Theta (Theta^T Theta)^{-1}
/// Theta^T. Entries are 1/n_g inside group g and 0 across groups, so the
/// matrix lies within [0, max_g 1/n_g] entrywise.
inline ProjectionMatrix ideal_projection(const AssignmentMatrix& theta) {
  const std::vector<Eigen::Index> sizes = theta.group_sizes();
  for (Eigen::Index s : sizes)
    if (s == 0)
      throw std::invalid_argument("ideal_projection: empty group");
  Eigen::MatrixXd u(theta.n(), theta.k());
  for (Eigen::Index j = 0; j < theta.k(); ++j) {
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(
                                sizes[static_cast<size_t>(j)]));
    u.col(j) = theta.mat().col(j) * inv_sqrt;
  }
  return ProjectionMatrix(OrthonormalBasis(std::move(u)));
}

/// Upper bound for the box: max_g 1/n_g when the sizes are known.
inline double beta_rule(const BlockModel& m) {
  Eigen::Index smallest = m.sizes.front();
  for (Eigen::Index s : m.sizes) smallest = std::min(smallest, s);
  return 1.0 / static_cast<double>(smallest);
}

/// Upper bound when only n and K are known: c*K/n, c = 1 for balanced
/// clusters and c > 1 when they are unbalanced.
inline double beta_rule(Eigen::Index n, Eigen::Index k, double c) {
  if (n < 1 || k < 1 || k > n)
    throw std::invalid_argument("beta_rule: invalid n or k");
  if (!(c > 0.0))
    throw std::invalid_argument("beta_rule: c must be positive");
  return c * static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace rbpma
