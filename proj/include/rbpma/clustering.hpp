#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbpma/admm.hpp"
#include "rbpma/matrix.hpp"
#include "rbpma/sbm.hpp"
#include "rbpma/spectral.hpp"

namespace rbpma {

struct KMeansConfig {
  int k = 1;
  int restarts = 20;
  int max_iter = 300;
  std::uint64_t seed = 0;
  double tol = 1e-9;  // on maximum center movement
};

struct KMeansResult {
  LabelVector labels;
  double inertia = 0.0;
};

/// Divide each row by its Euclidean norm; rows with norm below 1e-12 are
/// left untouched.
inline Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& u) {
  Eigen::MatrixXd out = u;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm >= 1e-12) out.row(i) /= norm;
  }
  return out;
}

namespace detail {

// Weighted pick: first index whose cumulative weight exceeds u * total.
inline Eigen::Index pick_weighted(const std::vector<double>& weights,
                                  double total, double u) {
  const double target = u * total;
  double cum = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (cum > target) return static_cast<Eigen::Index>(i);
  }
  return static_cast<Eigen::Index>(weights.size() - 1);
}

inline Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& points, int k,
                                     std::mt19937_64& gen) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  std::vector<double> dist2(static_cast<size_t>(n),
                            std::numeric_limits<double>::infinity());
  const Eigen::Index first = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(uniform01(gen) * static_cast<double>(n)), n - 1);
  centers.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (points.row(i) - centers.row(c - 1)).squaredNorm();
      auto& best = dist2[static_cast<size_t>(i)];
      if (d < best) best = d;
      total += best;
    }
    Eigen::Index next;
    if (total > 0.0) {
      next = pick_weighted(dist2, total, uniform01(gen));
    } else {
      // all remaining mass at the chosen centers; fall back to uniform
      next = std::min<Eigen::Index>(
          static_cast<Eigen::Index>(uniform01(gen) * static_cast<double>(n)),
          n - 1);
    }
    centers.row(c) = points.row(next);
  }
  return centers;
}

}  // namespace detail

/// Lloyd iterations from k-means++ seeding, best of cfg.restarts runs by
/// inertia (ties keep the earliest restart). Deterministic given cfg.seed;
/// restart r draws from a generator seeded with cfg.seed + r.
inline KMeansResult kmeans(const Eigen::MatrixXd& points,
                           const KMeansConfig& cfg) {
  const Eigen::Index n = points.rows();
  if (cfg.k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (n < cfg.k) throw std::invalid_argument("kmeans: fewer points than clusters");
  if (cfg.restarts < 1)
    throw std::invalid_argument("kmeans: restarts must be >= 1");

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::mt19937_64 gen(cfg.seed + static_cast<std::uint64_t>(restart));
    Eigen::MatrixXd centers = detail::kmeanspp_seed(points, cfg.k, gen);
    LabelVector labels(static_cast<size_t>(n), 0);

    for (int it = 0; it < cfg.max_iter; ++it) {
      // assignment step; ties go to the lowest center index
      for (Eigen::Index i = 0; i < n; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < cfg.k; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < dmin) {
            dmin = d;
            arg = c;
          }
        }
        labels[static_cast<size_t>(i)] = arg;
      }

      // update step
      Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(cfg.k, points.cols());
      std::vector<Eigen::Index> counts(static_cast<size_t>(cfg.k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<size_t>(i)]) += points.row(i);
        ++counts[static_cast<size_t>(labels[static_cast<size_t>(i)])];
      }

      // empty-cluster repair: re-seed at the point farthest from its center
      for (int c = 0; c < cfg.k; ++c) {
        if (counts[static_cast<size_t>(c)] > 0) continue;
        double dmax = -1.0;
        Eigen::Index far = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const int own = labels[static_cast<size_t>(i)];
          if (counts[static_cast<size_t>(own)] <= 1) continue;
          const double d = (points.row(i) - centers.row(own)).squaredNorm();
          if (d > dmax) {
            dmax = d;
            far = i;
          }
        }
        const int old = labels[static_cast<size_t>(far)];
        sums.row(old) -= points.row(far);
        --counts[static_cast<size_t>(old)];
        labels[static_cast<size_t>(far)] = c;
        sums.row(c) = points.row(far);
        counts[static_cast<size_t>(c)] = 1;
      }

      double movement = 0.0;
      for (int c = 0; c < cfg.k; ++c) {
        Eigen::RowVectorXd next =
            sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
        movement = std::max(movement, (next - centers.row(c)).norm());
        centers.row(c) = next;
      }
      if (movement <= cfg.tol) break;
    }

    // final assignment and inertia against the last centers
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < cfg.k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < dmin) {
          dmin = d;
          arg = c;
        }
      }
      labels[static_cast<size_t>(i)] = arg;
      inertia += dmin;
    }

    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.labels = labels;
    }
  }
  return best;
}

/// Spectral pipeline: k-means on the row-normalized leading-k eigenvectors
/// of the similarity matrix.
inline LabelVector spectral_cluster(const SymmetricMatrix& a, Eigen::Index k,
                                    const KMeansConfig& kmcfg) {
  OrthonormalBasis u = top_k_eigenvectors(a, k);
  KMeansConfig cfg = kmcfg;
  cfg.k = static_cast<int>(k);
  return kmeans(row_normalize(u.mat()), cfg).labels;
}

struct RbpmaClusterResult {
  LabelVector labels;
  SolverState state;
  StopReason reason;
};

/// Bounded pipeline: solve the penalized projection approximation on A,
/// then cluster the solution the same way as spectral_cluster.
inline RbpmaClusterResult rbpma_cluster(const SymmetricMatrix& a,
                                        Eigen::Index k, const BoxBounds& bounds,
                                        const SolverConfig& solver_cfg,
                                        const KMeansConfig& kmcfg) {
  SolverConfig scfg = solver_cfg;
  scfg.k = k;
  scfg.bounds = bounds;
  SolveResult sol = solve(a, scfg);
  OrthonormalBasis u = top_k_eigenvectors(sol.state.x.as_symmetric(), k);
  KMeansConfig cfg = kmcfg;
  cfg.k = static_cast<int>(k);
  LabelVector labels = kmeans(row_normalize(u.mat()), cfg).labels;
  return RbpmaClusterResult{std::move(labels), std::move(sol.state), sol.reason};
}

}  // namespace rbpma
