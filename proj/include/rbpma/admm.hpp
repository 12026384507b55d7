#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rbpma/matrix.hpp"
#include "rbpma/penalty.hpp"
#include "rbpma/spectral.hpp"

namespace rbpma {

/// Hyperparameters for the splitting solver of
///   min_{X rank-k projection}  ||A - X||_F^2 + lambda * sum_ij g(X_ij),
/// where g is the box penalty. rho defaults to 4*lambda, the value for which
/// the augmented Lagrangian is guaranteed non-increasing.
struct SolverConfig {
  Eigen::Index k;
  BoxBounds bounds;
  double lambda = 1e8;
  std::optional<double> rho = std::nullopt;  // empty means 4 * lambda
  int max_iter = 500;
  double tol_primal = 1e-6;   // on ||X - Y||_F / sqrt(n)
  double tol_change = 1e-8;   // on ||Y' - Y||_F / sqrt(n)
  bool monitor_descent = true;
  int history_stride = 1;     // keep every m-th iteration record

  double rho_value() const { return rho ? *rho : 4.0 * lambda; }
  double tau() const { return 2.0 * lambda / rho_value(); }

  void validate(Eigen::Index n) const {
    if (k < 1 || k > n)
      throw std::invalid_argument("SolverConfig: k out of range");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("SolverConfig: lambda must be positive");
    if (!(rho_value() > 0.0) || !std::isfinite(rho_value()))
      throw std::invalid_argument("SolverConfig: rho must be positive");
    if (max_iter < 1)
      throw std::invalid_argument("SolverConfig: max_iter must be positive");
    if (tol_primal < 0.0 || tol_change < 0.0)
      throw std::invalid_argument("SolverConfig: tolerances must be >= 0");
    if (history_stride < 1)
      throw std::invalid_argument("SolverConfig: history_stride must be >= 1");
  }
};

struct IterateDiagnostics {
  int iter = 0;
  double lagrangian = 0.0;       // L_rho(X, Y, Dual)
  double objective = 0.0;        // ||A - X||_F^2 + lambda * penalty_sum(X)
  double primal_residual = 0.0;  // ||X - Y||_F
  double y_change = 0.0;         // ||Y_k - Y_{k-1}||_F
  double dual_change = 0.0;      // ||Dual_k - Dual_{k-1}||_F
  double kkt_residual = 0.0;     // max_ij |Dual + rho (Y - X) - lambda g'(Y)|
};

enum class StopReason {
  converged,
  max_iter,
  descent_violation,  // monitored Lagrangian increase beyond slack; a bug signal
};

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iter: return "max_iter";
    case StopReason::descent_violation: return "descent_violation";
  }
  return "unknown";
}

struct KktResiduals {
  double primal = 0.0;
  double stationarity = 0.0;
  double eigen_gap = 0.0;
};

struct SolverState {
  ProjectionMatrix x;
  SymmetricMatrix y;
  SymmetricMatrix dual;
  int iter = 0;
  std::vector<IterateDiagnostics> history;
};

struct SolveResult {
  SolverState state;
  StopReason reason;
};

namespace detail {

inline Eigen::MatrixXd penalty_grad_matrix(const Eigen::MatrixXd& y,
                                           const BoxBounds& b) {
  return y.unaryExpr([&b](double t) { return box_penalty_grad(t, b); });
}

inline double penalty_sum_raw(const Eigen::MatrixXd& m, const BoxBounds& b) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      total += box_penalty(m(i, j), b);
  return total;
}

inline double lagrangian_raw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& y, const Eigen::MatrixXd& l,
                             const SolverConfig& cfg) {
  const double rho = cfg.rho_value();
  const double fidelity = (a - x).squaredNorm();
  const double penalty = cfg.lambda * penalty_sum_raw(y, cfg.bounds);
  const double coupling = 0.5 * rho * (x - y).squaredNorm();
  const double dual_term = (l.cwiseProduct(x - y)).sum();
  return fidelity + penalty + coupling + dual_term;
}

inline double stationarity_raw(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                               const Eigen::MatrixXd& l, const SolverConfig& cfg) {
  const Eigen::MatrixXd grad = penalty_grad_matrix(y, cfg.bounds);
  return (l + cfg.rho_value() * (y - x) - cfg.lambda * grad)
      .cwiseAbs()
      .maxCoeff();
}

// Leading-k projection of W = 2A + rho Y - Dual, computed from W / rho.
// Positive scaling leaves the top-k eigenspace unchanged and keeps the
// eigenproblem well conditioned when rho is as large as 4e8.
inline ProjectionMatrix x_update_raw(const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& y,
                                     const Eigen::MatrixXd& l,
                                     const SolverConfig& cfg) {
  const double rho = cfg.rho_value();
  Eigen::MatrixXd w_scaled = (2.0 / rho) * a + y - l / rho;
  return top_k_projection(SymmetricMatrix(std::move(w_scaled)), cfg.k);
}

}  // namespace detail

/// L_rho(X, Y, Dual) = ||A-X||_F^2 + lambda sum g(Y_ij)
///                     + (rho/2) ||X-Y||_F^2 + <Dual, X-Y>.
inline double augmented_lagrangian(const SymmetricMatrix& a,
                                   const SymmetricMatrix& x,
                                   const SymmetricMatrix& y,
                                   const SymmetricMatrix& dual,
                                   const SolverConfig& cfg) {
  require_same_dim(a, x, "augmented_lagrangian");
  require_same_dim(a, y, "augmented_lagrangian");
  require_same_dim(a, dual, "augmented_lagrangian");
  return detail::lagrangian_raw(a.mat(), x.mat(), y.mat(), dual.mat(), cfg);
}

/// argmax_{X rank-k projection} <X, W> with W = 2A + rho Y - Dual.
inline ProjectionMatrix x_update(const SymmetricMatrix& a,
                                 const SymmetricMatrix& y,
                                 const SymmetricMatrix& dual,
                                 const SolverConfig& cfg) {
  require_same_dim(a, y, "x_update");
  require_same_dim(a, dual, "x_update");
  return detail::x_update_raw(a.mat(), y.mat(), dual.mat(), cfg);
}

/// Entrywise prox step: Y = argmin ||Y - V||_F^2 + tau sum g(Y_ij) with
/// V = X + Dual/rho and tau = 2 lambda / rho.
inline SymmetricMatrix y_update(const ProjectionMatrix& x,
                                const SymmetricMatrix& dual,
                                const SolverConfig& cfg) {
  if (x.n() != dual.n())
    throw std::invalid_argument("y_update: dimension mismatch");
  SymmetricMatrix v(x.mat() + dual.mat() / cfg.rho_value());
  return box_penalty_prox(v, cfg.bounds, cfg.tau());
}

/// Dual ascent: Dual + rho (X - Y). When Y came from y_update this equals
/// lambda * g'(Y) entrywise.
inline SymmetricMatrix dual_update(const SymmetricMatrix& dual,
                                   const SymmetricMatrix& x,
                                   const SymmetricMatrix& y,
                                   const SolverConfig& cfg) {
  require_same_dim(dual, x, "dual_update");
  require_same_dim(dual, y, "dual_update");
  return SymmetricMatrix(dual.mat() + cfg.rho_value() * (x.mat() - y.mat()));
}

/// Residuals of the first-order optimality system:
///   primal        ||X - Y||_F
///   stationarity  max_ij |Dual + rho (Y - X) - lambda g'(Y)|
///   eigen_gap     <P_k(W), W> - <X, W>  with  W = 2A + rho Y - Dual.
inline KktResiduals kkt_residuals(const SymmetricMatrix& a,
                                  const SymmetricMatrix& x,
                                  const SymmetricMatrix& y,
                                  const SymmetricMatrix& dual,
                                  const SolverConfig& cfg) {
  require_same_dim(a, x, "kkt_residuals");
  require_same_dim(a, y, "kkt_residuals");
  require_same_dim(a, dual, "kkt_residuals");
  KktResiduals r;
  r.primal = (x.mat() - y.mat()).norm();
  r.stationarity = detail::stationarity_raw(x.mat(), y.mat(), dual.mat(), cfg);
  const double rho = cfg.rho_value();
  Eigen::MatrixXd w_scaled =
      (2.0 / rho) * a.mat() + y.mat() - dual.mat() / rho;
  SymmetricMatrix ws(std::move(w_scaled));
  ProjectionMatrix best = top_k_projection(ws, cfg.k);
  r.eigen_gap = rho * ((best.mat() - x.mat()).cwiseProduct(ws.mat())).sum();
  return r;
}

/// Full splitting loop. Initialization: X0 = leading-k projection of 2A
/// (or the supplied warm start), Y0 = box projection of X0, Dual0 = 0.
/// Stops when ||X-Y||_F <= tol_primal * sqrt(n) and
/// ||Y'-Y||_F <= tol_change * sqrt(n), or at max_iter.
inline SolveResult solve(const SymmetricMatrix& a, const SolverConfig& cfg,
                         const std::optional<ProjectionMatrix>& init =
                             std::nullopt) {
  cfg.validate(a.n());
  const Eigen::Index n = a.n();
  const double rho = cfg.rho_value();
  const double lambda = cfg.lambda;
  const double tau = cfg.tau();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const bool monitor = cfg.monitor_descent && rho == 4.0 * lambda;

  ProjectionMatrix x = [&] {
    if (init) {
      if (init->n() != n || init->rank() != cfg.k)
        throw std::invalid_argument("solve: init has wrong shape or rank");
      return *init;
    }
    return top_k_projection(SymmetricMatrix(2.0 * a.mat()), cfg.k);
  }();

  Eigen::MatrixXd y = x.mat().cwiseMax(cfg.bounds.alpha).cwiseMin(cfg.bounds.beta);
  Eigen::MatrixXd dual = Eigen::MatrixXd::Zero(n, n);

  std::vector<IterateDiagnostics> history;
  double lagr = detail::lagrangian_raw(a.mat(), x.mat(), y, dual, cfg);
  {
    IterateDiagnostics d;
    d.iter = 0;
    d.lagrangian = lagr;
    d.objective = (a.mat() - x.mat()).squaredNorm() +
                  lambda * detail::penalty_sum_raw(x.mat(), cfg.bounds);
    d.primal_residual = (x.mat() - y).norm();
    d.kkt_residual = detail::stationarity_raw(x.mat(), y, dual, cfg);
    history.push_back(d);
  }

  StopReason reason = StopReason::max_iter;
  int iter = 0;

  for (iter = 1; iter <= cfg.max_iter; ++iter) {
    x = detail::x_update_raw(a.mat(), y, dual, cfg);

    Eigen::MatrixXd v = x.mat() + dual / rho;
    Eigen::MatrixXd y_next =
        (v + tau * v.cwiseMax(cfg.bounds.alpha).cwiseMin(cfg.bounds.beta)) /
        (1.0 + tau);

    // Dual update: Dual + rho (X - Y') equals lambda g'(Y') exactly at the
    // prox solution; the gradient form avoids the rho-scaled rounding that the
    // affine form accumulates when rho ~ 4e8.
    Eigen::MatrixXd dual_next =
        lambda * detail::penalty_grad_matrix(y_next, cfg.bounds);

    // Symmetry upkeep against floating-point drift.
    y_next = ((y_next + y_next.transpose()) / 2.0).eval();
    dual_next = ((dual_next + dual_next.transpose()) / 2.0).eval();

    IterateDiagnostics d;
    d.iter = iter;
    d.lagrangian = detail::lagrangian_raw(a.mat(), x.mat(), y_next, dual_next, cfg);
    d.objective = (a.mat() - x.mat()).squaredNorm() +
                  lambda * detail::penalty_sum_raw(x.mat(), cfg.bounds);
    d.primal_residual = (x.mat() - y_next).norm();
    d.y_change = (y_next - y).norm();
    d.dual_change = (dual_next - dual).norm();
    d.kkt_residual = detail::stationarity_raw(x.mat(), y_next, dual_next, cfg);

    y = std::move(y_next);
    dual = std::move(dual_next);

    const bool record = (iter % cfg.history_stride) == 0;
    if (record) {
      history.push_back(d);
    }

    if (monitor) {
      const double decrease = lagr - d.lagrangian;
      const double slack = 1e-9 * (1.0 + std::abs(lagr));
      if (decrease < lambda * d.y_change * d.y_change - slack) {
        if (!record) {
          history.push_back(d);
        }
        lagr = d.lagrangian;
        reason = StopReason::descent_violation;
        break;
      }
    }
    lagr = d.lagrangian;

    if (d.primal_residual <= cfg.tol_primal * sqrt_n &&
        d.y_change <= cfg.tol_change * sqrt_n) {
      if (!record) {
        history.push_back(d);
      }
      reason = StopReason::converged;
      break;
    }
    if (iter == cfg.max_iter && !record) {
      history.push_back(d);
    }
  }
  if (iter > cfg.max_iter) iter = cfg.max_iter;

  SolverState state{std::move(x), SymmetricMatrix(std::move(y)),
                    SymmetricMatrix(std::move(dual)), iter, std::move(history)};
  return SolveResult{std::move(state), reason};
}

}  // namespace rbpma
