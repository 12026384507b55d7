#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "rbpma/spectral.hpp"
#include "support/oracles.hpp"

using namespace rbpma;

namespace {

Eigen::MatrixXd diag3(double a, double b, double c) {
  Eigen::Vector3d d(a, b, c);
  return d.asDiagonal();
}

void check_projection_invariants(const ProjectionMatrix& p) {
  const Eigen::MatrixXd& x = p.mat();
  CHECK((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((x * x - x).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(x.trace() - static_cast<double>(p.rank())) <= 1e-8);
}

}  // namespace

TEST_CASE("symmetric matrix construction") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(SymmetricMatrix(bad), std::invalid_argument);
  const SymmetricMatrix fixed(bad, SymmetricMatrix::OnAsymmetric::symmetrize);
  CHECK(fixed(0, 1) == 2.5);
  CHECK(fixed(1, 0) == 2.5);

  CHECK_THROWS_AS(SymmetricMatrix(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  Eigen::MatrixXd nan2 = Eigen::MatrixXd::Zero(2, 2);
  nan2(0, 0) = std::nan("");
  CHECK_THROWS_AS(SymmetricMatrix(nan2), std::invalid_argument);
}

TEST_CASE("top eigenvectors of a diagonal matrix") {
  const SymmetricMatrix m(diag3(3.0, 2.0, 1.0));
  const OrthonormalBasis u = top_k_eigenvectors(m, 2);
  REQUIRE(u.k() == 2);
  // descending eigenvalue order, sign convention positive
  CHECK_THAT(u.mat()(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(u.mat()(1, 1), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(u.mat()(1, 0), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(u.mat()(2, 1), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("top eigenvector of the identity") {
  const SymmetricMatrix m(Eigen::MatrixXd::Identity(3, 3));
  const OrthonormalBasis u = top_k_eigenvectors(m, 1);
  CHECK_THAT(u.mat().col(0).norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  const double rayleigh = u.mat().col(0).dot(m.mat() * u.mat().col(0));
  CHECK_THAT(rayleigh, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("top eigenvectors match a full Jacobi oracle") {
  for (std::uint64_t seed : {21, 22, 23, 24, 25}) {
    const Eigen::MatrixXd m = oracles::random_symmetric(5, seed);
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
    oracles::jacobi_full_eig(m, evals, evecs);
    if (evals(1) - evals(2) < 1e-3) continue;  // want a clear k=2 gap
    const OrthonormalBasis u = top_k_eigenvectors(SymmetricMatrix(m), 2);
    CHECK(oracles::max_principal_angle(u.mat(), evecs.leftCols(2)) < 1e-8);
  }
}

TEST_CASE("eigenvector extraction is deterministic") {
  const Eigen::MatrixXd m = oracles::random_symmetric(12, 77);
  const OrthonormalBasis u1 = top_k_eigenvectors(SymmetricMatrix(m), 4);
  const OrthonormalBasis u2 = top_k_eigenvectors(SymmetricMatrix(m), 4);
  CHECK(u1.mat() == u2.mat());
}

TEST_CASE("k out of range") {
  const SymmetricMatrix m(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(top_k_eigenvectors(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(top_k_eigenvectors(m, 4), std::invalid_argument);
}

TEST_CASE("projection of a diagonal matrix") {
  const ProjectionMatrix x = top_k_projection(SymmetricMatrix(diag3(3, 2, 1)), 2);
  CHECK_THAT((x.mat() - diag3(1, 1, 0)).cwiseAbs().maxCoeff(),
             Catch::Matchers::WithinAbs(0.0, 1e-12));
  check_projection_invariants(x);
}

TEST_CASE("a projection is a fixed point") {
  const Eigen::MatrixXd u = oracles::random_orthonormal(7, 3, 31);
  Eigen::MatrixXd p = u * u.transpose();
  p = (p + p.transpose()) / 2.0;
  const ProjectionMatrix x = top_k_projection(SymmetricMatrix(p), 3);
  CHECK((x.mat() - p).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rank-1 projection agrees with a grid search on the sphere") {
  const Eigen::MatrixXd m = oracles::random_symmetric(4, 41);
  const ProjectionMatrix x = top_k_projection(SymmetricMatrix(m), 1);
  const double impl = (x.mat().cwiseProduct(m)).sum();

  auto value = [&m](double t1, double t2, double t3) {
    Eigen::Vector4d v(std::cos(t1), std::sin(t1) * std::cos(t2),
                      std::sin(t1) * std::sin(t2) * std::cos(t3),
                      std::sin(t1) * std::sin(t2) * std::sin(t3));
    return v.dot(m * v);
  };
  const double pi = std::acos(-1.0);
  double best = -1e300, b1 = 0, b2 = 0, b3 = 0;
  const int n1 = 40;
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n1; ++j)
      for (int l = 0; l < 2 * n1; ++l) {
        const double t1 = pi * i / n1, t2 = pi * j / n1, t3 = pi * l / n1;
        const double val = value(t1, t2, t3);
        if (val > best) {
          best = val;
          b1 = t1;
          b2 = t2;
          b3 = t3;
        }
      }
  const double step = pi / n1;
  for (int i = -30; i <= 30; ++i)
    for (int j = -30; j <= 30; ++j)
      for (int l = -30; l <= 30; ++l) {
        const double val = value(b1 + step * i / 20.0, b2 + step * j / 20.0,
                                 b3 + step * l / 20.0);
        best = std::max(best, val);
      }

  CHECK(impl >= best - 1e-12);
  CHECK(impl - best <= 1e-4);
}

TEST_CASE("projection invariants and eigenvalue sums on random input") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(seed) * 3;
    const Eigen::MatrixXd m = oracles::random_symmetric(n, 50 + seed);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(seed % 4);
    const ProjectionMatrix x = top_k_projection(SymmetricMatrix(m), k);
    check_projection_invariants(x);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    double top = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) top += es.eigenvalues()(n - 1 - j);
    CHECK_THAT((x.mat().cwiseProduct(m)).sum(),
               Catch::Matchers::WithinRel(top, 1e-8));
  }
}

TEST_CASE("argmax is invariant to positive scaling") {
  const Eigen::MatrixXd m = oracles::random_symmetric(9, 61);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::Index k = 3;
  REQUIRE(es.eigenvalues()(9 - k) - es.eigenvalues()(9 - k - 1) > 1e-6);
  const ProjectionMatrix x1 = top_k_projection(SymmetricMatrix(m), k);
  for (double c : {0.5, 3.0, 1e4, 1e-4}) {
    const ProjectionMatrix xc = top_k_projection(SymmetricMatrix(c * m), k);
    CHECK((x1.mat() - xc.mat()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("subspace distance") {
  Eigen::MatrixXd e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  const ProjectionMatrix p{OrthonormalBasis(e1)};
  const ProjectionMatrix q{OrthonormalBasis(e2)};
  CHECK(subspace_distance(p, p) == 0.0);
  CHECK_THAT(subspace_distance(p, q),
             Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));

  const ProjectionMatrix a{OrthonormalBasis(oracles::random_orthonormal(6, 2, 71))};
  const ProjectionMatrix b{OrthonormalBasis(oracles::random_orthonormal(6, 3, 72))};
  double direct = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double d = a.mat()(i, j) - b.mat()(i, j);
      direct += d * d;
    }
  CHECK_THAT(subspace_distance(a, b),
             Catch::Matchers::WithinRel(std::sqrt(direct), 1e-12));

  const ProjectionMatrix c{OrthonormalBasis(oracles::random_orthonormal(5, 2, 73))};
  CHECK_THROWS_AS(subspace_distance(a, c), std::invalid_argument);
}

TEST_CASE("orthonormal basis validation") {
  Eigen::MatrixXd skew(3, 2);
  skew << 1.0, 0.5, 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(OrthonormalBasis(skew), std::invalid_argument);
}

TEST_CASE("degenerate spectra still give certified projections") {
  // spectrum clustered at {1, 0}: the crash-prone case for QL iteration
  const Eigen::MatrixXd u = oracles::random_orthonormal(40, 3, 74);
  Eigen::MatrixXd p = u * u.transpose();
  p = (p + p.transpose()) / 2.0;
  const ProjectionMatrix x = top_k_projection(SymmetricMatrix(p), 3);
  check_projection_invariants(x);
  CHECK((x.mat() - p).cwiseAbs().maxCoeff() < 1e-8);
}
