#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rbpma/penalty.hpp"
#include "support/oracles.hpp"

using namespace rbpma;

TEST_CASE("box bounds validate") {
  CHECK_THROWS_AS(BoxBounds(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(BoxBounds(0.0, std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(BoxBounds(0.5, 0.5));  // point box is legal
}

TEST_CASE("penalty value on the unit box") {
  const BoxBounds b(0.0, 1.0);
  CHECK(box_penalty(0.5, b) == 0.0);
  CHECK(box_penalty(0.0, b) == 0.0);
  CHECK(box_penalty(1.0, b) == 0.0);
  CHECK(box_penalty(-0.5, b) == 0.25);
  CHECK_THAT(box_penalty(1.3, b), Catch::Matchers::WithinAbs(0.09, 1e-15));
}

TEST_CASE("penalty derivative") {
  const BoxBounds b(0.0, 1.0);
  CHECK(box_penalty_grad(0.5, b) == 0.0);
  CHECK(box_penalty_grad(-0.5, b) == -1.0);
  CHECK_THAT(box_penalty_grad(1.3, b), Catch::Matchers::WithinAbs(0.6, 1e-15));
}

TEST_CASE("derivative matches central differences away from the kinks") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  const BoxBounds b(-0.25, 1.5);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 200) {
    const double x = unif(gen);
    if (std::abs(x - b.alpha) < 1e-3 || std::abs(x - b.beta) < 1e-3) continue;
    const double fd = (box_penalty(x + h, b) - box_penalty(x - h, b)) / (2 * h);
    CHECK_THAT(box_penalty_grad(x, b), Catch::Matchers::WithinAbs(fd, 1e-6));
    ++checked;
  }
}

TEST_CASE("derivative is 2-Lipschitz") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  const BoxBounds b(0.0, 0.3);
  for (int i = 0; i < 1000; ++i) {
    const double x = unif(gen), y = unif(gen);
    CHECK(std::abs(box_penalty_grad(x, b) - box_penalty_grad(y, b)) <=
          2.0 * std::abs(x - y) + 1e-15);
  }
}

TEST_CASE("penalty is midpoint convex") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> unif(-4.0, 4.0);
  const BoxBounds b(-1.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const double x = unif(gen), y = unif(gen);
    const double mid = box_penalty((x + y) / 2.0, b);
    CHECK(mid <= (box_penalty(x, b) + box_penalty(y, b)) / 2.0 + 1e-12);
  }
}

TEST_CASE("scalar box projection") {
  const BoxBounds b(0.0, 1.0);
  CHECK(box_project(0.4, b) == 0.4);
  CHECK(box_project(1.3, b) == 1.0);
  CHECK(box_project(-0.6, b) == 0.0);
  CHECK(box_project(box_project(7.0, b), b) == box_project(7.0, b));
}

TEST_CASE("matrix box projection clamps entrywise") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 1.3, 1.3, -0.6;
  const SymmetricMatrix clipped = box_project(SymmetricMatrix(m), BoxBounds(0.0, 1.0));
  CHECK(clipped(0, 0) == 0.5);
  CHECK(clipped(0, 1) == 1.0);
  CHECK(clipped(1, 1) == 0.0);

  Eigen::MatrixXd inside(2, 2);
  inside << 0.2, 0.3, 0.3, 0.9;
  const SymmetricMatrix same = box_project(SymmetricMatrix(inside), BoxBounds(0.0, 1.0));
  CHECK(same.mat() == inside);
}

TEST_CASE("prox closed form") {
  const BoxBounds b(0.0, 1.0);
  CHECK(box_penalty_prox(0.5, b, 0.5) == 0.5);
  CHECK_THAT(box_penalty_prox(1.3, b, 0.5), Catch::Matchers::WithinAbs(1.2, 1e-15));
  CHECK_THROWS_AS(box_penalty_prox(0.5, b, 0.0), std::invalid_argument);
}

TEST_CASE("prox matches a golden-section oracle") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::uniform_real_distribution<double> tau_draw(0.01, 50.0);
  for (int i = 0; i < 1000; ++i) {
    double alpha = unif(gen), beta = unif(gen);
    if (alpha > beta) std::swap(alpha, beta);
    const BoxBounds b(alpha, beta);
    const double v = 3.0 * unif(gen);
    const double tau = tau_draw(gen);
    const double got = box_penalty_prox(v, b, tau);
    auto objective = [&](long double y) {
      const long double lo = std::min(y - static_cast<long double>(alpha), 0.0L);
      const long double hi = std::min(static_cast<long double>(beta) - y, 0.0L);
      const long double dv = y - static_cast<long double>(v);
      return dv * dv + static_cast<long double>(tau) * (lo * lo + hi * hi);
    };
    const double expect = oracles::golden_section_min(
        objective, std::min(v, alpha) - 1.0, std::max(v, beta) + 1.0);
    CHECK_THAT(got, Catch::Matchers::WithinAbs(expect, 1e-8));
  }
}

TEST_CASE("prox satisfies its stationarity condition") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const BoxBounds b(-0.2, 0.7);
  for (int i = 0; i < 500; ++i) {
    const double v = 2.0 * unif(gen);
    const double tau = 0.5 + std::abs(unif(gen));
    const double y = box_penalty_prox(v, b, tau);
    CHECK(std::abs(2.0 * (y - v) + tau * box_penalty_grad(y, b)) < 1e-9);
  }
}

TEST_CASE("prox approaches the box projection as tau grows") {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  const BoxBounds b(0.0, 0.5);
  for (int i = 0; i < 200; ++i) {
    const double v = unif(gen);
    CHECK_THAT(box_penalty_prox(v, b, 1e8),
               Catch::Matchers::WithinAbs(box_project(v, b), 1e-6));
  }
}

TEST_CASE("prox on a point box") {
  const BoxBounds point(0.3, 0.3);
  // minimizer of (y - v)^2 + tau (y - 0.3)^2 pulled between v and the point
  CHECK_THAT(box_penalty_prox(1.3, point, 1.0),
             Catch::Matchers::WithinAbs(0.8, 1e-12));
  CHECK(box_penalty(0.3, point) == 0.0);
  CHECK(box_penalty(0.4, point) > 0.0);
}

TEST_CASE("penalty sum") {
  const BoxBounds b(0.0, 1.0);
  Eigen::MatrixXd m(2, 2);
  m << -0.5, 0.0, 0.0, 1.3;
  CHECK_THAT(penalty_sum(SymmetricMatrix(m), b),
             Catch::Matchers::WithinAbs(0.34, 1e-15));

  Eigen::MatrixXd inside = Eigen::MatrixXd::Constant(3, 3, 0.5);
  CHECK(penalty_sum(SymmetricMatrix(inside), b) == 0.0);

  const Eigen::MatrixXd r = oracles::random_symmetric(6, 13, 2.0);
  double direct = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) direct += box_penalty(r(i, j), b);
  CHECK_THAT(penalty_sum(SymmetricMatrix(r), b),
             Catch::Matchers::WithinRel(direct, 1e-14));
}

TEST_CASE("matrix prox equals entrywise scalar prox") {
  const BoxBounds b(-0.1, 0.4);
  const Eigen::MatrixXd r = oracles::random_symmetric(5, 14, 1.5);
  const SymmetricMatrix out = box_penalty_prox(SymmetricMatrix(r), b, 0.7);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(out(i, j) == box_penalty_prox(r(i, j), b, 0.7));
}
