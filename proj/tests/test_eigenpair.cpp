#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "fpls/eigenpair.hpp"
#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/grid.hpp"
#include "oracles.hpp"

using namespace fpls;

namespace {

// Dense symmetric generalized eigensolver on the identical discrete forms;
// independent of the library's iterative path.
double dense_lambda1(const Grid& g, const GridFunction& m) {
  const auto n = static_cast<Eigen::Index>(g.n);
  Eigen::MatrixXd a(n, n), b(n, n);
  a.setZero();
  b.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double k = g.kernel_at(i, j);
      a(i, j) = -2.0 * k;
      row += k;
    }
    a(i, i) = 2.0 * row + 2.0 * g.h * g.tail[i];
    b(i, i) = g.h * m[i];
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, b);
  return solver.eigenvalues()(0);
}

}  // namespace

TEST_SUITE_BEGIN("eigenpair");

TEST_CASE("first eigenvalue matches the dense generalized eigensolver") {
  const Grid g = build_grid(-1.0, 1.0, 200, 2.0, 0.4);
  const GridFunction m(g.n, 1.0);
  const EigenPair pair = first_eigenpair(g, m, 1e-10);
  const double reference = dense_lambda1(g, m);
  CHECK(std::abs(pair.lambda1 - reference) / reference < 1e-6);
  CHECK(pair.residual < 1e-10);
}

TEST_CASE("eigenfunction is positive and unit-normalized") {
  const Grid g = build_grid(-1.0, 1.0, 200, 2.0, 0.4);
  const EigenPair pair = first_eigenpair(g, GridFunction(g.n, 1.0), 1e-10);
  for (double v : pair.e1) CHECK(v > 0.0);
  CHECK(std::abs(norm_p_discrete(g, pair.e1) - 1.0) < 1e-10);
  // symmetric domain, symmetric weight: even profile peaked at the center
  CHECK(pair.e1[g.n / 2] > pair.e1[0]);
}

TEST_CASE("weight scaling law") {
  const Grid g = build_grid(-1.0, 1.0, 100, 2.0, 0.4);
  oracle::Rng rng(31);
  GridFunction m(g.n);
  for (double& v : m) v = 0.5 + rng.uniform(0.0, 1.0);
  GridFunction m2 = m;
  for (double& v : m2) v *= 2.0;
  const EigenPair base = first_eigenpair(g, m, 1e-11);
  const EigenPair twice = first_eigenpair(g, m2, 1e-11);
  CHECK(twice.lambda1 == doctest::Approx(0.5 * base.lambda1).epsilon(1e-10));
  for (std::size_t i = 0; i < g.n; ++i)
    CHECK(twice.e1[i] == doctest::Approx(base.e1[i]).epsilon(1e-7));
}

TEST_CASE("strict monotonicity in the weight") {
  const Grid g = build_grid(-1.0, 1.0, 100, 2.0, 0.4);
  oracle::Rng rng(32);
  for (int pair_idx = 0; pair_idx < 5; ++pair_idx) {
    GridFunction m(g.n), bigger(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
      m[i] = 0.5 + rng.uniform(0.0, 1.0);
      bigger[i] = m[i];
    }
    // bump the weight on a random interior window
    const std::size_t lo = 10 + static_cast<std::size_t>(rng.uniform(0.0, 30.0));
    for (std::size_t i = lo; i < lo + 25; ++i) bigger[i] += rng.uniform(0.5, 1.5);
    const double lam = first_eigenpair(g, m, 1e-11).lambda1;
    const double lam_bigger = first_eigenpair(g, bigger, 1e-11).lambda1;
    CHECK(lam - lam_bigger > 1e-8);
  }
}

TEST_CASE("descent from random positive starts lands on the same pair") {
  const Grid g = build_grid(-1.0, 1.0, 60, 2.0, 0.4);
  const GridFunction m(g.n, 1.0);
  const EigenPair ref = first_eigenpair(g, m, 1e-12);
  oracle::Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    GridFunction start(g.n);
    for (double& v : start) v = rng.uniform(0.1, 1.0);
    const EigenPair pair = first_eigenpair(g, m, 1e-12, 500000, &start);
    CHECK(std::abs(pair.lambda1 - ref.lambda1) / ref.lambda1 < 1e-8);
    double gap = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) gap = std::max(gap, std::abs(pair.e1[i] - ref.e1[i]));
    CHECK(gap < 1e-6);
  }
}

TEST_CASE("p = 3 eigenpair converges with a positive eigenfunction") {
  const Grid g = build_grid(-1.0, 1.0, 60, 3.0, 0.3);
  const EigenPair pair = first_eigenpair(g, GridFunction(g.n, 1.0), 1e-10);
  CHECK(pair.residual < 1e-10);
  for (double v : pair.e1) CHECK(v > 0.0);
  CHECK(std::abs(norm_p_discrete(g, pair.e1) - 1.0) < 1e-12);
  // Rayleigh quotient of any competitor is no smaller
  GridFunction competitor(g.n);
  for (std::size_t i = 0; i < g.n; ++i) competitor[i] = boundary_weight(g, i);
  const double quotient =
      seminorm_p(g, competitor) / std::pow(norm_p_discrete(g, competitor), 3.0);
  CHECK(quotient >= pair.lambda1 - 1e-9);
}

TEST_CASE("eigen_residual diagnostics") {
  const Grid g = build_grid(-1.0, 1.0, 80, 2.0, 0.4);
  EigenPair pair = first_eigenpair(g, GridFunction(g.n, 1.0), 1e-10);
  const double at_solution = eigen_residual(g, pair);
  CHECK(at_solution < 1e-10);

  EigenPair perturbed = pair;
  perturbed.e1[g.n / 3] += 0.01;
  CHECK(eigen_residual(g, perturbed) > at_solution);

  EigenPair wrong_lambda = pair;
  wrong_lambda.lambda1 *= 2.0;
  CHECK(eigen_residual(g, wrong_lambda) > 0.1);
}

TEST_CASE("weight validation") {
  const Grid g = build_grid(-1.0, 1.0, 20, 2.0, 0.4);
  CHECK_THROWS_AS(first_eigenpair(g, GridFunction(g.n, 0.0), 1e-8), Error);
  CHECK_THROWS_AS(first_eigenpair(g, GridFunction(g.n, -1.0), 1e-8), Error);
  CHECK_THROWS_AS(first_eigenpair(g, GridFunction(g.n + 2, 1.0), 1e-8), Error);
  try {
    first_eigenpair(g, GridFunction(g.n, 0.0), 1e-8);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_weight);
  }
}

TEST_CASE("iteration budget exhaustion raises non-convergence") {
  const Grid g = build_grid(-1.0, 1.0, 40, 2.0, 0.4);
  CHECK_THROWS_AS(first_eigenpair(g, GridFunction(g.n, 1.0), 1e-14, 1), Error);
}

TEST_SUITE_END();
