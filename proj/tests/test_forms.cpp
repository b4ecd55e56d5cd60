#include "doctest.h"

#include <cmath>

#include "fpls/eigenpair.hpp"
#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/grid.hpp"
#include "fpls/reaction.hpp"
#include "oracles.hpp"

using namespace fpls;

namespace {

// Random vectors bounded away from the reaction's square-root kink at zero.
GridFunction random_u(oracle::Rng& rng, std::size_t n, double lo = 0.05, double hi = 1.0) {
  GridFunction u(n);
  for (double& v : u) {
    const double mag = rng.uniform(lo, hi);
    v = rng.uniform(0.0, 1.0) < 0.5 ? -mag : mag;
  }
  return u;
}

}  // namespace

TEST_SUITE_BEGIN("forms");

TEST_CASE("seminorm of the zero function vanishes") {
  const Grid g = build_grid(-1.0, 1.0, 16, 2.0, 0.4);
  CHECK(seminorm_p(g, GridFunction(g.n, 0.0)) == 0.0);
}

TEST_CASE("p-homogeneity of the seminorm") {
  oracle::Rng rng(11);
  for (double p : {2.0, 3.0}) {
    const Grid g = build_grid(-1.0, 1.0, 40, p, p == 2.0 ? 0.4 : 0.3);
    const GridFunction u = random_u(rng, g.n);
    const double base = seminorm_p(g, u);
    for (double c : {-2.0, 0.5, 3.0}) {
      GridFunction cu(g.n);
      for (std::size_t i = 0; i < g.n; ++i) cu[i] = c * u[i];
      const double expect = std::pow(std::abs(c), p) * base;
      CHECK(seminorm_p(g, cu) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-cell seminorm agrees with scalar hand assembly") {
  // Omega = (0,1), n = 2, p = 2, s = 0.4, u = (1, 0): one interaction pair
  // plus the tail terms, assembled from scratch.
  const Grid g = build_grid(0.0, 1.0, 2, 2.0, 0.4);
  const GridFunction u = {1.0, 0.0};
  const double ps = 0.8, h = 0.5;
  const double k01 = std::pow(h, 1.0 - ps) * (2.0 - std::pow(2.0, 1.0 - ps)) / (ps * (1.0 - ps));
  const double tau0 = (std::pow(1.0 - 0.25, -ps) + std::pow(0.25, -ps)) / ps;
  const double expected = 2.0 * k01 * 1.0 + 2.0 * h * tau0 * 1.0;
  CHECK(seminorm_p(g, u) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("apply_weak basics") {
  oracle::Rng rng(12);
  const Grid g = build_grid(-1.0, 1.0, 30, 2.0, 0.4);
  const GridFunction zero(g.n, 0.0);
  const GridFunction v = random_u(rng, g.n);
  CHECK(apply_weak(g, zero, v) == 0.0);

  const GridFunction u = random_u(rng, g.n);
  CHECK(apply_weak(g, u, u) == doctest::Approx(seminorm_p(g, u)).epsilon(1e-13));

  GridFunction mu(g.n);
  for (std::size_t i = 0; i < g.n; ++i) mu[i] = -u[i];
  CHECK(apply_weak(g, mu, v) == doctest::Approx(-apply_weak(g, u, v)).epsilon(1e-13));

  const GridFunction wrong(g.n + 1, 0.0);
  CHECK_THROWS_AS(apply_weak(g, u, wrong), Error);
}

TEST_CASE("apply_weak(u,u) matches the seminorm for p = 3") {
  oracle::Rng rng(13);
  const Grid g = build_grid(-1.0, 1.0, 30, 3.0, 0.3);
  const GridFunction u = random_u(rng, g.n);
  CHECK(apply_weak(g, u, u) == doctest::Approx(seminorm_p(g, u)).epsilon(1e-13));
}

TEST_CASE("energy decomposition and the zero function") {
  const Grid g = build_grid(-1.0, 1.0, 40, 2.0, 0.4);
  const Reaction r = example_reaction(3.0, 4.5);
  const EnergyValue at_zero = energy(g, r, GridFunction(g.n, 0.0));
  CHECK(at_zero.total == 0.0);
  CHECK(at_zero.potential == 0.0);

  oracle::Rng rng(14);
  const GridFunction u = random_u(rng, g.n);
  const EnergyValue e = energy(g, r, u);
  CHECK(e.total == e.seminorm_p / g.p - e.potential);  // exact by construction
  CHECK(e.seminorm_p == doctest::Approx(seminorm_p(g, u)).epsilon(1e-15));
}

TEST_CASE("small eigenfunction multiples have negative energy") {
  const Grid g = build_grid(-1.0, 1.0, 50, 2.0, 0.4);
  const EigenPair pair = first_eigenpair(g, GridFunction(g.n, 1.0), 1e-10);
  const Reaction r = example_reaction(pair.lambda1 + 1.0, pair.lambda1 + 2.5);
  GridFunction u(g.n);
  const double tau = 1e-4;
  for (std::size_t i = 0; i < g.n; ++i) u[i] = tau * pair.e1[i];
  CHECK(energy(g, r, u).total < 0.0);
}

TEST_CASE("gradient pairs to apply_weak minus the reaction term") {
  oracle::Rng rng(15);
  const Grid g = build_grid(-1.0, 1.0, 30, 2.0, 0.4);
  const Reaction r = example_reaction(3.0, 4.5);
  const GridFunction u = random_u(rng, g.n);
  const GridFunction v = random_u(rng, g.n);
  const GridFunction grad = energy_gradient(g, r, u);
  double paired = 0.0, reaction_term = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    paired += grad[i] * v[i];
    reaction_term += r.f(i, u[i]) * v[i];
  }
  const double expect = apply_weak(g, u, v) - g.h * reaction_term;
  CHECK(paired == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradient vanishes at the origin when f(x,0) = 0") {
  const Grid g = build_grid(-1.0, 1.0, 20, 2.0, 0.4);
  const Reaction r = example_reaction(3.0, 4.5);
  const GridFunction grad = energy_gradient(g, r, GridFunction(g.n, 0.0));
  for (double v : grad) CHECK(v == 0.0);
}

TEST_CASE("gradient matches central finite differences") {
  oracle::Rng rng(16);
  const Grid g = build_grid(-1.0, 1.0, 50, 2.0, 0.4);
  const Reaction r = example_reaction(3.0, 4.5);
  const double step = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    GridFunction u = random_u(rng, g.n);
    const GridFunction grad = energy_gradient(g, r, u);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      GridFunction up = u, dn = u;
      up[i] += step;
      dn[i] -= step;
      const double fd = (energy(g, r, up).total - energy(g, r, dn).total) / (2.0 * step);
      worst = std::max(worst, std::abs(grad[i] - fd));
      scale = std::max(scale, std::abs(fd));
    }
    CHECK(worst / scale < 1e-6);
  }
}

TEST_CASE("positive/negative part inequality") {
  const Grid g2 = build_grid(0.0, 1.0, 2, 2.0, 0.4);
  const PnpSides two = check_pnp(g2, GridFunction{1.0, -1.0});
  CHECK(two.lhs_plus < two.rhs_plus);  // strict
  CHECK(two.lhs_minus < two.rhs_minus);

  const Grid g = build_grid(-1.0, 1.0, 50, 2.0, 0.4);
  oracle::Rng rng(17);
  GridFunction nonneg(g.n);
  for (double& v : nonneg) v = rng.uniform(0.0, 1.0);
  const PnpSides pos = check_pnp(g, nonneg);
  CHECK(pos.lhs_minus == 0.0);
  CHECK(pos.rhs_minus == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction u = random_u(rng, g.n, 0.0, 1.0);
    const PnpSides sides = check_pnp(g, u);
    CHECK(sides.lhs_plus <= sides.rhs_plus + 1e-12);
    CHECK(sides.lhs_minus <= sides.rhs_minus + 1e-12);
  }
}

TEST_CASE("positive/negative part inequality for p = 3") {
  const Grid g = build_grid(-1.0, 1.0, 40, 3.0, 0.3);
  oracle::Rng rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const GridFunction u = random_u(rng, g.n, 0.0, 1.0);
    const PnpSides sides = check_pnp(g, u);
    CHECK(sides.lhs_plus <= sides.rhs_plus + 1e-12);
    CHECK(sides.lhs_minus <= sides.rhs_minus + 1e-12);
  }
}

TEST_CASE("midpoint convexity of the seminorm") {
  oracle::Rng rng(19);
  for (double p : {2.0, 3.0}) {
    const Grid g = build_grid(-1.0, 1.0, 30, p, p == 2.0 ? 0.4 : 0.3);
    for (int trial = 0; trial < 25; ++trial) {
      const GridFunction u = random_u(rng, g.n);
      const GridFunction v = random_u(rng, g.n);
      GridFunction mid(g.n);
      for (std::size_t i = 0; i < g.n; ++i) mid[i] = 0.5 * (u[i] + v[i]);
      CHECK(seminorm_p(g, mid) <= 0.5 * (seminorm_p(g, u) + seminorm_p(g, v)) + 1e-12);
    }
  }
}

TEST_SUITE_END();
