#include "doctest.h"

#include <cmath>

#include "fpls/eigenpair.hpp"
#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/grid.hpp"
#include "fpls/reaction.hpp"
#include "fpls/solvers.hpp"
#include "oracles.hpp"

using namespace fpls;

namespace {

struct Setup {
  Grid grid;
  EigenPair eig;
  Reaction reaction;
};

const Setup& default_setup() {
  static const Setup setup = [] {
    Setup s{build_grid(-1.0, 1.0, 60, 2.0, 0.4), {}, {}};
    s.eig = first_eigenpair(s.grid, GridFunction(s.grid.n, 1.0), 1e-11);
    s.reaction = example_reaction(s.eig.lambda1 + 1.0, s.eig.lambda1 + 2.5);
    return s;
  }();
  return setup;
}

GridFunction scaled(const GridFunction& u, double c) {
  GridFunction out = u;
  for (double& v : out) v *= c;
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("coercive minimization finds the negative-energy well") {
  const Setup& s = default_setup();
  const double ap = s.reaction.params().a_plus;
  const Reaction f0 = truncate_zero_aplus(s.reaction);
  const GridFunction start = scaled(s.eig.e1, 0.5 * ap / norm_inf(s.eig.e1));
  const SolveOutcome out = minimize_energy(s.grid, f0, start, 1e-9);
  CHECK(out.energy < 0.0);
  CHECK(out.residual < 1e-9);
  CHECK(out.method == SolveMethod::minimize);
  for (double v : out.u) {
    CHECK(v >= -1e-8);
    CHECK(v <= ap + 1e-8);
  }

  // restarting at the minimizer returns immediately
  const SolveOutcome again = minimize_energy(s.grid, f0, out.u, 1e-9);
  CHECK(again.iterations == 0);
  CHECK(again.energy == doctest::Approx(out.energy).epsilon(1e-15));

  // the reported residual is exactly the recomputed gradient proxy
  const double recomputed = gradient_proxy_norm(s.grid, energy_gradient(s.grid, f0, out.u));
  CHECK(std::abs(out.residual - recomputed) < 1e-12);
}

TEST_CASE("minimization propagates non-finite energies as errors") {
  const Setup& s = default_setup();
  auto f = [](std::size_t, double t) { return t; };
  auto F = [](std::size_t, double) { return std::numeric_limits<double>::quiet_NaN(); };
  const Reaction broken(f, F, s.reaction.params(), true);
  CHECK_THROWS_AS(minimize_energy(s.grid, broken, GridFunction(s.grid.n, 0.1), 1e-8), Error);
}

TEST_CASE("mountain pass between the first well and a far low-energy bump") {
  const Setup& s = default_setup();
  const double ap = s.reaction.params().a_plus;
  const Reaction f0 = truncate_zero_aplus(s.reaction);
  const GridFunction start = scaled(s.eig.e1, 0.5 * ap / norm_inf(s.eig.e1));
  const SolveOutcome u0 = minimize_energy(s.grid, f0, start, 1e-10);

  const Reaction f1 = truncate_below(s.reaction, u0.u);
  const double level_u0 = energy(s.grid, f1, u0.u).total;
  double tau = 2.0 * ap / norm_inf(s.eig.e1);
  while (energy(s.grid, f1, scaled(s.eig.e1, tau)).total >= level_u0) tau *= 2.0;
  const GridFunction far = scaled(s.eig.e1, tau);

  PathState path;
  const SolveOutcome pass = mountain_pass(s.grid, f1, u0.u, far, 15, 1e-8, {}, &path);
  CHECK(pass.method == SolveMethod::mountain_pass);
  CHECK(pass.residual < 1e-8);
  CHECK(pass.energy > std::max(level_u0, energy(s.grid, f1, far).total));
  CHECK(path.points.size() == 15);
  // second solution dominates the first
  for (std::size_t i = 0; i < s.grid.n; ++i) CHECK(pass.u[i] >= u0.u[i] - 1e-6);
}

TEST_CASE("mountain pass rejects degenerate inputs") {
  const Setup& s = default_setup();
  const GridFunction u(s.grid.n, 0.1);
  CHECK_THROWS_AS(mountain_pass(s.grid, s.reaction, u, u, 11, 1e-8), Error);
  try {
    mountain_pass(s.grid, s.reaction, u, u, 11, 1e-8);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_barrier);
  }
  const GridFunction v(s.grid.n, 0.2);
  CHECK_THROWS_AS(mountain_pass(s.grid, s.reaction, u, v, 2, 1e-8), Error);
}

TEST_CASE("mountain pass detects a missing barrier") {
  // strictly convex energy: f(t) = -t has energy seminorm/p + |u|^2/2 h-term
  const Setup& s = default_setup();
  auto f = [](std::size_t, double t) { return -t; };
  auto F = [](std::size_t, double t) { return -0.5 * t * t; };
  const Reaction convex(f, F, s.reaction.params(), true);
  const GridFunction a(s.grid.n, 0.05);
  const GridFunction b(s.grid.n, 0.2);
  CHECK_THROWS_AS(mountain_pass(s.grid, convex, a, b, 11, 1e-8), Error);
}

TEST_CASE("monotone iteration sweeps upward to the least solution") {
  const Setup& s = default_setup();
  const ReactionParams& prm = s.reaction.params();
  const double e1max = norm_inf(s.eig.e1);
  const double tau =
      0.9 * std::min(prm.delta0, std::pow(prm.c1 / s.eig.lambda1, 1.0 / (2.0 - prm.q))) / e1max;
  const GridFunction sub = scaled(s.eig.e1, tau);
  const GridFunction super(s.grid.n, prm.a_plus);

  std::vector<GridFunction> log;
  const SolveOutcome up = monotone_iteration(s.grid, s.reaction, sub, super, prm.c2,
                                             IterationDirection::up, 1e-9, {}, &log);
  CHECK(up.method == SolveMethod::monotone);
  CHECK(up.residual < 1e-9);
  CHECK(log.size() >= 2);
  for (std::size_t k = 0; k + 1 < log.size(); ++k)
    for (std::size_t i = 0; i < s.grid.n; ++i) {
      CHECK(log[k + 1][i] >= log[k][i] - 1e-10);  // nondecreasing sweep
      CHECK(log[k + 1][i] >= sub[i] - 1e-10);     // sandwiched
      CHECK(log[k + 1][i] <= super[i] + 1e-10);
    }

  // downward sweep from the supersolution brackets the same solution
  const SolveOutcome down = monotone_iteration(s.grid, s.reaction, sub, super, prm.c2,
                                               IterationDirection::down, 1e-9);
  double gap = 0.0;
  for (std::size_t i = 0; i < s.grid.n; ++i)
    gap = std::max(gap, std::abs(up.u[i] - down.u[i]));
  CHECK(gap < 1e-6);

  // starting at the (tightly converged) solution is a fixed point: one sweep
  const SolveOutcome tight = monotone_iteration(s.grid, s.reaction, sub, super, prm.c2,
                                                IterationDirection::up, 1e-12);
  const SolveOutcome fixed = monotone_iteration(s.grid, s.reaction, tight.u, tight.u, prm.c2,
                                                IterationDirection::up, 1e-9);
  CHECK(fixed.iterations == 1);
  double moved = 0.0;
  for (std::size_t i = 0; i < s.grid.n; ++i)
    moved = std::max(moved, std::abs(fixed.u[i] - tight.u[i]));
  CHECK(moved < 1e-9);
}

TEST_CASE("monotone iteration validates the bracket") {
  const Setup& s = default_setup();
  const GridFunction lo(s.grid.n, 0.5);
  const GridFunction hi(s.grid.n, 0.1);
  CHECK_THROWS_AS(monotone_iteration(s.grid, s.reaction, lo, hi, 1.0,
                                     IterationDirection::up, 1e-8),
                  Error);
}

TEST_CASE("ordering diagnostics") {
  const Setup& s = default_setup();
  oracle::Rng rng(41);
  GridFunction u(s.grid.n);
  for (double& v : u) v = rng.uniform(-1.0, 1.0);
  const OrderingReport same = ordering_diagnostics(s.grid, u, u);
  CHECK(same.min_diff == 0.0);
  CHECK(same.min_weighted_diff == 0.0);

  GridFunction v = u;
  for (std::size_t i = 0; i < s.grid.n; ++i) v[i] += 0.25;
  const OrderingReport ordered = ordering_diagnostics(s.grid, u, v);
  CHECK(ordered.min_diff == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ordered.min_weighted_diff > 0.0);
  CHECK(ordered.u_min == doctest::Approx(same.u_min));
  CHECK(ordered.v_max == doctest::Approx(same.u_max + 0.25).epsilon(1e-12));
}

TEST_SUITE_END();
