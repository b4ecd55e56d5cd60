#pragma once

#include <cstddef>
#include <vector>

#include "fpls/forms.hpp"
#include "fpls/grid.hpp"
#include "fpls/reaction.hpp"

namespace fpls {

enum class SolveMethod { minimize, mountain_pass, monotone };

struct SolveOutcome {
  GridFunction u;
  double energy = 0.0;    // value of the driving functional at u
  double residual = 0.0;  // gradient proxy norm at u
  std::size_t iterations = 0;
  SolveMethod method = SolveMethod::minimize;
};

struct SolverOptions {
  std::size_t max_iter = 200000;    // descent iteration budget
  std::size_t max_outer = 10000;    // mountain-pass deformation budget
  std::size_t max_monotone = 5000;  // fixed-point sweeps
  bool use_newton = true;           // quasi-second-order acceleration / polish
};

/// Energy descent with Armijo backtracking, Barzilai-Borwein step sizes, and
/// guarded Newton acceleration. Every accepted step strictly decreases the
/// energy; stops when the gradient proxy norm drops below tol.
SolveOutcome minimize_energy(const Grid& grid, const Reaction& reaction, GridFunction u_start,
                             double tol, const SolverOptions& opts = {});

/// Discrete path between two low-energy states; endpoints stay fixed.
struct PathState {
  std::vector<GridFunction> points;
  std::size_t max_index = 0;
  double max_value = 0.0;
};

/// Path-deformation saddle search: locate the energy maximum along an M-point
/// path, descend that point by one Armijo gradient step, redistribute the path
/// by cubic re-interpolation, repeat. Once the crest flattens, a damped
/// Levenberg-Marquardt polish on the gradient system finishes the critical
/// point. The result has energy above both endpoints.
///
/// `via` (optional) routes the initial path through a waypoint; the nodal
/// stage uses it to steer around the origin, which is itself a critical point
/// sitting exactly on the straight path between mirrored minimizers.
///
/// Errors: Errc::no_barrier when the initial path shows no interior energy
/// barrier (in particular for coincident endpoints), Errc::path_collapse when
/// the path maximum descends into an endpoint basin or the budget runs out.
SolveOutcome mountain_pass(const Grid& grid, const Reaction& reaction, const GridFunction& u_a,
                           const GridFunction& u_b, std::size_t path_points, double tol,
                           const SolverOptions& opts = {}, PathState* final_path = nullptr,
                           const GridFunction* via = nullptr);

enum class IterationDirection { up, down };

/// Sub-supersolution sweep: each step solves the strictly monotone shifted
/// problem with frozen right-hand side f(x, u_k) + c2 |u_k|^{p-2} u_k by
/// convex minimization, starting from `sub` (up) or `super` (down). Stops when
/// consecutive iterates agree to tol in max-norm and the gradient proxy under
/// the original reaction is below tol.
///
/// Iterates must stay ordered (slack 1e-10) or Errc::ordering_violated is
/// raised (c2 too small); escaping the bracket raises Errc::barrier_failure.
/// Pass `iterate_log` to capture the sweep for monotonicity diagnostics.
SolveOutcome monotone_iteration(const Grid& grid, const Reaction& reaction,
                                const GridFunction& sub, const GridFunction& super, double c2,
                                IterationDirection direction, double tol,
                                const SolverOptions& opts = {},
                                std::vector<GridFunction>* iterate_log = nullptr);

/// Nodal ordering margins of a pair u <= v, plus the boundary-weighted margin
/// min (v - u) / d^s and sign summaries for nodal detection.
struct OrderingReport {
  double min_diff = 0.0;
  double min_weighted_diff = 0.0;
  double u_min = 0.0, u_max = 0.0;
  double v_min = 0.0, v_max = 0.0;
};
OrderingReport ordering_diagnostics(const Grid& grid, const GridFunction& u,
                                    const GridFunction& v);

}  // namespace fpls
