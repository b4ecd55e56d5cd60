#include "fpls/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "fpls/dense.hpp"
#include "fpls/errors.hpp"

namespace fpls {
namespace {

inline double dot(const GridFunction& a, const GridFunction& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double l2dist(const GridFunction& a, const GridFunction& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double abs_pow_pm2(double d, double p) {  // |d|^{p-2}
  if (p == 2.0) return 1.0;
  if (d == 0.0) return 0.0;
  return std::pow(std::abs(d), p - 2.0);
}

double derivative_fd(const Reaction& r, std::size_t node, double t) {
  const double delta = 1e-7 * (1.0 + std::abs(t));
  return (r.f(node, t + delta) - r.f(node, t - delta)) / (2.0 * delta);
}

// Dense Hessian of the discrete energy. The nonlocal part is exact; the
// reaction slope uses a central difference, which is enough for the damped
// Newton steps this feeds (they are safeguarded by line searches).
std::vector<double> hessian_matrix(const Grid& grid, const Reaction& reaction,
                                   const GridFunction& u) {
  const std::size_t n = grid.n;
  const double p = grid.p;
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = grid.kernel_at(i, j) * abs_pow_pm2(u[i] - u[j], p);
      h[i * n + j] = -2.0 * (p - 1.0) * w;
      diag += w;
    }
    h[i * n + i] = 2.0 * (p - 1.0) * (diag + grid.h * grid.tail[i] * abs_pow_pm2(u[i], p)) -
                   grid.h * derivative_fd(reaction, i, u[i]);
  }
  return h;
}

struct Objective {
  const Grid& grid;
  const Reaction& reaction;

  double value(const GridFunction& u) const { return energy(grid, reaction, u).total; }
  GridFunction gradient(const GridFunction& u) const {
    return energy_gradient(grid, reaction, u);
  }
  double proxy(const GridFunction& g) const { return gradient_proxy_norm(grid, g); }
};

// One guarded Newton step toward lower energy; returns false if the direction
// is unusable at this point.
bool newton_energy_step(const Objective& obj, GridFunction& u, double& e, GridFunction& g) {
  const auto lu = LuFactor::compute(hessian_matrix(obj.grid, obj.reaction, u), obj.grid.n);
  if (!lu.ok) return false;
  GridFunction rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
  const GridFunction d = lu.solve(std::move(rhs));
  const double gd = dot(g, d);
  if (!(gd < 0.0)) return false;
  double step = 1.0;
  for (int bt = 0; bt < 40; ++bt) {
    GridFunction trial = u;
    for (std::size_t i = 0; i < u.size(); ++i) trial[i] += step * d[i];
    const double et = obj.value(trial);
    // strict decrease: ties mean the landscape is flat to rounding here
    if (std::isfinite(et) && et < e && et <= e + 1e-4 * step * gd) {
      u = std::move(trial);
      e = et;
      g = obj.gradient(u);
      return true;
    }
    step *= 0.5;
  }
  return false;
}

// Damped Newton on the gradient system, accepting only residual-norm decrease.
// Used to finish saddle points once the path deformation is near them.
// Levenberg-Marquardt on the gradient system. A plain Newton step overshoots
// here: at the pass point the Hessian carries a soft negative mode of order
// h (lambda1 - eta), so the quadratic model is only trusted under damping.
// Each accepted step reduces |grad Phi|_2; mu adapts by ratio test.
bool newton_critical_polish(const Objective& obj, GridFunction& x, double tol,
                            std::size_t max_steps = 200) {
  const bool trace = std::getenv("FPLS_TRACE_MP") != nullptr;
  const std::size_t n = obj.grid.n;
  GridFunction g = obj.gradient(x);
  double gn = std::sqrt(dot(g, g));
  double mu = 0.0;  // set from the first Hessian scale below
  for (std::size_t it = 0; it < max_steps; ++it) {
    if (obj.proxy(g) < tol) return true;
    const std::vector<double> h = hessian_matrix(obj.grid, obj.reaction, x);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(h[i * n + i]));
    if (mu == 0.0) mu = 1e-6 * scale * scale;

    // Normal equations (H^2 + mu I) d = -H g; H is symmetric.
    std::vector<double> normal(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double hik = h[i * n + k];
        if (hik == 0.0) continue;
        const double* row = h.data() + k * n;
        double* out = normal.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += hik * row[j];
      }
    GridFunction rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc -= h[i * n + j] * g[j];
      rhs[i] = acc;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::vector<double> damped = normal;
      for (std::size_t i = 0; i < n; ++i) damped[i * n + i] += mu;
      const auto chol = CholeskyFactor::compute(damped, n);
      if (!chol.ok) {
        mu *= 4.0;
        continue;
      }
      const GridFunction d = chol.solve(rhs);
      GridFunction trial = x;
      for (std::size_t i = 0; i < n; ++i) trial[i] += d[i];
      GridFunction gt = obj.gradient(trial);
      const double gtn = std::sqrt(dot(gt, gt));
      if (std::isfinite(gtn) && gtn < gn) {
        x = std::move(trial);
        g = std::move(gt);
        gn = gtn;
        mu = std::max(mu * 0.25, 1e-14 * scale * scale);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (trace)
      std::fprintf(stderr, "    [polish] it=%zu |g|=%.3e mu=%.2e moved=%d\n", it, gn, mu,
                   (int)accepted);
    if (!accepted) return false;
  }
  return obj.proxy(g) < tol;
}

// Natural cubic respline of the path at uniform chord-length parameters.
// Endpoints stay fixed. The tridiagonal factorization depends only on the
// knots, so it is shared across all nodal coordinates.
void respline_path(std::vector<GridFunction>& path) {
  const std::size_t m = path.size();
  const std::size_t n = path[0].size();
  std::vector<double> ell(m, 0.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double chord = l2dist(path[k], path[k - 1]);
    ell[k] = ell[k - 1] + std::max(chord, 1e-14 * (1.0 + ell[k - 1]));
  }
  const double total = ell.back();

  std::vector<double> h(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) h[k] = ell[k + 1] - ell[k];

  // Thomas forward sweep for the natural-spline tridiagonal system; the
  // factorization depends only on the knots and is reused per coordinate.
  const std::size_t inner = m - 2;
  std::vector<double> cp(inner, 0.0), diag(inner);
  for (std::size_t k = 0; k < inner; ++k) diag[k] = 2.0 * (h[k] + h[k + 1]);
  std::vector<double> denom(inner);
  {
    double prev_cp = 0.0;
    for (std::size_t k = 0; k < inner; ++k) {
      const double lower = (k == 0) ? 0.0 : h[k];
      denom[k] = diag[k] - lower * prev_cp;
      cp[k] = (k + 1 < inner) ? h[k + 1] / denom[k] : 0.0;
      prev_cp = cp[k];
    }
  }

  // Target parameters and their cells.
  std::vector<double> s(m);
  std::vector<std::size_t> cell(m);
  for (std::size_t j = 0; j < m; ++j)
    s[j] = total * static_cast<double>(j) / static_cast<double>(m - 1);
  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    while (k + 2 < m && ell[k + 1] <= s[j]) ++k;
    cell[j] = k;
  }

  std::vector<GridFunction> fresh(m);
  for (std::size_t j = 0; j < m; ++j) fresh[j].resize(n);
  fresh[0] = path[0];
  fresh[m - 1] = path[m - 1];

  std::vector<double> rhs(inner), z(m, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t kk = 0; kk < inner; ++kk) {
      const double d1 = (path[kk + 2][c] - path[kk + 1][c]) / h[kk + 1];
      const double d0 = (path[kk + 1][c] - path[kk][c]) / h[kk];
      rhs[kk] = 6.0 * (d1 - d0);
    }
    // forward substitution
    double prev = 0.0;
    for (std::size_t kk = 0; kk < inner; ++kk) {
      const double lower = (kk == 0) ? 0.0 : h[kk];
      rhs[kk] = (rhs[kk] - lower * prev) / denom[kk];
      prev = rhs[kk];
    }
    // back substitution
    for (std::size_t kk = inner; kk-- > 0;)
      z[kk + 1] = rhs[kk] - cp[kk] * (kk + 1 < inner ? z[kk + 2] : 0.0);
    z[0] = z[m - 1] = 0.0;

    for (std::size_t j = 1; j + 1 < m; ++j) {
      const std::size_t kc = cell[j];
      const double hk = h[kc];
      const double A = (ell[kc + 1] - s[j]) / hk;
      const double B = 1.0 - A;
      fresh[j][c] = A * path[kc][c] + B * path[kc + 1][c] +
                    ((A * A * A - A) * z[kc] + (B * B * B - B) * z[kc + 1]) * hk * hk / 6.0;
    }
  }
  path = std::move(fresh);
}

}  // namespace

SolveOutcome minimize_energy(const Grid& grid, const Reaction& reaction, GridFunction u_start,
                             double tol, const SolverOptions& opts) {
  require_on_grid(grid, u_start, "minimize_energy");
  const Objective obj{grid, reaction};

  GridFunction u = std::move(u_start);
  double e = obj.value(u);
  if (!std::isfinite(e)) fail(Errc::energy_nan, "minimize_energy: start has non-finite energy");
  GridFunction g = obj.gradient(u);
  double proxy = obj.proxy(g);

  GridFunction prev_u, prev_g;
  double alpha = 1.0 / (1.0 + norm_inf(g));
  std::size_t it = 0;

  while (proxy >= tol) {
    if (++it > opts.max_iter)
      fail(Errc::non_convergence,
           "minimize_energy: budget exhausted at gradient proxy " + std::to_string(proxy));

    bool stepped = false;
    if (opts.use_newton && (it == 1 || it % 25 == 0 || proxy < 1e3 * tol)) {
      GridFunction u_before = u, g_before = g;
      if (newton_energy_step(obj, u, e, g)) {
        prev_u = std::move(u_before);
        prev_g = std::move(g_before);
        stepped = true;
      }
    }
    if (!stepped) {
      if (!prev_u.empty()) {
        double ss = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
          const double si = u[i] - prev_u[i];
          const double yi = g[i] - prev_g[i];
          ss += si * si;
          sy += si * yi;
        }
        if (sy > 0.0) alpha = std::clamp(ss / sy, 1e-16, 1e16);
      }
      const double gg = dot(g, g);
      double step = alpha;
      bool accepted = false;
      for (int bt = 0; bt < 70; ++bt) {
        GridFunction trial = u;
        for (std::size_t i = 0; i < u.size(); ++i) trial[i] -= step * g[i];
        const double et = obj.value(trial);
        if (std::isfinite(et) && et < e && et <= e - 1e-4 * step * gg) {
          prev_u = std::move(u);
          prev_g = g;
          u = std::move(trial);
          e = et;
          g = obj.gradient(u);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (accepted) {
        alpha = step;
      } else {
        GridFunction u_before = u, g_before = g;
        if (opts.use_newton && newton_energy_step(obj, u, e, g)) {
          prev_u = std::move(u_before);
          prev_g = std::move(g_before);
        } else {
          // Energy decrements are no longer certifiable in floating point;
          // finish the critical point on the gradient norm instead. Any
          // residual energy drift here is below rounding resolution.
          GridFunction polished = u;
          if (newton_critical_polish(obj, polished, tol)) {
            u = std::move(polished);
            e = obj.value(u);
            g = obj.gradient(u);
            proxy = obj.proxy(g);
            break;
          }
          fail(Errc::non_convergence,
               "minimize_energy: line search stalled at gradient proxy " +
                   std::to_string(proxy));
        }
      }
    }
    proxy = obj.proxy(g);
  }

  SolveOutcome out;
  out.u = std::move(u);
  out.energy = e;
  out.residual = proxy;
  out.iterations = it;
  out.method = SolveMethod::minimize;
  return out;
}

SolveOutcome mountain_pass(const Grid& grid, const Reaction& reaction, const GridFunction& u_a,
                           const GridFunction& u_b, std::size_t path_points, double tol,
                           const SolverOptions& opts, PathState* final_path,
                           const GridFunction* via) {
  require_on_grid(grid, u_a, "mountain_pass");
  require_on_grid(grid, u_b, "mountain_pass");
  if (path_points < 3) fail(Errc::invalid_config, "mountain_pass: need at least 3 path points");
  if (via) require_on_grid(grid, *via, "mountain_pass waypoint");

  GridFunction diff(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) diff[i] = u_a[i] - u_b[i];
  if (norm_inf(diff) == 0.0) fail(Errc::no_barrier, "mountain_pass: coincident endpoints");

  const Objective obj{grid, reaction};
  const std::size_t m = path_points;
  std::vector<GridFunction> path(m);
  std::vector<double> e(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(m - 1);
    path[k].resize(grid.n);
    if (via) {
      // Two straight legs u_a -> via -> u_b.
      const double s = 2.0 * t;
      for (std::size_t i = 0; i < grid.n; ++i)
        path[k][i] = s <= 1.0 ? (1.0 - s) * u_a[i] + s * (*via)[i]
                              : (2.0 - s) * (*via)[i] + (s - 1.0) * u_b[i];
    } else {
      for (std::size_t i = 0; i < grid.n; ++i) path[k][i] = (1.0 - t) * u_a[i] + t * u_b[i];
    }
    e[k] = obj.value(path[k]);
    if (!std::isfinite(e[k])) fail(Errc::energy_nan, "mountain_pass: non-finite path energy");
  }

  const double end_max = std::max(e.front(), e.back());
  const double margin = 1e-13 * (1.0 + std::abs(end_max));
  auto interior_max = [&]() {
    std::size_t idx = 1;
    for (std::size_t k = 2; k + 1 < m; ++k)
      if (e[k] > e[idx]) idx = k;
    return idx;
  };
  if (e[interior_max()] <= end_max + margin)
    fail(Errc::no_barrier, "mountain_pass: no energy barrier along the initial path");

  auto finish = [&](GridFunction point, double energy_at, double proxy_at,
                    std::size_t iters) {
    if (!(energy_at > end_max + margin))
      fail(Errc::path_collapse, "mountain_pass: pass level fell to the endpoint energies");
    if (final_path) {
      final_path->points = path;
      final_path->max_index = interior_max();
      final_path->max_value = e[final_path->max_index];
    }
    SolveOutcome out;
    out.u = std::move(point);
    out.energy = energy_at;
    out.residual = proxy_at;
    out.iterations = iters;
    out.method = SolveMethod::mountain_pass;
    return out;
  };

  double polish_gate = std::max(1e4 * tol, 1e-6);
  std::size_t polish_cooldown = 0;
  double alpha = 1.0;
  double best_level = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  const bool trace = std::getenv("FPLS_TRACE_MP") != nullptr;

  for (std::size_t outer = 1; outer <= opts.max_outer; ++outer) {
    std::size_t crest = 0;
    for (std::size_t k = 1; k < m; ++k)
      if (e[k] > e[crest]) crest = k;
    if (crest == 0 || crest == m - 1)
      fail(Errc::path_collapse, "mountain_pass: path maximum reached an endpoint");

    GridFunction g = obj.gradient(path[crest]);
    const double proxy = obj.proxy(g);
    if (trace && outer % 100 == 1)
      std::fprintf(stderr, "[mp] outer=%zu crest=%zu level=%.9e proxy=%.3e gate=%.1e\n",
                   outer, crest, e[crest], proxy, polish_gate);
    if (proxy < tol) return finish(path[crest], e[crest], proxy, outer);

    // The deformation converges to the pass level long before the crest
    // point's gradient does (resplining keeps shuffling the crest), so a
    // stagnating level also triggers the local polish.
    if (e[crest] < best_level - 1e-12 * (1.0 + std::abs(best_level))) {
      best_level = e[crest];
      stalled = 0;
    } else {
      ++stalled;
    }
    if (opts.use_newton && polish_cooldown == 0 && (proxy < polish_gate || stalled >= 50)) {
      GridFunction candidate = path[crest];
      if (newton_critical_polish(obj, candidate, tol)) {
        const double ec = obj.value(candidate);
        if (trace)
          std::fprintf(stderr, "[mp] polish converged: level=%.9e vs endpoints %.9e\n", ec,
                       end_max);
        if (ec > end_max + margin) {
          GridFunction gc = obj.gradient(candidate);
          return finish(std::move(candidate), ec, obj.proxy(gc), outer);
        }
      } else if (trace) {
        std::fprintf(stderr, "[mp] polish failed at outer=%zu proxy=%.3e\n", outer, proxy);
      }
      polish_cooldown = 50;
      if (proxy < polish_gate) polish_gate *= 0.5;
    }
    if (polish_cooldown > 0) --polish_cooldown;

    // One Armijo gradient step at the crest.
    const double gg = dot(g, g);
    double step = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      GridFunction trial = path[crest];
      for (std::size_t i = 0; i < grid.n; ++i) trial[i] -= step * g[i];
      const double et = obj.value(trial);
      if (std::isfinite(et) && et <= e[crest] - 1e-4 * step * gg) {
        path[crest] = std::move(trial);
        e[crest] = et;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      fail(Errc::path_collapse, "mountain_pass: crest descent stalled at gradient proxy " +
                                    std::to_string(proxy));
    alpha = std::clamp(step * 1.5, 1e-16, 1e12);

    respline_path(path);
    for (std::size_t k = 1; k + 1 < m; ++k) e[k] = obj.value(path[k]);

    if (e[interior_max()] <= end_max + margin)
      fail(Errc::path_collapse, "mountain_pass: barrier flattened to the endpoint level");
  }
  fail(Errc::path_collapse, "mountain_pass: no pass found within the iteration budget");
}

SolveOutcome monotone_iteration(const Grid& grid, const Reaction& reaction,
                                const GridFunction& sub, const GridFunction& super, double c2,
                                IterationDirection direction, double tol,
                                const SolverOptions& opts,
                                std::vector<GridFunction>* iterate_log) {
  require_on_grid(grid, sub, "monotone_iteration");
  require_on_grid(grid, super, "monotone_iteration");
  for (std::size_t i = 0; i < grid.n; ++i)
    if (sub[i] > super[i])
      fail(Errc::invalid_config, "monotone_iteration: sub exceeds super at node " +
                                     std::to_string(i));

  const double p = grid.p;
  const bool up = direction == IterationDirection::up;
  const double slack = 1e-10;

  auto phi = [p](double t) {
    if (p == 2.0) return t;
    if (t == 0.0) return 0.0;
    return std::pow(std::abs(t), p - 2.0) * t;
  };

  GridFunction u = up ? sub : super;
  if (iterate_log) iterate_log->push_back(u);

  const double inner_tol = std::min(tol / 10.0, 5e-13);
  SolverOptions inner_opts = opts;

  double delta = 0.0, residual = 0.0;
  std::size_t sweeps = 0;
  for (; sweeps < opts.max_monotone; ++sweeps) {
    GridFunction b(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) b[i] = reaction.f(i, u[i]) + c2 * phi(u[i]);

    // The shifted inner problem is strictly convex; its energy is the plain
    // discrete energy with the frozen-source reaction below.
    auto f_in = [b, c2, phi](std::size_t i, double t) { return b[i] - c2 * phi(t); };
    auto F_in = [b, c2, p](std::size_t i, double t) {
      return b[i] * t - c2 * std::pow(std::abs(t), p) / p;
    };
    Reaction inner(f_in, F_in, reaction.params(), false);

    GridFunction next;
    try {
      next = minimize_energy(grid, inner, u, inner_tol, inner_opts).u;
    } catch (const Error& err) {
      fail(Errc::inner_solve_failure,
           std::string("monotone_iteration: inner solve failed: ") + err.what());
    }

    for (std::size_t i = 0; i < grid.n; ++i) {
      const double forward = up ? next[i] - u[i] : u[i] - next[i];
      if (forward < -slack)
        fail(Errc::ordering_violated,
             "monotone_iteration: iterate lost monotonicity (c2 too small?) at node " +
                 std::to_string(i));
      if (next[i] > super[i] + slack || next[i] < sub[i] - slack)
        fail(Errc::barrier_failure,
             "monotone_iteration: iterate escaped the sub/supersolution bracket at node " +
                 std::to_string(i));
    }

    GridFunction step(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) step[i] = next[i] - u[i];
    delta = norm_inf(step);
    u = std::move(next);
    if (iterate_log) iterate_log->push_back(u);

    residual = gradient_proxy_norm(grid, energy_gradient(grid, reaction, u));
    if (delta < tol && residual < tol) break;
  }
  if (!(delta < tol && residual < tol))
    fail(Errc::non_convergence, "monotone_iteration: no convergence within budget");

  SolveOutcome out;
  out.energy = energy(grid, reaction, u).total;
  out.residual = residual;
  out.iterations = sweeps + 1;
  out.method = SolveMethod::monotone;
  out.u = std::move(u);
  return out;
}

OrderingReport ordering_diagnostics(const Grid& grid, const GridFunction& u,
                                    const GridFunction& v) {
  require_on_grid(grid, u, "ordering_diagnostics");
  require_on_grid(grid, v, "ordering_diagnostics");
  OrderingReport rep;
  rep.min_diff = v[0] - u[0];
  rep.min_weighted_diff = (v[0] - u[0]) / boundary_weight(grid, 0);
  rep.u_min = rep.u_max = u[0];
  rep.v_min = rep.v_max = v[0];
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double d = v[i] - u[i];
    rep.min_diff = std::min(rep.min_diff, d);
    rep.min_weighted_diff = std::min(rep.min_weighted_diff, d / boundary_weight(grid, i));
    rep.u_min = std::min(rep.u_min, u[i]);
    rep.u_max = std::max(rep.u_max, u[i]);
    rep.v_min = std::min(rep.v_min, v[i]);
    rep.v_max = std::max(rep.v_max, v[i]);
  }
  return rep;
}

}  // namespace fpls
