#include "fpls/eigenpair.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fpls/dense.hpp"
#include "fpls/errors.hpp"
#include "fpls/forms.hpp"

namespace fpls {
namespace {

inline double phi_p(double t, double p) {
  if (p == 2.0) return t;
  if (t == 0.0) return 0.0;
  return std::pow(std::abs(t), p - 2.0) * t;
}

void check_weight(const Grid& grid, const GridFunction& m) {
  if (m.size() != grid.n) fail(Errc::invalid_weight, "eigen weight size mismatch");
  double top = 0.0;
  for (double v : m) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(Errc::invalid_weight, "eigen weight must be nonnegative and finite");
    top = std::max(top, v);
  }
  if (top == 0.0) fail(Errc::invalid_weight, "eigen weight must not vanish identically");
}

GridFunction positive_bump(const Grid& grid) {
  GridFunction u(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) u[i] = boundary_weight(grid, i);
  return u;
}

void normalize_p(const Grid& grid, GridFunction& u) {
  const double nrm = norm_p_discrete(grid, u);
  for (double& v : u) v /= nrm;
}

double residual_norm(const Grid& grid, const GridFunction& m, const GridFunction& u,
                     double lambda) {
  const GridFunction r = weak_residual(grid, u);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double res = r[i] - lambda * grid.h * m[i] * phi_p(u[i], grid.p);
    acc += res * res;
  }
  return std::sqrt(acc);
}

double rayleigh(const Grid& grid, const GridFunction& m, const GridFunction& u) {
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i)
    mass += m[i] * std::pow(std::abs(u[i]), grid.p);
  mass *= grid.h;
  return seminorm_p(grid, u) / mass;
}

// u^T A u reproduces the p = 2 seminorm.
std::vector<double> assemble_quadratic(const Grid& grid) {
  const std::size_t n = grid.n;
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double k = grid.kernel_at(i, j);
      a[i * n + j] = -2.0 * k;
      row_sum += k;
    }
    a[i * n + i] = 2.0 * row_sum + 2.0 * grid.h * grid.tail[i];
  }
  return a;
}

EigenPair inverse_power(const Grid& grid, const GridFunction& m, double tol,
                        std::size_t max_iter, GridFunction u) {
  const auto chol = CholeskyFactor::compute(assemble_quadratic(grid), grid.n);
  if (!chol.ok) fail(Errc::non_convergence, "eigen stiffness matrix not positive definite");
  normalize_p(grid, u);
  EigenPair out;
  out.weight = m;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    GridFunction rhs(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) rhs[i] = grid.h * m[i] * u[i];
    u = chol.solve(std::move(rhs));
    normalize_p(grid, u);
    const double lambda = rayleigh(grid, m, u);
    const double res = residual_norm(grid, m, u, lambda);
    if (res < tol) {
      out.lambda1 = lambda;
      out.e1 = std::move(u);
      out.residual = res;
      out.iterations = it;
      return out;
    }
  }
  fail(Errc::non_convergence, "inverse power iteration exceeded its budget");
}

// Bordered Newton finisher on the eigen-system
//   weak_residual(u) - lambda h m phi(u) = 0,  (h sum |u|^p - 1)/p = 0.
// Descent on the Rayleigh quotient cannot certify residuals near 1e-10 in
// double precision (the quotient decrements underflow), so the quadratic
// phase is handed to this solver once the iterate is close.
bool eigen_newton_polish(const Grid& grid, const GridFunction& m, GridFunction& u,
                         double& lambda, double tol, std::size_t max_steps = 60) {
  const std::size_t n = grid.n;
  const double p = grid.p;
  auto residual_vec = [&](const GridFunction& x, double lam) {
    GridFunction rv = weak_residual(grid, x);
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = rv[i] - lam * grid.h * m[i] * phi_p(x[i], p);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += std::pow(std::abs(x[i]), p);
    out[n] = (grid.h * mass - 1.0) / p;
    return out;
  };
  auto norm2 = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
  };

  std::vector<double> g = residual_vec(u, lambda);
  for (std::size_t it = 0; it < max_steps; ++it) {
    if (norm2(g) < tol) return true;
    std::vector<double> jac((n + 1) * (n + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double diag = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double w = grid.kernel_at(i, j) *
                         (p == 2.0 ? 1.0 : std::pow(std::abs(u[i] - u[j]), p - 2.0));
        jac[i * (n + 1) + j] = -2.0 * (p - 1.0) * w;
        diag += w;
      }
      const double upow = p == 2.0 ? 1.0 : std::pow(std::abs(u[i]), p - 2.0);
      jac[i * (n + 1) + i] = 2.0 * (p - 1.0) * (diag + grid.h * grid.tail[i] * upow) -
                             lambda * grid.h * m[i] * (p - 1.0) * upow;
      jac[i * (n + 1) + n] = -grid.h * m[i] * phi_p(u[i], p);
      jac[n * (n + 1) + i] = grid.h * phi_p(u[i], p);
    }
    const auto lu = LuFactor::compute(std::move(jac), n + 1);
    if (!lu.ok) return false;
    std::vector<double> rhs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) rhs[i] = -g[i];
    const std::vector<double> d = lu.solve(std::move(rhs));
    const double gn = norm2(g);
    double step = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      GridFunction xu = u;
      for (std::size_t i = 0; i < n; ++i) xu[i] += step * d[i];
      const double xl = lambda + step * d[n];
      std::vector<double> gt = residual_vec(xu, xl);
      if (norm2(gt) < (1.0 - 1e-4 * step) * gn) {
        u = std::move(xu);
        lambda = xl;
        g = std::move(gt);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return false;
  }
  return norm2(g) < tol;
}

EigenPair rayleigh_descent(const Grid& grid, const GridFunction& m, double tol,
                           std::size_t max_iter, GridFunction u) {
  normalize_p(grid, u);
  const std::size_t n = grid.n;
  const double p = grid.p;

  auto grad = [&](const GridFunction& x, double R, double mass) {
    const GridFunction r = weak_residual(grid, x);
    GridFunction g(n);
    for (std::size_t i = 0; i < n; ++i)
      g[i] = p * (r[i] - R * grid.h * m[i] * phi_p(x[i], p)) / mass;
    return g;
  };
  auto mass_of = [&](const GridFunction& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += m[i] * std::pow(std::abs(x[i]), p);
    return grid.h * acc;
  };
  auto finish = [&](GridFunction e, double lambda, std::size_t iters) {
    EigenPair out;
    out.weight = m;
    out.lambda1 = lambda;
    out.residual = residual_norm(grid, m, e, lambda);
    out.e1 = std::move(e);
    out.iterations = iters;
    return out;
  };

  double mass = mass_of(u);
  double R = seminorm_p(grid, u) / mass;
  GridFunction g = grad(u, R, mass);
  double alpha = 1.0;
  GridFunction prev_u, prev_g;
  double polish_gate = std::max(1e3 * tol, 1e-5 * (1.0 + R));

  for (std::size_t it = 1; it <= max_iter; ++it) {
    double res = residual_norm(grid, m, u, R);
    if (res < tol) return finish(u, R, it);
    if (res < polish_gate) {
      GridFunction cu = u;
      double cl = R;
      if (eigen_newton_polish(grid, m, cu, cl, tol) &&
          residual_norm(grid, m, cu, cl) < tol)
        return finish(std::move(cu), cl, it);
      polish_gate *= 0.25;  // not close enough yet, keep descending
    }
    // Barzilai-Borwein step from the previous pair, safeguarded by Armijo.
    if (!prev_u.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double si = u[i] - prev_u[i];
        const double yi = g[i] - prev_g[i];
        ss += si * si;
        sy += si * yi;
      }
      if (sy > 0.0) alpha = std::clamp(ss / sy, 1e-14, 1e14);
    }
    double gg = 0.0;
    for (double v : g) gg += v * v;
    prev_u = u;
    prev_g = g;
    double step = alpha;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      GridFunction trial = u;
      for (std::size_t i = 0; i < n; ++i) trial[i] -= step * g[i];
      normalize_p(grid, trial);
      const double trial_mass = mass_of(trial);
      const double trial_R = seminorm_p(grid, trial) / trial_mass;
      if (trial_R <= R - 1e-4 * step * gg) {
        u = std::move(trial);
        mass = trial_mass;
        R = trial_R;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Descent is at the floating-point floor; only Newton can finish.
      GridFunction cu = u;
      double cl = R;
      if (eigen_newton_polish(grid, m, cu, cl, tol) &&
          residual_norm(grid, m, cu, cl) < tol)
        return finish(std::move(cu), cl, it);
      fail(Errc::non_convergence, "Rayleigh descent stalled at residual " +
                                      std::to_string(residual_norm(grid, m, u, R)));
    }
    g = grad(u, R, mass);
  }
  fail(Errc::non_convergence, "Rayleigh descent exceeded its budget");
}

}  // namespace

EigenPair first_eigenpair(const Grid& grid, const GridFunction& m, double tol,
                          std::size_t max_iter, const GridFunction* start) {
  check_weight(grid, m);
  GridFunction u0 = start ? *start : positive_bump(grid);
  require_on_grid(grid, u0, "first_eigenpair");

  EigenPair pair = grid.p == 2.0 ? inverse_power(grid, m, tol, max_iter, u0)
                                 : rayleigh_descent(grid, m, tol, max_iter, u0);

  // First eigenfunctions have constant sign: fix it positive, and retry from a
  // positive start if the iterate ended up gently mixed.
  const auto [lo, hi] = std::minmax_element(pair.e1.begin(), pair.e1.end());
  if (*hi <= 0.0) {
    for (double& v : pair.e1) v = -v;
  } else if (*lo <= 0.0) {
    GridFunction retry = pair.e1;
    for (double& v : retry) v = std::abs(v) + 1e-12;
    pair = grid.p == 2.0 ? inverse_power(grid, m, tol, max_iter, retry)
                         : rayleigh_descent(grid, m, tol, max_iter, retry);
    if (*std::min_element(pair.e1.begin(), pair.e1.end()) <= 0.0)
      fail(Errc::non_convergence, "first eigenfunction did not settle to one sign");
  }
  normalize_p(grid, pair.e1);
  pair.residual = eigen_residual(grid, pair);
  return pair;
}

double eigen_residual(const Grid& grid, const EigenPair& pair) {
  require_on_grid(grid, pair.e1, "eigen_residual");
  return residual_norm(grid, pair.weight, pair.e1, pair.lambda1);
}

}  // namespace fpls
