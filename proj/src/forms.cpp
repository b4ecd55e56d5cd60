#include "fpls/forms.hpp"

#include <cmath>

#include "fpls/errors.hpp"

namespace fpls {
namespace {

// |d|^p and |d|^{p-2} d with fast paths for the common exponents.
inline double abs_pow(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 3.0) {
    const double a = std::abs(d);
    return a * d * d;
  }
  return std::pow(std::abs(d), p);
}

inline double signed_pow(double d, double p) {
  if (p == 2.0) return d;
  if (p == 3.0) return std::abs(d) * d;
  if (d == 0.0) return 0.0;
  return std::pow(std::abs(d), p - 2.0) * d;
}

}  // namespace

double seminorm_p(const Grid& grid, const GridFunction& u) {
  require_on_grid(grid, u, "seminorm_p");
  const std::size_t n = grid.n;
  const double p = grid.p;
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double* row = grid.kernel.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) acc += row[j] * abs_pow(ui - u[j], p);
    pairs += acc;
  }
  double tails = 0.0;
  for (std::size_t i = 0; i < n; ++i) tails += grid.tail[i] * abs_pow(u[i], p);
  return 2.0 * pairs + 2.0 * grid.h * tails;
}

double apply_weak(const Grid& grid, const GridFunction& u, const GridFunction& v) {
  require_on_grid(grid, u, "apply_weak");
  require_on_grid(grid, v, "apply_weak");
  const std::size_t n = grid.n;
  const double p = grid.p;
  double pairs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double vi = v[i];
    const double* row = grid.kernel.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j)
      acc += row[j] * signed_pow(ui - u[j], p) * (vi - v[j]);
    pairs += acc;
  }
  double tails = 0.0;
  for (std::size_t i = 0; i < n; ++i) tails += grid.tail[i] * signed_pow(u[i], p) * v[i];
  return 2.0 * pairs + 2.0 * grid.h * tails;
}

GridFunction weak_residual(const Grid& grid, const GridFunction& u) {
  require_on_grid(grid, u, "weak_residual");
  const std::size_t n = grid.n;
  const double p = grid.p;
  GridFunction r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double* row = grid.kernel.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) acc += row[j] * signed_pow(ui - u[j], p);
    r[i] = 2.0 * acc + 2.0 * grid.h * grid.tail[i] * signed_pow(ui, p);
  }
  return r;
}

EnergyValue energy(const Grid& grid, const Reaction& reaction, const GridFunction& u) {
  EnergyValue e;
  e.seminorm_p = seminorm_p(grid, u);
  double pot = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) pot += reaction.F(i, u[i]);
  e.potential = grid.h * pot;
  e.total = e.seminorm_p / grid.p - e.potential;
  return e;
}

GridFunction energy_gradient(const Grid& grid, const Reaction& reaction, const GridFunction& u) {
  GridFunction g = weak_residual(grid, u);
  for (std::size_t i = 0; i < grid.n; ++i) g[i] -= grid.h * reaction.f(i, u[i]);
  return g;
}

PnpSides check_pnp(const Grid& grid, const GridFunction& u) {
  require_on_grid(grid, u, "check_pnp");
  const std::size_t n = grid.n;
  GridFunction plus(n), minus_part(n);
  for (std::size_t i = 0; i < n; ++i) {
    plus[i] = std::max(u[i], 0.0);
    minus_part[i] = std::min(u[i], 0.0);  // -u^-
  }
  PnpSides out;
  out.lhs_plus = seminorm_p(grid, plus);
  out.rhs_plus = apply_weak(grid, u, plus);
  GridFunction neg(n);
  for (std::size_t i = 0; i < n; ++i) neg[i] = -minus_part[i];  // u^-
  out.lhs_minus = seminorm_p(grid, neg);
  out.rhs_minus = apply_weak(grid, u, minus_part);
  return out;
}

double gradient_proxy_norm(const Grid& grid, const GridFunction& g) {
  double acc = 0.0;
  for (double v : g) acc += v * v;
  return std::pow(grid.h, (grid.p - 1.0) / grid.p) * std::sqrt(acc);
}

double norm_inf(const GridFunction& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double norm_p_discrete(const Grid& grid, const GridFunction& u) {
  double acc = 0.0;
  for (double v : u) acc += abs_pow(v, grid.p);
  return std::pow(grid.h * acc, 1.0 / grid.p);
}

}  // namespace fpls
