#include "fpls/grid.hpp"

#include <cmath>
#include <string>

#include "fpls/errors.hpp"

namespace fpls {

Grid build_grid(double a, double b, std::size_t n, double p, double s) {
  if (!(a < b)) fail(Errc::invalid_domain, "build_grid: need a < b");
  if (n < 2) fail(Errc::invalid_domain, "build_grid: need at least 2 cells");
  if (!(p >= 2.0)) fail(Errc::invalid_order, "build_grid: degenerate case requires p >= 2");
  if (!(s > 0.0 && s < 1.0)) fail(Errc::invalid_order, "build_grid: need s in (0,1)");
  if (!(p * s < 1.0))
    fail(Errc::invalid_order,
         "build_grid: need p*s < 1, got p*s = " + std::to_string(p * s));

  Grid g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.p = p;
  g.s = s;
  g.h = (b - a) / static_cast<double>(n);

  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.nodes[i] = a + (static_cast<double>(i) + 0.5) * g.h;

  const double ps = p * s;
  g.tail.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g.nodes[i];
    g.tail[i] = (std::pow(b - x, -ps) + std::pow(x - a, -ps)) / ps;
  }

  // Exact integral of |x - y|^{-(1+ps)} over a pair of adjacent cells.
  const double adjacent =
      std::pow(g.h, 1.0 - ps) * (2.0 - std::pow(2.0, 1.0 - ps)) / (ps * (1.0 - ps));

  // Uniform grid: the weight depends only on the cell distance. Assemble one
  // row of distances, then mirror into the full symmetric matrix.
  std::vector<double> by_distance(n, 0.0);
  by_distance[1] = adjacent;
  for (std::size_t d = 2; d < n; ++d)
    by_distance[d] = g.h * g.h * std::pow(static_cast<double>(d) * g.h, -(1.0 + ps));

  g.kernel.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = by_distance[j - i];
      g.kernel[i * n + j] = w;
      g.kernel[j * n + i] = w;
    }
  }
  return g;
}

double tail_weight(const Grid& grid, std::size_t i) {
  const double x = grid.nodes.at(i);
  const double ps = grid.ps();
  return (std::pow(grid.b - x, -ps) + std::pow(x - grid.a, -ps)) / ps;
}

double boundary_weight(const Grid& grid, std::size_t i) {
  const double x = grid.nodes.at(i);
  return std::pow(std::min(x - grid.a, grid.b - x), grid.s);
}

void require_on_grid(const Grid& grid, const GridFunction& u, const char* what) {
  if (u.size() != grid.n)
    fail(Errc::grid_mismatch, std::string(what) + ": grid function has size " +
                                  std::to_string(u.size()) + ", grid has " +
                                  std::to_string(grid.n) + " cells");
  for (double v : u)
    if (!std::isfinite(v)) fail(Errc::energy_nan, std::string(what) + ": non-finite nodal value");
}

}  // namespace fpls
