#pragma once

#include <cstddef>
#include <vector>

namespace fpls {

/// Nodal values of a function on the grid cells, understood as extended by
/// zero outside the domain interval.
using GridFunction = std::vector<double>;

/// Midpoint discretization of an interval (a, b) for the nonlocal kernel
/// |x - y|^{-(1+ps)}, p >= 2, 0 < s < 1, p*s < 1.
///
/// The grid owns everything the energy forms need:
///  - `kernel`: symmetric n-by-n interaction weights. Off-diagonal entries at
///    cell distance >= 2 use the midpoint value h^2 / |x_i - x_j|^{1+ps};
///    adjacent cells use the exact cell-pair integral of the kernel, which
///    keeps the near-singular contribution accurate. The diagonal is zero:
///    |u(x) - u(y)|^p vanishes to order p >= 2 at x = y while the kernel
///    blows up only to order 1 + ps < 2.
///  - `tail`: per-node weights tau_i for the two domain-complement strips,
///    computed in closed form from the kernel antiderivative.
///
/// Immutable after construction; safe to share across threads.
struct Grid {
  double a = 0.0;
  double b = 0.0;
  std::size_t n = 0;
  double h = 0.0;
  double p = 2.0;
  double s = 0.5;
  std::vector<double> nodes;   // n cell midpoints
  std::vector<double> tail;    // n tail weights tau_i
  std::vector<double> kernel;  // row-major n*n, symmetric, zero diagonal

  double ps() const { return p * s; }
  double kernel_at(std::size_t i, std::size_t j) const { return kernel[i * n + j]; }
};

/// Builds the discretization. Throws Errc::invalid_domain if a >= b or n < 2,
/// Errc::invalid_order if p < 2, s is outside (0,1), or p*s >= 1.
Grid build_grid(double a, double b, std::size_t n, double p, double s);

/// Closed-form weight of the cell-i interaction with the domain complement:
/// tau_i = [(b - x_i)^{-ps} + (x_i - a)^{-ps}] / (ps).
double tail_weight(const Grid& grid, std::size_t i);

/// Boundary-distance weight d^s(x_i) = min(x_i - a, b - x_i)^s.
double boundary_weight(const Grid& grid, std::size_t i);

/// Throws Errc::grid_mismatch unless u has exactly grid.n finite entries.
void require_on_grid(const Grid& grid, const GridFunction& u, const char* what);

}  // namespace fpls
