#pragma once

#include <cstddef>

#include "fpls/grid.hpp"

namespace fpls {

/// First eigenpair of the weighted nonlocal eigenproblem: lambda1 is the
/// minimum of R(u) = seminorm_p(u) / (h sum m_i |u_i|^p), e1 the minimizer,
/// positivized and normalized to unit discrete p-norm.
struct EigenPair {
  double lambda1 = 0.0;
  GridFunction e1;
  GridFunction weight;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Minimizes the weighted Rayleigh quotient from a positive bump start.
/// For p = 2 this runs inverse power iteration on the assembled symmetric
/// pencil (the stiffness matrix is strictly diagonally dominant, so its
/// Cholesky factor exists and the iteration preserves positivity); for p > 2
/// it runs normalized projected gradient descent with Armijo backtracking and
/// Barzilai-Borwein step sizes. Converged means the nodal eigen-equation
/// residual drops below tol on the normalized pair.
///
/// Throws Errc::invalid_weight for an inadmissible weight and
/// Errc::non_convergence past the iteration budget.
EigenPair first_eigenpair(const Grid& grid, const GridFunction& m, double tol,
                          std::size_t max_iter = 500000, const GridFunction* start = nullptr);

/// Euclidean norm of the nodal residual of the eigen-equation,
/// weak_residual(e1) - lambda1 h m |e1|^{p-2} e1.
double eigen_residual(const Grid& grid, const EigenPair& pair);

}  // namespace fpls
