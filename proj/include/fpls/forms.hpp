#pragma once

#include "fpls/grid.hpp"
#include "fpls/reaction.hpp"

namespace fpls {

/// Split of the problem energy Phi(u) = seminorm_p / p - potential.
struct EnergyValue {
  double seminorm_p = 0.0;  // discrete Gagliardo seminorm to the p-th power
  double potential = 0.0;   // midpoint quadrature of the reaction primitive
  double total = 0.0;       // seminorm_p / p - potential
};

/// Discrete Gagliardo energy: interior pair sum plus both complement tails,
///   sum_{i != j} K_ij |u_i - u_j|^p  +  2 sum_i tau_i h |u_i|^p.
double seminorm_p(const Grid& grid, const GridFunction& u);

/// Weak form of the nonlocal p-Laplacian paired with a test function:
///   sum_{i != j} K_ij |u_i - u_j|^{p-2} (u_i - u_j)(v_i - v_j)
///     + 2 sum_i tau_i h |u_i|^{p-2} u_i v_i.
/// Satisfies apply_weak(u, u) == seminorm_p(u).
double apply_weak(const Grid& grid, const GridFunction& u, const GridFunction& v);

/// Nodal gradient of seminorm_p(u)/p; pairing it with any v reproduces
/// apply_weak(u, v).
GridFunction weak_residual(const Grid& grid, const GridFunction& u);

EnergyValue energy(const Grid& grid, const Reaction& reaction, const GridFunction& u);

/// Nodal gradient of the discrete energy: weak_residual(u)_i - h f(x_i, u_i).
GridFunction energy_gradient(const Grid& grid, const Reaction& reaction, const GridFunction& u);

/// Both sides of the positive/negative-part energy inequality: the seminorm of
/// u^{+-} never exceeds the weak form of u paired with +-u^{+-}.
struct PnpSides {
  double lhs_plus = 0.0;
  double rhs_plus = 0.0;
  double lhs_minus = 0.0;
  double rhs_minus = 0.0;
};
PnpSides check_pnp(const Grid& grid, const GridFunction& u);

/// Dual-norm proxy used by every stopping rule: h^{1/p'} times the Euclidean
/// norm of the nodal gradient, with p' the conjugate exponent.
double gradient_proxy_norm(const Grid& grid, const GridFunction& g);

double norm_inf(const GridFunction& u);
double norm_p_discrete(const Grid& grid, const GridFunction& u);  // (h sum |u_i|^p)^{1/p}

}  // namespace fpls
