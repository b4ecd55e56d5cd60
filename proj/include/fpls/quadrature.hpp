#pragma once

#include <cstddef>

namespace fpls {

/// 15-point Gauss-Legendre rule on [a, b].
double gauss15(double (*f)(double, const void*), const void* ctx, double a, double b);

template <class F>
double gauss15(const F& f, double a, double b) {
  auto thunk = [](double x, const void* c) { return (*static_cast<const F*>(c))(x); };
  return gauss15(static_cast<double (*)(double, const void*)>(thunk), &f, a, b);
}

/// Adaptive quadrature: bisects until the whole-interval Gauss estimate agrees
/// with the sum over halves to `tol` (absolute), then keeps the refined sum.
double adaptive_quad(double (*f)(double, const void*), const void* ctx, double a, double b,
                     double tol, int max_depth = 48);

template <class F>
double adaptive_quad(const F& f, double a, double b, double tol, int max_depth = 48) {
  auto thunk = [](double x, const void* c) { return (*static_cast<const F*>(c))(x); };
  return adaptive_quad(static_cast<double (*)(double, const void*)>(thunk), &f, a, b, tol,
                       max_depth);
}

}  // namespace fpls
