#include "fpls/dense.hpp"

#include <cmath>

namespace fpls {

CholeskyFactor CholeskyFactor::compute(const std::vector<double>& a, std::size_t n) {
  CholeskyFactor f;
  f.n = n;
  f.l.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= f.l[i * n + k] * f.l[j * n + k];
      if (i == j) {
        if (!(sum > 0.0)) return f;  // not positive definite
        f.l[i * n + i] = std::sqrt(sum);
      } else {
        f.l[i * n + j] = sum / f.l[j * n + j];
      }
    }
  }
  f.ok = true;
  return f;
}

std::vector<double> CholeskyFactor::solve(std::vector<double> rhs) const {
  for (std::size_t i = 0; i < n; ++i) {
    double sum = rhs[i];
    for (std::size_t k = 0; k < i; ++k) sum -= l[i * n + k] * rhs[k];
    rhs[i] = sum / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) sum -= l[k * n + ii] * rhs[k];
    rhs[ii] = sum / l[ii * n + ii];
  }
  return rhs;
}

LuFactor LuFactor::compute(std::vector<double> a, std::size_t n) {
  LuFactor f;
  f.n = n;
  f.piv.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a[i * n + k]);
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) {
      f.lu = std::move(a);
      return f;  // singular
    }
    f.piv[k] = pivot;
    if (pivot != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[pivot * n + j]);
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] * inv;
      a[i * n + k] = m;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
    }
  }
  f.lu = std::move(a);
  f.ok = true;
  return f;
}

std::vector<double> LuFactor::solve(std::vector<double> rhs) const {
  for (std::size_t k = 0; k < n; ++k) {
    if (piv[k] != k) std::swap(rhs[k], rhs[piv[k]]);
    for (std::size_t i = k + 1; i < n; ++i) rhs[i] -= lu[i * n + k] * rhs[k];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) sum -= lu[ii * n + k] * rhs[k];
    rhs[ii] = sum / lu[ii * n + ii];
  }
  return rhs;
}

}  // namespace fpls
