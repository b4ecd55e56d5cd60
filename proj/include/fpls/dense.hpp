#pragma once

#include <cstddef>
#include <vector>

namespace fpls {

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix
/// (row-major n-by-n). `ok` is false if a non-positive pivot was met.
struct CholeskyFactor {
  std::size_t n = 0;
  std::vector<double> l;
  bool ok = false;

  static CholeskyFactor compute(const std::vector<double>& a, std::size_t n);
  std::vector<double> solve(std::vector<double> rhs) const;
};

/// LU factorization with partial pivoting of a general square matrix.
struct LuFactor {
  std::size_t n = 0;
  std::vector<double> lu;
  std::vector<std::size_t> piv;
  bool ok = false;

  static LuFactor compute(std::vector<double> a, std::size_t n);
  std::vector<double> solve(std::vector<double> rhs) const;
};

}  // namespace fpls
