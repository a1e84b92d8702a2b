#pragma once

#include "mnar/mat.hpp"

namespace mnar::linalg {

// Thin SVD A = U diag(s) V^T with singular values sorted descending.
// U is m x k, V is d x k, k = min(m, d).
struct Svd {
  Matrix U;
  Vector s;
  Matrix V;
};

// One-sided Jacobi SVD for small dense matrices (both dimensions <= 64).
Svd svd(const Matrix& A);

Vector singular_values(const Matrix& A);

// Numerical rank: count of singular values above max(m, d) * s_max * 1e-12.
double rank_tolerance(const Vector& s, std::size_t m, std::size_t d);
int numeric_rank(const Vector& s, std::size_t m, std::size_t d);

// Condition number s_max / s_min over all k values; +inf when s_min is
// at or below the rank tolerance.
double condition_number(const Vector& s, std::size_t m, std::size_t d);

// Moore-Penrose pseudoinverse, truncating at the rank tolerance.
Matrix pinv(const Matrix& A);

}  // namespace mnar::linalg
