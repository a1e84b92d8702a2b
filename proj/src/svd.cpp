#include "mnar/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mnar/error.hpp"

namespace mnar::linalg {

namespace {

constexpr int kMaxDim = 64;
constexpr int kMaxSweeps = 60;

// One-sided Jacobi on the columns of W (m x d, m >= d): rotate column pairs
// until all are mutually orthogonal, accumulating the rotations in V.
void jacobi_columns(Matrix& W, Matrix& V) {
  std::size_t m = W.rows(), d = W.cols();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          app += W(i, p) * W(i, p);
          aqq += W(i, q) * W(i, q);
          apq += W(i, p) * W(i, q);
        }
        if (std::fabs(apq) <= 1e-30 ||
            std::fabs(apq) <= 1e-15 * std::sqrt(app) * std::sqrt(aqq))
          continue;
        rotated = true;
        double zeta = (aqq - app) / (2.0 * apq);
        double t = std::copysign(1.0, zeta) /
                   (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double wp = W(i, p), wq = W(i, q);
          W(i, p) = c * wp - s * wq;
          W(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          double vp = V(i, p), vq = V(i, q);
          V(i, p) = c * vp - s * vq;
          V(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

Svd svd(const Matrix& A) {
  require(A.rows() >= 1 && A.cols() >= 1, Errc::contract, "svd: empty matrix");
  require(A.rows() <= kMaxDim && A.cols() <= kMaxDim, Errc::contract,
          "svd: dimensions exceed the 64x64 kernel limit");
  bool transposed = A.rows() < A.cols();
  Matrix W = transposed ? transpose(A) : A;
  std::size_t m = W.rows(), d = W.cols();

  Matrix V = Matrix::identity(d);
  jacobi_columns(W, V);

  Vector s(d);
  Matrix U(m, d);
  for (std::size_t j = 0; j < d; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += W(i, j) * W(i, j);
    norm = std::sqrt(norm);
    s[j] = norm;
    if (norm > 0.0)
      for (std::size_t i = 0; i < m; ++i) U(i, j) = W(i, j) / norm;
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });

  Svd out;
  out.s.resize(d);
  out.U = Matrix(m, d);
  out.V = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    std::size_t src = order[j];
    out.s[j] = s[src];
    for (std::size_t i = 0; i < m; ++i) out.U(i, j) = U(i, src);
    for (std::size_t i = 0; i < d; ++i) out.V(i, j) = V(i, src);
  }
  if (transposed) std::swap(out.U, out.V);
  return out;
}

Vector singular_values(const Matrix& A) { return svd(A).s; }

double rank_tolerance(const Vector& s, std::size_t m, std::size_t d) {
  double s_max = s.empty() ? 0.0 : s.front();
  return static_cast<double>(std::max(m, d)) * s_max * 1e-12;
}

int numeric_rank(const Vector& s, std::size_t m, std::size_t d) {
  double tol = rank_tolerance(s, m, d);
  int rank = 0;
  for (double v : s)
    if (v > tol) ++rank;
  return rank;
}

double condition_number(const Vector& s, std::size_t m, std::size_t d) {
  if (s.empty()) return std::numeric_limits<double>::infinity();
  double tol = rank_tolerance(s, m, d);
  double s_min = s.back();
  if (s_min <= tol) return std::numeric_limits<double>::infinity();
  return s.front() / s_min;
}

Matrix pinv(const Matrix& A) {
  Svd dec = svd(A);
  double tol = rank_tolerance(dec.s, A.rows(), A.cols());
  std::size_t m = A.rows(), d = A.cols(), k = dec.s.size();
  Matrix out(d, m);
  for (std::size_t j = 0; j < k; ++j) {
    if (dec.s[j] <= tol) continue;
    double inv = 1.0 / dec.s[j];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < m; ++c) out(r, c) += dec.V(r, j) * inv * dec.U(c, j);
  }
  return out;
}

}  // namespace mnar::linalg
