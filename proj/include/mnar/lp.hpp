#pragma once

#include <utility>

#include "mnar/mat.hpp"

namespace mnar::lp {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kPivotTol = 1e-10;
inline constexpr int kMaxIterations = 10000;

enum class Status { optimal, infeasible, unbounded, stalled };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::stalled: return "stalled";
  }
  return "unknown";
}

// min or max of c.w subject to band_lo <= A w <= band_hi (componentwise,
// equality rows encoded as band_lo = band_hi) and box_lo <= w <= box_hi.
// All bounds must be finite.
struct Problem {
  Vector c;
  Matrix A;
  Vector band_lo, band_hi;
  Vector box_lo, box_hi;
  bool maximize = false;
};

struct Solution {
  Status status = Status::infeasible;
  double value = 0.0;
  Vector point;
  int iterations = 0;
};

// Bounded-variable two-phase primal simplex. Deterministic: Dantzig pricing
// with a Bland's-rule fallback after d*m degenerate pivots.
Solution solve(const Problem& problem);

// m_hat = min over 0 <= w <= box_hi of ||A w - b||_inf, with its minimizer.
std::pair<double, Vector> min_inf_norm_residual(const Matrix& A, const Vector& b,
                                                double box_hi);

}  // namespace mnar::lp
