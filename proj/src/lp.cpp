#include "mnar/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mnar/error.hpp"

namespace mnar::lp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tableau over columns [structural | row slacks | artificials] with the
// constraint system  A w - s = 0,  s in [band_lo, band_hi].  Artificials get
// cost 1 in phase 1 and are pinned to 0 afterwards.
struct Simplex {
  int m, d, nslack, nart, ncols;
  const Problem& p;
  Matrix Binv;            // m x m dense basis inverse
  std::vector<int> basis; // column basic in each row
  std::vector<bool> at_upper;
  std::vector<bool> is_basic;
  Vector x;               // current value of every column
  Vector lo, hi;          // working bounds per column
  Vector cost;            // phase-dependent cost per column
  int iterations = 0;
  int degenerate = 0;
  int bland_after;

  explicit Simplex(const Problem& prob)
      : m(static_cast<int>(prob.A.rows())),
        d(static_cast<int>(prob.A.cols())),
        nslack(m),
        nart(m),
        ncols(d + m + m),
        p(prob),
        Binv(Matrix::identity(prob.A.rows())),
        basis(m),
        at_upper(ncols, false),
        is_basic(ncols, false),
        x(ncols, 0.0),
        lo(ncols, 0.0),
        hi(ncols, 0.0),
        cost(ncols, 0.0),
        bland_after(d * m) {}

  double colcoef(int row, int col) const {
    if (col < d) return p.A(row, col);
    if (col < d + nslack) return col - d == row ? -1.0 : 0.0;
    return col - d - nslack == row ? art_sign[col - d - nslack] : 0.0;
  }

  std::vector<double> art_sign;

  Vector basis_column(int col) const {
    Vector g(m, 0.0);
    if (col < d) {
      for (int i = 0; i < m; ++i) g[i] = p.A(i, col);
    } else if (col < d + nslack) {
      g[col - d] = -1.0;
    } else {
      g[col - d - nslack] = art_sign[col - d - nslack];
    }
    return g;
  }

  Vector ftran(const Vector& g) const {
    Vector u(m, 0.0);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += Binv(i, k) * g[k];
      u[i] = s;
    }
    return u;
  }

  // rebuild Binv from basis columns by Gauss-Jordan
  bool refactor() {
    Matrix B(m, m);
    for (int j = 0; j < m; ++j) {
      Vector col = basis_column(basis[j]);
      for (int i = 0; i < m; ++i) B(i, j) = col[i];
    }
    Matrix inv = Matrix::identity(m);
    for (int c = 0; c < m; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::fabs(B(r, c)) > std::fabs(B(piv, c))) piv = r;
      if (std::fabs(B(piv, c)) < 1e-13) return false;
      if (piv != c)
        for (int k = 0; k < m; ++k) {
          std::swap(B(c, k), B(piv, k));
          std::swap(inv(c, k), inv(piv, k));
        }
      double diag = B(c, c);
      for (int k = 0; k < m; ++k) {
        B(c, k) /= diag;
        inv(c, k) /= diag;
      }
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        double f = B(r, c);
        if (f == 0.0) continue;
        for (int k = 0; k < m; ++k) {
          B(r, k) -= f * B(c, k);
          inv(r, k) -= f * inv(c, k);
        }
      }
    }
    Binv = inv;
    return true;
  }

  void recompute_basics() {
    // x_B = Binv * (0 - N x_N); rhs of every row is 0
    Vector rhs(m, 0.0);
    for (int j = 0; j < ncols; ++j) {
      if (is_basic[j] || x[j] == 0.0) continue;
      if (j < d) {
        for (int i = 0; i < m; ++i) rhs[i] -= p.A(i, j) * x[j];
      } else if (j < d + nslack) {
        rhs[j - d] += x[j];
      } else {
        rhs[j - d - nslack] -= art_sign[j - d - nslack] * x[j];
      }
    }
    Vector xb = ftran(rhs);
    for (int i = 0; i < m; ++i) x[basis[i]] = xb[i];
  }

  Vector duals() const {
    Vector y(m, 0.0);
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += cost[basis[i]] * Binv(i, k);
      y[k] = s;
    }
    return y;
  }

  double reduced_cost(int j, const Vector& y) const {
    double s = cost[j];
    if (j < d) {
      for (int i = 0; i < m; ++i) s -= y[i] * p.A(i, j);
    } else if (j < d + nslack) {
      s += y[j - d];
    } else {
      s -= y[j - d - nslack] * art_sign[j - d - nslack];
    }
    return s;
  }

  // returns optimal(true)/iteration-limit(false); minimizes cost
  enum class Step { done, moved, unbounded, stalled };

  Step iterate() {
    Vector y = duals();
    int enter = -1;
    double best = -kPivotTol;
    bool bland = degenerate > bland_after;
    for (int j = 0; j < ncols; ++j) {
      if (is_basic[j] || lo[j] == hi[j]) continue;
      double dj = reduced_cost(j, y);
      double viol = at_upper[j] ? -dj : dj;
      if (viol < -kPivotTol) {
        if (bland) {
          enter = j;
          break;
        }
        if (viol < best) {
          best = viol;
          enter = j;
        }
      }
    }
    if (enter < 0) return Step::done;

    double dir = at_upper[enter] ? -1.0 : 1.0;
    Vector u = ftran(basis_column(enter));

    double limit = hi[enter] - lo[enter];  // bound flip distance
    int leave = -1;                        // basis row that blocks first
    bool leave_to_upper = false;
    for (int i = 0; i < m; ++i) {
      double delta = -dir * u[i];  // d x_B[i] per unit step
      int b = basis[i];
      double ratio;
      bool to_upper;
      if (delta > kPivotTol) {
        ratio = (hi[b] - x[b]) / delta;
        to_upper = true;
      } else if (delta < -kPivotTol) {
        ratio = (x[b] - lo[b]) / (-delta);
        to_upper = false;
      } else {
        continue;
      }
      if (ratio < 0) ratio = 0;
      bool tie = leave >= 0 && std::fabs(ratio - limit) <= 1e-12;
      if (ratio < limit - 1e-12 || (tie && basis[i] < basis[leave])) {
        limit = ratio;
        leave = i;
        leave_to_upper = to_upper;
      }
    }
    if (!std::isfinite(limit)) return Step::unbounded;
    if (limit <= 1e-12) ++degenerate;

    // move entering by dir*limit, update basics
    for (int i = 0; i < m; ++i) x[basis[i]] -= dir * limit * u[i];
    x[enter] += dir * limit;

    if (leave < 0) {
      at_upper[enter] = !at_upper[enter];  // bound flip, basis unchanged
    } else {
      int out = basis[leave];
      is_basic[out] = false;
      at_upper[out] = leave_to_upper;
      x[out] = leave_to_upper ? hi[out] : lo[out];
      is_basic[enter] = true;
      basis[leave] = enter;
      // eta update of Binv
      double piv = u[leave];
      if (std::fabs(piv) < 1e-13) {
        if (!refactor()) return Step::stalled;
      } else {
        for (int k = 0; k < m; ++k) Binv(leave, k) /= piv;
        for (int i = 0; i < m; ++i) {
          if (i == leave) continue;
          double f = u[i];
          if (f == 0.0) continue;
          for (int k = 0; k < m; ++k) Binv(i, k) -= f * Binv(leave, k);
        }
      }
      recompute_basics();
    }
    ++iterations;
    if (iterations % 64 == 0) {
      if (!refactor()) return Step::stalled;
      recompute_basics();
    }
    return Step::moved;
  }

  double objective() const {
    double s = 0.0;
    for (int j = 0; j < ncols; ++j) s += cost[j] * x[j];
    return s;
  }

  double max_residual() const {
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      double lhs = 0.0;
      for (int j = 0; j < d; ++j) lhs += p.A(i, j) * x[j];
      lhs -= x[d + i];
      lhs += art_sign[i] * x[d + nslack + i];
      worst = std::max(worst, std::fabs(lhs));
    }
    for (int j = 0; j < ncols; ++j) {
      worst = std::max(worst, lo[j] - x[j]);
      worst = std::max(worst, x[j] - hi[j]);
    }
    return worst;
  }
};

void validate(const Problem& p) {
  const std::size_t m = p.A.rows(), d = p.A.cols();
  require(m >= 1 && d >= 1, Errc::contract, "lp: empty problem");
  require(p.c.size() == d, Errc::contract, "lp: objective length mismatch");
  require(p.band_lo.size() == m && p.band_hi.size() == m, Errc::contract,
          "lp: band length mismatch");
  require(p.box_lo.size() == d && p.box_hi.size() == d, Errc::contract,
          "lp: box length mismatch");
  for (std::size_t i = 0; i < m; ++i) {
    require(std::isfinite(p.band_lo[i]) && std::isfinite(p.band_hi[i]), Errc::contract,
            "lp: band bound not finite");
    require(p.band_lo[i] <= p.band_hi[i] + 1e-15, Errc::contract, "lp: band_lo > band_hi");
  }
  for (std::size_t j = 0; j < d; ++j) {
    require(std::isfinite(p.box_lo[j]) && std::isfinite(p.box_hi[j]), Errc::contract,
            "lp: box bound not finite");
    require(p.box_lo[j] <= p.box_hi[j] + 1e-15, Errc::contract, "lp: box_lo > box_hi");
    require(std::isfinite(p.c[j]), Errc::contract, "lp: objective not finite");
  }
}

}  // namespace

Solution solve(const Problem& problem) {
  validate(problem);
  Simplex s(problem);
  const int m = s.m, d = s.d;

  for (int j = 0; j < d; ++j) {
    s.lo[j] = problem.box_lo[j];
    s.hi[j] = problem.box_hi[j];
    s.x[j] = s.lo[j];
  }
  for (int i = 0; i < m; ++i) {
    s.lo[d + i] = problem.band_lo[i];
    s.hi[d + i] = problem.band_hi[i];
    s.x[d + i] = s.lo[d + i];
  }

  // artificial basis absorbing the initial residual r = -(A w - slack)
  s.art_sign.assign(m, 1.0);
  for (int i = 0; i < m; ++i) {
    double lhs = 0.0;
    for (int j = 0; j < d; ++j) lhs += problem.A(i, j) * s.x[j];
    lhs -= s.x[d + i];
    double resid = -lhs;
    s.art_sign[i] = resid >= 0.0 ? 1.0 : -1.0;
    s.lo[d + m + i] = 0.0;
    s.hi[d + m + i] = std::fabs(resid) + 1.0;
    s.x[d + m + i] = std::fabs(resid);
    s.basis[i] = d + m + i;
    s.is_basic[d + m + i] = true;
    s.Binv(i, i) = s.art_sign[i];  // B = diag(art_sign), so Binv matches
  }

  Solution out;

  // phase 1: minimize sum of artificials
  for (int i = 0; i < m; ++i) s.cost[d + m + i] = 1.0;
  for (;;) {
    if (s.iterations >= kMaxIterations) {
      out.status = Status::stalled;
      out.iterations = s.iterations;
      return out;
    }
    auto step = s.iterate();
    if (step == Simplex::Step::done) break;
    if (step == Simplex::Step::unbounded || step == Simplex::Step::stalled) {
      out.status = step == Simplex::Step::stalled ? Status::stalled : Status::infeasible;
      out.iterations = s.iterations;
      return out;
    }
  }
  double phase1 = 0.0;
  for (int i = 0; i < m; ++i) phase1 += s.x[d + m + i];
  if (phase1 > kFeasTol) {
    out.status = Status::infeasible;
    out.value = phase1;  // Farkas-style certificate: positive phase-1 optimum
    out.iterations = s.iterations;
    return out;
  }

  // phase 2: pin artificials at zero, restore the real objective
  for (int i = 0; i < m; ++i) {
    int a = d + m + i;
    s.cost[a] = 0.0;
    s.lo[a] = 0.0;
    s.hi[a] = 0.0;
    if (!s.is_basic[a]) s.x[a] = 0.0;
  }
  double sign = problem.maximize ? -1.0 : 1.0;
  for (int j = 0; j < d; ++j) s.cost[j] = sign * problem.c[j];
  s.degenerate = 0;

  for (;;) {
    if (s.iterations >= kMaxIterations) {
      out.status = Status::stalled;
      break;
    }
    auto step = s.iterate();
    if (step == Simplex::Step::done) {
      out.status = Status::optimal;
      break;
    }
    if (step == Simplex::Step::unbounded) {
      out.status = Status::unbounded;
      break;
    }
    if (step == Simplex::Step::stalled) {
      out.status = Status::stalled;
      break;
    }
  }

  if (s.max_residual() > 10 * kFeasTol) {
    s.refactor();
    s.recompute_basics();
    if (out.status == Status::optimal && s.max_residual() > 100 * kFeasTol)
      out.status = Status::stalled;
  }

  out.point.assign(s.x.begin(), s.x.begin() + d);
  out.value = problem.maximize ? -s.objective() : s.objective();
  out.iterations = s.iterations;
  return out;
}

std::pair<double, Vector> min_inf_norm_residual(const Matrix& A, const Vector& b,
                                                double box_hi) {
  const std::size_t m = A.rows(), d = A.cols();
  require(b.size() == m, Errc::contract, "min_inf_norm_residual: length mismatch");
  require(box_hi > 0, Errc::contract, "min_inf_norm_residual: box_hi must be positive");

  double t_hi = 1.0;
  for (double v : b) t_hi = std::max(t_hi, std::fabs(v));
  t_hi += 1.0;

  // variables (w, t); rows  A_i w - t <= b_i  and  A_i w + t >= b_i
  Problem p;
  p.c.assign(d + 1, 0.0);
  p.c[d] = 1.0;
  p.A = Matrix(2 * m, d + 1);
  p.band_lo.assign(2 * m, 0.0);
  p.band_hi.assign(2 * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double row_min = 0.0, row_max = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      p.A(i, j) = A(i, j);
      p.A(m + i, j) = A(i, j);
      if (A(i, j) > 0) row_max += A(i, j) * box_hi;
      else row_min += A(i, j) * box_hi;
    }
    p.A(i, d) = -1.0;
    p.A(m + i, d) = 1.0;
    p.band_lo[i] = row_min - t_hi - 1.0;
    p.band_hi[i] = b[i];
    p.band_lo[m + i] = b[i];
    p.band_hi[m + i] = row_max + t_hi + 1.0;
  }
  p.box_lo.assign(d + 1, 0.0);
  p.box_hi.assign(d + 1, box_hi);
  p.box_hi[d] = t_hi;
  p.maximize = false;

  Solution sol = solve(p);
  require(sol.status == Status::optimal, Errc::solver_stalled,
          "min_inf_norm_residual: solver did not reach optimality");
  Vector w(sol.point.begin(), sol.point.begin() + d);
  double slack = std::max(0.0, sol.value);
  return {slack, w};
}

}  // namespace mnar::lp
