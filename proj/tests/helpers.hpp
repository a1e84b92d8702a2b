#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mnar/error.hpp"
#include "mnar/mat.hpp"
#include "mnar/rng.hpp"
#include "mnar/svd.hpp"
#include "mnar/tables.hpp"

namespace testutil {

using mnar::Matrix;
using mnar::Rng;
using mnar::Vector;

// Random pmf with every entry at least `floor` (requires k * floor < 1).
inline Vector random_pmf(Rng& rng, int k, double floor = 0.0) {
  Vector p(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = rng.unif() + 1e-3;
    total += p[i];
  }
  double rest = 1.0 - floor * k;
  for (double& v : p) v = floor + rest * (v / total);
  return p;
}

inline Matrix random_channel(Rng& rng, int M, int M_F, double floor = 0.0) {
  Matrix ch(M, M_F);
  for (int y = 0; y < M; ++y) {
    Vector row = random_pmf(rng, M_F, floor);
    for (int f = 0; f < M_F; ++f) ch(y, f) = row[f];
  }
  return ch;
}

inline Vector random_pi(Rng& rng, int M, double lo, double hi) {
  Vector pi(M);
  for (int y = 0; y < M; ++y) pi[y] = rng.unif(lo, hi);
  return pi;
}

// Exact population table: alpha(f,y) = p(y) ch(y,f) pi(y).
inline mnar::model::StratumTable exact_table(const Vector& p, const Matrix& ch,
                                             const Vector& pi, long n = 1000) {
  const int M = static_cast<int>(p.size());
  const int M_F = static_cast<int>(ch.cols());
  Matrix alpha(M_F, M);
  Vector beta(M_F, 0.0);
  for (int y = 0; y < M; ++y) {
    for (int f = 0; f < M_F; ++f) {
      alpha(f, y) = p[y] * ch(y, f) * pi[y];
      beta[f] += p[y] * ch(y, f) * (1.0 - pi[y]);
    }
  }
  return mnar::model::table_from_probabilities(alpha, beta, n, false);
}

inline mnar::model::StratumTable random_exact_table(Rng& rng, int M, int M_F,
                                                    double p_floor = 0.02,
                                                    double pi_lo = 0.05,
                                                    double pi_hi = 0.95) {
  Vector p = random_pmf(rng, M, p_floor);
  Matrix ch = random_channel(rng, M, M_F, 0.01);
  Vector pi = random_pi(rng, M, pi_lo, pi_hi);
  return exact_table(p, ch, pi);
}

// Table with a single shadow level, specified by the outcome margin alone.
inline mnar::model::StratumTable margin_table(const Vector& alpha_marginal, double p_r0,
                                              long n = 100, bool empirical = false) {
  Matrix alpha(1, alpha_marginal.size());
  for (std::size_t y = 0; y < alpha_marginal.size(); ++y) alpha(0, y) = alpha_marginal[y];
  Vector beta{p_r0};
  return mnar::model::table_from_probabilities(alpha, beta, n, empirical);
}

inline mnar::model::PopulationTables single_population(const mnar::model::StratumTable& t,
                                                       const std::string& id = "") {
  mnar::model::PopulationTables pop;
  pop.M = t.M;
  pop.M_F = t.M_F;
  pop.strata.push_back({id, t, 1.0});
  return pop;
}

// Well-conditioned exact table for grid-search verification: generous
// outcome mass, response rates in [0.5, 0.85] so inverse-odds weights react
// mildly to grid steps, and alpha kept numerically full rank by rejection.
// The default floor scales with the cell count; random tables concentrate
// near sigma_min ~ 1/(M*M_F).
inline mnar::model::StratumTable conditioned_table(Rng& rng, int M, int M_F,
                                                   double sigma_floor = 0.0) {
  if (sigma_floor <= 0.0) sigma_floor = 0.25 / (M * M_F);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Vector p = random_pmf(rng, M, 0.15);
    Matrix ch = random_channel(rng, M, M_F, 0.05);
    Vector pi = random_pi(rng, M, 0.5, 0.85);
    auto t = exact_table(p, ch, pi);
    Vector s = mnar::linalg::singular_values(t.alpha);
    if (s.back() >= sigma_floor) return t;
  }
  mnar::fail(mnar::Errc::contract, "conditioned_table: rejection sampling exhausted");
}

struct GridRange {
  bool any = false;
  double lo = 0.0;
  double hi = 0.0;
};

// Brute-force sweep over response-probability grids: the first M-1
// coordinates walk {h, 2h, ..., 1}, the last weight is solved from the
// best-scaled margin row, and points violating any margin equation by more
// than `slack` are discarded. Independent check of the shadow LP range.
inline GridRange shadow_grid_range(const mnar::model::StratumTable& t, double h = 1e-3,
                                   double slack = 2e-3) {
  const int M = t.M, M_F = t.M_F;
  int pivot_row = 0;
  for (int f = 1; f < M_F; ++f)
    if (std::fabs(t.alpha(f, M - 1)) > std::fabs(t.alpha(pivot_row, M - 1))) pivot_row = f;
  const double pivot = t.alpha(pivot_row, M - 1);
  GridRange out;
  if (std::fabs(pivot) <= 0.0) return out;

  const int steps = static_cast<int>(std::lround(1.0 / h));
  Vector w(M, 0.0);
  std::vector<int> idx(M - 1, 1);
  while (true) {
    for (int y = 0; y < M - 1; ++y) w[y] = 1.0 / (idx[y] * h) - 1.0;
    double rest = t.beta[pivot_row];
    for (int y = 0; y < M - 1; ++y) rest -= t.alpha(pivot_row, y) * w[y];
    double w_last = rest / pivot;
    if (w_last >= -1e-9) {
      w[M - 1] = w_last < 0.0 ? 0.0 : w_last;
      bool ok = true;
      for (int f = 0; f < M_F && ok; ++f) {
        double lhs = 0.0;
        for (int y = 0; y < M; ++y) lhs += t.alpha(f, y) * w[y];
        if (std::fabs(lhs - t.beta[f]) > slack) ok = false;
      }
      if (ok) {
        double val = 0.0;
        for (int y = 0; y < M; ++y) val += (y + 1) * t.alpha_marginal[y] * (w[y] + 1.0);
        if (!out.any || val < out.lo) out.lo = val;
        if (!out.any || val > out.hi) out.hi = val;
        out.any = true;
      }
    }
    int k = M - 2;
    while (k >= 0 && idx[k] == steps) {
      idx[k] = 1;
      --k;
    }
    if (k < 0) break;
    ++idx[k];
  }
  return out;
}

}  // namespace testutil
