#include "mnar/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "mnar/error.hpp"
#include "mnar/svd.hpp"

namespace mnar::diag {

namespace {

void fill_B(CompletenessReport& rep, const model::StratumTable& t) {
  std::vector<int> kept;
  for (int f = 0; f < t.M_F; ++f) {
    double row_mass = 0.0;
    for (int y = 0; y < t.M; ++y) row_mass += t.alpha(f, y);
    if (row_mass > 0.0) {
      kept.push_back(f);
    } else {
      rep.dropped_rows.push_back(f + 1);
      rep.flags.push_back("shadow level " + std::to_string(f + 1) +
                          " has no observed mass, row dropped from B");
    }
  }
  require(!kept.empty(), Errc::degenerate_estimator,
          "completeness: no shadow level has observed mass");
  rep.B = Matrix(kept.size(), t.M);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    int f = kept[i];
    double row_mass = 0.0;
    for (int y = 0; y < t.M; ++y) row_mass += t.alpha(f, y);
    for (int y = 0; y < t.M; ++y) rep.B(i, y) = t.alpha(f, y) / row_mass;
  }
  rep.singular_values_B = linalg::singular_values(rep.B);
  rep.sigma_min_B = rep.singular_values_B.back();
  rep.kappa_B = linalg::condition_number(rep.singular_values_B, rep.B.rows(), rep.B.cols());
  rep.rank_B = linalg::numeric_rank(rep.singular_values_B, rep.B.rows(), rep.B.cols());
  rep.complete = rep.rank_B == t.M;
}

}  // namespace

CompletenessReport completeness_report(const model::StratumTable& table) {
  table.validate();
  CompletenessReport rep;
  fill_B(rep, table);
  return rep;
}

CompletenessReport completeness_report(const model::StratumTable& table, const Matrix& H,
                                       const Vector& pi_known) {
  table.validate();
  require(H.rows() == static_cast<std::size_t>(table.M_F) &&
              H.cols() == static_cast<std::size_t>(table.M),
          Errc::contract, "completeness: H shape mismatch");
  CompletenessReport rep;
  fill_B(rep, table);
  rep.has_H = true;
  rep.H = H;
  rep.singular_values_H = linalg::singular_values(H);
  rep.sigma_min_H = rep.singular_values_H.back();
  rep.kappa_H = linalg::condition_number(rep.singular_values_H, H.rows(), H.cols());
  rep.rank_H = linalg::numeric_rank(rep.singular_values_H, H.rows(), H.cols());

  if (!pi_known.empty()) {
    require(pi_known.size() == static_cast<std::size_t>(table.M), Errc::contract,
            "completeness: pi length mismatch");
    double pi_lo = *std::min_element(pi_known.begin(), pi_known.end());
    double pi_hi = *std::max_element(pi_known.begin(), pi_known.end());
    require(pi_lo > 0.0, Errc::contract, "completeness: pi must be positive");
    double pf_lo = 1.0, pf_hi = 0.0;
    for (std::size_t f = 0; f < H.rows(); ++f) {
      double mass = 0.0;
      for (std::size_t y = 0; y < H.cols(); ++y) mass += H(f, y);
      pf_lo = std::min(pf_lo, mass);
      pf_hi = std::max(pf_hi, mass);
    }
    if (pf_lo > 0.0 && std::isfinite(rep.kappa_H)) {
      rep.bound_checked = true;
      double rhs = (pf_hi / pf_lo) * (pi_hi / pi_lo) * rep.kappa_H;
      rep.bound_holds = rep.kappa_B <= rhs * (1.0 + 1e-8);
    } else {
      rep.flags.push_back("conditioning inequality skipped: degenerate p_F or singular H");
    }
  }
  return rep;
}

double sigma_min_positive(const Matrix& A) {
  Vector s = linalg::singular_values(A);
  double tol = linalg::rank_tolerance(s, A.rows(), A.cols());
  double best = 0.0;
  for (double v : s)
    if (v > tol) best = v;  // values are sorted descending
  require(best > 0.0, Errc::degenerate_estimator, "hoffman: matrix is numerically zero");
  return best;
}

double hoffman_constant(const Matrix& A) {
  return std::sqrt(static_cast<double>(A.rows())) / sigma_min_positive(A);
}

double distance_to_solution_set(const Matrix& A, const Vector& b, const Vector& w) {
  Vector resid = matvec(A, w);
  for (std::size_t i = 0; i < resid.size(); ++i) resid[i] -= b[i];
  Vector step = matvec(linalg::pinv(A), resid);
  double norm = 0.0;
  for (double v : step) norm += v * v;
  return std::sqrt(norm);
}

}  // namespace mnar::diag
