#include "mnar/baselines.hpp"

#include <cmath>
#include <map>

#include "mnar/error.hpp"
#include "mnar/normal.hpp"
#include "mnar/svd.hpp"

namespace mnar::baselines {

namespace {

constexpr double kZ95 = 1.959963984540054;

void finish(PointEstimate& est) {
  est.ci_lo = est.value - kZ95 * est.se;
  est.ci_hi = est.value + kZ95 * est.se;
}

double mean_of(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const Vector& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Gaussian elimination with partial pivoting for tiny dense systems.
bool solve_dense(Matrix a, Vector b, Vector& out) {
  std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    if (std::fabs(a(piv, k)) < 1e-12) return false;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double factor = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
      b[i] -= factor * b[k];
    }
  }
  out.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * out[j];
    out[i] = s / a(i, i);
  }
  return true;
}

void check_predictions(const std::vector<model::UnitRecord>& records, const char* op) {
  require(!records.empty(), Errc::contract, std::string(op) + ": no records");
  for (const auto& rec : records)
    require(rec.f >= 1, Errc::contract, std::string(op) + ": record without prediction F");
}

}  // namespace

PointEstimate cca(const std::vector<model::UnitRecord>& records) {
  require(!records.empty(), Errc::contract, "cca: no records");
  Vector observed;
  for (const auto& rec : records)
    if (rec.r == 1) observed.push_back(rec.y);
  require(!observed.empty(), Errc::degenerate_estimator, "cca: no observed outcomes");
  PointEstimate est;
  est.method = "cca";
  est.value = mean_of(observed);
  est.se = std::sqrt(sample_var(observed) / static_cast<double>(observed.size()));
  finish(est);
  return est;
}

PointEstimate naive_impute(const std::vector<model::UnitRecord>& records) {
  check_predictions(records, "naive_impute");
  Vector completed;
  completed.reserve(records.size());
  for (const auto& rec : records) completed.push_back(rec.r == 1 ? rec.y : rec.f);
  PointEstimate est;
  est.method = "naive_impute";
  est.value = mean_of(completed);
  est.se = std::sqrt(sample_var(completed) / static_cast<double>(completed.size()));
  finish(est);
  return est;
}

PointEstimate ppi(const std::vector<model::UnitRecord>& records) {
  check_predictions(records, "ppi");
  Vector all_f, obs_diff;
  for (const auto& rec : records) {
    all_f.push_back(rec.f);
    if (rec.r == 1) obs_diff.push_back(rec.y - rec.f);
  }
  require(!obs_diff.empty(), Errc::degenerate_estimator, "ppi: no observed outcomes");
  PointEstimate est;
  est.method = "ppi";
  est.value = mean_of(all_f) + mean_of(obs_diff);
  est.se = std::sqrt(sample_var(all_f) / static_cast<double>(all_f.size()) +
                     sample_var(obs_diff) / static_cast<double>(obs_diff.size()));
  finish(est);
  return est;
}

PointEstimate heckman(const std::vector<model::UnitRecord>& records) {
  check_predictions(records, "heckman");
  long n_obs = 0;
  for (const auto& rec : records)
    if (rec.r == 1) ++n_obs;
  require(n_obs >= 3, Errc::degenerate_estimator, "heckman: too few observed outcomes");

  if (n_obs == static_cast<long>(records.size())) {
    // Nothing is missing, so there is no selection to correct: the probit
    // MLE runs off to infinity and the Mills term vanishes. Fit plain
    // least squares of Y on (1, F) instead.
    Matrix xtx(2, 2);
    Vector xty(2, 0.0);
    double mean_f = 0.0;
    for (const auto& rec : records) {
      double x[2] = {1.0, static_cast<double>(rec.f)};
      for (int a = 0; a < 2; ++a) {
        xty[a] += x[a] * rec.y;
        for (int b = 0; b < 2; ++b) xtx(a, b) += x[a] * x[b];
      }
      mean_f += rec.f;
    }
    mean_f /= static_cast<double>(records.size());
    Vector coef;
    require(solve_dense(xtx, xty, coef), Errc::estimator_failed,
            "heckman: collinear outcome regression");
    PointEstimate est;
    est.method = "heckman";
    est.value = coef[0] + coef[1] * mean_f;
    double rss = 0.0;
    for (const auto& rec : records) {
      double fit = coef[0] + coef[1] * rec.f;
      rss += (rec.y - fit) * (rec.y - fit);
    }
    double dof = std::max<double>(1.0, static_cast<double>(n_obs - 2));
    double sigma2 = rss / dof;
    Matrix inv(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector col, e(2, 0.0);
      e[j] = 1.0;
      if (!solve_dense(xtx, e, col)) break;
      for (int i = 0; i < 2; ++i) inv(i, j) = col[i];
    }
    double quad = inv(0, 0) + 2.0 * inv(0, 1) * mean_f + inv(1, 1) * mean_f * mean_f;
    est.se = quad > 0 ? std::sqrt(sigma2 * quad) : 0.0;
    finish(est);
    return est;
  }

  // Stage 1: probit of R on (1, F) by Fisher scoring.
  double g0 = 0.0, g1 = 0.0;
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    double s0 = 0.0, s1 = 0.0, i00 = 0.0, i01 = 0.0, i11 = 0.0;
    for (const auto& rec : records) {
      double z = g0 + g1 * rec.f;
      double cdf = stats::norm_cdf(z);
      cdf = std::min(std::max(cdf, 1e-12), 1.0 - 1e-12);
      double pdf = stats::norm_pdf(z);
      double score = pdf * (rec.r - cdf) / (cdf * (1.0 - cdf));
      double info = pdf * pdf / (cdf * (1.0 - cdf));
      s0 += score;
      s1 += score * rec.f;
      i00 += info;
      i01 += info * rec.f;
      i11 += info * rec.f * rec.f;
    }
    double det = i00 * i11 - i01 * i01;
    require(std::fabs(det) > 1e-12, Errc::estimator_failed,
            "heckman: singular probit information (no prediction variation)");
    double d0 = (i11 * s0 - i01 * s1) / det;
    double d1 = (i00 * s1 - i01 * s0) / det;
    g0 += d0;
    g1 += d1;
    require(std::isfinite(g0) && std::isfinite(g1) && std::fabs(g0) < 1e3 &&
                std::fabs(g1) < 1e3,
            Errc::estimator_failed, "heckman: probit diverged (separation)");
    if (std::fabs(d0) < 1e-10 && std::fabs(d1) < 1e-10) {
      converged = true;
      break;
    }
  }
  require(converged, Errc::estimator_failed, "heckman: probit did not converge");

  // Stage 2: least squares of Y on (1, F, lambda) over observed units.
  Matrix xtx(3, 3);
  Vector xty(3, 0.0);
  for (const auto& rec : records) {
    if (rec.r != 1) continue;
    double lam = stats::mills_ratio(g0 + g1 * rec.f);
    double x[3] = {1.0, static_cast<double>(rec.f), lam};
    for (int a = 0; a < 3; ++a) {
      xty[a] += x[a] * rec.y;
      for (int b = 0; b < 3; ++b) xtx(a, b) += x[a] * x[b];
    }
  }
  double mean_f = 0.0;
  for (const auto& rec : records) mean_f += rec.f;
  mean_f /= static_cast<double>(records.size());

  // Without an exclusion restriction the correction is identified only by
  // the curvature of the Mills term. When the fitted selection index barely
  // varies the Mills column is an affine function of F, the design collapses,
  // and the coefficients amplify noise; drop the correction instead.
  Matrix gram(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double scale = std::sqrt(xtx(a, a) * xtx(b, b));
      gram(a, b) = scale > 0.0 ? xtx(a, b) / scale : 0.0;
    }
  if (linalg::singular_values(gram).back() < 1e-7) {
    Matrix xtx2(2, 2);
    Vector xty2(2, 0.0);
    for (const auto& rec : records) {
      if (rec.r != 1) continue;
      double x[2] = {1.0, static_cast<double>(rec.f)};
      for (int a = 0; a < 2; ++a) {
        xty2[a] += x[a] * rec.y;
        for (int b = 0; b < 2; ++b) xtx2(a, b) += x[a] * x[b];
      }
    }
    Vector coef2;
    require(solve_dense(xtx2, xty2, coef2), Errc::estimator_failed,
            "heckman: collinear outcome regression");
    PointEstimate est;
    est.method = "heckman";
    est.value = coef2[0] + coef2[1] * mean_f;
    double rss = 0.0;
    for (const auto& rec : records) {
      if (rec.r != 1) continue;
      double fit = coef2[0] + coef2[1] * rec.f;
      rss += (rec.y - fit) * (rec.y - fit);
    }
    double dof = std::max<double>(1.0, static_cast<double>(n_obs - 2));
    double sigma2 = rss / dof;
    Matrix inv2(2, 2);
    for (int j = 0; j < 2; ++j) {
      Vector col, e(2, 0.0);
      e[j] = 1.0;
      if (!solve_dense(xtx2, e, col)) break;
      for (int i = 0; i < 2; ++i) inv2(i, j) = col[i];
    }
    double quad = inv2(0, 0) + 2.0 * inv2(0, 1) * mean_f + inv2(1, 1) * mean_f * mean_f;
    est.se = quad > 0 ? std::sqrt(sigma2 * quad) : 0.0;
    est.flags.push_back("selection index nearly constant, Mills term dropped");
    finish(est);
    return est;
  }

  Vector coef;
  require(solve_dense(xtx, xty, coef), Errc::estimator_failed,
          "heckman: collinear outcome regression");

  PointEstimate est;
  est.method = "heckman";
  est.value = coef[0] + coef[1] * mean_f;
  require(std::isfinite(est.value), Errc::estimator_failed, "heckman: non-finite estimate");

  // Plain homoskedastic standard error of the prediction at mean F.
  double rss = 0.0;
  for (const auto& rec : records) {
    if (rec.r != 1) continue;
    double lam = stats::mills_ratio(g0 + g1 * rec.f);
    double fit = coef[0] + coef[1] * rec.f + coef[2] * lam;
    rss += (rec.y - fit) * (rec.y - fit);
  }
  double dof = std::max<double>(1.0, static_cast<double>(n_obs - 3));
  double sigma2 = rss / dof;
  Matrix inv(3, 3);
  for (int j = 0; j < 3; ++j) {
    Vector col, e(3, 0.0);
    e[j] = 1.0;
    if (!solve_dense(xtx, e, col)) break;
    for (int i = 0; i < 3; ++i) inv(i, j) = col[i];
  }
  double quad = inv(0, 0) + 2.0 * inv(0, 1) * mean_f + inv(1, 1) * mean_f * mean_f;
  est.se = quad > 0 ? std::sqrt(sigma2 * quad) : 0.0;
  finish(est);
  return est;
}

PointEstimate pattern_mixture(const std::vector<model::UnitRecord>& records) {
  check_predictions(records, "pattern_mixture");
  std::map<int, std::pair<double, long>> cell;  // f -> (sum y, count) over observed
  double obs_sum = 0.0;
  long obs_n = 0;
  for (const auto& rec : records) {
    if (rec.r != 1) continue;
    auto& c = cell[rec.f];
    c.first += rec.y;
    ++c.second;
    obs_sum += rec.y;
    ++obs_n;
  }
  require(obs_n > 0, Errc::degenerate_estimator, "pattern_mixture: no observed outcomes");
  double fallback = obs_sum / static_cast<double>(obs_n);

  PointEstimate est;
  est.method = "pattern_mixture";
  bool used_fallback = false;
  Vector completed;
  completed.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.r == 1) {
      completed.push_back(rec.y);
      continue;
    }
    auto it = cell.find(rec.f);
    if (it == cell.end()) {
      completed.push_back(fallback);
      used_fallback = true;
    } else {
      completed.push_back(it->second.first / static_cast<double>(it->second.second));
    }
  }
  if (used_fallback)
    est.flags.push_back("cells with no observed outcome fell back to the overall observed mean");
  est.value = mean_of(completed);
  est.se = std::sqrt(sample_var(completed) / static_cast<double>(completed.size()));
  finish(est);
  return est;
}

PointEstimate llm_raw(const std::vector<model::UnitRecord>& records) {
  check_predictions(records, "llm_raw");
  Vector f;
  f.reserve(records.size());
  for (const auto& rec : records) f.push_back(rec.f);
  PointEstimate est;
  est.method = "llm_raw";
  est.value = mean_of(f);
  est.se = std::sqrt(sample_var(f) / static_cast<double>(f.size()));
  finish(est);
  return est;
}

}  // namespace mnar::baselines
