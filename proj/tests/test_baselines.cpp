#include <cmath>
#include <vector>

#include "doctest.h"
#include "mnar/baselines.hpp"
#include "mnar/error.hpp"
#include "mnar/normal.hpp"
#include "mnar/simlab.hpp"

using mnar::Errc;
using mnar::Error;
using mnar::Vector;
using mnar::model::UnitRecord;
namespace bl = mnar::baselines;
namespace sim = mnar::sim;

namespace {

UnitRecord obs(int f, int y) {
  UnitRecord rec;
  rec.f = f;
  rec.r = 1;
  rec.y = y;
  return rec;
}

UnitRecord miss(int f) {
  UnitRecord rec;
  rec.f = f;
  rec.r = 0;
  rec.y = 0;
  return rec;
}

double mean(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double var1(const Vector& v) {
  if (v.size() < 2) return 0.0;
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double phi_oracle(double z) {
  return 0.5 * (1.0 + std::erf(z * 0.7071067811865476));
}

double mills_oracle(double z) {
  return mnar::stats::norm_pdf(z) / (0.5 * std::erfc(-z * 0.7071067811865476));
}

}  // namespace

TEST_CASE("the normal cdf tracks an erf oracle across the support") {
  double worst = 0.0;
  for (int i = -512; i <= 512; ++i) {
    double z = i / 64.0;
    worst = std::max(worst, std::fabs(mnar::stats::norm_cdf(z) - phi_oracle(z)));
  }
  CHECK(worst <= 1e-7);
  CHECK(mnar::stats::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-8));

  for (int i = 0; i <= 512; ++i) {
    double z = i / 64.0;
    CHECK(mnar::stats::norm_cdf(z) + mnar::stats::norm_cdf(-z) == doctest::Approx(1.0).epsilon(1e-15));
  }

  double prev = mnar::stats::norm_cdf(-8.0);
  for (int i = -511; i <= 512; ++i) {
    double cur = mnar::stats::norm_cdf(i / 64.0);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("density and mills ratio have the textbook anchor values") {
  CHECK(mnar::stats::norm_pdf(0.0) == 0.3989422804014327);
  CHECK(mnar::stats::norm_pdf(1.7) == mnar::stats::norm_pdf(-1.7));
  CHECK(mnar::stats::mills_ratio(0.0) ==
        doctest::Approx(0.3989422804014327 / 0.5).epsilon(1e-6));
}

TEST_CASE("both mills branches match an erfc oracle and decrease in z") {
  for (double z : {-20.0, -12.0, -8.0, -6.5}) {
    double got = mnar::stats::mills_ratio(z);
    CHECK(got == doctest::Approx(mills_oracle(z)).epsilon(1e-3));
    CHECK(got > -z);
  }
  for (double z : {-5.5, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
    CHECK(mnar::stats::mills_ratio(z) == doctest::Approx(mills_oracle(z)).epsilon(1e-2));
  }
  double prev = mnar::stats::mills_ratio(-15.0);
  for (double z = -14.75; z <= 3.01; z += 0.25) {
    double cur = mnar::stats::mills_ratio(z);
    CHECK(cur > 0.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("complete cases average the observed outcomes") {
  auto est = bl::cca({obs(1, 2), miss(1), obs(1, 4)});
  CHECK(est.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(est.method == "cca");
  CHECK(est.se == doctest::Approx(std::sqrt(2.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("estimators recompute hand formulas on a mixed sample") {
  std::vector<UnitRecord> recs = {obs(1, 2), obs(2, 1), miss(3),
                                  miss(1),   obs(2, 3), obs(3, 3)};
  Vector obs_y = {2, 1, 3, 3};
  Vector all_f = {1, 2, 3, 1, 2, 3};
  Vector diffs = {2 - 1, 1 - 2, 3 - 2, 3 - 3};

  auto c = bl::cca(recs);
  CHECK(c.value == doctest::Approx(mean(obs_y)).epsilon(1e-12));
  CHECK(c.se == doctest::Approx(std::sqrt(var1(obs_y) / 4.0)).epsilon(1e-12));

  auto nv = bl::naive_impute(recs);
  Vector completed = {2, 1, 3, 1, 3, 3};
  CHECK(nv.value == doctest::Approx(mean(completed)).epsilon(1e-12));
  CHECK(nv.se == doctest::Approx(std::sqrt(var1(completed) / 6.0)).epsilon(1e-12));

  auto p = bl::ppi(recs);
  CHECK(p.value == doctest::Approx(mean(all_f) + mean(diffs)).epsilon(1e-12));
  CHECK(p.se ==
        doctest::Approx(std::sqrt(var1(all_f) / 6.0 + var1(diffs) / 4.0)).epsilon(1e-12));

  auto pm = bl::pattern_mixture(recs);
  Vector cells = {2, 1, 3, 2, 3, 3};
  CHECK(pm.value == doctest::Approx(mean(cells)).epsilon(1e-12));
  CHECK(pm.flags.empty());

  auto lr = bl::llm_raw(recs);
  CHECK(lr.value == doctest::Approx(mean(all_f)).epsilon(1e-12));
  CHECK(lr.se == doctest::Approx(std::sqrt(var1(all_f) / 6.0)).epsilon(1e-12));
}

TEST_CASE("with everything observed the imputation baselines agree on the sample mean") {
  std::vector<UnitRecord> recs = {obs(1, 1), obs(2, 2), obs(3, 3), obs(4, 4)};
  for (auto* fn : {bl::cca, bl::naive_impute, bl::ppi, bl::pattern_mixture, bl::llm_raw}) {
    CHECK(fn(recs).value == doctest::Approx(2.5).epsilon(1e-12));
  }
  CHECK(bl::heckman(recs).value == doctest::Approx(2.5).epsilon(1e-6));
}

TEST_CASE("heckman with nothing missing is the least squares prediction") {
  std::vector<UnitRecord> recs = {obs(1, 2), obs(2, 1), obs(3, 4), obs(4, 3), obs(5, 5)};
  auto est = bl::heckman(recs);
  CHECK(est.value == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(est.se == doctest::Approx(std::sqrt(0.24)).epsilon(1e-9));
}

TEST_CASE("pattern mixture falls back for never-observed cells") {
  std::vector<UnitRecord> recs = {obs(1, 2), obs(1, 2), miss(2), obs(3, 4)};
  auto est = bl::pattern_mixture(recs);
  CHECK(est.value == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  REQUIRE(est.flags.size() == 1);
  CHECK(est.flags[0] ==
        "cells with no observed outcome fell back to the overall observed mean");
}

TEST_CASE("constant predictions collapse llm_raw to a point") {
  std::vector<UnitRecord> recs = {obs(3, 1), miss(3), obs(3, 5), miss(3)};
  auto est = bl::llm_raw(recs);
  CHECK(est.value == 3.0);
  CHECK(est.se == 0.0);
  CHECK(est.ci_lo == 3.0);
  CHECK(est.ci_hi == 3.0);
}

TEST_CASE("degenerate and malformed inputs are refused") {
  CHECK_THROWS_WITH_AS(bl::cca({}), "contract: cca: no records", Error);
  CHECK_THROWS_WITH_AS(bl::cca({miss(1), miss(2)}),
                       "degenerate_estimator: cca: no observed outcomes", Error);
  CHECK_THROWS_WITH_AS(bl::ppi({miss(1), miss(2)}),
                       "degenerate_estimator: ppi: no observed outcomes", Error);
  CHECK_THROWS_WITH_AS(bl::pattern_mixture({miss(1)}),
                       "degenerate_estimator: pattern_mixture: no observed outcomes", Error);
  CHECK_THROWS_WITH_AS(bl::heckman({obs(1, 1), obs(2, 2), miss(1)}),
                       "degenerate_estimator: heckman: too few observed outcomes", Error);
  CHECK_THROWS_WITH_AS(bl::naive_impute({obs(0, 1)}),
                       "contract: naive_impute: record without prediction F", Error);
  CHECK_THROWS_WITH_AS(bl::llm_raw({obs(2, 1), obs(0, 1)}),
                       "contract: llm_raw: record without prediction F", Error);
  CHECK_THROWS_WITH_AS(bl::llm_raw({}), "contract: llm_raw: no records", Error);
}

TEST_CASE("heckman refuses constant predictions when outcomes are missing") {
  std::vector<UnitRecord> recs = {obs(2, 1), obs(2, 3), obs(2, 2), miss(2), miss(2)};
  CHECK_THROWS_WITH_AS(
      bl::heckman(recs),
      "estimator_failed: heckman: singular probit information (no prediction variation)",
      Error);
}

TEST_CASE("every baseline is consistent when its assumptions hold") {
  sim::DgpConfig dgp;
  dgp.M = 5;
  dgp.M_F = 5;
  dgp.p_y = {0.15, 0.2, 0.3, 0.2, 0.15};
  dgp.pi.assign(5, 0.6);
  dgp.f_given_y = sim::point_id_channel();
  dgp.n = 100000;
  dgp.seed = 5;
  auto recs = sim::generate(dgp);

  double truth = 0.0;
  for (int y = 0; y < 5; ++y) truth += (y + 1) * dgp.p_y[y];

  for (auto* fn : {bl::cca, bl::ppi, bl::pattern_mixture, bl::heckman}) {
    auto est = fn(recs);
    CHECK(est.se > 0.0);
    CHECK(std::fabs(est.value - truth) <= 4.0 * est.se);
  }

  sim::DgpConfig ident = dgp;
  ident.f_given_y = mnar::Matrix();
  ident.seed = 6;
  auto recs2 = sim::generate(ident);
  for (auto* fn : {bl::naive_impute, bl::llm_raw}) {
    auto est = fn(recs2);
    CHECK(est.se > 0.0);
    CHECK(std::fabs(est.value - truth) <= 4.0 * est.se);
  }
}

TEST_CASE("informative missingness biases the point estimators") {
  sim::DgpConfig dgp;
  dgp.M = 5;
  dgp.M_F = 5;
  dgp.pi = sim::pi_asymmetric_u_preset();
  dgp.f_given_y = sim::point_id_channel();
  dgp.n = 100000;
  dgp.seed = 12;
  auto recs = sim::generate(dgp);

  CHECK(bl::cca(recs).value - 3.0 > 0.3);
  CHECK(std::fabs(bl::heckman(recs).value - 3.0) > 0.1);
}

TEST_CASE("llm_raw ignores the response pattern") {
  sim::DgpConfig dgp;
  dgp.M = 5;
  dgp.M_F = 5;
  dgp.p_y = {0.15, 0.2, 0.3, 0.2, 0.15};
  dgp.pi.assign(5, 0.5);
  dgp.f_given_y = sim::point_id_channel();
  dgp.n = 2000;
  dgp.seed = 9;
  auto recs = sim::generate(dgp);
  auto blanked = recs;
  for (auto& rec : blanked) {
    rec.r = 0;
    rec.y = 0;
  }
  CHECK(bl::llm_raw(recs).value == bl::llm_raw(blanked).value);
}

TEST_CASE("confidence intervals use the normal critical value") {
  auto est = bl::cca({obs(1, 1), obs(1, 2), obs(1, 4)});
  CHECK(est.ci_lo == est.value - 1.959963984540054 * est.se);
  CHECK(est.ci_hi == est.value + 1.959963984540054 * est.se);
}
