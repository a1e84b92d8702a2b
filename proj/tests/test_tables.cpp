#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "mnar/error.hpp"
#include "mnar/rng.hpp"
#include "mnar/simlab.hpp"
#include "mnar/tables.hpp"

using mnar::Errc;
using mnar::Error;
using mnar::Matrix;
using mnar::Rng;
using mnar::Vector;
using mnar::model::PopulationTables;
using mnar::model::StratumTable;
using mnar::model::UnitRecord;

namespace {

UnitRecord rec(int f, int r, int y, const std::string& stratum = "") {
  UnitRecord u;
  u.stratum = stratum;
  u.f = f;
  u.r = r;
  u.y = y;
  return u;
}

}  // namespace

TEST_CASE("cell frequencies from a four-record sample") {
  std::vector<UnitRecord> rs = {rec(1, 1, 1), rec(1, 1, 2), rec(1, 0, 0), rec(1, 0, 0)};
  auto pop = mnar::model::estimate_tables(rs, 2, 1);
  REQUIRE(pop.strata.size() == 1);
  const auto& t = pop.strata[0].table;
  CHECK(t.alpha(0, 0) == 0.25);
  CHECK(t.alpha(0, 1) == 0.25);
  CHECK(t.beta[0] == 0.5);
  CHECK(t.p_r0 == 0.5);
  CHECK(t.n == 4);
  CHECK(t.empirical);
  CHECK(pop.strata[0].weight == 1.0);
}

TEST_CASE("fully observed data leaves no missing mass") {
  std::vector<UnitRecord> rs = {rec(1, 1, 2), rec(2, 1, 1), rec(2, 1, 2), rec(1, 1, 1)};
  auto pop = mnar::model::estimate_tables(rs, 2, 2);
  const auto& t = pop.strata[0].table;
  CHECK(t.p_r0 == 0.0);
  for (double b : t.beta) CHECK(b == 0.0);
  CHECK(t.alpha_marginal[0] == 0.5);
  CHECK(t.alpha_marginal[1] == 0.5);
}

TEST_CASE("malformed records are rejected with their index") {
  CHECK_THROWS_WITH_AS(mnar::model::estimate_tables({rec(0, 1, 1)}, 2, 1),
                       "rejected_record: record 0: f outside 1..1", Error);
  CHECK_THROWS_WITH_AS(mnar::model::estimate_tables({rec(1, 2, 1)}, 2, 1),
                       "rejected_record: record 0: r must be 0 or 1", Error);
  CHECK_THROWS_WITH_AS(mnar::model::estimate_tables({rec(1, 1, 3)}, 2, 1),
                       "rejected_record: record 0: y outside 1..2", Error);
  std::vector<UnitRecord> rs = {rec(1, 1, 1), rec(1, 1, 0)};
  try {
    mnar::model::estimate_tables(rs, 2, 1);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rejected_record);
    CHECK(std::string(e.what()).find("record 1") != std::string::npos);
  }
}

TEST_CASE("record order does not matter") {
  Rng rng(41, 0);
  std::vector<UnitRecord> rs;
  for (int i = 0; i < 200; ++i) {
    int f = 1 + static_cast<int>(rng.u64() % 3);
    int r = rng.bernoulli(0.7) ? 1 : 0;
    int y = r == 1 ? 1 + static_cast<int>(rng.u64() % 4) : 0;
    rs.push_back(rec(f, r, y, rng.bernoulli(0.5) ? "a" : "b"));
  }
  auto shuffled = rs;
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.u64() % i]);

  auto p1 = mnar::model::estimate_tables(rs, 4, 3);
  auto p2 = mnar::model::estimate_tables(shuffled, 4, 3);
  REQUIRE(p1.strata.size() == p2.strata.size());
  for (std::size_t s = 0; s < p1.strata.size(); ++s) {
    CHECK(p1.strata[s].id == p2.strata[s].id);
    CHECK(p1.strata[s].weight == p2.strata[s].weight);
    const auto& a = p1.strata[s].table;
    const auto& b = p2.strata[s].table;
    CHECK(a.beta == b.beta);
    for (int f = 0; f < a.M_F; ++f)
      for (int y = 0; y < a.M; ++y) CHECK(a.alpha(f, y) == b.alpha(f, y));
  }
}

TEST_CASE("strata come back sorted by id with sample-share weights") {
  std::vector<UnitRecord> rs = {rec(1, 1, 1, "z"), rec(1, 1, 1, "a"), rec(1, 0, 0, "z"),
                                rec(1, 1, 2, "z")};
  auto pop = mnar::model::estimate_tables(rs, 2, 1);
  REQUIRE(pop.strata.size() == 2);
  CHECK(pop.strata[0].id == "a");
  CHECK(pop.strata[1].id == "z");
  CHECK(pop.strata[0].weight == 0.25);
  CHECK(pop.strata[1].weight == 0.75);
}

TEST_CASE("add-lambda smoothing spreads mass over every cell") {
  std::vector<UnitRecord> rs = {rec(1, 1, 1), rec(1, 1, 2), rec(1, 0, 0), rec(1, 0, 0)};
  auto pop = mnar::model::estimate_tables(rs, 2, 1, 1.0);
  const auto& t = pop.strata[0].table;
  double denom = 4.0 + 1.0 * 1 * 3;
  CHECK(t.alpha(0, 0) == doctest::Approx(2.0 / denom).epsilon(1e-15));
  CHECK(t.alpha(0, 1) == doctest::Approx(2.0 / denom).epsilon(1e-15));
  CHECK(t.beta[0] == doctest::Approx(3.0 / denom).epsilon(1e-15));
  CHECK_THROWS_AS(mnar::model::estimate_tables(rs, 2, 1, -0.5), Error);
}

TEST_CASE("pooling mass-weights the stratum cells") {
  std::vector<UnitRecord> rs;
  // stratum a: 1 of 4 records observed at (f1,y1)
  rs.push_back(rec(1, 1, 1, "a"));
  for (int i = 0; i < 3; ++i) rs.push_back(rec(1, 0, 0, "a"));
  // stratum b: 6 records, all observed at (f1,y2)
  for (int i = 0; i < 6; ++i) rs.push_back(rec(1, 1, 2, "b"));
  auto pop = mnar::model::estimate_tables(rs, 2, 1);
  auto pooled = pop.pooled();
  CHECK(pooled.alpha(0, 0) == doctest::Approx(0.4 * 0.25).epsilon(1e-15));
  CHECK(pooled.alpha(0, 1) == doctest::Approx(0.6 * 1.0).epsilon(1e-15));
  CHECK(pooled.beta[0] == doctest::Approx(0.4 * 0.75).epsilon(1e-15));
  CHECK(pooled.p_r0 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(pooled.n == 10);
  CHECK(pooled.empirical);
}

TEST_CASE("sampled tables track the exact population cells") {
  mnar::sim::DgpConfig dgp;
  dgp.pi = mnar::sim::pi_asymmetric_u_preset();
  dgp.f_given_y = mnar::sim::point_id_channel();
  dgp.n = 10000;
  dgp.seed = 7;
  auto exact = mnar::sim::exact_table(dgp);
  auto records = mnar::sim::generate(dgp);
  auto pop = mnar::model::estimate_tables(records, dgp.M, dgp.M_F);
  const auto& emp = pop.strata[0].table;
  auto band = [&](double p) { return 3.0 * std::sqrt(p * (1.0 - p) / 10000.0) + 1e-12; };
  for (int f = 0; f < dgp.M_F; ++f) {
    CHECK(std::fabs(emp.beta[f] - exact.beta[f]) <= band(exact.beta[f]));
    for (int y = 0; y < dgp.M; ++y)
      CHECK(std::fabs(emp.alpha(f, y) - exact.alpha(f, y)) <= band(exact.alpha(f, y)));
  }

  dgp.n = 1000000;
  dgp.seed = 1;
  auto big = mnar::model::estimate_tables(mnar::sim::generate(dgp), dgp.M, dgp.M_F);
  const auto& bt = big.strata[0].table;
  double worst = 0.0;
  for (int f = 0; f < dgp.M_F; ++f) {
    worst = std::max(worst, std::fabs(bt.beta[f] - exact.beta[f]));
    for (int y = 0; y < dgp.M; ++y)
      worst = std::max(worst, std::fabs(bt.alpha(f, y) - exact.alpha(f, y)));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("probability tables are validated on construction") {
  Matrix alpha(1, 2);
  alpha(0, 0) = 0.25;
  alpha(0, 1) = 0.25;
  CHECK_THROWS_WITH_AS(mnar::model::table_from_probabilities(alpha, {0.6}, 4, true),
                       "contract: table: probabilities do not sum to 1", Error);
  alpha(0, 0) = -0.1;
  CHECK_THROWS_WITH_AS(mnar::model::table_from_probabilities(alpha, {0.85}, 4, true),
                       "contract: table: alpha entry outside [0,1]", Error);
  Matrix ok(1, 2);
  ok(0, 0) = 0.25;
  ok(0, 1) = 0.25;
  auto t = mnar::model::table_from_probabilities(ok, {0.5}, 4, false);
  CHECK_FALSE(t.empirical);
  CHECK(t.alpha_marginal == Vector{0.25, 0.25});

  StratumTable bad = t;
  bad.p_r0 = 0.4;
  CHECK_THROWS_WITH_AS(bad.validate(), "contract: table: p_r0 inconsistent with beta", Error);
}

TEST_CASE("population validation catches weight and shape drift") {
  auto pop = testutil::single_population(
      testutil::margin_table({0.25, 0.25}, 0.5), "s");
  pop.validate();
  pop.strata[0].weight = 0.9;
  CHECK_THROWS_WITH_AS(pop.validate(), "contract: population: weights do not sum to 1",
                       Error);
  PopulationTables empty;
  empty.M = 2;
  empty.M_F = 1;
  CHECK_THROWS_WITH_AS(empty.validate(), "contract: population: no strata", Error);
}
