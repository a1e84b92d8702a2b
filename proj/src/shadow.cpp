#include "mnar/shadow.hpp"

#include <cmath>
#include <limits>

#include "mnar/bounds.hpp"
#include "mnar/error.hpp"

namespace mnar::shadow {

namespace {

struct StratumLp {
  lp::Problem prob;          // constraints and boxes, objective filled per direction
  double constant = 0.0;     // objective offset from the +1 term
  std::vector<int> zero_columns;
};

StratumLp build_stratum_lp(const model::StratumTable& t, const Vector& g) {
  int M = t.M, MF = t.M_F;
  StratumLp out;
  out.prob.A = t.alpha;
  out.prob.band_lo = t.beta;
  out.prob.band_hi = t.beta;
  out.prob.box_lo.assign(M, 0.0);
  out.prob.box_hi.assign(M, 0.0);
  out.prob.c.assign(M, 0.0);
  for (int y = 0; y < M; ++y) {
    double colsum = t.alpha_marginal[y];
    out.prob.c[y] = g[y] * colsum;
    out.constant += g[y] * colsum;
    // Valid implied cap: alpha(f,y) * w(y) <= beta(f) row by row.
    double cap = std::numeric_limits<double>::infinity();
    for (int f = 0; f < MF; ++f)
      if (t.alpha(f, y) > lp::kPivotTol) cap = std::min(cap, t.beta[f] / t.alpha(f, y));
    if (std::isfinite(cap)) {
      out.prob.box_hi[y] = cap;
    } else {
      // Never-observed level: zero objective and constraint coefficients,
      // the variable is inert. Pin it so boxes stay finite.
      out.zero_columns.push_back(y + 1);
    }
  }
  return out;
}

}  // namespace

Interval shadow_bounds_stratum(const model::StratumTable& table, const Vector& g,
                               bool force) {
  require(!table.empirical || force, Errc::contract,
          "shadow bounds: empirical tables are refused (equality constraints are "
          "generically infeasible under sampling noise; use set expansion or force)");
  Vector weights = g.empty() ? bounds::default_weights(table.M) : g;
  require(weights.size() == static_cast<std::size_t>(table.M), Errc::contract,
          "shadow bounds: weight vector length mismatch");

  StratumLp built = build_stratum_lp(table, weights);

  built.prob.maximize = false;
  lp::Solution lo = lp::solve(built.prob);
  require(lo.status != lp::Status::infeasible, Errc::data_inconsistency,
          "shadow bounds: margin equations infeasible, table inconsistent");
  require(lo.status == lp::Status::optimal, Errc::solver_stalled,
          "shadow bounds: lower LP " + std::string(lp::status_name(lo.status)));
  built.prob.maximize = true;
  lp::Solution hi = lp::solve(built.prob);
  require(hi.status == lp::Status::optimal, Errc::solver_stalled,
          "shadow bounds: upper LP " + std::string(lp::status_name(hi.status)));

  Interval out;
  out.method = Method::shadow;
  out.lo = lo.value + built.constant;
  out.hi = hi.value + built.constant;
  out.meta["zero_columns"] = static_cast<double>(built.zero_columns.size());
  return out;
}

ShadowBoundsReport aggregate_shadow_bounds(const model::PopulationTables& pop,
                                           const Vector& g, bool force) {
  pop.validate();
  Vector weights = g.empty() ? bounds::default_weights(pop.M) : g;
  require(weights.size() == static_cast<std::size_t>(pop.M), Errc::contract,
          "shadow bounds: weight vector length mismatch");

  ShadowBoundsReport report;
  report.aggregate.method = Method::shadow;
  report.point_identified = true;
  for (const auto& s : pop.strata) {
    require(!s.table.empirical || force, Errc::contract,
            "shadow bounds: empirical tables are refused (use set expansion or force)");
    StratumLp built = build_stratum_lp(s.table, weights);

    StratumResult res;
    res.id = s.id;
    res.zero_columns = built.zero_columns;
    built.prob.maximize = false;
    lp::Solution lo = lp::solve(built.prob);
    require(lo.status != lp::Status::infeasible, Errc::data_inconsistency,
            "shadow bounds: stratum " + s.id + " margin equations infeasible");
    require(lo.status == lp::Status::optimal, Errc::solver_stalled,
            "shadow bounds: stratum " + s.id + " lower LP " +
                std::string(lp::status_name(lo.status)));
    built.prob.maximize = true;
    lp::Solution hi = lp::solve(built.prob);
    require(hi.status == lp::Status::optimal, Errc::solver_stalled,
            "shadow bounds: stratum " + s.id + " upper LP " +
                std::string(lp::status_name(hi.status)));

    res.lo_status = lo.status;
    res.hi_status = hi.status;
    res.w_lo = lo.point;
    res.w_hi = hi.point;
    res.interval.method = Method::shadow;
    res.interval.lo = lo.value + built.constant;
    res.interval.hi = hi.value + built.constant;
    if (!built.zero_columns.empty())
      report.flags.push_back("stratum " + s.id + ": " +
                             std::to_string(built.zero_columns.size()) +
                             " outcome level(s) never observed, weights pinned at 0");
    if (res.interval.width() > 1e-8) report.point_identified = false;

    report.aggregate.lo += s.weight * res.interval.lo;
    report.aggregate.hi += s.weight * res.interval.hi;
    report.per_stratum.push_back(std::move(res));
  }
  auto gaps = aggregation_gap_lower_bounds(pop, &report.flags);
  report.gap_lb_upper = gaps.first;
  report.gap_lb_lower = gaps.second;
  report.aggregate.meta["gap_lb_upper"] = report.gap_lb_upper;
  report.aggregate.meta["gap_lb_lower"] = report.gap_lb_lower;
  report.aggregate.meta["point_identified"] = report.point_identified ? 1.0 : 0.0;
  return report;
}

std::pair<double, double> aggregation_gap_lower_bounds(const model::PopulationTables& pop,
                                                       std::vector<std::string>* flags) {
  double gap_upper = 0.0, gap_lower = 0.0;
  for (const auto& s : pop.strata) {
    const auto& t = s.table;
    double beta_mass = 0.0;
    for (double b : t.beta) beta_mass += b;
    if (beta_mass <= 0.0) continue;

    auto column_term = [&](int y) -> double {
      double col_mass = 0.0;
      for (int f = 0; f < t.M_F; ++f) col_mass += t.alpha(f, y);
      if (col_mass <= 0.0) {
        if (flags)
          flags->push_back("stratum " + s.id + ": outcome column " + std::to_string(y + 1) +
                           " has zero mass, gap term set to 0");
        return 0.0;
      }
      double l1 = 0.0;
      for (int f = 0; f < t.M_F; ++f)
        l1 += std::fabs(t.beta[f] / beta_mass - t.alpha(f, y) / col_mass);
      return 0.5 * beta_mass * l1;
    };
    gap_upper += s.weight * column_term(t.M - 1);
    gap_lower += s.weight * column_term(0);
  }
  return {gap_upper, gap_lower};
}

}  // namespace mnar::shadow
