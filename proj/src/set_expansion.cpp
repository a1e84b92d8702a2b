#include "mnar/set_expansion.hpp"

#include <cmath>

#include "mnar/bounds.hpp"
#include "mnar/error.hpp"
#include "mnar/parallel.hpp"
#include "mnar/rng.hpp"
#include "mnar/shadow.hpp"
#include "mnar/simlab.hpp"

namespace mnar::expansion {

KappaRule kappa_rule_from_name(const std::string& name) {
  if (name == "constant") return KappaRule::constant;
  if (name == "log") return KappaRule::log_n;
  if (name == "loglog") return KappaRule::loglog_n;
  fail(Errc::config, "unknown kappa rule: " + name);
}

const char* kappa_rule_name(KappaRule rule) {
  switch (rule) {
    case KappaRule::constant: return "constant";
    case KappaRule::log_n: return "log";
    case KappaRule::loglog_n: return "loglog";
  }
  return "?";
}

double ExpansionConfig::kappa(long n) const {
  require(n >= 1, Errc::contract, "kappa: nonpositive sample size");
  switch (kappa_rule) {
    case KappaRule::constant:
      return kappa_value;
    case KappaRule::log_n:
      return std::log(static_cast<double>(n));
    case KappaRule::loglog_n:
      if (n < 3) return 1.0;
      return std::max(1.0, std::log(std::log(static_cast<double>(n))));
  }
  return kappa_value;
}

void ExpansionConfig::validate() const {
  require(C > 0.0, Errc::contract, "expansion: C must be positive");
  require(kappa_rule != KappaRule::constant || kappa_value >= 0.0, Errc::contract,
          "expansion: negative kappa");
}

double slack(const model::StratumTable& table, double C) {
  require(C > 0.0, Errc::contract, "slack: C must be positive");
  return lp::min_inf_norm_residual(table.alpha, table.beta, C).first;
}

namespace {

StratumExpansion expand_stratum(const std::string& id, const model::StratumTable& t,
                                const ExpansionConfig& cfg, const Vector& g) {
  StratumExpansion out;
  out.id = id;
  require(t.n >= 1, Errc::contract, "expansion: stratum " + id + " has no sample size");
  out.slack = slack(t, cfg.C);
  out.margin = out.slack + cfg.kappa(t.n) / std::sqrt(static_cast<double>(t.n));

  int M = t.M;
  lp::Problem prob;
  prob.A = t.alpha;
  prob.band_lo.resize(t.M_F);
  prob.band_hi.resize(t.M_F);
  for (int f = 0; f < t.M_F; ++f) {
    prob.band_lo[f] = t.beta[f] - out.margin;
    prob.band_hi[f] = t.beta[f] + out.margin;
  }
  prob.box_lo.assign(M, 0.0);
  prob.box_hi.assign(M, cfg.C);
  prob.c.assign(M, 0.0);
  double constant = 0.0;
  for (int y = 0; y < M; ++y) {
    prob.c[y] = g[y] * t.alpha_marginal[y];
    constant += g[y] * t.alpha_marginal[y];
  }

  prob.maximize = false;
  lp::Solution lo = lp::solve(prob);
  require(lo.status == lp::Status::optimal, Errc::solver_stalled,
          "expansion: stratum " + id + " lower LP " +
              std::string(lp::status_name(lo.status)));
  prob.maximize = true;
  lp::Solution hi = lp::solve(prob);
  require(hi.status == lp::Status::optimal, Errc::solver_stalled,
          "expansion: stratum " + id + " upper LP " +
              std::string(lp::status_name(hi.status)));

  out.lo_status = lo.status;
  out.hi_status = hi.status;
  out.interval.method = Method::set_expansion;
  out.interval.lo = lo.value + constant;
  out.interval.hi = hi.value + constant;
  out.interval.meta["slack"] = out.slack;
  out.interval.meta["margin"] = out.margin;
  for (int y = 0; y < M; ++y)
    if (lo.point[y] >= cfg.C - 1e-9 || hi.point[y] >= cfg.C - 1e-9) out.box_binding = true;
  return out;
}

}  // namespace

ExpansionReport estimate(const model::PopulationTables& pop, const ExpansionConfig& cfg) {
  pop.validate();
  cfg.validate();
  Vector g = cfg.g.empty() ? bounds::default_weights(pop.M) : cfg.g;
  require(g.size() == static_cast<std::size_t>(pop.M), Errc::contract,
          "expansion: weight vector length mismatch");

  ExpansionReport report;
  report.aggregate.method = Method::set_expansion;
  for (const auto& s : pop.strata) {
    StratumExpansion res = expand_stratum(s.id, s.table, cfg, g);
    if (res.box_binding)
      report.flags.push_back("stratum " + s.id +
                             ": an optimal weight binds at the cap C; coverage "
                             "guarantees assume the truth lies inside the box");
    report.aggregate.lo += s.weight * res.interval.lo;
    report.aggregate.hi += s.weight * res.interval.hi;
    report.per_stratum.push_back(std::move(res));
  }
  return report;
}

RateTable convergence_study(const sim::DgpConfig& dgp, const ExpansionConfig& cfg,
                            const std::vector<long>& n_grid, int reps, std::uint64_t seed,
                            int threads) {
  require(!n_grid.empty(), Errc::contract, "convergence: empty grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    require(n_grid[i] > n_grid[i - 1], Errc::contract, "convergence: grid must increase");
  require(reps >= 1, Errc::contract, "convergence: reps must be positive");

  RateTable table;
  table.oracle = shadow::shadow_bounds_stratum(sim::exact_table(dgp), cfg.g);

  struct RepErr {
    double lo = 0.0, hi = 0.0;
  };
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    long n = n_grid[gi];
    std::vector<RepErr> errs(reps);
    parallel_for(reps, threads, [&](long rep) {
      sim::DgpConfig local = dgp;
      local.n = n;
      local.seed = mix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n)) ^
                   mix64(0xda942042e4dd58b5ULL * (static_cast<std::uint64_t>(rep) + 1));
      auto records = sim::generate(local);
      auto pop = model::estimate_tables(records, dgp.M, dgp.M_F);
      ExpansionReport rep_out = estimate(pop, cfg);
      errs[rep].lo = std::fabs(rep_out.aggregate.lo - table.oracle.lo);
      errs[rep].hi = std::fabs(rep_out.aggregate.hi - table.oracle.hi);
    });
    RatePoint pt;
    pt.n = n;
    for (const auto& e : errs) {
      pt.err_lo += e.lo;
      pt.err_hi += e.hi;
      pt.hausdorff += std::max(e.lo, e.hi);
    }
    pt.err_lo /= reps;
    pt.err_hi /= reps;
    pt.hausdorff /= reps;
    table.points.push_back(pt);
  }

  auto loglog_slope = [&](auto pick) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = static_cast<int>(table.points.size());
    for (const auto& pt : table.points) {
      double x = std::log(static_cast<double>(pt.n));
      double y = std::log(std::max(pick(pt), 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double denom = k * sxx - sx * sx;
    return denom > 0 ? (k * sxy - sx * sy) / denom : 0.0;
  };
  table.slope_lo = loglog_slope([](const RatePoint& p) { return p.err_lo; });
  table.slope_hi = loglog_slope([](const RatePoint& p) { return p.err_hi; });
  table.slope = loglog_slope([](const RatePoint& p) { return 0.5 * (p.err_lo + p.err_hi); });
  return table;
}

}  // namespace mnar::expansion
