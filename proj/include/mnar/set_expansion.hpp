#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnar/interval.hpp"
#include "mnar/lp.hpp"
#include "mnar/tables.hpp"

namespace mnar::sim {
struct DgpConfig;
}

namespace mnar::expansion {

enum class KappaRule { constant, log_n, loglog_n };

KappaRule kappa_rule_from_name(const std::string& name);
const char* kappa_rule_name(KappaRule rule);

struct ExpansionConfig {
  double C = 50.0;
  KappaRule kappa_rule = KappaRule::constant;
  double kappa_value = 0.5;  // used by the constant rule
  Vector g;                  // objective weights, empty means identity

  double kappa(long n) const;
  void validate() const;
};

struct StratumExpansion {
  std::string id;
  double slack = 0.0;   // infeasibility of the empirical margin system
  double margin = 0.0;  // slack + kappa(n_x) / sqrt(n_x)
  Interval interval;
  lp::Status lo_status = lp::Status::optimal;
  lp::Status hi_status = lp::Status::optimal;
  bool box_binding = false;  // some optimal weight sits at the C cap
};

struct ExpansionReport {
  std::vector<StratumExpansion> per_stratum;
  Interval aggregate;
  std::vector<std::string> flags;
};

// Infeasibility slack of the empirical margin system: the smallest
// worst-row violation achievable with weights in [0, C].
double slack(const model::StratumTable& table, double C);

// Finite-sample bounds: per stratum, optimize the plug-in objective over
// weights within margin of the empirical margins and inside [0, C].
ExpansionReport estimate(const model::PopulationTables& pop, const ExpansionConfig& cfg);

struct RatePoint {
  long n = 0;
  double err_lo = 0.0;     // mean |lower endpoint - oracle| over reps
  double err_hi = 0.0;     // mean |upper endpoint - oracle| over reps
  double hausdorff = 0.0;  // mean of the per-rep worse endpoint error
};

struct RateTable {
  std::vector<RatePoint> points;
  double slope_lo = 0.0;  // log-log slope of err_lo vs n
  double slope_hi = 0.0;
  double slope = 0.0;  // log-log slope of the mean endpoint error
  Interval oracle;
};

// Monte Carlo convergence of the estimator toward the population bounds.
// Replications use counter-derived seeds, so the result is identical for
// any thread count.
RateTable convergence_study(const sim::DgpConfig& dgp, const ExpansionConfig& cfg,
                            const std::vector<long>& n_grid, int reps, std::uint64_t seed,
                            int threads = 1);

}  // namespace mnar::expansion
