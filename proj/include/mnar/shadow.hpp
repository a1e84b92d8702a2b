#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mnar/interval.hpp"
#include "mnar/lp.hpp"
#include "mnar/tables.hpp"

namespace mnar::shadow {

struct StratumResult {
  std::string id;
  Interval interval;
  lp::Status lo_status = lp::Status::optimal;
  lp::Status hi_status = lp::Status::optimal;
  std::vector<int> zero_columns;  // outcome levels never observed in this stratum (1-based)
  Vector w_lo;
  Vector w_hi;
};

struct ShadowBoundsReport {
  std::vector<StratumResult> per_stratum;
  Interval aggregate;
  double gap_lb_upper = 0.0;
  double gap_lb_lower = 0.0;
  bool point_identified = false;
  std::vector<std::string> flags;
};

// Exact-table LP bounds for one stratum: min/max E[g(Y)] over inverse-odds
// weights w >= 0 satisfying the shadow-margin equations A w = beta.
// Refuses empirically estimated tables unless force is set; sampling noise
// makes the equality system generically infeasible (use set_expansion).
Interval shadow_bounds_stratum(const model::StratumTable& table, const Vector& g = {},
                               bool force = false);

// Per-stratum shadow bounds aggregated by stratum weights, plus the
// guaranteed-improvement lower bounds on both endpoint gaps.
ShadowBoundsReport aggregate_shadow_bounds(const model::PopulationTables& pop,
                                           const Vector& g = {}, bool force = false);

// Lower bounds on how much the shadow constraints tighten each endpoint
// relative to the base bounds: compares the normalized missingness profile
// against the normalized extreme outcome columns in l1 distance.
std::pair<double, double> aggregation_gap_lower_bounds(const model::PopulationTables& pop,
                                                       std::vector<std::string>* flags = nullptr);

}  // namespace mnar::shadow
