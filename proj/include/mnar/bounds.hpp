#pragma once

#include "mnar/interval.hpp"
#include "mnar/tables.hpp"

namespace mnar::bounds {

// Default objective weights g(y) = y on the support {1, ..., M}.
Vector default_weights(int M);

// Closed-form sharp bounds on E[g(Y)] from the outcome margin alone:
// the missing mass P(R=0) is swept to the smallest and largest weight.
Interval base_bounds(const model::StratumTable& table, const Vector& g = {});

// Same bounds via the linear program over total outcome probabilities
// p(y) >= alpha(y), sum p = 1. Exposed as a solver cross-check.
Interval base_bounds_lp(const model::StratumTable& table, const Vector& g = {});

// Weighted aggregation of per-stratum base bounds. Coincides with
// base_bounds on the pooled table.
Interval stratified_bounds(const model::PopulationTables& pop, const Vector& g = {});

}  // namespace mnar::bounds
