#pragma once

#include <string>
#include <vector>

#include "mnar/tables.hpp"

namespace mnar::baselines {

struct PointEstimate {
  double value = 0.0;
  double se = 0.0;  // 0 when degenerate
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::string method;
  std::vector<std::string> flags;
};

// Complete-case analysis: mean of the observed outcomes.
PointEstimate cca(const std::vector<model::UnitRecord>& records);

// Missing outcomes replaced by the prediction F.
PointEstimate naive_impute(const std::vector<model::UnitRecord>& records);

// Prediction mean plus the observed-case correction mean(Y - F | R = 1).
PointEstimate ppi(const std::vector<model::UnitRecord>& records);

// Two-step selection correction: probit of R on (1, F), then least squares
// of Y on (1, F, inverse Mills ratio) over observed units; value averages
// the outcome prediction over all units.
PointEstimate heckman(const std::vector<model::UnitRecord>& records);

// Missing outcomes replaced by the observed-cell mean E[Y | F = f, R = 1];
// cells with no observed outcome fall back to the overall observed mean.
PointEstimate pattern_mixture(const std::vector<model::UnitRecord>& records);

// Mean of the prediction column alone.
PointEstimate llm_raw(const std::vector<model::UnitRecord>& records);

}  // namespace mnar::baselines
