#pragma once

#include <string>
#include <vector>

#include "mnar/interval.hpp"
#include "mnar/set_expansion.hpp"
#include "mnar/tables.hpp"

namespace mnar::causal {

struct ArmTables {
  model::StratumTable arm0;
  model::StratumTable arm1;
  long n0 = 0;
  long n1 = 0;

  void validate() const;
};

struct SignTestResult {
  bool applicable = false;
  bool holds = false;
  double margin = 0.0;
  int crossing_point = 0;  // 1-based y0; 0 when no valid crossing exists
  std::vector<std::string> notes;
};

// Build per-arm tables from records carrying a treatment column d.
ArmTables arm_tables_from_records(const std::vector<model::UnitRecord>& records, int M,
                                  int M_F);

// Average treatment effect bounds from the outcome margins alone:
// the separable closed form (worst case per arm).
Interval ate_bounds(const ArmTables& arms, const Vector& g = {});

// Same bounds as one joint linear program; solver cross-check.
Interval ate_bounds_lp(const ArmTables& arms, const Vector& g = {});

// Shadow-tightened effect bounds: per-arm margin equations as one LP.
Interval ate_shadow_bounds(const ArmTables& arms, const Vector& g = {}, bool force = false);

// Finite-sample effect bounds: per-arm slack and margin widen each arm's
// constraint band, joint objective optimized over both weight vectors.
Interval ate_set_expansion(const ArmTables& arms, const expansion::ExpansionConfig& cfg);

// Nonnegative-effect certificate: the observed-margin advantage exceeds
// the worst case the control arm's missing mass could hide.
SignTestResult sign_test_worst_case(const ArmTables& arms);

// Nonnegative-effect certificate under equal response mechanisms: observed
// outcome mass crosses from below to above at a single threshold. The
// premise is untestable from data and must be asserted by the caller.
SignTestResult sign_test_single_crossing(const ArmTables& arms, bool equal_response_asserted);

}  // namespace mnar::causal
