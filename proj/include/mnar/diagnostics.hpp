#pragma once

#include <string>
#include <vector>

#include "mnar/mat.hpp"
#include "mnar/tables.hpp"

namespace mnar::diag {

// Rank and conditioning summary of the shadow-outcome dependence structure.
// B is always computable from observed cells; H needs ground truth and is
// only populated in simulation or fully-labeled calibration runs.
struct CompletenessReport {
  Matrix H;                       // joint P(F=f, Y=y), empty unless supplied
  Matrix B;                       // P(Y=y | F=f, R=1), zero-mass rows dropped
  std::vector<int> dropped_rows;  // 1-based shadow levels with no observed mass
  Vector singular_values_H;
  Vector singular_values_B;
  double sigma_min_H = 0.0;
  double kappa_H = 0.0;
  double sigma_min_B = 0.0;
  double kappa_B = 0.0;
  int rank_H = 0;
  int rank_B = 0;
  bool has_H = false;
  bool complete = false;       // rank of B equals the outcome support size
  bool bound_checked = false;  // conditioning inequality evaluated (needs H and pi)
  bool bound_holds = false;
  std::vector<std::string> flags;
};

// Observed-data diagnostic: B from the table's observed cells.
CompletenessReport completeness_report(const model::StratumTable& table);

// Simulation mode: also takes the true joint H and response propensities,
// and checks kappa(B) <= (max p_F / min p_F) * (max pi / min pi) * kappa(H).
CompletenessReport completeness_report(const model::StratumTable& table, const Matrix& H,
                                       const Vector& pi_known);

// Smallest positive singular value (above the rank tolerance).
double sigma_min_positive(const Matrix& A);

// Error-amplification constant sqrt(m) / sigma_min_positive(A): an
// infinity-norm residual bounds the distance to the solution set of a
// consistent system after scaling by this.
double hoffman_constant(const Matrix& A);

// Euclidean distance from w to the solution set of the consistent system
// A x = b, via pseudoinverse projection. Oracle for the Hoffman property.
double distance_to_solution_set(const Matrix& A, const Vector& b, const Vector& w);

}  // namespace mnar::diag
