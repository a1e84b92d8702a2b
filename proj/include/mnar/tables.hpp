#pragma once

#include <string>
#include <vector>

#include "mnar/mat.hpp"

namespace mnar::model {

struct UnitRecord {
  std::string stratum;  // empty = the single default stratum
  int f = 1;            // prediction level in 1..M_F, 1 when absent
  int r = 0;            // 1 observed, 0 missing
  int y = 0;            // outcome level in 1..M when r = 1, else 0
  int d = -1;           // treatment arm 0/1, -1 when absent
};

// Empirical (or exact) probability tables for one covariate stratum:
// alpha[f][y] = P(R=1, F=f, Y=y | X=x), beta[f] = P(R=0, F=f | X=x).
struct StratumTable {
  int M = 0;
  int M_F = 0;
  Matrix alpha;            // M_F x M
  Vector beta;             // M_F
  Vector alpha_marginal;   // M
  long n = 0;
  double p_r0 = 0.0;
  bool empirical = true;

  void validate() const;
};

struct StratumEntry {
  std::string id;
  StratumTable table;
  double weight = 0.0;
};

struct PopulationTables {
  int M = 0;
  int M_F = 0;
  std::vector<StratumEntry> strata;  // sorted by stratum id
  std::vector<std::string> warnings;

  void validate() const;
  // mass-weighted pooling of all strata into one table
  StratumTable pooled() const;
};

// Plain frequency tables per stratum, weights n_x / n. Strata ordered by id.
PopulationTables estimate_tables(const std::vector<UnitRecord>& records, int M, int M_F,
                                 double smoothing = 0.0);

StratumTable table_from_probabilities(const Matrix& alpha, const Vector& beta, long n,
                                      bool empirical);

}  // namespace mnar::model
