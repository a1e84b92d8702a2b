#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mnar/mat.hpp"
#include "mnar/set_expansion.hpp"
#include "mnar/tables.hpp"

namespace mnar::sim {

// Outcome pmf from a normal law cut at half-integer bin edges; the two
// outer bins absorb the tails.
Vector discretized_normal_pmf(int M, double mu, double sigma);

// Root-find sigma so that the overall response rate sum_y p(y) pi(y) hits
// the target under the discretized normal outcome law.
double calibrate_sigma(int M, double mu, const Vector& pi, double target_rate);

// Response mechanism with more observation at both score extremes and a
// strong high-score skew. The default simulation mechanism.
Vector pi_asymmetric_u_preset();

// Masking presets: response probability by true score. Committed vectors.
Vector mask_higher_score_missing();
Vector mask_u_shaped();
Vector mask_lower_score_missing();

// Row-stochastic P(F = f | Y = y) channels on a 5-level support.
// point_id: full rank, conditional means rising from 2.85 to 4.38.
// partial_id: same with rows (1,2) and (4,5) merged, rank 3.
Matrix point_id_channel();
Matrix partial_id_channel();

struct DgpConfig {
  int M = 5;
  int M_F = 5;
  Vector p_y;          // explicit outcome pmf; empty means discretized normal
  double mu = 3.0;     // discretized-normal location
  double sigma = 0.0;  // <= 0 means calibrate to response rate 0.366
  Matrix f_given_y;    // M x M_F rows P(F|Y=y); empty means identity channel
  Vector pi;           // response probability per outcome level
  long n = 0;
  std::uint64_t seed = 0;

  void validate() const;
  Vector resolved_p_y() const;
  Matrix resolved_channel() const;
};

// Exact population table implied by the config (no sampling).
model::StratumTable exact_table(const DgpConfig& dgp);

double true_mean(const DgpConfig& dgp);

// I.i.d. sample of (Y, F, R); y is blanked on masked records. Each unit
// draws from its own counter stream, so any prefix is reproducible.
std::vector<model::UnitRecord> generate(const DgpConfig& dgp);

// Fully-labeled variant: r = 1 and y kept on every record.
std::vector<model::UnitRecord> generate_labeled(const DgpConfig& dgp);

struct MaskedData {
  std::vector<model::UnitRecord> records;  // y blanked where masked
  std::vector<int> truth;                  // original y per record, metrics only
  double true_mean = 0.0;                  // mean of truth
};

// Bernoulli(pi(y)) response draw per record; keyed by (seed, record index).
MaskedData mask(const std::vector<model::UnitRecord>& labeled, const Vector& pi,
                std::uint64_t seed);

enum class EstimatorKind {
  aggregated_lp,  // shadow-free interval from the outcome margin
  set_expansion,
  cca,
  naive_impute,
  ppi,
  heckman,
  pattern_mixture,
  llm_raw,
};

const char* estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct ScenarioConfig {
  std::vector<model::UnitRecord> dataset;  // fully labeled; runner masks per rep
  int M = 5;
  int M_F = 5;
  Vector pi;               // fixed mechanism; empty means uniform_random
  double pi_lo = 0.1;      // uniform_random bounds for per-rep mechanisms
  double pi_hi = 0.9;
  std::vector<EstimatorKind> estimators;
  int reps = 1;
  std::uint64_t seed = 0;
  expansion::ExpansionConfig expansion;
  int threads = 1;

  void validate() const;
};

struct RepRow {
  int rep = 0;
  EstimatorKind estimator = EstimatorKind::cca;
  bool failed = false;
  std::string failure;
  bool interval = false;
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;  // point value, or interval midpoint
  bool covered = false;
};

struct EstimatorMetrics {
  EstimatorKind kind = EstimatorKind::cca;
  bool interval = false;
  long evaluated = 0;
  long failures = 0;
  double mae = 0.0;         // |value - truth|, midpoint for intervals
  double mean_width = 0.0;  // intervals only
  double coverage = 0.0;    // truth inside interval (or CI for points)
  double bias = 0.0;        // mean (value - truth)
};

struct MetricsReport {
  double true_mean = 0.0;
  int reps = 0;
  std::vector<EstimatorMetrics> per_estimator;
  std::vector<RepRow> rows;
  std::vector<std::string> flags;
};

// Replication loop: fresh mechanism and mask per rep, every estimator run,
// failures recorded and excluded from the averages. Deterministic for any
// thread count.
MetricsReport run_benchmark(const ScenarioConfig& scenario);

}  // namespace mnar::sim
