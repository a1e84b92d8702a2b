#include "mnar/simlab.hpp"

#include <cmath>

#include "mnar/baselines.hpp"
#include "mnar/bounds.hpp"
#include "mnar/error.hpp"
#include "mnar/normal.hpp"
#include "mnar/parallel.hpp"
#include "mnar/rng.hpp"

namespace mnar::sim {

Vector discretized_normal_pmf(int M, double mu, double sigma) {
  require(M >= 2, Errc::contract, "pmf: need at least two levels");
  require(sigma > 0.0, Errc::contract, "pmf: sigma must be positive");
  Vector p(M);
  double prev = 0.0;
  for (int y = 1; y < M; ++y) {
    double edge = stats::norm_cdf((y + 0.5 - mu) / sigma);
    p[y - 1] = edge - prev;
    prev = edge;
  }
  p[M - 1] = 1.0 - prev;
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  return p;
}

double calibrate_sigma(int M, double mu, const Vector& pi, double target_rate) {
  require(pi.size() == static_cast<std::size_t>(M), Errc::contract,
          "calibrate: pi length mismatch");
  auto rate = [&](double sigma) {
    Vector p = discretized_normal_pmf(M, mu, sigma);
    double r = 0.0;
    for (int y = 0; y < M; ++y) r += p[y] * pi[y];
    return r;
  };
  double lo = 0.05, hi = 50.0;
  double f_lo = rate(lo) - target_rate, f_hi = rate(hi) - target_rate;
  require(f_lo * f_hi <= 0.0, Errc::contract,
          "calibrate: target response rate not bracketed");
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (lo + hi);
    double f_mid = rate(mid) - target_rate;
    if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Vector pi_asymmetric_u_preset() { return {0.30, 0.10, 0.05, 0.70, 0.95}; }

Vector mask_higher_score_missing() { return {0.90, 0.75, 0.55, 0.35, 0.20}; }
Vector mask_u_shaped() { return {0.90, 0.55, 0.35, 0.55, 0.90}; }
Vector mask_lower_score_missing() { return {0.20, 0.35, 0.55, 0.75, 0.90}; }

Matrix point_id_channel() {
  // Full-rank row-stochastic channel; row means rise from 2.85 to 4.38.
  const double rows[5][5] = {
      {0.23114351352915793, 0.21440253413201277, 0.19887404989381258,
       0.18447024369970472, 0.17110965874531214},
      {0.15614868971608994, 0.17551877357228868, 0.19729169634617774,
       0.22176552772641878, 0.24927531263902483},
      {0.095151436268782419, 0.13116765081659584, 0.18081653094698558,
       0.24925824058111085, 0.34360614138652518},
      {0.047985411847422416, 0.084366871295391166, 0.14833193460556779,
       0.26079386951300143, 0.4585219127386172},
      {0.015833442989530568, 0.039349496868590239, 0.097791927178126639,
       0.24303388307985352, 0.60399124988389896}};
  Matrix out(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int f = 0; f < 5; ++f) out(y, f) = rows[y][f];
  return out;
}

Matrix partial_id_channel() {
  Matrix out = point_id_channel();
  for (int f = 0; f < 5; ++f) {
    double low = 0.5 * (out(0, f) + out(1, f));
    double high = 0.5 * (out(3, f) + out(4, f));
    out(0, f) = low;
    out(1, f) = low;
    out(3, f) = high;
    out(4, f) = high;
  }
  return out;
}

void DgpConfig::validate() const {
  require(M >= 2 && M_F >= 1, Errc::contract, "dgp: invalid supports");
  require(pi.size() == static_cast<std::size_t>(M), Errc::contract,
          "dgp: pi length mismatch");
  for (double v : pi)
    require(v > 0.0 && v <= 1.0, Errc::contract, "dgp: pi entries must be in (0,1]");
  if (!p_y.empty()) {
    require(p_y.size() == static_cast<std::size_t>(M), Errc::contract,
            "dgp: p_y length mismatch");
    double total = 0.0;
    for (double v : p_y) {
      require(v >= 0.0, Errc::contract, "dgp: negative outcome probability");
      total += v;
    }
    require(std::fabs(total - 1.0) <= 1e-12, Errc::contract, "dgp: p_y must sum to 1");
  }
  if (!f_given_y.empty()) {
    require(f_given_y.rows() == static_cast<std::size_t>(M) &&
                f_given_y.cols() == static_cast<std::size_t>(M_F),
            Errc::contract, "dgp: channel shape mismatch");
    for (int y = 0; y < M; ++y) {
      double row = 0.0;
      for (int f = 0; f < M_F; ++f) {
        require(f_given_y(y, f) >= 0.0, Errc::contract, "dgp: negative channel entry");
        row += f_given_y(y, f);
      }
      require(std::fabs(row - 1.0) <= 1e-12, Errc::contract,
              "dgp: channel rows must sum to 1");
    }
  } else {
    require(M_F == M, Errc::contract, "dgp: identity channel needs M_F == M");
  }
}

Vector DgpConfig::resolved_p_y() const {
  if (!p_y.empty()) return p_y;
  double s = sigma;
  if (s <= 0.0) s = calibrate_sigma(M, mu, pi, 0.366);
  return discretized_normal_pmf(M, mu, s);
}

Matrix DgpConfig::resolved_channel() const {
  if (!f_given_y.empty()) return f_given_y;
  return Matrix::identity(M);
}

model::StratumTable exact_table(const DgpConfig& dgp) {
  dgp.validate();
  Vector p = dgp.resolved_p_y();
  Matrix channel = dgp.resolved_channel();
  Matrix alpha(dgp.M_F, dgp.M);
  Vector beta(dgp.M_F, 0.0);
  for (int y = 0; y < dgp.M; ++y) {
    for (int f = 0; f < dgp.M_F; ++f) {
      double cell = p[y] * channel(y, f);
      alpha(f, y) = cell * dgp.pi[y];
      beta[f] += cell * (1.0 - dgp.pi[y]);
    }
  }
  return model::table_from_probabilities(alpha, beta, std::max(dgp.n, 1L), false);
}

double true_mean(const DgpConfig& dgp) {
  Vector p = dgp.resolved_p_y();
  double mean = 0.0;
  for (int y = 0; y < dgp.M; ++y) mean += (y + 1) * p[y];
  return mean;
}

namespace {

std::vector<model::UnitRecord> generate_impl(const DgpConfig& dgp, bool keep_all) {
  dgp.validate();
  require(dgp.n >= 1, Errc::contract, "generate: n must be positive");
  Vector p = dgp.resolved_p_y();
  Matrix channel = dgp.resolved_channel();
  std::vector<Vector> channel_rows(dgp.M);
  for (int y = 0; y < dgp.M; ++y) {
    channel_rows[y].resize(dgp.M_F);
    for (int f = 0; f < dgp.M_F; ++f) channel_rows[y][f] = channel(y, f);
  }
  std::vector<model::UnitRecord> records(dgp.n);
  for (long i = 0; i < dgp.n; ++i) {
    Rng rng(dgp.seed, static_cast<std::uint64_t>(i));
    int y = rng.categorical(p) + 1;
    int f = rng.categorical(channel_rows[y - 1]) + 1;
    bool observed = rng.bernoulli(dgp.pi[y - 1]);
    auto& rec = records[i];
    rec.f = f;
    if (keep_all || observed) {
      rec.r = 1;
      rec.y = y;
    } else {
      rec.r = 0;
      rec.y = 0;
    }
  }
  return records;
}

}  // namespace

std::vector<model::UnitRecord> generate(const DgpConfig& dgp) {
  return generate_impl(dgp, false);
}

std::vector<model::UnitRecord> generate_labeled(const DgpConfig& dgp) {
  return generate_impl(dgp, true);
}

MaskedData mask(const std::vector<model::UnitRecord>& labeled, const Vector& pi,
                std::uint64_t seed) {
  require(!labeled.empty(), Errc::contract, "mask: no records");
  int M = static_cast<int>(pi.size());
  require(M >= 1, Errc::contract, "mask: empty mechanism");
  for (double v : pi)
    require(v > 0.0 && v <= 1.0, Errc::contract, "mask: pi entries must be in (0,1]");

  MaskedData out;
  out.records = labeled;
  out.truth.resize(labeled.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto& rec = labeled[i];
    require(rec.y >= 1 && rec.y <= M, Errc::contract,
            "mask: record " + std::to_string(i) + " lacks a labeled outcome");
    out.truth[i] = rec.y;
    total += rec.y;
    Rng rng(seed, static_cast<std::uint64_t>(i));
    if (rng.bernoulli(pi[rec.y - 1])) {
      out.records[i].r = 1;
    } else {
      out.records[i].r = 0;
      out.records[i].y = 0;
    }
  }
  out.true_mean = total / static_cast<double>(labeled.size());
  return out;
}

const char* estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::aggregated_lp: return "aggregated_lp";
    case EstimatorKind::set_expansion: return "set_expansion";
    case EstimatorKind::cca: return "cca";
    case EstimatorKind::naive_impute: return "naive_impute";
    case EstimatorKind::ppi: return "ppi";
    case EstimatorKind::heckman: return "heckman";
    case EstimatorKind::pattern_mixture: return "pattern_mixture";
    case EstimatorKind::llm_raw: return "llm_raw";
  }
  return "?";
}

EstimatorKind estimator_from_name(const std::string& name) {
  for (EstimatorKind kind :
       {EstimatorKind::aggregated_lp, EstimatorKind::set_expansion, EstimatorKind::cca,
        EstimatorKind::naive_impute, EstimatorKind::ppi, EstimatorKind::heckman,
        EstimatorKind::pattern_mixture, EstimatorKind::llm_raw})
    if (name == estimator_name(kind)) return kind;
  fail(Errc::config, "unknown estimator: " + name);
}

void ScenarioConfig::validate() const {
  require(!dataset.empty(), Errc::contract, "scenario: empty dataset");
  require(reps >= 1, Errc::contract, "scenario: reps must be positive");
  require(!estimators.empty(), Errc::contract, "scenario: no estimators requested");
  require(M >= 2 && M_F >= 1, Errc::contract, "scenario: invalid supports");
  if (!pi.empty())
    require(pi.size() == static_cast<std::size_t>(M), Errc::contract,
            "scenario: pi length mismatch");
  else
    require(0.0 < pi_lo && pi_lo <= pi_hi && pi_hi <= 1.0, Errc::contract,
            "scenario: invalid mechanism bounds");
  expansion.validate();
}

MetricsReport run_benchmark(const ScenarioConfig& scenario) {
  scenario.validate();
  std::size_t n_est = scenario.estimators.size();
  std::vector<RepRow> rows(static_cast<std::size_t>(scenario.reps) * n_est);

  parallel_for(scenario.reps, scenario.threads, [&](long rep) {
    Vector pi = scenario.pi;
    if (pi.empty()) {
      Rng mech_rng(scenario.seed, 2 * static_cast<std::uint64_t>(rep));
      pi.resize(scenario.M);
      for (int y = 0; y < scenario.M; ++y) pi[y] = mech_rng.unif(scenario.pi_lo, scenario.pi_hi);
    }
    std::uint64_t mask_seed =
        mix64(scenario.seed + 0x9e3779b97f4a7c15ULL * (2 * static_cast<std::uint64_t>(rep) + 1));
    MaskedData masked = mask(scenario.dataset, pi, mask_seed);

    model::PopulationTables pop;
    bool pop_ready = false;
    auto tables = [&]() -> const model::PopulationTables& {
      if (!pop_ready) {
        pop = model::estimate_tables(masked.records, scenario.M, scenario.M_F);
        pop_ready = true;
      }
      return pop;
    };

    for (std::size_t e = 0; e < n_est; ++e) {
      RepRow& row = rows[static_cast<std::size_t>(rep) * n_est + e];
      row.rep = static_cast<int>(rep);
      row.estimator = scenario.estimators[e];
      try {
        switch (row.estimator) {
          case EstimatorKind::aggregated_lp: {
            Interval iv = bounds::base_bounds(tables().pooled(), scenario.expansion.g);
            row.interval = true;
            row.lo = iv.lo;
            row.hi = iv.hi;
            row.value = iv.midpoint();
            row.covered = iv.contains(masked.true_mean);
            break;
          }
          case EstimatorKind::set_expansion: {
            expansion::ExpansionReport rep_out =
                expansion::estimate(tables(), scenario.expansion);
            row.interval = true;
            row.lo = rep_out.aggregate.lo;
            row.hi = rep_out.aggregate.hi;
            row.value = rep_out.aggregate.midpoint();
            row.covered = rep_out.aggregate.contains(masked.true_mean);
            break;
          }
          default: {
            baselines::PointEstimate est;
            switch (row.estimator) {
              case EstimatorKind::cca: est = baselines::cca(masked.records); break;
              case EstimatorKind::naive_impute:
                est = baselines::naive_impute(masked.records);
                break;
              case EstimatorKind::ppi: est = baselines::ppi(masked.records); break;
              case EstimatorKind::heckman: est = baselines::heckman(masked.records); break;
              case EstimatorKind::pattern_mixture:
                est = baselines::pattern_mixture(masked.records);
                break;
              default: est = baselines::llm_raw(masked.records); break;
            }
            row.lo = est.ci_lo;
            row.hi = est.ci_hi;
            row.value = est.value;
            row.covered = masked.true_mean >= est.ci_lo && masked.true_mean <= est.ci_hi;
            break;
          }
        }
      } catch (const Error& err) {
        if (err.code() != Errc::estimator_failed && err.code() != Errc::degenerate_estimator)
          throw;
        row.failed = true;
        row.failure = err.what();
      }
    }
  });

  MetricsReport report;
  report.reps = scenario.reps;
  {
    double total = 0.0;
    for (const auto& rec : scenario.dataset) {
      require(rec.y >= 1, Errc::contract, "scenario: dataset must be fully labeled");
      total += rec.y;
    }
    report.true_mean = total / static_cast<double>(scenario.dataset.size());
  }

  report.per_estimator.resize(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorMetrics& m = report.per_estimator[e];
    m.kind = scenario.estimators[e];
    m.interval = m.kind == EstimatorKind::aggregated_lp || m.kind == EstimatorKind::set_expansion;
    long covered = 0;
    for (int rep = 0; rep < scenario.reps; ++rep) {
      const RepRow& row = rows[static_cast<std::size_t>(rep) * n_est + e];
      if (row.failed) {
        ++m.failures;
        continue;
      }
      ++m.evaluated;
      m.mae += std::fabs(row.value - report.true_mean);
      m.bias += row.value - report.true_mean;
      if (row.interval) m.mean_width += row.hi - row.lo;
      if (row.covered) ++covered;
    }
    if (m.evaluated > 0) {
      m.mae /= m.evaluated;
      m.bias /= m.evaluated;
      m.coverage = static_cast<double>(covered) / static_cast<double>(m.evaluated);
      if (m.interval) m.mean_width /= m.evaluated;
    }
    if (m.failures > 0)
      report.flags.push_back(std::string(estimator_name(m.kind)) + ": " +
                             std::to_string(m.failures) + " replication(s) failed");
  }
  report.rows = std::move(rows);
  return report;
}

}  // namespace mnar::sim
