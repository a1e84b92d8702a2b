#include "mnar/tables.hpp"

#include <cmath>
#include <map>

#include "mnar/error.hpp"

namespace mnar::model {

void StratumTable::validate() const {
  require(M >= 1 && M_F >= 1, Errc::contract, "table: M and M_F must be positive");
  require(alpha.rows() == static_cast<std::size_t>(M_F) &&
              alpha.cols() == static_cast<std::size_t>(M),
          Errc::contract, "table: alpha shape mismatch");
  require(beta.size() == static_cast<std::size_t>(M_F), Errc::contract,
          "table: beta length mismatch");
  require(alpha_marginal.size() == static_cast<std::size_t>(M), Errc::contract,
          "table: alpha_marginal length mismatch");
  double total = 0.0, beta_sum = 0.0;
  for (int f = 0; f < M_F; ++f) {
    require(beta[f] >= -1e-12 && beta[f] <= 1 + 1e-12, Errc::contract,
            "table: beta entry outside [0,1]");
    beta_sum += beta[f];
    for (int y = 0; y < M; ++y) {
      double a = alpha(f, y);
      require(a >= -1e-12 && a <= 1 + 1e-12, Errc::contract,
              "table: alpha entry outside [0,1]");
      total += a;
    }
  }
  for (int y = 0; y < M; ++y) {
    double col = 0.0;
    for (int f = 0; f < M_F; ++f) col += alpha(f, y);
    require(std::fabs(col - alpha_marginal[y]) <= 1e-12, Errc::contract,
            "table: alpha_marginal inconsistent with alpha");
  }
  require(std::fabs(total + beta_sum - 1.0) <= 1e-12, Errc::contract,
          "table: probabilities do not sum to 1");
  require(std::fabs(beta_sum - p_r0) <= 1e-12, Errc::contract,
          "table: p_r0 inconsistent with beta");
}

void PopulationTables::validate() const {
  require(!strata.empty(), Errc::contract, "population: no strata");
  double wsum = 0.0;
  for (const auto& s : strata) {
    require(s.weight >= 0, Errc::contract, "population: negative weight");
    require(s.table.M == M && s.table.M_F == M_F, Errc::contract,
            "population: mixed table dimensions");
    s.table.validate();
    wsum += s.weight;
  }
  require(std::fabs(wsum - 1.0) <= 1e-12, Errc::contract,
          "population: weights do not sum to 1");
}

StratumTable PopulationTables::pooled() const {
  StratumTable out;
  out.M = M;
  out.M_F = M_F;
  out.alpha = Matrix(M_F, M);
  out.beta.assign(M_F, 0.0);
  out.alpha_marginal.assign(M, 0.0);
  out.empirical = false;
  for (const auto& s : strata) {
    out.n += s.table.n;
    out.empirical = out.empirical || s.table.empirical;
    for (int f = 0; f < M_F; ++f) {
      out.beta[f] += s.weight * s.table.beta[f];
      for (int y = 0; y < M; ++y) out.alpha(f, y) += s.weight * s.table.alpha(f, y);
    }
  }
  for (int y = 0; y < M; ++y) {
    double col = 0.0;
    for (int f = 0; f < M_F; ++f) col += out.alpha(f, y);
    out.alpha_marginal[y] = col;
  }
  for (int f = 0; f < M_F; ++f) out.p_r0 += out.beta[f];
  return out;
}

StratumTable table_from_probabilities(const Matrix& alpha, const Vector& beta, long n,
                                      bool empirical) {
  StratumTable t;
  t.M_F = static_cast<int>(alpha.rows());
  t.M = static_cast<int>(alpha.cols());
  t.alpha = alpha;
  t.beta = beta;
  t.n = n;
  t.empirical = empirical;
  t.alpha_marginal.assign(t.M, 0.0);
  for (int y = 0; y < t.M; ++y)
    for (int f = 0; f < t.M_F; ++f) t.alpha_marginal[y] += alpha(f, y);
  t.p_r0 = 0.0;
  for (double b : beta) t.p_r0 += b;
  t.validate();
  return t;
}

PopulationTables estimate_tables(const std::vector<UnitRecord>& records, int M, int M_F,
                                 double smoothing) {
  require(!records.empty(), Errc::contract, "estimate_tables: no records");
  require(M >= 1 && M_F >= 1, Errc::contract, "estimate_tables: invalid supports");
  require(smoothing >= 0.0, Errc::contract, "estimate_tables: negative smoothing");

  struct Cells {
    Matrix obs;
    Vector miss;
    long n = 0;
  };
  std::map<std::string, Cells> by_stratum;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    require(rec.f >= 1 && rec.f <= M_F, Errc::rejected_record,
            "record " + std::to_string(i) + ": f outside 1.." + std::to_string(M_F));
    require(rec.r == 0 || rec.r == 1, Errc::rejected_record,
            "record " + std::to_string(i) + ": r must be 0 or 1");
    if (rec.r == 1)
      require(rec.y >= 1 && rec.y <= M, Errc::rejected_record,
              "record " + std::to_string(i) + ": y outside 1.." + std::to_string(M));
    auto& c = by_stratum[rec.stratum.empty() ? std::string("pooled") : rec.stratum];
    if (c.n == 0) {
      c.obs = Matrix(M_F, M);
      c.miss.assign(M_F, 0.0);
    }
    ++c.n;
    if (rec.r == 1) c.obs(rec.f - 1, rec.y - 1) += 1.0;
    else c.miss[rec.f - 1] += 1.0;
  }

  PopulationTables pop;
  pop.M = M;
  pop.M_F = M_F;
  long total = static_cast<long>(records.size());
  for (auto& [id, c] : by_stratum) {
    if (c.n == 0) {
      pop.warnings.push_back("stratum " + id + " has no records, dropped");
      continue;
    }
    // Add-lambda smoothing spreads mass over the M_F*(M+1) cells.
    double denom = static_cast<double>(c.n) + smoothing * M_F * (M + 1);
    Matrix alpha(M_F, M);
    Vector beta(M_F, 0.0);
    for (int f = 0; f < M_F; ++f) {
      beta[f] = (c.miss[f] + smoothing) / denom;
      for (int y = 0; y < M; ++y) alpha(f, y) = (c.obs(f, y) + smoothing) / denom;
    }
    StratumEntry e;
    e.id = id;
    e.table = table_from_probabilities(alpha, beta, c.n, true);
    e.weight = static_cast<double>(c.n) / static_cast<double>(total);
    pop.strata.push_back(std::move(e));
  }
  pop.validate();
  return pop;
}

}  // namespace mnar::model
