#include "mnar/causal.hpp"

#include <cmath>
#include <limits>

#include "mnar/bounds.hpp"
#include "mnar/error.hpp"
#include "mnar/lp.hpp"

namespace mnar::causal {

namespace {

Vector resolve_weights(const Vector& g, int M) {
  if (g.empty()) return bounds::default_weights(M);
  require(g.size() == static_cast<std::size_t>(M), Errc::contract,
          "causal: weight vector length mismatch");
  return g;
}

// Appends one arm's margin equations and weight variables to a joint LP.
// Returns the objective constant contributed by the +1 term.
double append_arm(lp::Problem& prob, const model::StratumTable& t, const Vector& g,
                  double sign, double band_slack, double box_cap) {
  int M = t.M, MF = t.M_F;
  std::size_t col0 = prob.c.size();
  std::size_t row0 = prob.band_lo.size();
  double constant = 0.0;

  Matrix joint(row0 + MF, col0 + M);
  for (std::size_t r = 0; r < row0; ++r)
    for (std::size_t c = 0; c < col0; ++c) joint(r, c) = prob.A(r, c);
  for (int f = 0; f < MF; ++f)
    for (int y = 0; y < M; ++y) joint(row0 + f, col0 + y) = t.alpha(f, y);
  prob.A = std::move(joint);
  for (int f = 0; f < MF; ++f) {
    prob.band_lo.push_back(t.beta[f] - band_slack);
    prob.band_hi.push_back(t.beta[f] + band_slack);
  }

  for (int y = 0; y < M; ++y) {
    double colsum = t.alpha_marginal[y];
    prob.c.push_back(sign * g[y] * colsum);
    constant += sign * g[y] * colsum;
    double cap;
    if (box_cap > 0.0) {
      cap = box_cap;
    } else {
      cap = std::numeric_limits<double>::infinity();
      for (int f = 0; f < MF; ++f)
        if (t.alpha(f, y) > lp::kPivotTol) cap = std::min(cap, t.beta[f] / t.alpha(f, y));
      if (!std::isfinite(cap)) cap = 0.0;  // never-observed level, inert variable
    }
    prob.box_lo.push_back(0.0);
    prob.box_hi.push_back(cap);
  }
  return constant;
}

Interval solve_joint(lp::Problem& prob, double constant, Method method) {
  prob.maximize = false;
  lp::Solution lo = lp::solve(prob);
  require(lo.status != lp::Status::infeasible, Errc::data_inconsistency,
          "effect bounds: margin equations infeasible");
  require(lo.status == lp::Status::optimal, Errc::solver_stalled,
          "effect bounds: lower LP " + std::string(lp::status_name(lo.status)));
  prob.maximize = true;
  lp::Solution hi = lp::solve(prob);
  require(hi.status == lp::Status::optimal, Errc::solver_stalled,
          "effect bounds: upper LP " + std::string(lp::status_name(hi.status)));
  Interval out;
  out.method = method;
  out.lo = lo.value + constant;
  out.hi = hi.value + constant;
  return out;
}

}  // namespace

void ArmTables::validate() const {
  arm0.validate();
  arm1.validate();
  require(arm0.M == arm1.M && arm0.M_F == arm1.M_F, Errc::contract,
          "arms: mismatched supports");
  require(n0 >= 1 && n1 >= 1, Errc::contract, "arms: empty arm");
}

ArmTables arm_tables_from_records(const std::vector<model::UnitRecord>& records, int M,
                                  int M_F) {
  std::vector<model::UnitRecord> arm0, arm1;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    require(rec.d == 0 || rec.d == 1, Errc::rejected_record,
            "record " + std::to_string(i) + ": treatment flag missing or not 0/1");
    (rec.d == 1 ? arm1 : arm0).push_back(rec);
  }
  require(!arm0.empty() && !arm1.empty(), Errc::contract, "arms: both arms need records");
  ArmTables arms;
  arms.arm0 = model::estimate_tables(arm0, M, M_F).pooled();
  arms.arm1 = model::estimate_tables(arm1, M, M_F).pooled();
  arms.n0 = static_cast<long>(arm0.size());
  arms.n1 = static_cast<long>(arm1.size());
  return arms;
}

Interval ate_bounds(const ArmTables& arms, const Vector& g) {
  arms.validate();
  resolve_weights(g, arms.arm0.M);
  Interval b1 = bounds::base_bounds(arms.arm1, g);
  Interval b0 = bounds::base_bounds(arms.arm0, g);
  Interval out;
  out.method = Method::ate;
  out.lo = b1.lo - b0.hi;
  out.hi = b1.hi - b0.lo;
  return out;
}

Interval ate_bounds_lp(const ArmTables& arms, const Vector& g) {
  arms.validate();
  int M = arms.arm0.M;
  Vector weights = resolve_weights(g, M);
  // Joint LP over total outcome probabilities of both arms: each arm's
  // observed mass floors its probabilities, each arm sums to one.
  lp::Problem prob;
  prob.A = Matrix(2, 2 * M);
  for (int y = 0; y < M; ++y) {
    prob.A(0, y) = 1.0;
    prob.A(1, M + y) = 1.0;
  }
  prob.band_lo = {1.0, 1.0};
  prob.band_hi = {1.0, 1.0};
  for (int y = 0; y < M; ++y) prob.c.push_back(weights[y]);
  for (int y = 0; y < M; ++y) prob.c.push_back(-weights[y]);
  for (int y = 0; y < M; ++y) prob.box_lo.push_back(arms.arm1.alpha_marginal[y]);
  for (int y = 0; y < M; ++y) prob.box_lo.push_back(arms.arm0.alpha_marginal[y]);
  prob.box_hi.assign(2 * M, 1.0);
  return solve_joint(prob, 0.0, Method::ate);
}

Interval ate_shadow_bounds(const ArmTables& arms, const Vector& g, bool force) {
  arms.validate();
  require((!arms.arm0.empirical && !arms.arm1.empirical) || force, Errc::contract,
          "effect shadow bounds: empirical tables are refused (use set expansion or force)");
  Vector weights = resolve_weights(g, arms.arm0.M);
  lp::Problem prob;
  double constant = 0.0;
  constant += append_arm(prob, arms.arm1, weights, +1.0, 0.0, 0.0);
  constant += append_arm(prob, arms.arm0, weights, -1.0, 0.0, 0.0);
  Interval out = solve_joint(prob, constant, Method::ate_shadow);
  return out;
}

Interval ate_set_expansion(const ArmTables& arms, const expansion::ExpansionConfig& cfg) {
  arms.validate();
  cfg.validate();
  Vector weights = cfg.g.empty() ? bounds::default_weights(arms.arm0.M) : cfg.g;
  require(weights.size() == static_cast<std::size_t>(arms.arm0.M), Errc::contract,
          "effect set expansion: weight vector length mismatch");

  auto arm_margin = [&](const model::StratumTable& t, long n) {
    double m_hat = lp::min_inf_norm_residual(t.alpha, t.beta, cfg.C).first;
    return std::make_pair(m_hat, m_hat + cfg.kappa(n) / std::sqrt(static_cast<double>(n)));
  };
  auto [slack1, margin1] = arm_margin(arms.arm1, arms.n1);
  auto [slack0, margin0] = arm_margin(arms.arm0, arms.n0);

  lp::Problem prob;
  double constant = 0.0;
  constant += append_arm(prob, arms.arm1, weights, +1.0, margin1, cfg.C);
  constant += append_arm(prob, arms.arm0, weights, -1.0, margin0, cfg.C);
  Interval out = solve_joint(prob, constant, Method::ate);
  out.meta["slack_arm1"] = slack1;
  out.meta["slack_arm0"] = slack0;
  out.meta["margin_arm1"] = margin1;
  out.meta["margin_arm0"] = margin0;
  return out;
}

SignTestResult sign_test_worst_case(const ArmTables& arms) {
  arms.validate();
  int M = arms.arm0.M;
  double shift = 0.0;
  for (int y = 0; y < M; ++y)
    shift += (y + 1) * (arms.arm1.alpha_marginal[y] - arms.arm0.alpha_marginal[y]);
  SignTestResult res;
  res.applicable = true;
  res.margin = shift - M * arms.arm0.p_r0;
  res.holds = res.margin >= -1e-12;
  return res;
}

SignTestResult sign_test_single_crossing(const ArmTables& arms,
                                         bool equal_response_asserted) {
  arms.validate();
  require(equal_response_asserted, Errc::contract,
          "single-crossing test: caller must assert equal response mechanisms "
          "across arms (untestable from data)");
  int M = arms.arm0.M;
  Vector diff(M);
  for (int y = 0; y < M; ++y)
    diff[y] = arms.arm1.alpha_marginal[y] - arms.arm0.alpha_marginal[y];

  SignTestResult res;
  constexpr double tol = 1e-12;
  for (int y0 = 1; y0 <= M && !res.applicable; ++y0) {
    double slack = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int y = 1; y <= M; ++y) {
      double s = y < y0 ? -diff[y - 1] : diff[y - 1];
      if (s < -tol) {
        ok = false;
        break;
      }
      slack = std::min(slack, s);
    }
    if (ok) {
      res.applicable = true;
      res.crossing_point = y0;
      res.margin = slack;
    }
  }
  res.holds = res.applicable;

  double mass1 = 1.0 - arms.arm1.p_r0, mass0 = 1.0 - arms.arm0.p_r0;
  if (mass1 > 0 && mass0 > 0) {
    double l1 = 0.0;
    for (int y = 0; y < M; ++y)
      l1 += std::fabs(arms.arm1.alpha_marginal[y] / mass1 -
                      arms.arm0.alpha_marginal[y] / mass0);
    res.notes.push_back(
        "normalized observed-margin shift l1 = " + std::to_string(l1) +
        "; this describes the outcome shift and is not evidence that the "
        "response mechanisms match");
  }
  return res;
}

}  // namespace mnar::causal
