#include "mnar/bounds.hpp"

#include <algorithm>

#include "mnar/error.hpp"
#include "mnar/lp.hpp"

namespace mnar {

const char* method_name(Method m) {
  switch (m) {
    case Method::base: return "base";
    case Method::stratified: return "stratified";
    case Method::shadow: return "shadow";
    case Method::set_expansion: return "set_expansion";
    case Method::ate: return "ate";
    case Method::ate_shadow: return "ate_shadow";
  }
  return "?";
}

}  // namespace mnar

namespace mnar::bounds {

Vector default_weights(int M) {
  Vector g(M);
  for (int y = 0; y < M; ++y) g[y] = y + 1;
  return g;
}

namespace {

Vector resolve_weights(const Vector& g, int M) {
  if (g.empty()) return default_weights(M);
  require(g.size() == static_cast<std::size_t>(M), Errc::contract,
          "bounds: weight vector length mismatch");
  return g;
}

}  // namespace

Interval base_bounds(const model::StratumTable& table, const Vector& g) {
  Vector w = resolve_weights(g, table.M);
  double observed = 0.0;
  for (int y = 0; y < table.M; ++y) observed += w[y] * table.alpha_marginal[y];
  double g_lo = *std::min_element(w.begin(), w.end());
  double g_hi = *std::max_element(w.begin(), w.end());
  Interval out;
  out.method = Method::base;
  out.lo = observed + g_lo * table.p_r0;
  out.hi = observed + g_hi * table.p_r0;
  out.meta["p_r0"] = table.p_r0;
  return out;
}

Interval base_bounds_lp(const model::StratumTable& table, const Vector& g) {
  Vector w = resolve_weights(g, table.M);
  int M = table.M;
  // Variables are total outcome probabilities p(y); the observed mass
  // alpha(y) is a floor and the missing mass is free to land anywhere.
  lp::Problem prob;
  prob.c = w;
  prob.A = Matrix(1, M);
  for (int y = 0; y < M; ++y) prob.A(0, y) = 1.0;
  prob.band_lo = {1.0};
  prob.band_hi = {1.0};
  prob.box_lo = table.alpha_marginal;
  prob.box_hi.assign(M, 1.0);

  Interval out;
  out.method = Method::base;
  prob.maximize = false;
  lp::Solution lo = lp::solve(prob);
  require(lo.status != lp::Status::infeasible, Errc::data_inconsistency,
          "base bounds: observed mass exceeds 1, table inconsistent");
  require(lo.status == lp::Status::optimal, Errc::solver_stalled, "base bounds: lower LP failed");
  prob.maximize = true;
  lp::Solution hi = lp::solve(prob);
  require(hi.status == lp::Status::optimal, Errc::solver_stalled, "base bounds: upper LP failed");
  out.lo = lo.value;
  out.hi = hi.value;
  out.meta["p_r0"] = table.p_r0;
  return out;
}

Interval stratified_bounds(const model::PopulationTables& pop, const Vector& g) {
  pop.validate();
  Interval out;
  out.method = Method::stratified;
  for (const auto& s : pop.strata) {
    Interval b = base_bounds(s.table, g);
    out.lo += s.weight * b.lo;
    out.hi += s.weight * b.hi;
    out.meta[s.id + ".lo"] = b.lo;
    out.meta[s.id + ".hi"] = b.hi;
  }
  out.meta["strata"] = static_cast<double>(pop.strata.size());
  return out;
}

}  // namespace mnar::bounds
