#include "mnar/report.hpp"

#include <cmath>
#include <cstdio>

#include "mnar/lp.hpp"

namespace mnar::report {

json interval_json(const Interval& iv) {
  json out;
  out["lo"] = iv.lo;
  out["hi"] = iv.hi;
  out["width"] = iv.width();
  out["method"] = method_name(iv.method);
  if (!iv.meta.empty()) out["meta"] = iv.meta;
  return out;
}

json point_json(const baselines::PointEstimate& est) {
  json out;
  out["value"] = est.value;
  out["se"] = est.se;
  out["ci_lo"] = est.ci_lo;
  out["ci_hi"] = est.ci_hi;
  out["method"] = est.method;
  if (!est.flags.empty()) out["flags"] = est.flags;
  return out;
}

json shadow_json(const shadow::ShadowBoundsReport& rep) {
  json out;
  out["aggregate"] = interval_json(rep.aggregate);
  out["gap_lb_upper"] = rep.gap_lb_upper;
  out["gap_lb_lower"] = rep.gap_lb_lower;
  out["point_identified"] = rep.point_identified;
  json strata = json::array();
  for (const auto& s : rep.per_stratum) {
    json row;
    row["id"] = s.id;
    row["interval"] = interval_json(s.interval);
    row["lo_status"] = lp::status_name(s.lo_status);
    row["hi_status"] = lp::status_name(s.hi_status);
    if (!s.zero_columns.empty()) row["zero_columns"] = s.zero_columns;
    strata.push_back(row);
  }
  out["per_stratum"] = strata;
  if (!rep.flags.empty()) out["flags"] = rep.flags;
  return out;
}

json expansion_json(const expansion::ExpansionReport& rep) {
  json out;
  out["aggregate"] = interval_json(rep.aggregate);
  json strata = json::array();
  for (const auto& s : rep.per_stratum) {
    json row;
    row["id"] = s.id;
    row["slack"] = s.slack;
    row["margin"] = s.margin;
    row["interval"] = interval_json(s.interval);
    row["box_binding"] = s.box_binding;
    strata.push_back(row);
  }
  out["per_stratum"] = strata;
  if (!rep.flags.empty()) out["flags"] = rep.flags;
  return out;
}

json rate_json(const expansion::RateTable& rep) {
  json out;
  out["oracle"] = interval_json(rep.oracle);
  json points = json::array();
  for (const auto& p : rep.points) {
    json row;
    row["n"] = p.n;
    row["err_lo"] = p.err_lo;
    row["err_hi"] = p.err_hi;
    row["hausdorff"] = p.hausdorff;
    points.push_back(row);
  }
  out["points"] = points;
  out["slope_lo"] = rep.slope_lo;
  out["slope_hi"] = rep.slope_hi;
  out["slope"] = rep.slope;
  return out;
}

json completeness_json(const diag::CompletenessReport& rep) {
  json out;
  out["sigma_min_B"] = rep.sigma_min_B;
  out["kappa_B"] = std::isfinite(rep.kappa_B) ? json(rep.kappa_B) : json("inf");
  out["rank_B"] = rep.rank_B;
  out["complete"] = rep.complete;
  out["singular_values_B"] = rep.singular_values_B;
  if (!rep.dropped_rows.empty()) out["dropped_rows"] = rep.dropped_rows;
  if (rep.has_H) {
    out["sigma_min_H"] = rep.sigma_min_H;
    out["kappa_H"] = std::isfinite(rep.kappa_H) ? json(rep.kappa_H) : json("inf");
    out["rank_H"] = rep.rank_H;
    out["singular_values_H"] = rep.singular_values_H;
    if (rep.bound_checked) out["bound_holds"] = rep.bound_holds;
  }
  if (!rep.flags.empty()) out["flags"] = rep.flags;
  return out;
}

json sign_test_json(const causal::SignTestResult& res) {
  json out;
  out["applicable"] = res.applicable;
  out["holds"] = res.holds;
  out["margin"] = res.margin;
  if (res.crossing_point > 0) out["crossing_point"] = res.crossing_point;
  if (!res.notes.empty()) out["notes"] = res.notes;
  return out;
}

json metrics_json(const sim::MetricsReport& rep, bool include_rows) {
  json out;
  out["true_mean"] = rep.true_mean;
  out["reps"] = rep.reps;
  json estimators = json::object();
  for (const auto& m : rep.per_estimator) {
    json row;
    row["interval"] = m.interval;
    row["evaluated"] = m.evaluated;
    row["failures"] = m.failures;
    row["mae"] = m.mae;
    row["bias"] = m.bias;
    row["coverage"] = m.coverage;
    if (m.interval) row["mean_width"] = m.mean_width;
    estimators[sim::estimator_name(m.kind)] = row;
  }
  out["estimators"] = estimators;
  if (!rep.flags.empty()) out["flags"] = rep.flags;
  if (include_rows) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
      json row;
      row["rep"] = r.rep;
      row["estimator"] = sim::estimator_name(r.estimator);
      if (r.failed) {
        row["failed"] = true;
        row["failure"] = r.failure;
      } else {
        row["value"] = r.value;
        if (r.interval) {
          row["lo"] = r.lo;
          row["hi"] = r.hi;
        }
        row["covered"] = r.covered;
      }
      rows.push_back(row);
    }
    out["rows"] = rows;
  }
  return out;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::string render(const std::string& command, const json& inputs, const json& results,
                   const json& warnings, double seconds) {
  json out;
  out["schema_version"] = "1";
  out["command"] = command;
  out["inputs"] = inputs;
  out["results"] = results;
  out["warnings"] = warnings.is_null() ? json::array() : warnings;
  out["timing"] = seconds < 0 ? json() : json{{"seconds", seconds}};
  return out.dump(2) + "\n";
}

}  // namespace mnar::report
