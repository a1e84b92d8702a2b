#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mnar/bounds.hpp"
#include "mnar/error.hpp"
#include "mnar/set_expansion.hpp"
#include "mnar/shadow.hpp"
#include "mnar/svd.hpp"
#include "mnar/tables.hpp"

namespace py = pybind11;

namespace {

using Rows = std::vector<std::vector<double>>;

mnar::Matrix to_matrix(const Rows& rows) {
  mnar::require(!rows.empty() && !rows[0].empty(), mnar::Errc::contract,
                "matrix rows must be nonempty");
  mnar::Matrix out(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    mnar::require(rows[i].size() == rows[0].size(), mnar::Errc::contract,
                  "ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

mnar::model::StratumTable make_table(const Rows& alpha, const mnar::Vector& beta, long n,
                                     bool empirical) {
  return mnar::model::table_from_probabilities(to_matrix(alpha), beta, n, empirical);
}

py::dict interval_dict(const mnar::Interval& iv) {
  py::dict out;
  out["lo"] = iv.lo;
  out["hi"] = iv.hi;
  out["method"] = mnar::method_name(iv.method);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Partial-identification bounds for means under outcome-dependent missingness";

  m.def(
      "base_bounds",
      [](const Rows& alpha, const mnar::Vector& beta) {
        return interval_dict(mnar::bounds::base_bounds(make_table(alpha, beta, 1, false)));
      },
      py::arg("alpha"), py::arg("beta"),
      "Sharp bounds on E[Y] from the observed-cell probabilities alpha (rows "
      "indexed by the prediction, columns by the outcome) and the missing-mass "
      "margin beta.");

  m.def(
      "shadow_bounds",
      [](const Rows& alpha, const mnar::Vector& beta) {
        return interval_dict(
            mnar::shadow::shadow_bounds_stratum(make_table(alpha, beta, 1, false)));
      },
      py::arg("alpha"), py::arg("beta"),
      "Bounds tightened by the prediction margin equations (exact tables).");

  m.def(
      "set_expansion",
      [](const Rows& alpha, const mnar::Vector& beta, long n, double C,
         const std::string& kappa_rule, double kappa_value) {
        mnar::expansion::ExpansionConfig cfg;
        cfg.C = C;
        cfg.kappa_rule = mnar::expansion::kappa_rule_from_name(kappa_rule);
        cfg.kappa_value = kappa_value;
        mnar::model::PopulationTables pop;
        pop.M = static_cast<int>(alpha[0].size());
        pop.M_F = static_cast<int>(alpha.size());
        mnar::model::StratumEntry entry;
        entry.id = "";
        entry.table = make_table(alpha, beta, n, true);
        entry.weight = 1.0;
        pop.strata.push_back(std::move(entry));
        auto rep = mnar::expansion::estimate(pop, cfg);
        py::dict out = interval_dict(rep.aggregate);
        out["slack"] = rep.per_stratum[0].slack;
        out["margin"] = rep.per_stratum[0].margin;
        return out;
      },
      py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("C") = 50.0,
      py::arg("kappa_rule") = "constant", py::arg("kappa_value") = 0.5,
      "Finite-sample bounds from empirical cell frequencies with n samples.");

  m.def(
      "svd_values",
      [](const Rows& a) { return mnar::linalg::singular_values(to_matrix(a)); },
      py::arg("a"), "Singular values of a small dense matrix, descending.");

  py::register_exception<mnar::Error>(m, "BoundsError");
}
