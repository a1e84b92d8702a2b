#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mnar/bounds.hpp"
#include "mnar/causal.hpp"
#include "mnar/csv.hpp"
#include "mnar/diagnostics.hpp"
#include "mnar/error.hpp"
#include "mnar/report.hpp"
#include "mnar/set_expansion.hpp"
#include "mnar/shadow.hpp"
#include "mnar/simlab.hpp"

namespace {

using mnar::Errc;
using mnar::fail;
using mnar::require;
using mnar::Matrix;
using mnar::Vector;
using json = mnar::report::json;

struct CommonFlags {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool to_stdout = false;
  int threads = 1;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& common, const std::string& default_out) {
  common.out = default_out;
  cmd->add_option("--seed", common.seed, "Random seed")->each([&](const std::string&) {
    common.seed_set = true;
  });
  cmd->add_option("--out", common.out, "Output path");
  cmd->add_flag("--stdout", common.to_stdout, "Print the output body instead of its path");
  cmd->add_option("--threads", common.threads, "Worker threads (0 = auto)");
  cmd->add_flag("--no-timing", common.no_timing, "Omit timing from the report");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void emit(const CommonFlags& common, const std::string& body) {
  if (common.to_stdout) {
    std::cout << body;
    return;
  }
  mnar::io::write_text_file(common.out, body);
  std::cout << common.out << "\n";
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require(obj.is_object(), Errc::config, where + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) ok = true;
    require(ok, Errc::config, where + ": unknown key '" + it.key() + "'");
  }
}

Vector parse_pi_spec(const json& spec, const std::string& where) {
  if (spec.is_string()) {
    std::string name = spec.get<std::string>();
    if (name == "asymmetric_u") return mnar::sim::pi_asymmetric_u_preset();
    if (name == "higher_score_missing") return mnar::sim::mask_higher_score_missing();
    if (name == "u_shaped") return mnar::sim::mask_u_shaped();
    if (name == "lower_score_missing") return mnar::sim::mask_lower_score_missing();
    fail(Errc::config, where + ": unknown mechanism preset '" + name + "'");
  }
  require(spec.is_array(), Errc::config, where + ": expected a preset name or an array");
  return spec.get<Vector>();
}

Matrix parse_channel_spec(const json& spec, int M, int M_F, const std::string& where) {
  if (spec.is_string()) {
    std::string name = spec.get<std::string>();
    if (name == "point_id") return mnar::sim::point_id_channel();
    if (name == "partial_id") return mnar::sim::partial_id_channel();
    if (name == "identity") return Matrix::identity(M);
    fail(Errc::config, where + ": unknown channel preset '" + name + "'");
  }
  require(spec.is_array(), Errc::config, where + ": expected a preset name or a matrix");
  Matrix out(M, M_F);
  require(spec.size() == static_cast<std::size_t>(M), Errc::config,
          where + ": channel needs one row per outcome level");
  for (int y = 0; y < M; ++y) {
    auto row = spec[y].get<Vector>();
    require(row.size() == static_cast<std::size_t>(M_F), Errc::config,
            where + ": channel row length mismatch");
    for (int f = 0; f < M_F; ++f) out(y, f) = row[f];
  }
  return out;
}

mnar::sim::DgpConfig parse_dgp(const json& cfg, const std::string& where) {
  check_keys(cfg, {"M", "M_F", "p_y", "mu", "sigma", "f_given_y", "pi", "n", "seed"}, where);
  mnar::sim::DgpConfig dgp;
  if (cfg.contains("M")) dgp.M = cfg.at("M").get<int>();
  if (cfg.contains("M_F")) dgp.M_F = cfg.at("M_F").get<int>();
  if (cfg.contains("p_y")) dgp.p_y = cfg.at("p_y").get<Vector>();
  if (cfg.contains("mu")) dgp.mu = cfg.at("mu").get<double>();
  if (cfg.contains("sigma")) dgp.sigma = cfg.at("sigma").get<double>();
  if (cfg.contains("f_given_y"))
    dgp.f_given_y = parse_channel_spec(cfg.at("f_given_y"), dgp.M, dgp.M_F, where);
  require(cfg.contains("pi"), Errc::config, where + ": missing key 'pi'");
  dgp.pi = parse_pi_spec(cfg.at("pi"), where);
  if (cfg.contains("n")) dgp.n = cfg.at("n").get<long>();
  if (cfg.contains("seed")) dgp.seed = cfg.at("seed").get<std::uint64_t>();
  return dgp;
}

mnar::expansion::ExpansionConfig parse_expansion(const json& cfg, const std::string& where) {
  check_keys(cfg, {"C", "kappa_rule", "kappa_value", "g"}, where);
  mnar::expansion::ExpansionConfig out;
  if (cfg.contains("C")) out.C = cfg.at("C").get<double>();
  if (cfg.contains("kappa_rule"))
    out.kappa_rule = mnar::expansion::kappa_rule_from_name(cfg.at("kappa_rule").get<std::string>());
  if (cfg.contains("kappa_value")) out.kappa_value = cfg.at("kappa_value").get<double>();
  if (cfg.contains("g")) out.g = cfg.at("g").get<Vector>();
  out.validate();
  return out;
}

json dataset_echo(const std::string& path, const std::string& bytes) {
  json echo;
  echo["path"] = path;
  echo["digest_fnv1a64"] = mnar::report::fnv1a64_hex(bytes);
  return echo;
}

// Normalizes a dataset without a prediction column to the single-level
// channel so the margin machinery still applies.
void normalize_f(mnar::io::Dataset& data, int& M_F) {
  if (data.has_f) return;
  for (auto& rec : data.records) rec.f = 1;
  M_F = 1;
}

int cmd_bounds(const std::string& data_path, int M, int M_F, bool force_shadow,
               const CommonFlags& common) {
  Timer timer;
  std::string bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(bytes, data_path);
  normalize_f(data, M_F);
  auto pop = mnar::model::estimate_tables(data.records, M, M_F);
  auto pooled = pop.pooled();

  json results;
  results["base"] = mnar::report::interval_json(mnar::bounds::base_bounds(pooled));
  results["stratified"] = mnar::report::interval_json(mnar::bounds::stratified_bounds(pop));
  json warnings = json::array();
  for (const auto& w : pop.warnings) warnings.push_back(w);

  if (data.has_f) {
    auto gaps = mnar::shadow::aggregation_gap_lower_bounds(pop);
    results["gap_lb_upper"] = gaps.first;
    results["gap_lb_lower"] = gaps.second;
    if (force_shadow) {
      auto rep = mnar::shadow::aggregate_shadow_bounds(pop, {}, true);
      results["shadow"] = mnar::report::shadow_json(rep);
    } else {
      results["shadow"] = {{"refused",
                            "empirical tables: margin equations are generically "
                            "infeasible under sampling noise; run the estimate "
                            "command, or pass --force-shadow"}};
    }
    results["completeness"] = mnar::report::completeness_json(
        mnar::diag::completeness_report(pooled));
  }

  json inputs = dataset_echo(data_path, bytes);
  inputs["M"] = M;
  inputs["M_F"] = M_F;
  emit(common, mnar::report::render("bounds", inputs, results, warnings,
                                    common.no_timing ? -1.0 : timer.seconds()));
  return 0;
}

int cmd_estimate(const std::string& data_path, int M, int M_F,
                 const mnar::expansion::ExpansionConfig& cfg, const CommonFlags& common) {
  Timer timer;
  std::string bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(bytes, data_path);
  normalize_f(data, M_F);
  auto pop = mnar::model::estimate_tables(data.records, M, M_F);

  json results;
  results["base"] = mnar::report::interval_json(mnar::bounds::base_bounds(pop.pooled()));
  results["set_expansion"] = mnar::report::expansion_json(mnar::expansion::estimate(pop, cfg));
  json warnings = json::array();
  for (const auto& w : pop.warnings) warnings.push_back(w);

  json inputs = dataset_echo(data_path, bytes);
  inputs["M"] = M;
  inputs["M_F"] = M_F;
  inputs["C"] = cfg.C;
  inputs["kappa_rule"] = mnar::expansion::kappa_rule_name(cfg.kappa_rule);
  inputs["kappa_value"] = cfg.kappa_value;
  emit(common, mnar::report::render("estimate", inputs, results, warnings,
                                    common.no_timing ? -1.0 : timer.seconds()));
  return 0;
}

int cmd_simulate(const std::string& config_path, bool with_truth, const CommonFlags& common) {
  std::string cfg_bytes = mnar::io::read_text_file(config_path);
  json cfg = json::parse(cfg_bytes);
  mnar::sim::DgpConfig dgp = parse_dgp(cfg, config_path);
  if (common.seed_set) dgp.seed = common.seed;
  dgp.validate();
  require(dgp.n >= 1, Errc::config, config_path + ": missing or nonpositive 'n'");

  auto records = mnar::sim::generate(dgp);
  mnar::io::WriteOptions opt;
  opt.f = true;
  opt.y_true = with_truth;
  std::vector<int> truth;
  if (with_truth) {
    auto labeled = mnar::sim::generate_labeled(dgp);
    truth.reserve(labeled.size());
    for (const auto& rec : labeled) truth.push_back(rec.y);
  }
  emit(common, mnar::io::format_csv(records, truth, opt));
  return 0;
}

int cmd_mask(const std::string& data_path, const std::string& mechanism,
             const CommonFlags& common) {
  std::string bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(bytes, data_path);
  require(data.has_f, Errc::config, data_path + ": mask needs the prediction column f");
  for (std::size_t i = 0; i < data.records.size(); ++i)
    require(data.records[i].r == 1, Errc::contract,
            "record " + std::to_string(i) + ": mask needs fully-labeled input");
  json mech = json::parse(mechanism, nullptr, false);
  if (mech.is_discarded()) mech = json(mechanism);
  Vector pi = parse_pi_spec(mech, "--mechanism");
  auto masked = mnar::sim::mask(data.records, pi, common.seed);
  mnar::io::WriteOptions opt;
  opt.stratum = data.has_stratum;
  opt.f = true;
  opt.y_true = true;
  emit(common, mnar::io::format_csv(masked.records, masked.truth, opt));
  return 0;
}

int cmd_benchmark(const std::string& config_path, const std::string& plot_out,
                  const CommonFlags& common) {
  Timer timer;
  std::string cfg_bytes = mnar::io::read_text_file(config_path);
  json cfg = json::parse(cfg_bytes);
  check_keys(cfg,
             {"dataset", "M", "M_F", "pi", "pi_lo", "pi_hi", "estimators", "reps", "seed",
              "metrics", "expansion"},
             config_path);

  mnar::sim::ScenarioConfig scenario;
  require(cfg.contains("dataset"), Errc::config, config_path + ": missing key 'dataset'");
  std::string data_path = cfg.at("dataset").get<std::string>();
  std::string data_bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(data_bytes, data_path, true);
  require(data.has_f, Errc::config, data_path + ": benchmark needs the prediction column f");
  scenario.dataset = data.records;
  if (data.has_y_true) {
    for (std::size_t i = 0; i < scenario.dataset.size(); ++i) {
      scenario.dataset[i].r = 1;
      scenario.dataset[i].y = data.y_true[i];
    }
  } else {
    for (std::size_t i = 0; i < scenario.dataset.size(); ++i)
      require(scenario.dataset[i].r == 1, Errc::contract,
              "record " + std::to_string(i) +
                  ": benchmark needs labels (y_true column or fully observed y)");
  }

  if (cfg.contains("M")) scenario.M = cfg.at("M").get<int>();
  if (cfg.contains("M_F")) scenario.M_F = cfg.at("M_F").get<int>();
  json mechanism_echo;
  if (cfg.contains("pi")) {
    scenario.pi = parse_pi_spec(cfg.at("pi"), config_path);
    mechanism_echo["pi"] = scenario.pi;
    if (cfg.at("pi").is_string()) mechanism_echo["preset"] = cfg.at("pi").get<std::string>();
  } else {
    if (cfg.contains("pi_lo")) scenario.pi_lo = cfg.at("pi_lo").get<double>();
    if (cfg.contains("pi_hi")) scenario.pi_hi = cfg.at("pi_hi").get<double>();
    mechanism_echo["uniform_random"] = {{"lo", scenario.pi_lo}, {"hi", scenario.pi_hi}};
  }
  require(cfg.contains("estimators"), Errc::config, config_path + ": missing key 'estimators'");
  for (const auto& name : cfg.at("estimators"))
    scenario.estimators.push_back(mnar::sim::estimator_from_name(name.get<std::string>()));
  if (cfg.contains("reps")) scenario.reps = cfg.at("reps").get<int>();
  if (cfg.contains("seed")) scenario.seed = cfg.at("seed").get<std::uint64_t>();
  if (common.seed_set) scenario.seed = common.seed;
  if (cfg.contains("expansion"))
    scenario.expansion = parse_expansion(cfg.at("expansion"), config_path);
  scenario.threads = resolve_threads(common.threads);

  std::vector<std::string> metrics;
  if (cfg.contains("metrics")) {
    for (const auto& m : cfg.at("metrics")) {
      std::string name = m.get<std::string>();
      require(name == "mae" || name == "coverage" || name == "width" || name == "bias",
              Errc::config, config_path + ": unknown metric '" + name + "'");
      metrics.push_back(name);
    }
  }

  auto rep = mnar::sim::run_benchmark(scenario);

  json results = mnar::report::metrics_json(rep);
  if (!metrics.empty()) {
    for (auto& [name, row] : results.at("estimators").items()) {
      json filtered;
      filtered["interval"] = row["interval"];
      filtered["evaluated"] = row["evaluated"];
      filtered["failures"] = row["failures"];
      for (const auto& m : metrics) {
        if (m == "mae") filtered["mae"] = row["mae"];
        if (m == "bias") filtered["bias"] = row["bias"];
        if (m == "coverage") filtered["coverage"] = row["coverage"];
        if (m == "width" && row.contains("mean_width")) filtered["mean_width"] = row["mean_width"];
      }
      row = filtered;
    }
  }

  // Plot data: one row per replication per estimator.
  std::string plot = "rep,estimator,failed,lo,hi,value,covered\n";
  char buf[160];
  for (const auto& row : rep.rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%.17g,%.17g,%.17g,%d\n", row.rep,
                  mnar::sim::estimator_name(row.estimator), row.failed ? 1 : 0, row.lo,
                  row.hi, row.value, row.covered ? 1 : 0);
    plot += buf;
  }
  mnar::io::write_text_file(plot_out, plot);

  json inputs;
  inputs["config_path"] = config_path;
  inputs["config_digest_fnv1a64"] = mnar::report::fnv1a64_hex(cfg_bytes);
  inputs["dataset"] = dataset_echo(data_path, data_bytes);
  inputs["mechanism"] = mechanism_echo;
  inputs["plot_data"] = plot_out;
  json warnings = json::array();
  for (const auto& w : rep.flags) warnings.push_back(w);
  emit(common, mnar::report::render("benchmark", inputs, results, warnings,
                                    common.no_timing ? -1.0 : timer.seconds()));
  return 0;
}

int cmd_diagnose(const std::string& data_path, int M, int M_F, const CommonFlags& common) {
  Timer timer;
  std::string bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(bytes, data_path);
  require(data.has_f, Errc::config, data_path + ": diagnostics need the prediction column f");
  auto pooled = mnar::model::estimate_tables(data.records, M, M_F).pooled();

  json results;
  results["completeness"] = mnar::report::completeness_json(
      mnar::diag::completeness_report(pooled));
  json inputs = dataset_echo(data_path, bytes);
  inputs["M"] = M;
  inputs["M_F"] = M_F;
  emit(common, mnar::report::render("diagnose", inputs, results, json::array(),
                                    common.no_timing ? -1.0 : timer.seconds()));
  return 0;
}

int cmd_ate(const std::string& data_path, int M, int M_F, bool force_shadow,
            bool assert_equal_response, const mnar::expansion::ExpansionConfig& cfg,
            const CommonFlags& common) {
  Timer timer;
  std::string bytes = mnar::io::read_text_file(data_path);
  mnar::io::Dataset data = mnar::io::parse_csv(bytes, data_path);
  require(data.has_d, Errc::config, data_path + ": effect bounds need the treatment column d");
  normalize_f(data, M_F);
  auto arms = mnar::causal::arm_tables_from_records(data.records, M, M_F);

  json results;
  results["ate"] = mnar::report::interval_json(mnar::causal::ate_bounds(arms));
  results["worst_case_sign_test"] =
      mnar::report::sign_test_json(mnar::causal::sign_test_worst_case(arms));
  if (assert_equal_response)
    results["single_crossing_sign_test"] = mnar::report::sign_test_json(
        mnar::causal::sign_test_single_crossing(arms, true));
  else
    results["single_crossing_sign_test"] = {
        {"skipped", "pass --assert-equal-response to run this conditional test"}};

  if (data.has_f) {
    if (force_shadow) {
      results["ate_shadow"] =
          mnar::report::interval_json(mnar::causal::ate_shadow_bounds(arms, {}, true));
    } else {
      results["ate_shadow"] = {{"refused",
                                "empirical tables: margin equations are generically "
                                "infeasible under sampling noise; the set-expansion "
                                "interval below is the sanctioned estimate, or pass "
                                "--force-shadow"}};
    }
    results["ate_set_expansion"] =
        mnar::report::interval_json(mnar::causal::ate_set_expansion(arms, cfg));
  }

  json inputs = dataset_echo(data_path, bytes);
  inputs["M"] = M;
  inputs["M_F"] = M_F;
  emit(common, mnar::report::render("ate", inputs, results, json::array(),
                                    common.no_timing ? -1.0 : timer.seconds()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp partial-identification bounds for means under nonignorable missingness"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string data_path, config_path, mechanism, plot_out;
  int M = 5, M_F = 5;
  bool force_shadow = false, with_truth = false, assert_equal_response = false;
  double C = 50.0, kappa_value = 0.5;
  std::string kappa_rule = "constant";

  auto add_support_flags = [&](CLI::App* cmd) {
    cmd->add_option("--M", M, "Outcome support size")->check(CLI::PositiveNumber);
    cmd->add_option("--M-F", M_F, "Prediction support size")->check(CLI::PositiveNumber);
  };
  auto add_expansion_flags = [&](CLI::App* cmd) {
    cmd->add_option("--C", C, "Weight cap")->check(CLI::PositiveNumber);
    cmd->add_option("--kappa-rule", kappa_rule, "constant | log | loglog");
    cmd->add_option("--kappa", kappa_value, "Constant-rule kappa value");
  };
  auto expansion_config = [&]() {
    mnar::expansion::ExpansionConfig cfg;
    cfg.C = C;
    cfg.kappa_rule = mnar::expansion::kappa_rule_from_name(kappa_rule);
    cfg.kappa_value = kappa_value;
    cfg.validate();
    return cfg;
  };

  auto* bounds_cmd = app.add_subcommand("bounds", "Identification bounds from a dataset");
  bounds_cmd->add_option("data", data_path, "Input CSV")->required();
  add_support_flags(bounds_cmd);
  bounds_cmd->add_flag("--force-shadow", force_shadow,
                       "Solve the exact margin equations even on empirical tables");
  add_common(bounds_cmd, common, "report.json");

  auto* estimate_cmd = app.add_subcommand("estimate", "Finite-sample set-expansion bounds");
  estimate_cmd->add_option("data", data_path, "Input CSV")->required();
  add_support_flags(estimate_cmd);
  add_expansion_flags(estimate_cmd);
  add_common(estimate_cmd, common, "report.json");

  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a dataset from a configured DGP");
  simulate_cmd->add_option("config", config_path, "DGP config JSON")->required();
  simulate_cmd->add_flag("--with-truth", with_truth, "Emit the pre-mask outcome column");
  add_common(simulate_cmd, common, "simulated.csv");

  auto* mask_cmd = app.add_subcommand("mask", "Apply an outcome-dependent mask to labeled data");
  mask_cmd->add_option("data", data_path, "Fully-labeled CSV")->required();
  mask_cmd->add_option("--mechanism", mechanism, "Preset name or JSON array of pi(y)")
      ->required();
  add_common(mask_cmd, common, "masked.csv");

  auto* benchmark_cmd = app.add_subcommand("benchmark", "Replicated estimator comparison");
  benchmark_cmd->add_option("config", config_path, "Scenario config JSON")->required();
  benchmark_cmd->add_option("--plot-out", plot_out, "Per-replication plot CSV path");
  add_common(benchmark_cmd, common, "report.json");

  auto* diagnose_cmd = app.add_subcommand("diagnose", "Completeness and conditioning report");
  diagnose_cmd->add_option("data", data_path, "Input CSV")->required();
  add_support_flags(diagnose_cmd);
  add_common(diagnose_cmd, common, "report.json");

  auto* ate_cmd = app.add_subcommand("ate", "Treatment effect bounds from a two-arm dataset");
  ate_cmd->add_option("data", data_path, "Input CSV with treatment column d")->required();
  add_support_flags(ate_cmd);
  add_expansion_flags(ate_cmd);
  ate_cmd->add_flag("--force-shadow", force_shadow,
                    "Solve the exact margin equations even on empirical tables");
  ate_cmd->add_flag("--assert-equal-response", assert_equal_response,
                    "Assert equal response mechanisms across arms (enables the "
                    "single-crossing test)");
  add_common(ate_cmd, common, "report.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds_cmd->parsed()) return cmd_bounds(data_path, M, M_F, force_shadow, common);
    if (estimate_cmd->parsed())
      return cmd_estimate(data_path, M, M_F, expansion_config(), common);
    if (simulate_cmd->parsed()) return cmd_simulate(config_path, with_truth, common);
    if (mask_cmd->parsed()) return cmd_mask(data_path, mechanism, common);
    if (benchmark_cmd->parsed()) {
      if (plot_out.empty()) {
        std::string base = common.out;
        if (base.size() > 5 && base.substr(base.size() - 5) == ".json")
          base = base.substr(0, base.size() - 5);
        plot_out = base + "_plot.csv";
      }
      return cmd_benchmark(config_path, plot_out, common);
    }
    if (diagnose_cmd->parsed()) return cmd_diagnose(data_path, M, M_F, common);
    if (ate_cmd->parsed())
      return cmd_ate(data_path, M, M_F, force_shadow, assert_equal_response,
                     expansion_config(), common);
  } catch (const mnar::Error& err) {
    std::string what = err.what();
    std::string prefix = std::string(mnar::errc_name(err.code())) + ": ";
    if (what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
    std::cerr << "error (" << mnar::errc_name(err.code()) << "): " << what << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
