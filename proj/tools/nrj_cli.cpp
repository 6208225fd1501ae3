// Command-line front end: experiment runner, trace diagnostics, and the
// compute-budget calculator.
//
//   nrj run <spec.cfg>                 run a configured experiment
//   nrj limits <spec.cfg>              run the scaling-limit harness
//   nrj ess <trace.csv>                ESS/IAT report for a trace
//   nrj tv <trace.csv> <ref.csv>       TV of the empirical model PMF
//   nrj budget --I <n> --tau <t> --T <T>
//
// Trace CSV schema: iter,k,move,accepted,nu (row 0 is the initial state).
// Reports print as metric,value CSV rows, or as a JSON document with --json.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "nrj/budget.hpp"
#include "nrj/diagnostics.hpp"
#include "nrj/io/csv.hpp"
#include "nrj/runner.hpp"

using namespace nrj;

namespace {

int cmd_run(const std::string& spec_path) {
  const Config cfg = Config::load(spec_path);
  const std::string name = cfg.get("experiment", "name", "custom");
  if (name == "limits") {
    LimitsSpec spec = parse_limits_spec(cfg);
    const std::string out = cfg.get("experiment", "output", "out/limits");
    run_limits_experiment(spec, out);
    std::cout << "wrote " << out << "/{marginals,ks}.csv\n";
    return 0;
  }
  const ExperimentSpec spec = parse_experiment_spec(cfg);
  const auto res = run_experiment(spec);
  std::cout << "wrote " << spec.output_dir
            << "/{results,summary,timings}.csv (" << res.cells.size()
            << " cells x " << spec.replicates << " replicates)\n";
  for (const auto& cell : res.cells)
    std::cout << "  " << cell.sampler << " sigma=" << cell.sigma
              << " phi=" << cell.phi << " kmax=" << cell.k_max
              << " T=" << cell.T << " N=" << cell.N
              << ": ESS " << cell.mean_ess() << " +- " << cell.se_ess()
              << "\n";
  return 0;
}

int cmd_limits(const std::string& spec_path) {
  const Config cfg = Config::load(spec_path);
  LimitsSpec spec = parse_limits_spec(cfg);
  const std::string out = cfg.get("experiment", "output", "out/limits");
  run_limits_experiment(spec, out);
  std::cout << "wrote " << out << "/{marginals,ks,zigzag_path,langevin_path}.csv\n";
  return 0;
}

nlohmann::json report_json(const DiagnosticsReport& rep) {
  nlohmann::json j;
  j["ess_per_switch_iteration"] = rep.ess.ess;
  j["iat"] = rep.ess.iat.iat;
  j["iat_truncation_lag"] = rep.ess.iat.truncation_lag;
  j["switch_proposals"] = rep.ess.n;
  j["series_flag"] = series_flag_name(rep.ess.iat.flag);
  j["switch_acceptance_rate"] = rep.switch_acceptance;
  j["roundtrip_count"] = rep.roundtrips.count;
  j["roundtrip_mean_length"] = rep.roundtrips.mean_length;
  if (!std::isnan(rep.tv_to_reference)) j["tv_to_reference"] = rep.tv_to_reference;
  if (!std::isnan(rep.relative_tv)) j["relative_tv_difference"] = rep.relative_tv;
  nlohmann::json pmf = nlohmann::json::array();
  for (int k = rep.empirical.k_min(); k <= rep.empirical.k_max(); ++k)
    pmf.push_back({{"k", k}, {"probability", rep.empirical.prob(k)}});
  j["empirical_pmf"] = pmf;
  return j;
}

int cmd_ess(const std::string& trace_path, long burn_in, bool as_json) {
  const ChainTrace trace = read_trace_csv(trace_path);
  int k_lo = trace.initial.k, k_hi = trace.initial.k;
  for (const auto& r : trace.records) {
    k_lo = std::min(k_lo, r.k);
    k_hi = std::max(k_hi, r.k);
  }
  const auto rep = diagnostics_report(trace, burn_in, k_lo, k_hi);
  if (as_json) {
    std::cout << report_json(rep).dump(2) << "\n";
  } else {
    std::cout << "metric,value\n";
    for (const auto& [name, value] : report_metric_rows(rep))
      std::cout << name << "," << format_double(value) << "\n";
  }
  return 0;
}

int cmd_tv(const std::string& trace_path, const std::string& ref_path,
           long burn_in, bool as_json) {
  const ChainTrace trace = read_trace_csv(trace_path);
  const Pmf reference = Pmf::load_csv(ref_path);
  std::vector<int> ks;
  for (const auto& r : trace.records)
    if (r.iter > burn_in) ks.push_back(r.k);
  const Pmf emp = empirical_pmf(ks, reference.k_min(), reference.k_max());
  const double tv = tv_distance(emp, reference);
  if (as_json) {
    nlohmann::json j;
    j["tv"] = tv;
    j["samples"] = ks.size();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "metric,value\ntv," << format_double(tv) << "\nsamples,"
              << ks.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trans-dimensional MCMC experiments"};
  app.require_subcommand(1);

  std::string spec_path, trace_path, ref_path;
  long burn_in = 0;
  bool as_json = false;
  double budget_iters = 0.0, budget_tau = 0.0;
  int budget_T = 1;

  auto* run = app.add_subcommand("run", "run an experiment from a spec file");
  run->add_option("spec", spec_path, "experiment spec file")->required();

  auto* limits = app.add_subcommand("limits", "run the scaling-limit harness");
  limits->add_option("spec", spec_path, "limits spec file")->required();

  auto* ess = app.add_subcommand("ess", "ESS/IAT report for a trace CSV");
  ess->add_option("trace", trace_path, "trace CSV")->required();
  ess->add_option("--burn-in", burn_in, "iterations to discard");
  ess->add_flag("--json", as_json, "emit a JSON document");

  auto* tv = app.add_subcommand("tv", "TV between a trace and a reference PMF");
  tv->add_option("trace", trace_path, "trace CSV")->required();
  tv->add_option("reference", ref_path, "reference PMF CSV (k,probability)")
      ->required();
  tv->add_option("--burn-in", burn_in, "iterations to discard");
  tv->add_flag("--json", as_json, "emit a JSON document");

  auto* budget = app.add_subcommand(
      "budget", "budget-matched vanilla run length for a bridge sampler");
  budget->add_option("--I", budget_iters, "bridge-sampler iterations")
      ->required();
  budget->add_option("--tau", budget_tau, "parameter-update probability")
      ->required();
  budget->add_option("--T", budget_T, "bridge length")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(spec_path);
    if (limits->parsed()) return cmd_limits(spec_path);
    if (ess->parsed()) return cmd_ess(trace_path, burn_in, as_json);
    if (tv->parsed()) return cmd_tv(trace_path, ref_path, burn_in, as_json);
    if (budget->parsed()) {
      const auto b = match_budget(budget_iters, budget_tau, budget_T);
      std::cout << "vanilla_iterations," << format_double(b.iterations)
                << "\nvanilla_tau," << format_double(b.tau) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
