#pragma once

// Named experiments over the two reference targets, plus the scaling-limit
// harness. Each experiment expands to a grid of cells, runs `replicates`
// chains per cell on the worker pool, and writes results.csv / summary.csv
// (deterministic) and timings.csv (wall clock, not covered by the
// determinism contract).

#include <filesystem>
#include <map>
#include <optional>

#include "nrj/experiment.hpp"

namespace nrj {

inline SamplerKind sampler_kind_from_name(const std::string& name) {
  static const std::map<std::string, SamplerKind> table{
      {"vanilla_nrj", SamplerKind::VanillaNrj},
      {"vanilla_rj", SamplerKind::VanillaRj},
      {"vanilla_rj_informed", SamplerKind::VanillaRjInformed},
      {"annealed_nrj", SamplerKind::AnnealedNrj},
      {"annealed_rj", SamplerKind::AnnealedRj},
      {"multipath_nrj", SamplerKind::MultiPathNrj},
      {"multipath_rj", SamplerKind::MultiPathRj},
      {"ideal_nrj", SamplerKind::IdealNrj},
      {"ideal_rj_unif", SamplerKind::IdealRjUniform},
      {"ideal_rj_informed", SamplerKind::IdealRjInformed},
  };
  const auto it = table.find(name);
  if (it == table.end())
    throw std::invalid_argument("unknown sampler kind: " + name);
  return it->second;
}

struct ExperimentSpec {
  std::string name = "custom";  // table1 | fig3 | fig4a | fig4b | custom
  std::uint64_t seed = 1;
  int replicates = 20;
  std::int64_t iterations = 100000;
  std::int64_t burn_in = 1000;
  std::string output_dir = "out";

  // toy grids
  std::vector<double> sigma_grid{1.0};
  std::vector<double> phi_grid{2.0};
  std::vector<int> kmax_grid{11};
  std::vector<int> T_grid{1};
  std::vector<int> N_grid{1};
  double tau = 0.0;
  std::vector<SamplerKind> samplers{SamplerKind::VanillaNrj,
                                    SamplerKind::VanillaRj};

  // change-point configuration (table1)
  std::string events_path = "data/coal_disasters.txt";
  double L = 40907.0;
  std::string reference_pmf_path = "data/coal_reference_pmf.csv";
  double lambda = 3.0;
  int cp_kmax = 30;
  double alpha = 1.0;
  double beta = 200.0;
  int T = 100;
  int N = 10;
  double cp_tau = 0.4;
  double vanilla_scale = 1.0;  // fraction of the budget-matched length
};

inline ExperimentSpec experiment_defaults(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  if (name == "fig3") {
    s.samplers = {SamplerKind::IdealNrj, SamplerKind::IdealRjInformed,
                  SamplerKind::IdealRjUniform};
    s.phi_grid = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0};
    s.sigma_grid = {1.0};
  } else if (name == "fig4a") {
    s.samplers = {SamplerKind::VanillaNrj, SamplerKind::VanillaRj,
                  SamplerKind::VanillaRjInformed, SamplerKind::AnnealedNrj,
                  SamplerKind::MultiPathNrj};
    s.sigma_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
    s.T_grid = {15};
    s.N_grid = {15};
  } else if (name == "fig4b") {
    s.samplers = {SamplerKind::VanillaNrj, SamplerKind::VanillaRj,
                  SamplerKind::VanillaRjInformed};
    s.kmax_grid = {5, 11, 15, 21, 31, 41};
    s.sigma_grid = {1.0};
  } else if (name == "table1") {
    s.iterations = 60000;
    s.burn_in = 10000;
  }
  return s;
}

inline ExperimentSpec parse_experiment_spec(const Config& cfg) {
  ExperimentSpec s = experiment_defaults(cfg.get("experiment", "name", "custom"));
  s.seed = static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 1));
  s.replicates =
      static_cast<int>(cfg.get_int("experiment", "replicates", s.replicates));
  s.iterations = cfg.get_int("experiment", "iterations", s.iterations);
  s.burn_in = cfg.get_int("experiment", "burn_in", s.burn_in);
  s.output_dir = cfg.get("experiment", "output", "out/" + s.name);

  s.sigma_grid = cfg.get_list("grid", "sigma", s.sigma_grid);
  s.phi_grid = cfg.get_list("grid", "phi", s.phi_grid);
  auto ints = [&](const char* key, const std::vector<int>& fallback) {
    std::vector<double> dflt(fallback.begin(), fallback.end());
    const auto vs = cfg.get_list("grid", key, dflt);
    std::vector<int> out;
    for (double v : vs) out.push_back(static_cast<int>(v));
    return out;
  };
  s.kmax_grid = ints("kmax", s.kmax_grid);
  s.T_grid = ints("T", s.T_grid);
  s.N_grid = ints("N", s.N_grid);
  s.tau = cfg.get_double("grid", "tau", s.tau);
  std::vector<std::string> names;
  for (auto kind : s.samplers) names.push_back(sampler_kind_name(kind));
  names = cfg.get_words("grid", "samplers", names);
  s.samplers.clear();
  for (const auto& n : names) s.samplers.push_back(sampler_kind_from_name(n));

  s.events_path = cfg.get("data", "events", s.events_path);
  s.L = cfg.get_double("data", "L", s.L);
  s.reference_pmf_path = cfg.get("data", "reference_pmf", s.reference_pmf_path);
  s.lambda = cfg.get_double("data", "lambda", s.lambda);
  s.cp_kmax = static_cast<int>(cfg.get_int("data", "kmax", s.cp_kmax));
  s.alpha = cfg.get_double("data", "alpha", s.alpha);
  s.beta = cfg.get_double("data", "beta", s.beta);
  s.T = static_cast<int>(cfg.get_int("table1", "T", s.T));
  s.N = static_cast<int>(cfg.get_int("table1", "N", s.N));
  s.cp_tau = cfg.get_double("table1", "tau", s.cp_tau);
  s.vanilla_scale = cfg.get_double("table1", "vanilla_scale", s.vanilla_scale);
  return s;
}

struct CellResult {
  std::string sampler;
  double sigma = 0.0, phi = 0.0;
  int k_max = 0, T = 1, N = 1;
  double tau = 0.0;
  std::int64_t iterations = 0, burn_in = 0;
  std::vector<ReplicateResult> replicates;

  double mean_ess() const {
    double s = 0.0;
    for (const auto& r : replicates) s += r.ess;
    return s / static_cast<double>(replicates.size());
  }
  double se_ess() const {
    std::vector<double> v;
    for (const auto& r : replicates) v.push_back(r.ess);
    const auto mv = mean_var(v);
    return std::sqrt(mv.var / static_cast<double>(mv.n));
  }
  double mean_tv() const {
    double s = 0.0;
    for (const auto& r : replicates) s += r.tv;
    return s / static_cast<double>(replicates.size());
  }
  std::vector<double> ess_values() const {
    std::vector<double> v;
    for (const auto& r : replicates) v.push_back(r.ess);
    return v;
  }
};

struct ExperimentResults {
  ExperimentSpec spec;
  std::vector<CellResult> cells;

  const CellResult* find(SamplerKind kind) const {
    for (const auto& c : cells)
      if (c.sampler == sampler_kind_name(kind)) return &c;
    return nullptr;
  }
};

namespace detail_exp {

inline void write_results(const ExperimentResults& res) {
  namespace fs = std::filesystem;
  fs::create_directories(res.spec.output_dir);
  const std::vector<std::string> keys{
      "experiment", "sampler", "sigma",      "phi",  "kmax",
      "T",          "N",       "tau",        "iterations", "burn_in"};
  std::vector<std::string> res_header = keys;
  for (const char* c : {"replicate", "ess", "iat", "switch_proposals",
                        "accept_rate", "tv"})
    res_header.push_back(c);
  CsvWriter results(res.spec.output_dir + "/results.csv", res_header);
  std::vector<std::string> sum_header = keys;
  for (const char* c : {"replicates", "mean_ess", "se_ess", "mean_tv", "se_tv",
                        "mean_accept", "rel_tv_vs_ideal_nrj"})
    sum_header.push_back(c);
  CsvWriter summary(res.spec.output_dir + "/summary.csv", sum_header);
  std::vector<std::string> tim_header = keys;
  tim_header.push_back("replicate");
  tim_header.push_back("wall_ms");
  CsvWriter timings(res.spec.output_dir + "/timings.csv", tim_header);

  double tv_ideal = std::numeric_limits<double>::quiet_NaN();
  if (const auto* ideal = res.find(SamplerKind::IdealNrj))
    tv_ideal = ideal->mean_tv();

  for (const auto& cell : res.cells) {
    std::vector<std::string> key_cells{
        res.spec.name,
        cell.sampler,
        format_double(cell.sigma),
        format_double(cell.phi),
        std::to_string(cell.k_max),
        std::to_string(cell.T),
        std::to_string(cell.N),
        format_double(cell.tau),
        std::to_string(cell.iterations),
        std::to_string(cell.burn_in)};
    for (std::size_t r = 0; r < cell.replicates.size(); ++r) {
      const auto& rep = cell.replicates[r];
      auto row = key_cells;
      row.push_back(std::to_string(r));
      row.push_back(format_double(rep.ess));
      row.push_back(format_double(rep.iat));
      row.push_back(std::to_string(rep.switch_proposals));
      row.push_back(format_double(rep.accept_rate));
      row.push_back(format_double(rep.tv));
      results.row(row);

      auto trow = key_cells;
      trow.push_back(std::to_string(r));
      trow.push_back(format_double(rep.wall_ms));
      timings.row(trow);
    }
    std::vector<double> tvs, accs;
    for (const auto& rep : cell.replicates) {
      tvs.push_back(rep.tv);
      accs.push_back(rep.accept_rate);
    }
    const auto tv_mv = mean_var(tvs);
    auto srow = key_cells;
    srow.push_back(std::to_string(cell.replicates.size()));
    srow.push_back(format_double(cell.mean_ess()));
    srow.push_back(format_double(cell.se_ess()));
    srow.push_back(format_double(tv_mv.mean));
    srow.push_back(format_double(std::sqrt(tv_mv.var / static_cast<double>(
                                               std::max<std::size_t>(1, tv_mv.n)))));
    srow.push_back(format_double(mean_var(accs).mean));
    srow.push_back(format_double(
        relative_tv_difference(tv_mv.mean, tv_ideal)));
    summary.row(srow);
  }
}

}  // namespace detail_exp

// Toy-family experiments (fig3 / fig4a / fig4b / custom): the grid is the
// cross product of sigma, phi, k_max, T, N and the sampler list.
inline ExperimentResults run_toy_experiment(const ExperimentSpec& spec,
                                            bool write_files = true) {
  ExperimentResults res;
  res.spec = spec;
  for (double sigma : spec.sigma_grid)
    for (double phi : spec.phi_grid)
      for (int kmax : spec.kmax_grid)
        for (int T : spec.T_grid)
          for (int N : spec.N_grid)
            for (SamplerKind kind : spec.samplers) {
              CellResult cell;
              cell.sampler = sampler_kind_name(kind);
              cell.sigma = sigma;
              cell.phi = phi;
              cell.k_max = kmax;
              cell.T = T;
              cell.N = N;
              cell.tau = spec.tau;
              cell.iterations = spec.iterations;
              cell.burn_in = spec.burn_in;
              cell.replicates.resize(static_cast<std::size_t>(spec.replicates));
              res.cells.push_back(std::move(cell));
            }

  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t c = 0; c < res.cells.size(); ++c)
    for (int r = 0; r < spec.replicates; ++r) jobs.emplace_back(c, r);

  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [c, r] = jobs[j];
    auto& cell = res.cells[c];
    ToyCell tc;
    tc.sampler = sampler_kind_from_name(cell.sampler);
    tc.sigma = cell.sigma;
    tc.phi = cell.phi;
    tc.k_max = cell.k_max;
    tc.T = cell.T;
    tc.N = cell.N;
    tc.tau = cell.tau;
    cell.replicates[static_cast<std::size_t>(r)] = run_toy_replicate(
        tc, cell.iterations, cell.burn_in,
        derive_seed(spec.seed, c, static_cast<std::uint64_t>(r)));
  });

  if (write_files) detail_exp::write_results(res);
  return res;
}

// Table-1 experiment on a change-point problem: ideal rows on the reference
// PMF, the multi-path samplers, and budget-matched vanilla runs.
inline ExperimentResults run_table1_experiment(const ExperimentSpec& spec,
                                               bool write_files = true) {
  ExperimentResults res;
  res.spec = spec;
  const auto events = load_event_times(spec.events_path, spec.L);
  const CpProblem prob = make_cp_problem(events, spec.L, spec.lambda,
                                         spec.cp_kmax, spec.alpha, spec.beta);
  const Pmf reference = Pmf::load_csv(spec.reference_pmf_path);

  const BudgetMatch budget =
      match_budget(static_cast<double>(spec.iterations), spec.cp_tau, spec.T);
  const auto vanilla_iters = static_cast<std::int64_t>(
      std::llround(budget.iterations * spec.vanilla_scale));
  const auto vanilla_burn = static_cast<std::int64_t>(std::llround(
      static_cast<double>(vanilla_iters) * static_cast<double>(spec.burn_in) /
      static_cast<double>(spec.iterations)));

  struct RowDef {
    SamplerKind kind;
    int T, N;
    double tau;
    std::int64_t iters, burn;
  };
  const std::vector<RowDef> rows{
      {SamplerKind::IdealNrj, 1, 1, 0.0, spec.iterations, spec.burn_in},
      {SamplerKind::IdealRjUniform, 1, 1, 0.0, spec.iterations, spec.burn_in},
      {SamplerKind::MultiPathNrj, spec.T, spec.N, spec.cp_tau, spec.iterations,
       spec.burn_in},
      {SamplerKind::MultiPathRj, spec.T, spec.N, spec.cp_tau, spec.iterations,
       spec.burn_in},
      {SamplerKind::VanillaNrj, 1, 1, budget.tau, vanilla_iters, vanilla_burn},
      {SamplerKind::VanillaRj, 1, 1, budget.tau, vanilla_iters, vanilla_burn},
  };
  for (const auto& row : rows) {
    CellResult cell;
    cell.sampler = sampler_kind_name(row.kind);
    cell.T = row.T;
    cell.N = row.N;
    cell.tau = row.tau;
    cell.iterations = row.iters;
    cell.burn_in = row.burn;
    cell.replicates.resize(static_cast<std::size_t>(spec.replicates));
    res.cells.push_back(std::move(cell));
  }

  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t c = 0; c < res.cells.size(); ++c)
    for (int r = 0; r < spec.replicates; ++r) jobs.emplace_back(c, r);

  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto [c, r] = jobs[j];
    auto& cell = res.cells[c];
    CpCell cc;
    cc.sampler = sampler_kind_from_name(cell.sampler);
    cc.T = cell.T;
    cc.N = cell.N;
    cc.tau = cell.tau;
    cell.replicates[static_cast<std::size_t>(r)] = run_cp_replicate(
        prob, &reference, cc, cell.iterations, cell.burn_in,
        derive_seed(spec.seed, c, static_cast<std::uint64_t>(r)));
  });

  if (write_files) detail_exp::write_results(res);
  return res;
}

inline ExperimentResults run_experiment(const ExperimentSpec& spec,
                                        bool write_files = true) {
  if (spec.name == "table1") return run_table1_experiment(spec, write_files);
  return run_toy_experiment(spec, write_files);
}

// ---------------------------------------------------------------------------
// Scaling-limit harness: fixed-time marginals of the rescaled ideal chains
// against their limiting processes, with both speed pairings.

struct LimitsSpec {
  int n = 10000;
  int chain_replicates = 2000;
  int process_samples = 20000;
  double z0_mean = 1.5;   // initial displacement, in limit coordinates
  double z0_sd = 0.2;     // spread of the (snapped) start distribution
  double dt = 1e-3;       // Euler step for the diffusion
  double tau = 0.0;
  std::uint64_t seed = 1;
};

struct LimitsMarginals {
  std::vector<double> chain_nrj;        // speed sqrt(n), t = 1
  std::vector<double> chain_rj;         // speed n, t = 1
  std::vector<double> chain_nrj_swapped;  // NRJ read at speed n
  std::vector<double> chain_rj_swapped;   // RJ read at speed sqrt(n)
  std::vector<double> zigzag;
  std::vector<double> langevin;

  double ks_nrj() const { return ks_distance(chain_nrj, zigzag); }
  double ks_rj() const { return ks_distance(chain_rj, langevin); }
  double ks_nrj_swapped() const {
    return ks_distance(chain_nrj_swapped, zigzag);
  }
  double ks_rj_swapped() const {
    return ks_distance(chain_rj_swapped, langevin);
  }
};

inline LimitsMarginals limits_marginals(const LimitsSpec& spec) {
  LimitsMarginals out;
  const DiscretizedTarget target = build_discretized_target(spec.n);
  const int sqrt_steps = static_cast<int>(std::llround(target.sqrt_n));
  const int full_steps = spec.n;

  auto start_z = [&](RngStream& rng) {
    const double z0 = rng.normal(spec.z0_mean, spec.z0_sd);
    return target.nearest_state(z0);
  };

  out.chain_nrj.resize(static_cast<std::size_t>(spec.chain_replicates));
  out.chain_nrj_swapped.resize(static_cast<std::size_t>(spec.chain_replicates));
  out.chain_rj.resize(static_cast<std::size_t>(spec.chain_replicates));
  out.chain_rj_swapped.resize(static_cast<std::size_t>(spec.chain_replicates));
  parallel_for(static_cast<std::size_t>(spec.chain_replicates), [&](std::size_t i) {
    {
      RngStream rng(derive_seed(spec.seed, 1, i));
      const int k0 = start_z(rng);
      IdealState s{k0, rng.uniform() < 0.5 ? -1 : +1};
      int at_sqrt = k0;
      for (int step = 1; step <= full_steps; ++step) {
        s = ideal_k_step(target.pmf, s, IdealKind::Nrj, rng);
        if (step == sqrt_steps) at_sqrt = s.k;
      }
      out.chain_nrj[i] = target.rescale(at_sqrt);
      out.chain_nrj_swapped[i] = target.rescale(s.k);
    }
    {
      RngStream rng(derive_seed(spec.seed, 2, i));
      const int k0 = start_z(rng);
      IdealState s{k0, +1};
      int at_sqrt = k0;
      for (int step = 1; step <= full_steps; ++step) {
        s = ideal_k_step(target.pmf, s, IdealKind::RjUniform, rng);
        if (step == sqrt_steps) at_sqrt = s.k;
      }
      out.chain_rj[i] = target.rescale(s.k);
      out.chain_rj_swapped[i] = target.rescale(at_sqrt);
    }
  });

  out.zigzag.resize(static_cast<std::size_t>(spec.process_samples));
  out.langevin.resize(static_cast<std::size_t>(spec.process_samples));
  parallel_for(static_cast<std::size_t>(spec.process_samples), [&](std::size_t i) {
    {
      RngStream rng(derive_seed(spec.seed, 3, i));
      const double z0 = target.rescale(start_z(rng));
      const auto p = simulate_zigzag(spec.tau, 1.0, rng, z0, 1.0);
      out.zigzag[i] = p.value.back();
    }
    {
      RngStream rng(derive_seed(spec.seed, 4, i));
      const double z0 = target.rescale(start_z(rng));
      const auto p = simulate_langevin(spec.tau, spec.dt, 1.0, rng, z0, 1.0);
      out.langevin[i] = p.value.back();
    }
  });
  return out;
}

inline void run_limits_experiment(const LimitsSpec& spec,
                                  const std::string& output_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(output_dir);
  const LimitsMarginals m = limits_marginals(spec);

  CsvWriter samples(output_dir + "/marginals.csv",
                    {"process", "sample", "value"});
  auto dump = [&](const char* name, const std::vector<double>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i)
      samples.row({name, std::to_string(i), format_double(vs[i])});
  };
  dump("chain_nrj_speed_sqrt_n", m.chain_nrj);
  dump("chain_rj_speed_n", m.chain_rj);
  dump("chain_nrj_speed_n", m.chain_nrj_swapped);
  dump("chain_rj_speed_sqrt_n", m.chain_rj_swapped);
  dump("zigzag_t1", m.zigzag);
  dump("langevin_t1", m.langevin);

  CsvWriter ks(output_dir + "/ks.csv", {"pair", "ks"});
  ks.row({"nrj_vs_zigzag", format_double(m.ks_nrj())});
  ks.row({"rj_vs_langevin", format_double(m.ks_rj())});
  ks.row({"nrj_swapped_vs_zigzag", format_double(m.ks_nrj_swapped())});
  ks.row({"rj_swapped_vs_langevin", format_double(m.ks_rj_swapped())});

  // example continuous-time paths, (t, value[, direction])
  RngStream rng(spec.seed, 0xcafe);
  const auto zz = simulate_zigzag(spec.tau, 50.0, rng,
                                  std::numeric_limits<double>::quiet_NaN(),
                                  0.1);
  CsvWriter zpath(output_dir + "/zigzag_path.csv", {"t", "value", "direction"});
  for (std::size_t i = 0; i < zz.time.size(); ++i)
    zpath.row({format_double(zz.time[i]), format_double(zz.value[i]),
               std::to_string(zz.direction[i])});
  const auto lv = simulate_langevin(spec.tau, spec.dt, 50.0, rng,
                                    std::numeric_limits<double>::quiet_NaN(),
                                    0.1);
  CsvWriter lpath(output_dir + "/langevin_path.csv", {"t", "value"});
  for (std::size_t i = 0; i < lv.time.size(); ++i)
    lpath.row({format_double(lv.time[i]), format_double(lv.value[i])});
}

inline LimitsSpec parse_limits_spec(const Config& cfg) {
  LimitsSpec s;
  s.n = static_cast<int>(cfg.get_int("limits", "n", s.n));
  s.chain_replicates = static_cast<int>(
      cfg.get_int("limits", "replicates", s.chain_replicates));
  s.process_samples = static_cast<int>(
      cfg.get_int("limits", "reference_samples", s.process_samples));
  s.z0_mean = cfg.get_double("limits", "z0_mean", s.z0_mean);
  s.z0_sd = cfg.get_double("limits", "z0_sd", s.z0_sd);
  s.dt = cfg.get_double("limits", "dt", s.dt);
  s.tau = cfg.get_double("limits", "tau", s.tau);
  s.seed = static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 1));
  return s;
}

}  // namespace nrj
