#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nrj/budget.hpp"
#include "nrj/io/config.hpp"
#include "nrj/io/csv.hpp"
#include "nrj/runner.hpp"

using namespace nrj;

TEST_CASE("match_budget") {
  SUBCASE("worked example: I=100000, tau=0.4, T=100") {
    const auto b = match_budget(100000, 0.4, 100);
    CHECK(b.iterations == doctest::Approx(27040000.0));
    CHECK(b.tau == doctest::Approx(40000.0 / 27040000.0).epsilon(1e-12));
  }
  SUBCASE("T=1 collapses to I tau + 4.5 I (1-tau)") {
    const auto b = match_budget(1000, 0.25, 1);
    CHECK(b.iterations == doctest::Approx(250.0 + 4.5 * 750.0));
  }
  SUBCASE("tau=0 gives 4.5 I T switch-only iterations") {
    const auto b = match_budget(2000, 0.0, 10);
    CHECK(b.iterations == doctest::Approx(4.5 * 2000 * 10));
    CHECK(b.tau == 0.0);
  }
  SUBCASE("tau=1 is undefined") {
    CHECK_THROWS_AS(match_budget(1000, 1.0, 10), std::invalid_argument);
  }
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "# experiment file\n"
      "[experiment]\n"
      "name = fig4a\n"
      "seed = 99\n"
      "replicates = 3\n"
      "[grid]\n"
      "sigma = 0.5 1 2\n"
      "samplers = vanilla_nrj vanilla_rj\n");
  const Config cfg = Config::parse(in);
  CHECK(cfg.get("experiment", "name", "") == "fig4a");
  CHECK(cfg.get_int("experiment", "seed", 0) == 99);
  const auto spec = parse_experiment_spec(cfg);
  CHECK(spec.name == "fig4a");
  CHECK(spec.replicates == 3);
  REQUIRE(spec.sigma_grid.size() == 3);
  CHECK(spec.sigma_grid[1] == 1.0);
  REQUIRE(spec.samplers.size() == 2);
  CHECK(spec.samplers[0] == SamplerKind::VanillaNrj);

  std::istringstream bad("[grid\nsigma = 1\n");
  CHECK_THROWS_AS(Config::parse(bad), std::runtime_error);
  std::istringstream bad2("[grid]\nsigma\n");
  CHECK_THROWS_AS(Config::parse(bad2), std::runtime_error);
  CHECK_THROWS_AS(sampler_kind_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("trace CSV round-trip") {
  ChainTrace t;
  t.initial = {3, {}, +1};
  t.records.push_back({1, 4, MoveKind::SwitchUp, true, +1});
  t.records.push_back({2, 4, MoveKind::ParamUpdate, false, +1});
  t.records.push_back({3, 4, MoveKind::SwitchUp, false, -1});
  const std::string path = "/tmp/nrj_trace_test.csv";
  write_trace_csv(t, path);
  const ChainTrace back = read_trace_csv(path);
  CHECK(back.initial.k == 3);
  REQUIRE(back.records.size() == 3);
  CHECK(back.records[0].k == 4);
  CHECK(back.records[0].move == MoveKind::SwitchUp);
  CHECK(back.records[1].move == MoveKind::ParamUpdate);
  CHECK(back.records[2].nu == -1);
  CHECK(back.records[2].accepted == false);
}

TEST_CASE("csv doubles round-trip at 17 significant digits") {
  RngStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const double v = std::exp(rng.normal() * 10.0) * (rng.uniform() < 0.5 ? -1 : 1);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("toy experiment: deterministic rerun, files written") {
  ExperimentSpec spec = experiment_defaults("custom");
  spec.seed = 42;
  spec.replicates = 2;
  spec.iterations = 20000;
  spec.burn_in = 500;
  spec.sigma_grid = {1.0, 2.0};
  spec.samplers = {SamplerKind::VanillaNrj};
  spec.output_dir = "/tmp/nrj_exp_test";

  const auto r1 = run_experiment(spec);
  const auto r2 = run_experiment(spec);
  REQUIRE(r1.cells.size() == 2);
  for (std::size_t c = 0; c < r1.cells.size(); ++c)
    for (std::size_t r = 0; r < r1.cells[c].replicates.size(); ++r) {
      CHECK(r1.cells[c].replicates[r].ess == r2.cells[c].replicates[r].ess);
      CHECK(r1.cells[c].replicates[r].tv == r2.cells[c].replicates[r].tv);
    }
  CHECK(std::filesystem::exists("/tmp/nrj_exp_test/results.csv"));
  CHECK(std::filesystem::exists("/tmp/nrj_exp_test/summary.csv"));
  CHECK(std::filesystem::exists("/tmp/nrj_exp_test/timings.csv"));

  // results.csv must be byte-identical across reruns
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string first = slurp("/tmp/nrj_exp_test/results.csv");
  const auto r3 = run_experiment(spec);
  CHECK(slurp("/tmp/nrj_exp_test/results.csv") == first);

  // one row per grid point and replicate, plus the header
  std::istringstream rows(first);
  std::string line;
  int count = 0;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 1 + 2 * 2);
}

TEST_CASE("sigma=1 maximizes vanilla lifted ESS on the toy grid (small run)") {
  ExperimentSpec spec = experiment_defaults("fig4a");
  spec.seed = 7;
  spec.replicates = 4;
  spec.iterations = 30000;
  spec.burn_in = 500;
  spec.samplers = {SamplerKind::VanillaNrj};
  spec.T_grid = {1};
  spec.N_grid = {1};
  const auto res = run_toy_experiment(spec, /*write_files=*/false);
  REQUIRE(res.cells.size() == 5);
  double best_ess = -1.0;
  double best_sigma = 0.0;
  for (const auto& cell : res.cells) {
    if (cell.mean_ess() > best_ess) {
      best_ess = cell.mean_ess();
      best_sigma = cell.sigma;
    }
  }
  CHECK(best_sigma == 1.0);
}
