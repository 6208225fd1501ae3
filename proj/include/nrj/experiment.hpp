#pragma once

// Experiment runner: grids of sampler configurations, replicated chains with
// per-replicate derived seeds, a small worker pool, and CSV persistence.
// Results are deterministic given the spec seed; wall-clock timings go to a
// separate file so the result files are byte-identical across reruns.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nrj/budget.hpp"
#include "nrj/chain.hpp"
#include "nrj/diagnostics.hpp"
#include "nrj/io/config.hpp"
#include "nrj/io/csv.hpp"
#include "nrj/limits.hpp"
#include "nrj/multipath.hpp"
#include "nrj/targets/changepoint.hpp"
#include "nrj/targets/toy.hpp"

namespace nrj {

inline unsigned worker_count() {
  if (const char* env = std::getenv("NRJ_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// index-parallel loop; fn(i) must only touch slot i of its outputs
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b) {
  return detail::mix64(detail::mix64(root, a), b);
}

// ---------------------------------------------------------------------------

struct ReplicateResult {
  double ess = 0.0;
  double iat = 0.0;
  std::size_t switch_proposals = 0;
  double accept_rate = 0.0;
  double tv = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
  Pmf empirical;
};

namespace detail_exp {

struct StreamCollector {
  std::vector<int> switch_k;
  std::vector<std::int64_t> counts;  // post burn-in model occupancy
  int k_min = 0;
  std::int64_t burn_in = 0;
  std::int64_t proposed = 0, accepted = 0;

  StreamCollector(int kmin, int kmax, std::int64_t burn, std::int64_t reserve)
      : counts(static_cast<std::size_t>(kmax - kmin + 1), 0), k_min(kmin),
        burn_in(burn) {
    switch_k.reserve(static_cast<std::size_t>(reserve));
  }

  void operator()(const TraceRecord& r, const TransDimState&) {
    if (r.iter <= burn_in) return;
    ++counts[static_cast<std::size_t>(r.k - k_min)];
    if (r.move != MoveKind::ParamUpdate) {
      switch_k.push_back(r.k);
      ++proposed;
      accepted += r.accepted ? 1 : 0;
    }
  }

  ReplicateResult finish(const Pmf* reference) const {
    ReplicateResult out;
    const EssResult ess = ess_of_series(switch_k);
    out.ess = ess.ess;
    out.iat = ess.iat.iat;
    out.switch_proposals = ess.n;
    out.accept_rate = proposed > 0 ? static_cast<double>(accepted) /
                                         static_cast<double>(proposed)
                                   : 0.0;
    std::vector<double> w(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      w[i] = static_cast<double>(counts[i]);
    out.empirical = Pmf(k_min, std::move(w));
    if (reference) out.tv = tv_distance(out.empirical, *reference);
    return out;
  }
};

}  // namespace detail_exp

// One replicate of a sampler on the toy family. Ideal kinds run the marginal
// K-chain on the model PMF. TV is measured against the exact PMF.
struct ToyCell {
  SamplerKind sampler = SamplerKind::VanillaNrj;
  double sigma = 1.0;
  double phi = 2.0;
  int k_max = 11;
  int T = 1;
  int N = 1;
  double tau = 0.0;
};

inline ReplicateResult run_toy_replicate(const ToyCell& cell,
                                         std::int64_t iterations,
                                         std::int64_t burn_in,
                                         std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto prob = make_toy_problem(cell.phi, cell.k_max, cell.sigma);
  const Pmf& exact = prob.target->pmf();
  detail_exp::StreamCollector collect(1, cell.k_max, burn_in,
                                      iterations - burn_in);

  RunConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.tau = cell.tau;
  cfg.seed = seed;
  cfg.sampler = cell.sampler;
  cfg.T = cell.T;
  cfg.N = cell.N;
  cfg.validate();

  std::unique_ptr<SamplerKernel> kernel;
  switch (cell.sampler) {
    case SamplerKind::VanillaNrj:
      kernel = std::make_unique<VanillaNrjKernel>(*prob.target, *prob.jumps,
                                                  cell.tau, &prob.params);
      break;
    case SamplerKind::VanillaRj:
      kernel = std::make_unique<VanillaRjKernel>(
          *prob.target, *prob.jumps, cell.tau, prob.symmetric_g, &prob.params);
      break;
    case SamplerKind::VanillaRjInformed:
      kernel = std::make_unique<VanillaRjKernel>(
          *prob.target, *prob.jumps, cell.tau, prob.informed(), &prob.params);
      break;
    case SamplerKind::AnnealedNrj:
      kernel = std::make_unique<AnnealedNrjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), &prob.params);
      break;
    case SamplerKind::AnnealedRj:
      kernel = std::make_unique<AnnealedRjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), prob.symmetric_g, &prob.params);
      break;
    case SamplerKind::MultiPathNrj:
      kernel = std::make_unique<MultiPathNrjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), cell.N, &prob.params);
      break;
    case SamplerKind::MultiPathRj:
      kernel = std::make_unique<MultiPathRjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), cell.N, prob.symmetric_g,
          &prob.params);
      break;
    case SamplerKind::IdealNrj:
    case SamplerKind::IdealRjUniform:
    case SamplerKind::IdealRjInformed: {
      const IdealKind kind =
          cell.sampler == SamplerKind::IdealNrj ? IdealKind::Nrj
          : cell.sampler == SamplerKind::IdealRjUniform
              ? IdealKind::RjUniform
              : IdealKind::RjInformed;
      IdealPmfTarget ideal(exact);
      IdealKernel k(ideal.pmf(), kind);
      RngStream init(seed, 0);
      detail_exp::StreamCollector c2(1, cell.k_max, burn_in,
                                     iterations - burn_in);
      run_chain_stream(cfg, ideal, k, default_initial_state(ideal, init),
                       std::ref(c2));
      ReplicateResult out = c2.finish(&exact);
      out.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      return out;
    }
  }

  RngStream init(seed, 0);
  run_chain_stream(cfg, *prob.target, *kernel,
                   default_initial_state(*prob.target, init),
                   std::ref(collect));
  ReplicateResult out = collect.finish(&exact);
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

// One replicate on a change-point problem. Ideal kinds run the marginal
// K-chain on the reference PMF (valid because the ideal acceptance depends
// only on pi(k')/pi(k)). TV is measured against the reference PMF.
struct CpCell {
  SamplerKind sampler = SamplerKind::MultiPathNrj;
  int T = 1;
  int N = 1;
  double tau = 0.4;
};

inline ReplicateResult run_cp_replicate(const CpProblem& prob,
                                        const Pmf* reference,
                                        const CpCell& cell,
                                        std::int64_t iterations,
                                        std::int64_t burn_in,
                                        std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  cfg.iterations = iterations;
  cfg.burn_in = burn_in;
  cfg.tau = cell.tau;
  cfg.seed = seed;
  cfg.sampler = cell.sampler;
  cfg.T = cell.T;
  cfg.N = cell.N;
  cfg.validate();

  if (cell.sampler == SamplerKind::IdealNrj ||
      cell.sampler == SamplerKind::IdealRjUniform ||
      cell.sampler == SamplerKind::IdealRjInformed) {
    if (!reference)
      throw std::invalid_argument(
          "ideal change-point runs need the reference PMF");
    const IdealKind kind =
        cell.sampler == SamplerKind::IdealNrj ? IdealKind::Nrj
        : cell.sampler == SamplerKind::IdealRjUniform ? IdealKind::RjUniform
                                                      : IdealKind::RjInformed;
    IdealPmfTarget ideal(*reference);
    IdealKernel kernel(ideal.pmf(), kind);
    detail_exp::StreamCollector collect(reference->k_min(), reference->k_max(),
                                        burn_in, iterations - burn_in);
    RngStream init(seed, 0);
    run_chain_stream(cfg, ideal, kernel, default_initial_state(ideal, init),
                     std::ref(collect));
    ReplicateResult out = collect.finish(reference);
    out.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    return out;
  }

  const int k_lo = prob.target->k_min();
  const int k_hi = prob.target->k_max();
  detail_exp::StreamCollector collect(k_lo, k_hi, burn_in,
                                      iterations - burn_in);

  std::unique_ptr<SamplerKernel> kernel;
  switch (cell.sampler) {
    case SamplerKind::VanillaNrj:
      kernel = std::make_unique<VanillaNrjKernel>(*prob.target, *prob.jumps,
                                                  cell.tau, prob.params.get());
      break;
    case SamplerKind::VanillaRj:
      kernel = std::make_unique<VanillaRjKernel>(*prob.target, *prob.jumps,
                                                 cell.tau, prob.symmetric_g,
                                                 prob.params.get());
      break;
    case SamplerKind::AnnealedNrj:
      kernel = std::make_unique<AnnealedNrjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), prob.params.get());
      break;
    case SamplerKind::AnnealedRj:
      kernel = std::make_unique<AnnealedRjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), prob.symmetric_g,
          prob.params.get());
      break;
    case SamplerKind::MultiPathNrj:
      kernel = std::make_unique<MultiPathNrjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), cell.N, prob.params.get());
      break;
    case SamplerKind::MultiPathRj:
      kernel = std::make_unique<MultiPathRjKernel>(
          *prob.target, *prob.bridges, cell.tau,
          AnnealingSchedule::linear(cell.T), cell.N, prob.symmetric_g,
          prob.params.get());
      break;
    default:
      throw std::invalid_argument("unsupported sampler for change-point runs");
  }

  RngStream init(seed, 0);
  run_chain_stream(cfg, *prob.target, *kernel,
                   default_initial_state(*prob.target, init),
                   std::ref(collect));
  ReplicateResult out = collect.finish(reference);
  out.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

}  // namespace nrj
