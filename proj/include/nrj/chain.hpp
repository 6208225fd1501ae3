#pragma once

// Generic chain driver shared by every sampler kernel.

#include <cstdint>
#include <functional>
#include <stdexcept>

#include "nrj/kernels.hpp"
#include "nrj/rng.hpp"
#include "nrj/target.hpp"
#include "nrj/trace.hpp"

namespace nrj {

inline TransDimState default_initial_state(const NestedTarget& target,
                                           RngStream& rng) {
  TransDimState s;
  s.k = target.k_min();
  if (target.has_model_pmf()) {  // start at the marginal mode when known
    double best = neg_inf;
    for (int k = target.k_min(); k <= target.k_max(); ++k) {
      const double lp = target.log_model_pmf(k);
      if (lp > best) {
        best = lp;
        s.k = k;
      }
    }
  }
  s.x = target.has_conditional_sampler() ? target.sample_conditional(s.k, rng)
                                         : target.default_params(s.k);
  s.nu = +1;
  return s;
}

inline void check_initial_state(const NestedTarget& target,
                                const TransDimState& s) {
  if (!target.in_support(s.k))
    throw std::invalid_argument("initial state: k outside model range");
  if (static_cast<int>(s.x.size()) != target.dim(s.k))
    throw std::invalid_argument(
        "initial state: parameter dimension does not match target dim(k)");
  if (s.nu != -1 && s.nu != +1)
    throw std::invalid_argument("initial state: nu must be -1 or +1");
}

// Streaming driver: invokes `sink(record, state)` once per iteration. The
// chain is a pure function of (config.seed, initial state, target, kernel).
template <class Sink>
void run_chain_stream(const RunConfig& config, const NestedTarget& target,
                      const SamplerKernel& kernel, TransDimState state,
                      Sink&& sink) {
  config.validate();
  check_initial_state(target, state);
  RngStream rng(config.seed, /*stream=*/1);
  for (std::int64_t it = 1; it <= config.iterations; ++it) {
    const StepOutcome out = kernel.step(state, rng);
    TraceRecord rec{it, state.k, out.move, out.accepted,
                    static_cast<std::int8_t>(state.nu)};
    sink(rec, state);
  }
}

inline ChainTrace run_chain(const RunConfig& config, const NestedTarget& target,
                            const SamplerKernel& kernel,
                            const TransDimState& initial) {
  ChainTrace trace;
  trace.initial = initial;
  trace.records.reserve(static_cast<std::size_t>(config.iterations));
  run_chain_stream(config, target, kernel, initial,
                   [&](const TraceRecord& rec, const TransDimState& s) {
                     trace.records.push_back(rec);
                     if (config.snapshot_stride > 0 &&
                         rec.iter % config.snapshot_stride == 0)
                       trace.snapshots.push_back({rec.iter, s.x});
                   });
  return trace;
}

// Initial state derived from the seed (conditional draw at the marginal mode
// when the target provides one).
inline ChainTrace run_chain(const RunConfig& config, const NestedTarget& target,
                            const SamplerKernel& kernel) {
  RngStream init_rng(config.seed, /*stream=*/0);
  return run_chain(config, target, kernel,
                   default_initial_state(target, init_rng));
}

}  // namespace nrj
