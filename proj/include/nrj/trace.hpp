#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrj/state.hpp"

namespace nrj {

enum class SamplerKind : std::uint8_t {
  VanillaNrj,
  VanillaRj,
  VanillaRjInformed,  // reversible, informed neighbour proposal
  AnnealedNrj,   // bridge proposals, lifted
  AnnealedRj,
  MultiPathNrj,  // N averaged bridges, lifted
  MultiPathRj,
  IdealNrj,      // marginal K-chain on a known PMF
  IdealRjUniform,
  IdealRjInformed,
};

inline const char* sampler_kind_name(SamplerKind s) {
  switch (s) {
    case SamplerKind::VanillaNrj: return "vanilla_nrj";
    case SamplerKind::VanillaRj: return "vanilla_rj";
    case SamplerKind::VanillaRjInformed: return "vanilla_rj_informed";
    case SamplerKind::AnnealedNrj: return "annealed_nrj";
    case SamplerKind::AnnealedRj: return "annealed_rj";
    case SamplerKind::MultiPathNrj: return "multipath_nrj";
    case SamplerKind::MultiPathRj: return "multipath_rj";
    case SamplerKind::IdealNrj: return "ideal_nrj";
    case SamplerKind::IdealRjUniform: return "ideal_rj_unif";
    case SamplerKind::IdealRjInformed: return "ideal_rj_informed";
  }
  return "?";
}

struct RunConfig {
  std::int64_t iterations = 0;
  std::int64_t burn_in = 0;
  double tau = 0.0;            // probability of proposing a parameter update
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::VanillaNrj;
  int T = 1;                   // bridge length
  int N = 1;                   // path count
  std::int64_t snapshot_stride = 0;  // 0 = never store parameter snapshots

  void validate() const {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau outside [0,1]");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (iterations > 0 && burn_in >= iterations)
      throw std::invalid_argument("burn_in must be < iterations");
    if (burn_in < 0 || iterations < 0)
      throw std::invalid_argument("negative iteration counts");
  }
};

struct TraceRecord {
  std::int64_t iter = 0;  // 1-based
  int k = 0;
  MoveKind move = MoveKind::ParamUpdate;
  bool accepted = false;
  std::int8_t nu = +1;  // after the move
};

struct ParamSnapshot {
  std::int64_t iter = 0;
  ParamVector x;
};

// Per-iteration record of the model path and move metadata. Parameter values
// are only kept at the configured snapshot stride; every headline diagnostic
// uses the K-process alone.
struct ChainTrace {
  TransDimState initial;
  std::vector<TraceRecord> records;
  std::vector<ParamSnapshot> snapshots;

  std::vector<int> k_path() const {
    std::vector<int> ks;
    ks.reserve(records.size() + 1);
    ks.push_back(initial.k);
    for (const auto& r : records) ks.push_back(r.k);
    return ks;
  }

  // k at iterations where a model switch was proposed, skipping the first
  // `burn_in` iterations
  std::vector<int> switch_k_series(std::int64_t burn_in = 0) const {
    std::vector<int> ks;
    for (const auto& r : records)
      if (r.iter > burn_in && r.move != MoveKind::ParamUpdate)
        ks.push_back(r.k);
    return ks;
  }

  double switch_acceptance_rate(std::int64_t burn_in = 0) const {
    std::int64_t proposed = 0, accepted = 0;
    for (const auto& r : records) {
      if (r.iter > burn_in && r.move != MoveKind::ParamUpdate) {
        ++proposed;
        accepted += r.accepted ? 1 : 0;
      }
    }
    return proposed > 0 ? static_cast<double>(accepted) /
                              static_cast<double>(proposed)
                        : 0.0;
  }
};

}  // namespace nrj
