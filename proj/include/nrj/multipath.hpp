#pragma once

// N parallel annealed bridges per switch attempt, with averaged ratio rbar
// and the two symmetric branch structures (forward-average and
// reverse-average). Paths draw from per-path streams derived from one id, so
// the result does not depend on whether they are built sequentially or
// concurrently; the reduction runs in fixed index order.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nrj/annealed.hpp"
#include "nrj/numerics.hpp"

namespace nrj {

// Categorical draw with weights proportional to exp(log_weights), computed
// stably in the log domain. Throws when no weight is positive.
inline int select_jstar(std::span<const double> log_weights, RngStream& rng) {
  double m = neg_inf;
  for (double lw : log_weights) m = std::max(m, lw);
  if (!std::isfinite(m))
    throw std::domain_error("select_jstar: all weights are zero");
  double total = 0.0;
  for (double lw : log_weights) total += std::exp(lw - m);
  double u = rng.uniform() * total;
  for (std::size_t j = 0; j + 1 < log_weights.size(); ++j) {
    u -= std::exp(log_weights[j] - m);
    if (u < 0.0) return static_cast<int>(j);
  }
  return static_cast<int>(log_weights.size()) - 1;
}

struct MultiPathProposal {
  std::vector<ParamVector> endpoints;  // destination-model proposals, one per path
  std::vector<double> log_ratios;      // per-path log r
  double log_rbar = neg_inf;           // log((1/N) sum_j r_j)
  int jstar = -1;                      // selected path, -1 when all ratios vanish
};

// N independent bridges from the same start, launched towards k + (upward ?
// +1 : -1) from parameters x.
inline MultiPathProposal multi_forward(const ParamVector& x, bool upward,
                                       const BridgeContext& ctx,
                                       const AnnealingSchedule& sched, int N,
                                       RngStream& rng) {
  if (N < 1) throw std::invalid_argument("multi_forward: N must be >= 1");
  MultiPathProposal out;
  out.endpoints.resize(static_cast<std::size_t>(N));
  out.log_ratios.resize(static_cast<std::size_t>(N));
  const std::uint64_t attempt = rng.next_u64();
  for (int j = 0; j < N; ++j) {
    RngStream path_rng(attempt, static_cast<std::uint64_t>(j));
    BridgePoint z = upward ? ctx.start_up(x, path_rng)
                           : ctx.start_down(x, path_rng);
    out.log_ratios[static_cast<std::size_t>(j)] =
        run_bridge(ctx, sched, upward, z, path_rng);
    out.endpoints[static_cast<std::size_t>(j)] =
        upward ? std::move(z.y) : std::move(z.x);
  }
  out.log_rbar =
      log_sum_exp(out.log_ratios) - std::log(static_cast<double>(N));
  if (std::isfinite(out.log_rbar))
    out.jstar = select_jstar(out.log_ratios, rng);
  return out;
}

inline MultiPathProposal multi_forward(const TransDimState& state,
                                       const BridgeContext& ctx,
                                       const AnnealingSchedule& sched, int N,
                                       RngStream& rng) {
  return multi_forward(state.x, state.nu > 0, ctx, sched, N, rng);
}

struct ReverseBranchResult {
  ParamVector endpoint;         // endpoint of the single forward path
  double log_rbar_rev = neg_inf;  // log rbar(k', k)
};

// One forward path to an endpoint, then N-1 bridges from that endpoint back
// towards the current model. The forward path enters the reverse average
// through its reciprocal ratio (a path traversed backwards telescopes to
// exactly the inverse), so N = 1 reduces to the single-bridge dynamics.
inline ReverseBranchResult reverse_branch(const ParamVector& x, bool upward,
                                          const BridgeContext& ctx,
                                          const AnnealingSchedule& sched, int N,
                                          RngStream& rng) {
  if (N < 1) throw std::invalid_argument("reverse_branch: N must be >= 1");
  ReverseBranchResult out;
  std::vector<double> log_rev(static_cast<std::size_t>(N));
  const std::uint64_t attempt = rng.next_u64();
  {
    RngStream path_rng(attempt, 0);
    BridgePoint z = upward ? ctx.start_up(x, path_rng)
                           : ctx.start_down(x, path_rng);
    const double log_fwd = run_bridge(ctx, sched, upward, z, path_rng);
    log_rev[0] = -log_fwd;
    out.endpoint = upward ? std::move(z.y) : std::move(z.x);
  }
  for (int j = 1; j < N; ++j) {
    RngStream path_rng(attempt, static_cast<std::uint64_t>(j));
    BridgePoint z = upward ? ctx.start_down(out.endpoint, path_rng)
                           : ctx.start_up(out.endpoint, path_rng);
    log_rev[static_cast<std::size_t>(j)] =
        run_bridge(ctx, sched, !upward, z, path_rng);
  }
  out.log_rbar_rev =
      log_sum_exp(log_rev) - std::log(static_cast<double>(N));
  return out;
}

// One iteration of the lifted sampler with multi-path proposals: a fair coin
// picks the forward-average branch (accept one of N endpoints with
// probability 1 ^ rbar(k,k')) or the reverse-average branch (accept the
// single forward endpoint with probability 1 ^ 1/rbar(k',k)).
inline StepOutcome nrj3_step(TransDimState& s, const NestedTarget& target,
                             const BridgeFactory& bridges, double tau,
                             const AnnealingSchedule& sched, int N,
                             const ParamKernel* params, RngStream& rng) {
  const double u_c1 = rng.uniform();
  if (u_c1 <= tau) {
    const bool acc = params ? params->step(s.k, s.x, rng) : true;
    return {MoveKind::ParamUpdate, acc};
  }
  const MoveKind mk = s.nu > 0 ? MoveKind::SwitchUp : MoveKind::SwitchDown;
  const int kp = s.k + s.nu;
  if (!target.in_support(kp)) {
    s.nu = -s.nu;
    return {mk, false};
  }
  const bool upward = s.nu > 0;
  const BridgeContext& ctx = bridges.boundary(upward ? s.k : s.k - 1);
  const double log_ua = std::log(rng.uniform());
  const double u_c2 = rng.uniform();
  if (u_c2 <= 0.5) {
    MultiPathProposal mp = multi_forward(s.x, upward, ctx, sched, N, rng);
    if (mp.jstar >= 0 && log_ua <= std::min(0.0, mp.log_rbar)) {
      s.k = kp;
      s.x = std::move(mp.endpoints[static_cast<std::size_t>(mp.jstar)]);
      return {mk, true};
    }
  } else {
    ReverseBranchResult rb = reverse_branch(s.x, upward, ctx, sched, N, rng);
    if (log_ua <= std::min(0.0, -rb.log_rbar_rev)) {
      s.k = kp;
      s.x = std::move(rb.endpoint);
      return {mk, true};
    }
  }
  s.nu = -s.nu;
  return {mk, false};
}

// Reversible variant: neighbour drawn from g; both branch acceptances carry
// the g(k',k)/g(k,k') factor; rejection keeps the state.
inline StepOutcome rj3_step(TransDimState& s, const NestedTarget& target,
                            const BridgeFactory& bridges, double tau,
                            const AnnealingSchedule& sched, int N,
                            const ModelProposal& g, const ParamKernel* params,
                            RngStream& rng) {
  const double u_c1 = rng.uniform();
  if (u_c1 <= tau) {
    const bool acc = params ? params->step(s.k, s.x, rng) : true;
    return {MoveKind::ParamUpdate, acc};
  }
  const ModelProposalPmf gk = g.at(s.k);
  const int dir = rng.uniform() < gk.up ? +1 : -1;
  const MoveKind mk = dir > 0 ? MoveKind::SwitchUp : MoveKind::SwitchDown;
  const int kp = s.k + dir;
  if (!target.in_support(kp)) return {mk, false};
  const bool upward = dir > 0;
  const BridgeContext& ctx = bridges.boundary(upward ? s.k : s.k - 1);
  const double log_g_corr = g.at(kp).log_prob(kp, s.k) - gk.log_prob(s.k, kp);
  const double log_ua = std::log(rng.uniform());
  const double u_c2 = rng.uniform();
  if (u_c2 <= 0.5) {
    MultiPathProposal mp = multi_forward(s.x, upward, ctx, sched, N, rng);
    if (mp.jstar >= 0 &&
        log_ua <= std::min(0.0, mp.log_rbar + log_g_corr)) {
      s.k = kp;
      s.x = std::move(mp.endpoints[static_cast<std::size_t>(mp.jstar)]);
      return {mk, true};
    }
  } else {
    ReverseBranchResult rb = reverse_branch(s.x, upward, ctx, sched, N, rng);
    if (log_ua <= std::min(0.0, -rb.log_rbar_rev + log_g_corr)) {
      s.k = kp;
      s.x = std::move(rb.endpoint);
      return {mk, true};
    }
  }
  return {mk, false};
}

class MultiPathNrjKernel final : public SamplerKernel {
 public:
  MultiPathNrjKernel(const NestedTarget& target, const BridgeFactory& bridges,
                     double tau, AnnealingSchedule sched, int N,
                     const ParamKernel* params = nullptr)
      : target_(target), bridges_(bridges), tau_(tau), sched_(std::move(sched)),
        N_(N), params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return nrj3_step(s, target_, bridges_, tau_, sched_, N_, params_, rng);
  }

 private:
  const NestedTarget& target_;
  const BridgeFactory& bridges_;
  double tau_;
  AnnealingSchedule sched_;
  int N_;
  const ParamKernel* params_;
};

class MultiPathRjKernel final : public SamplerKernel {
 public:
  MultiPathRjKernel(const NestedTarget& target, const BridgeFactory& bridges,
                    double tau, AnnealingSchedule sched, int N,
                    const ModelProposal& g, const ParamKernel* params = nullptr)
      : target_(target), bridges_(bridges), tau_(tau), sched_(std::move(sched)),
        N_(N), g_(g), params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return rj3_step(s, target_, bridges_, tau_, sched_, N_, g_, params_, rng);
  }

 private:
  const NestedTarget& target_;
  const BridgeFactory& bridges_;
  double tau_;
  AnnealingSchedule sched_;
  int N_;
  const ModelProposal& g_;
  const ParamKernel* params_;
};

}  // namespace nrj
