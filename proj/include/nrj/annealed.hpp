#pragma once

// Annealed-bridge model switches: an inhomogeneous chain through geometric
// interpolations rho^(t) between the two sides of a jump, whose telescoping
// ratio estimates pi(k')/pi(k). The same machinery drives both the lifted and
// the reversible samplers.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nrj/jump.hpp"
#include "nrj/kernels.hpp"
#include "nrj/numerics.hpp"
#include "nrj/rng.hpp"
#include "nrj/state.hpp"
#include "nrj/target.hpp"

namespace nrj {

struct AnnealingSchedule {
  std::vector<double> gamma;  // gamma[0] = 0, gamma[T] = 1, nondecreasing

  explicit AnnealingSchedule(std::vector<double> g) : gamma(std::move(g)) {
    if (gamma.size() < 2 || gamma.front() != 0.0 || gamma.back() != 1.0)
      throw std::invalid_argument("schedule must run from 0 to 1");
    for (std::size_t i = 1; i < gamma.size(); ++i)
      if (gamma[i] < gamma[i - 1])
        throw std::invalid_argument("schedule must be nondecreasing");
  }

  static AnnealingSchedule linear(int T) {
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    std::vector<double> g(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t)
      g[static_cast<std::size_t>(t)] = static_cast<double>(t) / T;
    return AnnealingSchedule(std::move(g));
  }

  int T() const { return static_cast<int>(gamma.size()) - 1; }
};

// One point of a bridge, kept in both parameterizations: the lower-model side
// (x, u) and its mirror (y, u_rev) = T_fwd(x, u), with the log-Jacobian of the
// forward map at that point. `scratch` is owned by the bridge context
// (cached sufficient statistics for fast sweeps).
struct BridgePoint {
  ParamVector x, u;
  ParamVector y, u_rev;
  double log_jac_fwd = 0.0;
  ParamVector scratch;
};

// Bridge problem for one boundary b <-> b+1. Brackets are the two endpoint
// log-densities in the (y, u_rev) parameterization:
//   source = log pi(b, x) + log q_up(u) - log|J_fwd|   (the gamma = 0 side)
//   dest   = log pi(b+1, y) + log q_down(u_rev)        (the gamma = 1 side)
// inner_step must leave rho^(gamma) invariant and use proposal machinery that
// does not depend on gamma, so the up- and down-chains pair up at mirrored
// times.
class BridgeContext {
 public:
  virtual ~BridgeContext() = default;

  virtual BridgePoint start_up(const ParamVector& x, RngStream& rng) const = 0;
  virtual BridgePoint start_down(const ParamVector& y, RngStream& rng) const = 0;

  virtual double log_bracket_source(const BridgePoint& z) const = 0;
  virtual double log_bracket_dest(const BridgePoint& z) const = 0;

  // dest - source; overridable when a closed form cancels shared terms
  virtual double log_bracket_diff(const BridgePoint& z) const {
    return log_bracket_dest(z) - log_bracket_source(z);
  }

  virtual void inner_step(double gamma, BridgePoint& z, RngStream& rng) const = 0;
};

// Unnormalized log rho^(gamma) in the (y, u_rev) parameterization.
inline double log_rho(double gamma, const BridgeContext& ctx,
                      const BridgePoint& z) {
  const double a = ctx.log_bracket_source(z);
  const double b = ctx.log_bracket_dest(z);
  if (gamma <= 0.0) return a;
  if (gamma >= 1.0) return b;
  const double v = (1.0 - gamma) * a + gamma * b;
  return std::isnan(v) ? neg_inf : v;
}

inline double log_rho(int t, const AnnealingSchedule& sched,
                      const BridgeContext& ctx, const BridgePoint& z) {
  if (t < 0 || t > sched.T()) throw std::out_of_range("log_rho: t outside 0..T");
  return log_rho(sched.gamma[static_cast<std::size_t>(t)], ctx, z);
}

// Runs the inhomogeneous chain and accumulates
//   log r = sum_t (gamma_{t+1} - gamma_t) * (dest - source)(z_t),
// the telescoping ratio. `up` selects the direction of travel: up-moves
// anneal gamma from 0 to 1, down-moves traverse the same schedule reversed.
// z must be the start point (t = 0). On return z is the final point z_{T-1};
// `record`, when given, receives copies of z_0 .. z_{T-1}.
inline double run_bridge(const BridgeContext& ctx,
                         const AnnealingSchedule& sched, bool up,
                         BridgePoint& z, RngStream& rng,
                         std::vector<BridgePoint>* record = nullptr) {
  const int T = sched.T();
  auto gamma_at = [&](int t) {
    return up ? sched.gamma[static_cast<std::size_t>(t)]
              : sched.gamma[static_cast<std::size_t>(T - t)];
  };
  double log_ratio = 0.0;
  for (int t = 0; t < T; ++t) {
    const double step = gamma_at(t + 1) - gamma_at(t);
    log_ratio += step * ctx.log_bracket_diff(z);
    if (record) record->push_back(z);
    if (t < T - 1) ctx.inner_step(gamma_at(t + 1), z, rng);
  }
  return std::isnan(log_ratio) ? neg_inf : log_ratio;
}

// Trajectory record of one bridge, with its accumulated log ratio and the
// endpoint proposal for the destination model.
struct BridgePath {
  std::vector<BridgePoint> points;  // z_0 .. z_{T-1}
  double log_ratio = 0.0;
  ParamVector endpoint;
};

// Bridge from `state` in the direction of state.nu (k' = k + nu).
inline BridgePath forward_bridge(const TransDimState& state,
                                 const BridgeContext& ctx,
                                 const AnnealingSchedule& sched,
                                 RngStream& rng) {
  BridgePath path;
  const bool upward = state.nu > 0;
  BridgePoint z = upward ? ctx.start_up(state.x, rng)
                         : ctx.start_down(state.x, rng);
  path.log_ratio = run_bridge(ctx, sched, upward, z, rng, &path.points);
  path.endpoint = upward ? z.y : z.x;
  return path;
}

class BridgeFactory {
 public:
  virtual ~BridgeFactory() = default;
  // Context for the boundary between models b and b+1; must stay valid for
  // the factory's lifetime and be safe for concurrent use.
  virtual const BridgeContext& boundary(int b) const = 0;
};

// One iteration of the lifted sampler with bridge proposals: parameter update
// with probability tau, otherwise a bridge towards k + nu accepted with
// probability 1 ^ r. A rejected switch reverses nu. T = 1 reduces to the
// vanilla step.
inline StepOutcome nrj2_step(TransDimState& s, const NestedTarget& target,
                             const BridgeFactory& bridges, double tau,
                             const AnnealingSchedule& sched,
                             const ParamKernel* params, RngStream& rng) {
  const double u_c = rng.uniform();
  if (u_c <= tau) {
    const bool acc = params ? params->step(s.k, s.x, rng) : true;
    return {MoveKind::ParamUpdate, acc};
  }
  const MoveKind mk = s.nu > 0 ? MoveKind::SwitchUp : MoveKind::SwitchDown;
  const int kp = s.k + s.nu;
  if (!target.in_support(kp)) {  // rejection and flip without building a path
    s.nu = -s.nu;
    return {mk, false};
  }
  const bool upward = s.nu > 0;
  const BridgeContext& ctx = bridges.boundary(upward ? s.k : s.k - 1);
  BridgePoint z = upward ? ctx.start_up(s.x, rng) : ctx.start_down(s.x, rng);
  const double log_ua = std::log(rng.uniform());
  const double log_ratio = run_bridge(ctx, sched, upward, z, rng);
  if (log_ua <= std::min(0.0, log_ratio)) {
    s.k = kp;
    s.x = upward ? std::move(z.y) : std::move(z.x);
    return {mk, true};
  }
  s.nu = -s.nu;
  return {mk, false};
}

// Reversible variant: neighbour drawn from g, acceptance carries the g
// factors, rejection keeps the state (no direction variable).
inline StepOutcome rj2_step(TransDimState& s, const NestedTarget& target,
                            const BridgeFactory& bridges, double tau,
                            const AnnealingSchedule& sched,
                            const ModelProposal& g, const ParamKernel* params,
                            RngStream& rng) {
  const double u_c = rng.uniform();
  if (u_c <= tau) {
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
  BridgePoint z = upward ? ctx.start_up(s.x, rng) : ctx.start_down(s.x, rng);
  const double log_ua = std::log(rng.uniform());
  const double log_g_corr =
      g.at(kp).log_prob(kp, s.k) - gk.log_prob(s.k, kp);
  const double log_ratio = run_bridge(ctx, sched, upward, z, rng) + log_g_corr;
  if (log_ua <= std::min(0.0, log_ratio)) {
    s.k = kp;
    s.x = upward ? std::move(z.y) : std::move(z.x);
    return {mk, true};
  }
  return {mk, false};
}

class AnnealedNrjKernel final : public SamplerKernel {
 public:
  AnnealedNrjKernel(const NestedTarget& target, const BridgeFactory& bridges,
                    double tau, AnnealingSchedule sched,
                    const ParamKernel* params = nullptr)
      : target_(target), bridges_(bridges), tau_(tau), sched_(std::move(sched)),
        params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return nrj2_step(s, target_, bridges_, tau_, sched_, params_, rng);
  }

  const AnnealingSchedule& schedule() const { return sched_; }

 private:
  const NestedTarget& target_;
  const BridgeFactory& bridges_;
  double tau_;
  AnnealingSchedule sched_;
  const ParamKernel* params_;
};

class AnnealedRjKernel final : public SamplerKernel {
 public:
  AnnealedRjKernel(const NestedTarget& target, const BridgeFactory& bridges,
                   double tau, AnnealingSchedule sched, const ModelProposal& g,
                   const ParamKernel* params = nullptr)
      : target_(target), bridges_(bridges), tau_(tau), sched_(std::move(sched)),
        g_(g), params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return rj2_step(s, target_, bridges_, tau_, sched_, g_, params_, rng);
  }

 private:
  const NestedTarget& target_;
  const BridgeFactory& bridges_;
  double tau_;
  AnnealingSchedule sched_;
  const ModelProposal& g_;
  const ParamKernel* params_;
};

// Generic random-walk inner kernel operating on the (x, u) coordinates, for
// targets without a specialized sweep. Its invariant density in those
// coordinates is rho^(gamma) times |J_fwd|^gamma (the same measure expressed
// in the source parameterization).
class GenericRwBridgeContext : public BridgeContext {
 public:
  GenericRwBridgeContext(const NestedTarget& target, const JumpSpec& jumps,
                         int b, double step_size)
      : target_(target), jumps_(jumps), b_(b), step_(step_size) {}

  BridgePoint start_up(const ParamVector& x, RngStream& rng) const override {
    BridgePoint z;
    z.x = x;
    z.u = jumps_.sample_aux_up(b_, x, rng);
    z.log_jac_fwd = jumps_.forward(b_, z.x, z.u, z.y, z.u_rev);
    return z;
  }

  BridgePoint start_down(const ParamVector& y, RngStream& rng) const override {
    BridgePoint z;
    z.y = y;
    z.u_rev = jumps_.sample_aux_down(b_, y, rng);
    const double log_jac_inv = jumps_.inverse(b_, z.y, z.u_rev, z.x, z.u);
    z.log_jac_fwd = -log_jac_inv;
    return z;
  }

  double log_bracket_source(const BridgePoint& z) const override {
    return target_.log_joint(b_, z.x) + jumps_.log_aux_up(b_, z.x, z.u) -
           z.log_jac_fwd;
  }

  double log_bracket_dest(const BridgePoint& z) const override {
    return target_.log_joint(b_ + 1, z.y) +
           jumps_.log_aux_down(b_, z.y, z.u_rev);
  }

  // Symmetric Gaussian walk on the (x, u) coordinates. The invariant density
  // in those coordinates carries the Jacobian on the gamma side:
  // (1-gamma)(log pi + log q_up) + gamma(log pi' + log q_down + log|J_fwd|).
  void inner_step(double gamma, BridgePoint& z, RngStream& rng) const override {
    BridgePoint prop;
    prop.x.resize(z.x.size());
    prop.u.resize(z.u.size());
    for (std::size_t i = 0; i < z.x.size(); ++i)
      prop.x[i] = z.x[i] + step_ * rng.normal();
    for (std::size_t i = 0; i < z.u.size(); ++i)
      prop.u[i] = z.u[i] + step_ * rng.normal();
    prop.log_jac_fwd = jumps_.forward(b_, prop.x, prop.u, prop.y, prop.u_rev);
    const double delta = log_rho_xu(gamma, prop) - log_rho_xu(gamma, z);
    if (std::log(rng.uniform()) <= delta) z = std::move(prop);
  }

 private:
  double log_rho_xu(double gamma, const BridgePoint& z) const {
    const double a =
        target_.log_joint(b_, z.x) + jumps_.log_aux_up(b_, z.x, z.u);
    const double b = target_.log_joint(b_ + 1, z.y) +
                     jumps_.log_aux_down(b_, z.y, z.u_rev) + z.log_jac_fwd;
    const double v = (1.0 - gamma) * a + gamma * b;
    return std::isnan(v) ? neg_inf : v;
  }

  const NestedTarget& target_;
  const JumpSpec& jumps_;
  int b_;
  double step_;
};

}  // namespace nrj
