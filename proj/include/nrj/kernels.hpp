#pragma once

// Single-step trans-dimensional kernels: vanilla reversible jumps, their
// lifted (non-reversible) counterparts, the informed neighbour proposal, and
// the marginal K-chains for targets whose model PMF is known exactly.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nrj/jump.hpp"
#include "nrj/numerics.hpp"
#include "nrj/pmf.hpp"
#include "nrj/rng.hpp"
#include "nrj/state.hpp"
#include "nrj/target.hpp"
#include "nrj/trace.hpp"

namespace nrj {

// log of the reversible-jump acceptance probability,
// min(0, log g(k',k) + log pi(k',y) + log q_rev - log g(k,k') - log pi(k,x)
//        - log q_fwd + log|J_fwd|).
// Any non-finite proposal density collapses to a certain rejection.
inline double log_accept_rj(double log_g_fwd, double log_g_rev,
                            double log_pi_cur, double log_pi_prop,
                            double log_q_fwd, double log_q_rev,
                            double log_jac_fwd) {
  const double ratio = log_g_rev + log_pi_prop + log_q_rev - log_g_fwd -
                       log_pi_cur - log_q_fwd + log_jac_fwd;
  if (std::isnan(ratio)) return neg_inf;
  return std::min(0.0, ratio);
}

// The lifted acceptance drops the g factors.
inline double log_accept_nrj(double log_pi_cur, double log_pi_prop,
                             double log_q_fwd, double log_q_rev,
                             double log_jac_fwd) {
  return log_accept_rj(0.0, 0.0, log_pi_cur, log_pi_prop, log_q_fwd, log_q_rev,
                       log_jac_fwd);
}

struct SwitchProposal {
  ParamVector y;      // proposed parameters for model k+dir
  double log_ratio;   // log ratio before g factors and before min(0, .)
};

// One jump-spec application from (k, x) to k' = k + dir (dir in {-1,+1}),
// returning the proposal and the lifted log ratio. The caller has already
// checked that k' is in support.
inline SwitchProposal propose_switch(const NestedTarget& target,
                                     const JumpSpec& jumps, int k,
                                     const ParamVector& x, int dir,
                                     RngStream& rng) {
  SwitchProposal out;
  const double log_pi_cur = target.log_joint(k, x);
  if (dir > 0) {
    const int b = k;
    const ParamVector u = jumps.sample_aux_up(b, x, rng);
    const double log_q_fwd = jumps.log_aux_up(b, x, u);
    ParamVector u_rev;
    const double log_jac = jumps.forward(b, x, u, out.y, u_rev);
    const double log_q_rev = jumps.log_aux_down(b, out.y, u_rev);
    out.log_ratio = target.log_joint(k + 1, out.y) + log_q_rev - log_pi_cur -
                    log_q_fwd + log_jac;
  } else {
    const int b = k - 1;
    const ParamVector u_rev = jumps.sample_aux_down(b, x, rng);
    const double log_q_fwd = jumps.log_aux_down(b, x, u_rev);
    ParamVector u;
    const double log_jac = jumps.inverse(b, x, u_rev, out.y, u);
    const double log_q_rev = jumps.log_aux_up(b, out.y, u);
    out.log_ratio = target.log_joint(k - 1, out.y) + log_q_rev - log_pi_cur -
                    log_q_fwd + log_jac;
  }
  if (std::isnan(out.log_ratio)) out.log_ratio = neg_inf;
  return out;
}

struct StepOutcome {
  MoveKind move = MoveKind::ParamUpdate;
  bool accepted = false;
};

// One iteration of the lifted sampler: parameter update with probability tau,
// otherwise a model switch towards k + nu. A rejected switch reverses nu; an
// accepted one keeps it.
inline StepOutcome nrj_step(TransDimState& s, const NestedTarget& target,
                            const JumpSpec& jumps, double tau,
                            const ParamKernel* params, RngStream& rng) {
  const double u_c = rng.uniform();
  if (u_c <= tau) {
    const bool acc = params ? params->step(s.k, s.x, rng) : true;
    return {MoveKind::ParamUpdate, acc};
  }
  const MoveKind mk = s.nu > 0 ? MoveKind::SwitchUp : MoveKind::SwitchDown;
  const int kp = s.k + s.nu;
  if (!target.in_support(kp)) {  // no mass beyond the edge: certain rejection
    s.nu = -s.nu;
    return {mk, false};
  }
  SwitchProposal prop = propose_switch(target, jumps, s.k, s.x, s.nu, rng);
  const double log_ua = std::log(rng.uniform());
  if (log_ua <= std::min(0.0, prop.log_ratio)) {
    s.k = kp;
    s.x = std::move(prop.y);
    return {mk, true};
  }
  s.nu = -s.nu;
  return {mk, false};
}

// Reversible counterpart: the neighbour is drawn from g and the acceptance
// carries the g(k',k)/g(k,k') factor. Rejection leaves the state unchanged.
inline StepOutcome rj_step(TransDimState& s, const NestedTarget& target,
                           const JumpSpec& jumps, double tau,
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
  SwitchProposal prop = propose_switch(target, jumps, s.k, s.x, dir, rng);
  const double log_g_fwd = gk.log_prob(s.k, kp);
  const double log_g_rev = g.at(kp).log_prob(kp, s.k);
  const double log_ratio = prop.log_ratio + log_g_rev - log_g_fwd;
  const double log_ua = std::log(rng.uniform());
  if (log_ua <= std::min(0.0, log_ratio)) {
    s.k = kp;
    s.x = std::move(prop.y);
    return {mk, true};
  }
  return {mk, false};
}

// g*(k, k') proportional to sqrt(pi(k')/pi(k)) over the neighbours of k that
// lie in the support; at the edges all mass goes to the single valid
// neighbour.
inline ModelProposalPmf informed_g(int k, const Pmf& pmf) {
  const bool down_ok = pmf.contains(k - 1);
  const bool up_ok = pmf.contains(k + 1);
  if (!down_ok && !up_ok)
    throw std::invalid_argument("informed_g: k has no valid neighbour");
  const double lk = pmf.log_prob(k);
  const double w_down =
      down_ok ? std::exp(0.5 * (pmf.log_prob(k - 1) - lk)) : 0.0;
  const double w_up = up_ok ? std::exp(0.5 * (pmf.log_prob(k + 1) - lk)) : 0.0;
  const double z = w_down + w_up;
  return {w_down / z, w_up / z};
}

class InformedModelProposal final : public ModelProposal {
 public:
  explicit InformedModelProposal(const Pmf& pmf) : pmf_(&pmf) {}
  ModelProposalPmf at(int k) const override { return informed_g(k, *pmf_); }

 private:
  const Pmf* pmf_;
};

enum class IdealKind { Nrj, RjUniform, RjInformed };

struct IdealState {
  int k = 0;
  int nu = +1;
};

// Marginal K-chain step for a known model PMF: the ideal samplers, whose
// switch acceptance reduces to 1 ^ pi(k')/pi(k). `detail`, when given,
// reports the proposed direction and whether it was accepted.
inline IdealState ideal_k_step(const Pmf& pmf, IdealState s, IdealKind kind,
                               RngStream& rng, StepOutcome* detail = nullptr) {
  int dir;
  double log_g_corr = 0.0;
  if (kind == IdealKind::Nrj) {
    dir = s.nu;
  } else if (kind == IdealKind::RjUniform) {
    dir = rng.uniform() < 0.5 ? +1 : -1;
  } else {
    const ModelProposalPmf gk = informed_g(s.k, pmf);
    dir = rng.uniform() < gk.up ? +1 : -1;
    const int kp = s.k + dir;
    if (pmf.contains(kp))
      log_g_corr = informed_g(kp, pmf).log_prob(kp, s.k) - gk.log_prob(s.k, kp);
  }
  const int kp = s.k + dir;
  bool accept = false;
  if (pmf.contains(kp)) {
    const double log_ratio = pmf.log_prob(kp) - pmf.log_prob(s.k) + log_g_corr;
    accept = log_ratio >= 0.0 || std::log(rng.uniform()) <= log_ratio;
  }
  if (detail)
    *detail = {dir > 0 ? MoveKind::SwitchUp : MoveKind::SwitchDown, accept};
  if (accept)
    s.k = kp;
  else if (kind == IdealKind::Nrj)
    s.nu = -s.nu;
  return s;
}

// ---------------------------------------------------------------------------
// Kernel objects for the chain driver.

class SamplerKernel {
 public:
  virtual ~SamplerKernel() = default;
  virtual StepOutcome step(TransDimState& s, RngStream& rng) const = 0;
};

class VanillaNrjKernel final : public SamplerKernel {
 public:
  VanillaNrjKernel(const NestedTarget& target, const JumpSpec& jumps,
                   double tau, const ParamKernel* params = nullptr)
      : target_(target), jumps_(jumps), tau_(tau), params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return nrj_step(s, target_, jumps_, tau_, params_, rng);
  }

 private:
  const NestedTarget& target_;
  const JumpSpec& jumps_;
  double tau_;
  const ParamKernel* params_;
};

class VanillaRjKernel final : public SamplerKernel {
 public:
  VanillaRjKernel(const NestedTarget& target, const JumpSpec& jumps, double tau,
                  const ModelProposal& g, const ParamKernel* params = nullptr)
      : target_(target), jumps_(jumps), tau_(tau), g_(g), params_(params) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    return rj_step(s, target_, jumps_, tau_, g_, params_, rng);
  }

 private:
  const NestedTarget& target_;
  const JumpSpec& jumps_;
  double tau_;
  const ModelProposal& g_;
  const ParamKernel* params_;
};

class IdealKernel final : public SamplerKernel {
 public:
  IdealKernel(const Pmf& pmf, IdealKind kind) : pmf_(pmf), kind_(kind) {}

  StepOutcome step(TransDimState& s, RngStream& rng) const override {
    IdealState is{s.k, s.nu};
    StepOutcome out;
    const IdealState next = ideal_k_step(pmf_, is, kind_, rng, &out);
    s.k = next.k;
    s.nu = next.nu;
    return out;
  }

 private:
  const Pmf& pmf_;
  IdealKind kind_;
};

}  // namespace nrj
