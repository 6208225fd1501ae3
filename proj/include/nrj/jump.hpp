#pragma once

#include <cmath>
#include <stdexcept>

#include "nrj/rng.hpp"
#include "nrj/state.hpp"

namespace nrj {

// Dimension-matching proposal machinery for one model family. Boundary b
// connects models b and b+1; an up move at model k uses boundary k, a down
// move at model k uses boundary k-1.
//
// forward: T_{b -> b+1}(x, u) = (y, u_rev), returns log|J| of the map.
// inverse: T_{b+1 -> b}(y, u_rev) = (x, u), returns log|J| of the inverse.
// The pair must satisfy inverse(forward(x, u)) == (x, u) and the two
// log-Jacobians must sum to zero.
class JumpSpec {
 public:
  virtual ~JumpSpec() = default;

  // auxiliary u_{b -> b+1} drawn when moving up from model b
  virtual ParamVector sample_aux_up(int b, const ParamVector& x,
                                    RngStream& rng) const = 0;
  virtual double log_aux_up(int b, const ParamVector& x,
                            const ParamVector& u) const = 0;

  // auxiliary u_{b+1 -> b} drawn when moving down from model b+1
  virtual ParamVector sample_aux_down(int b, const ParamVector& y,
                                      RngStream& rng) const = 0;
  virtual double log_aux_down(int b, const ParamVector& y,
                              const ParamVector& u_rev) const = 0;

  virtual double forward(int b, const ParamVector& x, const ParamVector& u,
                         ParamVector& y, ParamVector& u_rev) const = 0;
  virtual double inverse(int b, const ParamVector& y, const ParamVector& u_rev,
                         ParamVector& x, ParamVector& u) const = 0;
};

// Jump spec for families whose models carry no parameters (marginal K-chains
// run through the full kernels): empty auxiliaries, identity maps, unit
// Jacobians.
class EmptyJumpSpec final : public JumpSpec {
 public:
  ParamVector sample_aux_up(int, const ParamVector&, RngStream&) const override {
    return {};
  }
  double log_aux_up(int, const ParamVector&, const ParamVector&) const override {
    return 0.0;
  }
  ParamVector sample_aux_down(int, const ParamVector&, RngStream&) const override {
    return {};
  }
  double log_aux_down(int, const ParamVector&, const ParamVector&) const override {
    return 0.0;
  }
  double forward(int, const ParamVector&, const ParamVector&, ParamVector& y,
                 ParamVector& u_rev) const override {
    y.clear();
    u_rev.clear();
    return 0.0;
  }
  double inverse(int, const ParamVector&, const ParamVector&, ParamVector& x,
                 ParamVector& u) const override {
    x.clear();
    u.clear();
    return 0.0;
  }
};

// Proposal probabilities over the two candidate neighbours of k.
struct ModelProposalPmf {
  double down = 0.5;
  double up = 0.5;

  double prob(int from_k, int to_k) const {
    if (to_k == from_k + 1) return up;
    if (to_k == from_k - 1) return down;
    return 0.0;
  }
  double log_prob(int from_k, int to_k) const {
    const double p = prob(from_k, to_k);
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }
};

// g(k, .) provider; the symmetric choice proposes each neighbour with
// probability 1/2 even at the edges of the model range (the off-support
// proposal is then rejected).
class ModelProposal {
 public:
  virtual ~ModelProposal() = default;
  virtual ModelProposalPmf at(int k) const = 0;
};

class SymmetricModelProposal final : public ModelProposal {
 public:
  ModelProposalPmf at(int) const override { return {0.5, 0.5}; }
};

}  // namespace nrj
