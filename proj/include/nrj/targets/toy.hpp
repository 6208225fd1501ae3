#pragma once

// Synthetic nested-Gaussian family: model k has k iid standard-normal
// coordinates, the marginal model PMF decays geometrically with factor 1/phi
// away from a central mode, and jumps append/drop one coordinate with a
// N(0, sigma^2) proposal. sigma tunes the jump noise exactly: sigma = 1 makes
// every sampler ideal.

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nrj/annealed.hpp"
#include "nrj/jump.hpp"
#include "nrj/numerics.hpp"
#include "nrj/pmf.hpp"
#include "nrj/target.hpp"

namespace nrj {

struct PhiPmf {
  double phi = 2.0;
  int k_star = 0;
  Pmf pmf;
};

// p(k) proportional to phi^{-|k - k*|} on {1, ..., k_max}, mode centred:
// k* = (k_max + 1)/2. k_max must be odd so the mode sits exactly in the
// middle.
inline PhiPmf phi_pmf(double phi, int k_max) {
  if (!(phi > 1.0)) throw std::invalid_argument("phi_pmf: phi must be > 1");
  if (k_max < 3 || k_max % 2 == 0)
    throw std::invalid_argument("phi_pmf: k_max must be odd and >= 3");
  const int k_star = (k_max + 1) / 2;
  std::vector<double> w(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    w[static_cast<std::size_t>(k - 1)] =
        std::exp(-std::abs(k - k_star) * std::log(phi));
  return {phi, k_star, Pmf(1, std::move(w))};
}

// flat marginal PMF on {1, ..., k_max}; the k* field is the midpoint
inline PhiPmf uniform_phi_pmf(int k_max) {
  if (k_max < 2) throw std::invalid_argument("uniform_phi_pmf: k_max < 2");
  return {1.0, (k_max + 1) / 2, Pmf::uniform(1, k_max)};
}

// log of the jump noise phi_std(u)/q_sigma(u) = sigma exp(-u^2 (1-sigma^-2)/2)
inline double toy_log_noise(double u, double sigma) {
  const double inv_s2 = 1.0 / (sigma * sigma);
  return std::log(sigma) - 0.5 * u * u * (1.0 - inv_s2);
}

class ToyTarget final : public NestedTarget {
 public:
  ToyTarget(PhiPmf model_pmf, double sigma)
      : model_(std::move(model_pmf)), sigma_(sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ToyTarget: sigma <= 0");
  }

  int k_min() const override { return model_.pmf.k_min(); }
  int k_max() const override { return model_.pmf.k_max(); }
  int dim(int k) const override { return k; }

  double log_joint(int k, const ParamVector& x) const override {
    if (!in_support(k)) return neg_inf;
    double lp = model_.pmf.log_prob(k);
    for (double xi : x) lp += normal_logpdf(xi);
    return lp;
  }

  bool has_model_pmf() const override { return true; }
  double log_model_pmf(int k) const override { return model_.pmf.log_prob(k); }

  bool has_conditional_sampler() const override { return true; }
  ParamVector sample_conditional(int k, RngStream& rng) const override {
    ParamVector x(static_cast<std::size_t>(k));
    for (double& xi : x) xi = rng.normal();
    return x;
  }

  const PhiPmf& model() const { return model_; }
  const Pmf& pmf() const { return model_.pmf; }
  double sigma() const { return sigma_; }

 private:
  PhiPmf model_;
  double sigma_;
};

// Up-move: u ~ N(0, sigma^2) appended as the new last coordinate, unit
// Jacobian, empty reverse auxiliary. Down-move drops the last coordinate.
class ToyJumpSpec final : public JumpSpec {
 public:
  explicit ToyJumpSpec(double sigma) : sigma_(sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ToyJumpSpec: sigma <= 0");
  }

  ParamVector sample_aux_up(int, const ParamVector&, RngStream& rng) const override {
    return {rng.normal(0.0, sigma_)};
  }
  double log_aux_up(int, const ParamVector&, const ParamVector& u) const override {
    return normal_logpdf(u[0], 0.0, sigma_);
  }
  ParamVector sample_aux_down(int, const ParamVector&, RngStream&) const override {
    return {};
  }
  double log_aux_down(int, const ParamVector&, const ParamVector&) const override {
    return 0.0;
  }
  double forward(int, const ParamVector& x, const ParamVector& u, ParamVector& y,
                 ParamVector& u_rev) const override {
    y = x;
    y.push_back(u[0]);
    u_rev.clear();
    return 0.0;
  }
  double inverse(int, const ParamVector& y, const ParamVector&, ParamVector& x,
                 ParamVector& u) const override {
    x.assign(y.begin(), y.end() - 1);
    u = {y.back()};
    return 0.0;
  }

  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

inline ToyJumpSpec toy_jump_spec(double sigma) { return ToyJumpSpec(sigma); }

// Exact conditional resampling: a valid pi(.|k)-invariant update, removing
// within-model mixing as a confounder in the switch-dynamics experiments.
class ToyConditionalKernel final : public ParamKernel {
 public:
  bool step(int k, ParamVector& x, RngStream& rng) const override {
    x.resize(static_cast<std::size_t>(k));
    for (double& xi : x) xi = rng.normal();
    return true;
  }
};

// variance of the bridge intermediate rho^(gamma): [(1-gamma)/sigma^2 + gamma]^{-1}
inline double toy_bridge_variance(double gamma, double sigma) {
  return 1.0 / ((1.0 - gamma) / (sigma * sigma) + gamma);
}

// Inner kernels are exact independence draws from rho^(gamma)'s u-marginal
// (the x-coordinates are rho-independent of u and stay put). The bracket
// difference uses the closed-form noise term, so shared x-terms cancel
// exactly.
class ToyBridgeContext final : public BridgeContext {
 public:
  ToyBridgeContext(const ToyTarget& target, int b, double sigma)
      : target_(target), b_(b), sigma_(sigma),
        log_pmf_step_(target.log_model_pmf(b + 1) - target.log_model_pmf(b)) {}

  BridgePoint start_up(const ParamVector& x, RngStream& rng) const override {
    BridgePoint z;
    z.x = x;
    z.u = {rng.normal(0.0, sigma_)};
    z.y = x;
    z.y.push_back(z.u[0]);
    return z;
  }

  BridgePoint start_down(const ParamVector& y, RngStream&) const override {
    BridgePoint z;
    z.y = y;
    z.x.assign(y.begin(), y.end() - 1);
    z.u = {y.back()};
    return z;
  }

  double log_bracket_source(const BridgePoint& z) const override {
    return target_.log_joint(b_, z.x) + normal_logpdf(z.u[0], 0.0, sigma_);
  }

  double log_bracket_dest(const BridgePoint& z) const override {
    return target_.log_joint(b_ + 1, z.y);
  }

  double log_bracket_diff(const BridgePoint& z) const override {
    return log_pmf_step_ + toy_log_noise(z.u[0], sigma_);
  }

  void inner_step(double gamma, BridgePoint& z, RngStream& rng) const override {
    const double sd = std::sqrt(toy_bridge_variance(gamma, sigma_));
    z.u[0] = rng.normal(0.0, sd);
    z.y.back() = z.u[0];
  }

 private:
  const ToyTarget& target_;
  int b_;
  double sigma_;
  double log_pmf_step_;
};

class ToyBridgeFactory final : public BridgeFactory {
 public:
  explicit ToyBridgeFactory(const ToyTarget& target) {
    for (int b = target.k_min(); b < target.k_max(); ++b)
      contexts_.push_back(
          std::make_unique<ToyBridgeContext>(target, b, target.sigma()));
    b0_ = target.k_min();
  }

  const BridgeContext& boundary(int b) const override {
    return *contexts_.at(static_cast<std::size_t>(b - b0_));
  }

 private:
  std::vector<std::unique_ptr<ToyBridgeContext>> contexts_;
  int b0_ = 1;
};

// Everything needed to run any sampler on the toy family.
struct ToyProblem {
  std::unique_ptr<ToyTarget> target;
  std::unique_ptr<ToyJumpSpec> jumps;
  std::unique_ptr<ToyBridgeFactory> bridges;
  ToyConditionalKernel params;
  SymmetricModelProposal symmetric_g;
  std::unique_ptr<InformedModelProposal> informed_g_;

  const ModelProposal& informed() const { return *informed_g_; }
};

inline ToyProblem make_toy_problem(double phi, int k_max, double sigma) {
  ToyProblem p;
  p.target = std::make_unique<ToyTarget>(
      phi > 1.0 ? phi_pmf(phi, k_max) : uniform_phi_pmf(k_max), sigma);
  p.jumps = std::make_unique<ToyJumpSpec>(sigma);
  p.bridges = std::make_unique<ToyBridgeFactory>(*p.target);
  p.informed_g_ = std::make_unique<InformedModelProposal>(p.target->pmf());
  return p;
}

}  // namespace nrj
