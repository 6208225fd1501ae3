#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrj/pmf.hpp"
#include "nrj/rng.hpp"
#include "nrj/state.hpp"

namespace nrj {

// A nested model family: models totally ordered by k with weakly increasing
// dimension, and an unnormalized joint density pi(k, x_k). The marginal model
// PMF and exact conditional samplers are optional capabilities; they exist for
// targets where they are known (synthetic targets, ideal runs).
class NestedTarget {
 public:
  virtual ~NestedTarget() = default;

  virtual int k_min() const = 0;
  virtual int k_max() const = 0;
  virtual int dim(int k) const = 0;
  virtual double log_joint(int k, const ParamVector& x) const = 0;

  virtual bool has_model_pmf() const { return false; }
  virtual double log_model_pmf(int /*k*/) const {
    throw std::logic_error("target has no marginal model PMF");
  }

  virtual bool has_conditional_sampler() const { return false; }
  virtual ParamVector sample_conditional(int /*k*/, RngStream& /*rng*/) const {
    throw std::logic_error("target has no conditional sampler");
  }

  // a valid (not necessarily typical) parameter vector for model k, used for
  // chain initialization and validation probes
  virtual ParamVector default_params(int k) const {
    return ParamVector(static_cast<std::size_t>(dim(k)), 0.0);
  }

  bool in_support(int k) const { return k >= k_min() && k <= k_max(); }
};

// pi(.|k)-invariant parameter update used in step 2.(a) of the samplers.
class ParamKernel {
 public:
  virtual ~ParamKernel() = default;
  // One update in place; returns whether the proposal was accepted.
  virtual bool step(int k, ParamVector& x, RngStream& rng) const = 0;
};

// Target whose models carry no parameters; its joint density is the model PMF
// itself. Running the vanilla kernels on it reproduces the ideal samplers.
class IdealPmfTarget final : public NestedTarget {
 public:
  explicit IdealPmfTarget(Pmf pmf) : pmf_(std::move(pmf)) {}

  int k_min() const override { return pmf_.k_min(); }
  int k_max() const override { return pmf_.k_max(); }
  int dim(int) const override { return 0; }
  double log_joint(int k, const ParamVector&) const override {
    return pmf_.log_prob(k);
  }
  bool has_model_pmf() const override { return true; }
  double log_model_pmf(int k) const override { return pmf_.log_prob(k); }
  bool has_conditional_sampler() const override { return true; }
  ParamVector sample_conditional(int, RngStream&) const override { return {}; }

  const Pmf& pmf() const { return pmf_; }

 private:
  Pmf pmf_;
};

struct ValidationReport {
  bool has_pmf = false;
  double pmf_residual = 0.0;          // |sum_k pi(k) - 1|
  bool nested = true;                 // dim(k+1) >= dim(k) for all k
  std::vector<int> nestedness_violations;
  bool log_joint_finite = true;       // at probe points
  std::vector<int> nonfinite_models;
  std::vector<std::string> findings;

  bool ok(double pmf_tol = 1e-10) const {
    return (!has_pmf || pmf_residual <= pmf_tol) && nested && log_joint_finite;
  }
};

// Collects findings; never throws for target defects.
inline ValidationReport validate_target(const NestedTarget& target,
                                        std::uint64_t probe_seed = 0) {
  ValidationReport rep;
  RngStream rng(probe_seed, 0x7a11da7e);

  if (target.has_model_pmf()) {
    rep.has_pmf = true;
    double total = 0.0;
    for (int k = target.k_min(); k <= target.k_max(); ++k)
      total += std::exp(target.log_model_pmf(k));
    rep.pmf_residual = std::abs(total - 1.0);
    if (rep.pmf_residual > 1e-10)
      rep.findings.push_back("model PMF normalization residual " +
                             std::to_string(rep.pmf_residual));
  }

  for (int k = target.k_min(); k < target.k_max(); ++k) {
    if (target.dim(k + 1) < target.dim(k)) {
      rep.nested = false;
      rep.nestedness_violations.push_back(k + 1);
      rep.findings.push_back("dim(" + std::to_string(k + 1) + ") < dim(" +
                             std::to_string(k) + "): family not nested");
    }
  }

  for (int k = target.k_min(); k <= target.k_max(); ++k) {
    ParamVector x = target.has_conditional_sampler()
                        ? target.sample_conditional(k, rng)
                        : target.default_params(k);
    if (!std::isfinite(target.log_joint(k, x))) {
      rep.log_joint_finite = false;
      rep.nonfinite_models.push_back(k);
      rep.findings.push_back("log_joint not finite at probe point for k=" +
                             std::to_string(k));
    }
  }
  return rep;
}

}  // namespace nrj
