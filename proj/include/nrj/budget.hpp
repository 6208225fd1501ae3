#pragma once

// Compute-budget equivalence between the multi-path bridge sampler and the
// vanilla samplers: one bridge switch costs about 4.5 T vanilla switch
// attempts (3 block updates per inner step, times 1.5 for the reverse
// branch), so a run of I iterations at parameter-update probability tau
// matches I tau + I (1 - tau) 4.5 T vanilla iterations, with the vanilla tau
// shrunk to keep the number of parameter updates equal.

#include <stdexcept>

namespace nrj {

struct BudgetMatch {
  double iterations = 0.0;
  double tau = 0.0;
};

inline BudgetMatch match_budget(double iterations, double tau, int T) {
  if (iterations < 1.0) throw std::invalid_argument("match_budget: I < 1");
  if (tau < 0.0 || tau >= 1.0)
    throw std::invalid_argument("match_budget: tau must lie in [0, 1)");
  if (T < 1) throw std::invalid_argument("match_budget: T < 1");
  BudgetMatch out;
  out.iterations = iterations * tau + iterations * (1.0 - tau) * 4.5 * T;
  out.tau = iterations * tau / out.iterations;
  return out;
}

}  // namespace nrj
