#pragma once

// Multiple change-point model for event times on [0, L]: a non-homogeneous
// Poisson process whose intensity is a step function with k change-points.
// Priors: K ~ Poisson(lambda) truncated to {0..k_max}; positions distributed
// as the even-numbered order statistics of 2k+1 uniforms on [0, L]; heights
// iid Gamma(alpha, beta). Jumps split one step in two (or merge two back)
// with the weighted-geometric-mean height constraint.
//
// Parameter layout for model k: x = [s_1 .. s_k, h_1 .. h_{k+1}], so
// dim(k) = 2k + 1.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrj/annealed.hpp"
#include "nrj/jump.hpp"
#include "nrj/numerics.hpp"
#include "nrj/target.hpp"

namespace nrj {

// One nonnegative decimal event time per line; '#' lines and blank lines are
// ignored. Values must lie in [0, L]. Output is sorted.
inline std::vector<double> load_event_times(std::istream& in, double L,
                                            const std::string& name = "input") {
  std::vector<double> times;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ss(line);
    double t;
    std::string rest;
    if (!(ss >> t) || (ss >> rest && !rest.empty()))
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": unparsable event time: " + line);
    if (t < 0.0)
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": negative event time");
    if (t > L)
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": event time exceeds the observation window");
    times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  return times;
}

inline std::vector<double> load_event_times(const std::string& path, double L) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event file: " + path);
  return load_event_times(in, L, path);
}

struct ChangePointModel {
  std::vector<double> t;  // sorted event times
  double L = 1.0;
  double lambda = 3.0;    // Poisson prior mean for K
  int k_max = 30;
  double alpha = 1.0;     // Gamma shape
  double beta = 200.0;    // Gamma rate

  std::vector<double> log_prior_k;  // truncated Poisson, normalized
  double log_gamma_const = 0.0;     // alpha log beta - lgamma(alpha)

  ChangePointModel(std::vector<double> events, double length,
                   double prior_mean = 3.0, int max_k = 30,
                   double gamma_shape = 1.0, double gamma_rate = 200.0)
      : t(std::move(events)), L(length), lambda(prior_mean), k_max(max_k),
        alpha(gamma_shape), beta(gamma_rate) {
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    if (!(lambda > 0.0) || !(alpha > 0.0) || !(beta > 0.0))
      throw std::invalid_argument("hyperparameters must be positive");
    if (!std::is_sorted(t.begin(), t.end()))
      std::sort(t.begin(), t.end());
    if (!t.empty() && (t.front() < 0.0 || t.back() > L))
      throw std::invalid_argument("event times outside [0, L]");
    log_prior_k.resize(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k)
      log_prior_k[static_cast<std::size_t>(k)] =
          -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    const double lz = log_sum_exp(log_prior_k);
    for (double& v : log_prior_k) v -= lz;
    log_gamma_const = alpha * std::log(beta) - std::lgamma(alpha);
  }

  std::size_t n() const { return t.size(); }

  // events in [lo, hi)
  double count_in(double lo, double hi) const {
    const auto a = std::lower_bound(t.begin(), t.end(), lo);
    const auto b = std::lower_bound(t.begin(), t.end(), hi);
    return static_cast<double>(b - a);
  }
};

namespace cp {

inline int dim(int k) { return 2 * k + 1; }

inline std::span<const double> positions(int k, const ParamVector& x) {
  return {x.data(), static_cast<std::size_t>(k)};
}
inline std::span<const double> heights(int k, const ParamVector& x) {
  return {x.data() + k, static_cast<std::size_t>(k) + 1};
}

inline bool valid_params(int k, const ParamVector& x, double L) {
  if (static_cast<int>(x.size()) != dim(k)) return false;
  double prev = 0.0;
  for (int j = 0; j < k; ++j) {
    if (!(x[static_cast<std::size_t>(j)] > prev)) return false;
    prev = x[static_cast<std::size_t>(j)];
  }
  if (!(prev < L)) return false;
  for (int j = 0; j <= k; ++j)
    if (!(x[static_cast<std::size_t>(k + j)] > 0.0)) return false;
  return true;
}

}  // namespace cp

// sum_i log lambda(t_i) - int_0^L lambda, for the step intensity
inline double log_likelihood(int k, const ParamVector& x,
                             const ChangePointModel& m) {
  if (!cp::valid_params(k, x, m.L)) return neg_inf;
  const auto s = cp::positions(k, x);
  const auto h = cp::heights(k, x);
  double ll = 0.0;
  double lo = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double hi = j < k ? s[static_cast<std::size_t>(j)] : m.L;
    const double hj = h[static_cast<std::size_t>(j)];
    ll += m.count_in(lo, hi) * std::log(hj) - hj * (hi - lo);
    lo = hi;
  }
  return ll;
}

// truncated-Poisson mass for k, even-order-statistics density for the
// positions, iid Gamma(alpha, beta) for the heights
inline double log_prior(int k, const ParamVector& x,
                        const ChangePointModel& m) {
  if (k < 0 || k > m.k_max) return neg_inf;
  if (!cp::valid_params(k, x, m.L)) return neg_inf;
  const auto s = cp::positions(k, x);
  const auto h = cp::heights(k, x);
  double lp = m.log_prior_k[static_cast<std::size_t>(k)];
  lp += std::lgamma(2.0 * k + 2.0) - (2.0 * k + 1.0) * std::log(m.L);
  double lo = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double hi = j < k ? s[static_cast<std::size_t>(j)] : m.L;
    lp += std::log(hi - lo);
    lo = hi;
  }
  for (int j = 0; j <= k; ++j) {
    const double hj = h[static_cast<std::size_t>(j)];
    lp += m.log_gamma_const + (m.alpha - 1.0) * std::log(hj) - m.beta * hj;
  }
  return lp;
}

class CpTarget final : public NestedTarget {
 public:
  explicit CpTarget(const ChangePointModel& model) : m_(model) {}

  int k_min() const override { return 0; }
  int k_max() const override { return m_.k_max; }
  int dim(int k) const override { return cp::dim(k); }

  double log_joint(int k, const ParamVector& x) const override {
    if (!in_support(k)) return neg_inf;
    const double lp = log_prior(k, x, m_);
    if (!std::isfinite(lp)) return neg_inf;
    return lp + log_likelihood(k, x, m_);
  }

  const ChangePointModel& model() const { return m_; }

  // equally spaced change-points at the empirical event rate
  ParamVector default_params(int k) const override {
    ParamVector x(static_cast<std::size_t>(cp::dim(k)));
    for (int j = 0; j < k; ++j)
      x[static_cast<std::size_t>(j)] = m_.L * (j + 1.0) / (k + 1.0);
    const double rate =
        (static_cast<double>(m_.n()) + m_.alpha) / (m_.L + m_.beta);
    for (int j = 0; j <= k; ++j) x[static_cast<std::size_t>(k + j)] = rate;
    return x;
  }

 private:
  const ChangePointModel& m_;
};

// Split/merge jumps. Up from model b: s* ~ U(0, L) picks the step to split,
// u_p ~ U(0, 1) sets the height ratio (1-u_p)/u_p, and the two new heights
// obey the length-weighted geometric-mean constraint. Down is the exact
// deterministic inverse after drawing which change-point to remove.
class CpJumpSpec final : public JumpSpec {
 public:
  explicit CpJumpSpec(const ChangePointModel& model) : m_(model) {}

  ParamVector sample_aux_up(int b, const ParamVector& x,
                            RngStream& rng) const override {
    const auto s = cp::positions(b, x);
    const double tol = 1e-12 * m_.L;
    double star = 0.0;
    bool degenerate = true;
    while (degenerate) {  // collisions have measure zero; resample
      star = rng.uniform(0.0, m_.L);
      degenerate = star < tol || star > m_.L - tol;
      for (double sj : s) degenerate = degenerate || std::abs(star - sj) < tol;
    }
    return {star, rng.uniform()};
  }

  double log_aux_up(int, const ParamVector&, const ParamVector&) const override {
    return -std::log(m_.L);
  }

  ParamVector sample_aux_down(int b, const ParamVector&,
                              RngStream& rng) const override {
    return {static_cast<double>(rng.uniform_index(
        static_cast<std::uint64_t>(b) + 1))};
  }

  double log_aux_down(int b, const ParamVector&,
                      const ParamVector&) const override {
    return -std::log(static_cast<double>(b) + 1.0);
  }

  double forward(int b, const ParamVector& x, const ParamVector& u,
                 ParamVector& y, ParamVector& u_rev) const override {
    const double star = u[0], up = u[1];
    const auto s = cp::positions(b, x);
    const auto h = cp::heights(b, x);
    int jstar = 0;
    while (jstar < b && s[static_cast<std::size_t>(jstar)] < star) ++jstar;
    // star lies in (s_{jstar}, s_{jstar+1}) with sentinels 0 and L
    const double lo = jstar > 0 ? s[static_cast<std::size_t>(jstar - 1)] : 0.0;
    const double hi = jstar < b ? s[static_cast<std::size_t>(jstar)] : m_.L;
    const double w_left = (star - lo) / (hi - lo);
    const double log_r = std::log1p(-up) - std::log(up);
    const double log_h = std::log(h[static_cast<std::size_t>(jstar)]);
    const double h_left = std::exp(log_h - (1.0 - w_left) * log_r);
    const double h_right = std::exp(log_h + w_left * log_r);

    y.clear();
    y.reserve(static_cast<std::size_t>(cp::dim(b + 1)));
    for (int j = 0; j < jstar; ++j) y.push_back(s[static_cast<std::size_t>(j)]);
    y.push_back(star);
    for (int j = jstar; j < b; ++j) y.push_back(s[static_cast<std::size_t>(j)]);
    for (int j = 0; j < jstar; ++j) y.push_back(h[static_cast<std::size_t>(j)]);
    y.push_back(h_left);
    y.push_back(h_right);
    for (int j = jstar + 1; j <= b; ++j)
      y.push_back(h[static_cast<std::size_t>(j)]);

    u_rev = {static_cast<double>(jstar)};
    return 2.0 * std::log(h_left + h_right) - log_h;
  }

  double inverse(int b, const ParamVector& y, const ParamVector& u_rev,
                 ParamVector& x, ParamVector& u) const override {
    const int jstar = static_cast<int>(u_rev[0]);
    const auto s = cp::positions(b + 1, y);
    const auto h = cp::heights(b + 1, y);
    const double star = s[static_cast<std::size_t>(jstar)];
    const double lo = jstar > 0 ? s[static_cast<std::size_t>(jstar - 1)] : 0.0;
    const double hi =
        jstar + 1 < b + 1 ? s[static_cast<std::size_t>(jstar + 1)] : m_.L;
    const double w_left = (star - lo) / (hi - lo);
    const double h_left = h[static_cast<std::size_t>(jstar)];
    const double h_right = h[static_cast<std::size_t>(jstar + 1)];
    const double log_h =
        w_left * std::log(h_left) + (1.0 - w_left) * std::log(h_right);

    x.clear();
    x.reserve(static_cast<std::size_t>(cp::dim(b)));
    for (int j = 0; j <= b; ++j)
      if (j != jstar) x.push_back(s[static_cast<std::size_t>(j)]);
    for (int j = 0; j < jstar; ++j) x.push_back(h[static_cast<std::size_t>(j)]);
    x.push_back(std::exp(log_h));
    for (int j = jstar + 2; j <= b + 1; ++j)
      x.push_back(h[static_cast<std::size_t>(j)]);

    u = {star, h_left / (h_left + h_right)};
    return log_h - 2.0 * std::log(h_left + h_right);
  }

 private:
  const ChangePointModel& m_;
};

// One Metropolis update of a randomly chosen height or position. Positions
// move uniformly between their neighbours (symmetric); heights move
// log-uniformly on [-1/2, 1/2], contributing a Hastings factor h'/h.
class CpParamKernel final : public ParamKernel {
 public:
  explicit CpParamKernel(const ChangePointModel& model) : m_(model) {}

  bool step(int k, ParamVector& x, RngStream& rng) const override {
    const bool move_height = k == 0 || rng.uniform() < 0.5;
    const double cur = log_prior(k, x, m_) + log_likelihood(k, x, m_);
    if (move_height) {
      const std::size_t j =
          static_cast<std::size_t>(k) + rng.uniform_index(
              static_cast<std::uint64_t>(k) + 1);
      const double v = rng.uniform(-0.5, 0.5);
      const double old = x[j];
      x[j] = old * std::exp(v);
      const double prop = log_prior(k, x, m_) + log_likelihood(k, x, m_);
      if (std::log(rng.uniform()) <= prop - cur + v) return true;
      x[j] = old;
      return false;
    }
    const std::size_t j = rng.uniform_index(static_cast<std::uint64_t>(k));
    const double lo = j > 0 ? x[j - 1] : 0.0;
    const double hi = j + 1 < static_cast<std::size_t>(k) ? x[j + 1] : m_.L;
    const double old = x[j];
    x[j] = rng.uniform(lo, hi);
    const double prop = log_prior(k, x, m_) + log_likelihood(k, x, m_);
    if (std::log(rng.uniform()) <= prop - cur) return true;
    x[j] = old;
    return false;
  }

 private:
  const ChangePointModel& m_;
};

// Bridge context for boundary b <-> b+1, working in the (y, j*)
// parameterization. The point caches per-interval event counts and log
// heights of the y side in `scratch`, so each bracket evaluation is O(k)
// with no searches; position moves refresh the two affected counts.
//
// scratch layout: [counts (b+2), log_h (b+2)]
class CpBridgeContext final : public BridgeContext {
 public:
  CpBridgeContext(const ChangePointModel& model, const CpJumpSpec& jumps, int b)
      : m_(model), jumps_(jumps), b_(b) {}

  BridgePoint start_up(const ParamVector& x, RngStream& rng) const override {
    BridgePoint z;
    z.x = x;
    z.u = jumps_.sample_aux_up(b_, x, rng);
    z.log_jac_fwd = jumps_.forward(b_, z.x, z.u, z.y, z.u_rev);
    init_scratch(z);
    return z;
  }

  BridgePoint start_down(const ParamVector& y, RngStream& rng) const override {
    BridgePoint z;
    z.y = y;
    z.u_rev = jumps_.sample_aux_down(b_, y, rng);
    z.log_jac_fwd = -jumps_.inverse(b_, z.y, z.u_rev, z.x, z.u);
    init_scratch(z);
    return z;
  }

  double log_bracket_source(const BridgePoint& z) const override {
    return source_from_cache(z);
  }

  double log_bracket_dest(const BridgePoint& z) const override {
    return dest_from_cache(z);
  }

  // One blockwise sweep invariant for rho^(gamma): in random order, one
  // height move, one position move, and a re-draw of which step is merged.
  // The current density is carried across the three moves.
  void inner_step(double gamma, BridgePoint& z, RngStream& rng) const override {
    int order[3] = {0, 1, 2};
    for (int i = 2; i > 0; --i)
      std::swap(order[i], order[static_cast<int>(rng.uniform_index(
                              static_cast<std::uint64_t>(i) + 1))]);
    double cur = log_rho_cached(gamma, z);
    for (int move : order) {
      switch (move) {
        case 0: height_move(gamma, z, rng, cur); break;
        case 1: position_move(gamma, z, rng, cur); break;
        case 2: jstar_move(gamma, z, rng, cur); break;
      }
    }
    sync_mirror(z);
  }

 private:
  int n_heights() const { return b_ + 2; }

  double ys(const BridgePoint& z, int i) const {  // with sentinels
    if (i <= 0) return 0.0;
    if (i >= b_ + 2) return m_.L;
    return z.y[static_cast<std::size_t>(i - 1)];
  }
  double& yh(BridgePoint& z, int j) const {  // height j, 0-based
    return z.y[static_cast<std::size_t>(b_ + 1 + j)];
  }
  double yh(const BridgePoint& z, int j) const {
    return z.y[static_cast<std::size_t>(b_ + 1 + j)];
  }
  double& count(BridgePoint& z, int i) const {
    return z.scratch[static_cast<std::size_t>(i)];
  }
  double count(const BridgePoint& z, int i) const {
    return z.scratch[static_cast<std::size_t>(i)];
  }
  double& logh(BridgePoint& z, int j) const {
    return z.scratch[static_cast<std::size_t>(n_heights() + j)];
  }
  double logh(const BridgePoint& z, int j) const {
    return z.scratch[static_cast<std::size_t>(n_heights() + j)];
  }
  int jstar(const BridgePoint& z) const { return static_cast<int>(z.u_rev[0]); }

  void init_scratch(BridgePoint& z) const {
    const int m = n_heights();
    z.scratch.assign(static_cast<std::size_t>(2 * m), 0.0);
    for (int i = 0; i < m; ++i)
      count(z, i) = m_.count_in(ys(z, i), ys(z, i + 1));
    for (int j = 0; j < m; ++j) logh(z, j) = std::log(yh(z, j));
  }

  // log pi(b+1, y) + log q_down from the caches
  double dest_from_cache(const BridgePoint& z) const {
    const int m = n_heights();
    double v = m_.log_prior_k[static_cast<std::size_t>(b_ + 1)] +
               std::lgamma(2.0 * (b_ + 1) + 2.0) -
               (2.0 * (b_ + 1) + 1.0) * std::log(m_.L);
    for (int i = 0; i < m; ++i) {
      const double gap = ys(z, i + 1) - ys(z, i);
      const double h = yh(z, i);
      const double lh = logh(z, i);
      v += std::log(gap);                                   // position prior
      v += m_.log_gamma_const + (m_.alpha - 1.0) * lh - m_.beta * h;
      v += count(z, i) * lh - h * gap;                      // likelihood
    }
    return v - std::log(static_cast<double>(b_) + 1.0);     // q_down
  }

  // log pi(b, x) + log q_up - log|J_fwd|, with the x side derived from the
  // y caches by merging the pair at j*
  double source_from_cache(const BridgePoint& z) const {
    const int m = n_heights();
    const int js = jstar(z);
    const double gap_l = ys(z, js + 1) - ys(z, js);
    const double gap_r = ys(z, js + 2) - ys(z, js + 1);
    const double w_left = gap_l / (gap_l + gap_r);
    const double log_h_merged =
        w_left * logh(z, js) + (1.0 - w_left) * logh(z, js + 1);
    const double h_merged = std::exp(log_h_merged);

    double v = m_.log_prior_k[static_cast<std::size_t>(b_)] +
               std::lgamma(2.0 * b_ + 2.0) -
               (2.0 * b_ + 1.0) * std::log(m_.L);
    for (int i = 0; i < m; ++i) {
      if (i == js) continue;
      const double gap =
          i == js + 1 ? gap_l + gap_r : ys(z, i + 1) - ys(z, i);
      const double cnt =
          i == js + 1 ? count(z, js) + count(z, js + 1) : count(z, i);
      const double h = i == js + 1 ? h_merged : yh(z, i);
      const double lh = i == js + 1 ? log_h_merged : logh(z, i);
      v += std::log(gap);
      v += m_.log_gamma_const + (m_.alpha - 1.0) * lh - m_.beta * h;
      v += cnt * lh - h * gap;
    }
    v -= std::log(m_.L);  // q_up: s* uniform, u_p uniform
    // minus log|J_fwd| = -(2 log(h_l + h_r) - log h_merged)
    const double h_l = yh(z, js), h_r = yh(z, js + 1);
    v += log_h_merged - 2.0 * std::log(h_l + h_r);
    return v;
  }

  double log_rho_cached(double gamma, const BridgePoint& z) const {
    const double a = source_from_cache(z);
    const double b = dest_from_cache(z);
    const double v = (1.0 - gamma) * a + gamma * b;
    return std::isnan(v) ? neg_inf : v;
  }

  void height_move(double gamma, BridgePoint& z, RngStream& rng,
                   double& cur) const {
    const int j = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(n_heights())));
    const double v = rng.uniform(-0.5, 0.5);
    const double old_h = yh(z, j), old_lh = logh(z, j);
    yh(z, j) = old_h * std::exp(v);
    logh(z, j) = old_lh + v;
    const double prop = log_rho_cached(gamma, z);
    if (std::log(rng.uniform()) <= prop - cur + v) {
      cur = prop;
      return;
    }
    yh(z, j) = old_h;
    logh(z, j) = old_lh;
  }

  void position_move(double gamma, BridgePoint& z, RngStream& rng,
                     double& cur) const {
    const int j = 1 + static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(b_) + 1));  // position index 1..b+1
    const double lo = ys(z, j - 1), hi = ys(z, j + 1);
    const double s_new = rng.uniform(lo, hi);
    if (s_new <= lo || s_new >= hi) return;  // fp edge, certain reject anyway
    const double old_s = z.y[static_cast<std::size_t>(j - 1)];
    const double old_cl = count(z, j - 1), old_cr = count(z, j);
    z.y[static_cast<std::size_t>(j - 1)] = s_new;
    count(z, j - 1) = m_.count_in(lo, s_new);
    count(z, j) = m_.count_in(s_new, hi);
    const double prop = log_rho_cached(gamma, z);
    if (std::log(rng.uniform()) <= prop - cur) {
      cur = prop;
      return;
    }
    z.y[static_cast<std::size_t>(j - 1)] = old_s;
    count(z, j - 1) = old_cl;
    count(z, j) = old_cr;
  }

  void jstar_move(double gamma, BridgePoint& z, RngStream& rng,
                  double& cur) const {
    const int proposal = static_cast<int>(rng.uniform_index(
        static_cast<std::uint64_t>(b_) + 1));
    if (proposal == jstar(z)) return;  // accepted no-op
    const double old = z.u_rev[0];
    z.u_rev[0] = static_cast<double>(proposal);
    const double prop = log_rho_cached(gamma, z);
    if (std::log(rng.uniform()) <= prop - cur) {
      cur = prop;
      return;
    }
    z.u_rev[0] = old;
  }

  // rebuild (x, u, log_jac) from (y, j*) after a sweep
  void sync_mirror(BridgePoint& z) const {
    z.log_jac_fwd = -jumps_.inverse(b_, z.y, z.u_rev, z.x, z.u);
  }

  const ChangePointModel& m_;
  const CpJumpSpec& jumps_;
  int b_;
};

class CpBridgeFactory final : public BridgeFactory {
 public:
  CpBridgeFactory(const ChangePointModel& model, const CpJumpSpec& jumps) {
    for (int b = 0; b < model.k_max; ++b)
      contexts_.push_back(
          std::make_unique<CpBridgeContext>(model, jumps, b));
  }

  const BridgeContext& boundary(int b) const override {
    return *contexts_.at(static_cast<std::size_t>(b));
  }

 private:
  std::vector<std::unique_ptr<CpBridgeContext>> contexts_;
};

// Everything needed to run any sampler on a change-point model.
struct CpProblem {
  std::unique_ptr<ChangePointModel> model;
  std::unique_ptr<CpTarget> target;
  std::unique_ptr<CpJumpSpec> jumps;
  std::unique_ptr<CpBridgeFactory> bridges;
  std::unique_ptr<CpParamKernel> params;
  SymmetricModelProposal symmetric_g;
};

inline CpProblem make_cp_problem(std::vector<double> events, double L,
                                 double lambda = 3.0, int k_max = 30,
                                 double alpha = 1.0, double beta = 200.0) {
  CpProblem p;
  p.model = std::make_unique<ChangePointModel>(std::move(events), L, lambda,
                                               k_max, alpha, beta);
  p.target = std::make_unique<CpTarget>(*p.model);
  p.jumps = std::make_unique<CpJumpSpec>(*p.model);
  p.bridges = std::make_unique<CpBridgeFactory>(*p.model, *p.jumps);
  p.params = std::make_unique<CpParamKernel>(*p.model);
  return p;
}

}  // namespace nrj
