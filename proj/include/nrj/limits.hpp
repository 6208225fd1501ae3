#pragma once

// Scaling-limit verification harness: the discretized-normal target family,
// the limiting Langevin diffusion (reversible chains, speed n) and zig-zag
// process (lifted chains, speed sqrt(n)), chain rescaling, and two-sample
// Kolmogorov-Smirnov comparison of fixed-time marginals.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nrj/kernels.hpp"
#include "nrj/numerics.hpp"
#include "nrj/pmf.hpp"
#include "nrj/rng.hpp"

namespace nrj {

// The reference density f_S is the standard normal: (log f_S)'(x) = -x.
inline double log_fs_prime(double x) { return -x; }

struct DiscretizedTarget {
  Pmf pmf;         // on {1, ..., floor(sqrt(n) log n)}
  double psi;      // centring, floor(sqrt(n) log n) / 2
  double sqrt_n;

  double rescale(int k) const { return (k - psi) / sqrt_n; }
  int nearest_state(double z) const {
    const int k = static_cast<int>(std::lround(z * sqrt_n + psi));
    return std::clamp(k, pmf.k_min(), pmf.k_max());
  }
};

// pi^n(k) proportional to f_S((k - psi(n)) / sqrt(n)) with
// psi(n) = floor(sqrt(n) log n) / 2.
inline DiscretizedTarget build_discretized_target(int n) {
  if (n < 100) throw std::invalid_argument("discretized target needs n >= 100");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const int k_top = static_cast<int>(std::floor(sqrt_n * std::log(n)));
  const double psi = k_top / 2.0;
  std::vector<double> w(static_cast<std::size_t>(k_top));
  for (int k = 1; k <= k_top; ++k) {
    const double z = (k - psi) / sqrt_n;
    w[static_cast<std::size_t>(k - 1)] = std::exp(-0.5 * z * z);
  }
  return {Pmf(1, std::move(w)), psi, sqrt_n};
}

struct RescaledPath {
  std::vector<double> time;
  std::vector<double> value;
  std::vector<int> direction;  // lifted processes only; empty otherwise
};

// Euler-Maruyama simulation of
//   dZ = ((1 - tau)/2) (log f_S(Z))' dt + sqrt(1 - tau) dB,
// recorded at multiples of `record_dt`. z0 = NaN draws Z(0) ~ f_S.
inline RescaledPath simulate_langevin(double tau, double dt, double horizon,
                                      RngStream& rng,
                                      double z0 = std::numeric_limits<double>::quiet_NaN(),
                                      double record_dt = 1.0) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("simulate_langevin: dt and horizon must be > 0");
  RescaledPath path;
  double z = std::isnan(z0) ? rng.normal() : z0;
  const double drift_scale = 0.5 * (1.0 - tau);
  const double diff = std::sqrt((1.0 - tau) * dt);
  const std::int64_t steps = static_cast<std::int64_t>(std::llround(horizon / dt));
  const std::int64_t stride =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(record_dt / dt)));
  path.time.push_back(0.0);
  path.value.push_back(z);
  for (std::int64_t i = 1; i <= steps; ++i) {
    z += drift_scale * log_fs_prime(z) * dt + diff * rng.normal();
    if (i % stride == 0) {
      path.time.push_back(static_cast<double>(i) * dt);
      path.value.push_back(z);
    }
  }
  return path;
}

// Zig-zag process with drift (1 - tau) y and direction-flip rate
// (1 - tau) max(0, -y (log f_S)'(x)) = (1 - tau) max(0, y x) for the normal
// f_S. Event times are drawn by exact inversion of the integrated linear
// rate. Recorded at multiples of record_dt; z0 = NaN draws (Z, y)(0) from
// f_S x U{-1, +1}.
inline RescaledPath simulate_zigzag(double tau, double horizon, RngStream& rng,
                                    double z0 = std::numeric_limits<double>::quiet_NaN(),
                                    double record_dt = 1.0) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("simulate_zigzag: horizon must be > 0");
  RescaledPath path;
  double x = std::isnan(z0) ? rng.normal() : z0;
  int y = rng.uniform() < 0.5 ? -1 : +1;
  const double c = 1.0 - tau;  // speed and rate scale
  double t = 0.0;
  double next_record = 0.0;
  auto record_until = [&](double t_stop) {
    while (next_record <= t_stop + 1e-12 && next_record <= horizon + 1e-12) {
      path.time.push_back(next_record);
      path.value.push_back(x + y * c * (next_record - t));
      path.direction.push_back(y);
      next_record += record_dt;
    }
  };
  if (c <= 0.0) {  // tau = 1: frozen path
    record_until(horizon);
    return path;
  }
  while (t < horizon) {
    // flip rate along the ray x(s) = x + y c s is c max(0, y x + c s)
    const double e = -std::log(rng.uniform());
    const double yx = y * x;
    double s;
    if (yx >= 0.0) {
      s = (-yx + std::sqrt(yx * yx + 2.0 * e)) / c;
    } else {
      s = (-yx + std::sqrt(2.0 * e)) / c;  // rate is zero until y x + c s = 0
    }
    const double t_flip = t + s;
    record_until(std::min(t_flip, horizon));
    if (t_flip >= horizon) break;
    x += y * c * s;
    y = -y;
    t = t_flip;
  }
  return path;
}

// K-path rescaling: Z(t) = (k_path[floor(speed t)] - psi) / sqrt(n).
// Reversible chains use speed = n, lifted ones speed = sqrt(n).
inline RescaledPath rescale_chain(std::span<const int> k_path, int n,
                                  double psi, double speed,
                                  double horizon, double record_dt = 1.0) {
  RescaledPath path;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  for (double t = 0.0; t <= horizon + 1e-12; t += record_dt) {
    const auto idx = static_cast<std::size_t>(std::floor(speed * t));
    if (idx >= k_path.size())
      throw std::invalid_argument("rescale_chain: path shorter than speed*horizon");
    path.time.push_back(t);
    path.value.push_back((k_path[idx] - psi) / sqrt_n);
  }
  return path;
}

// Two-sample Kolmogorov-Smirnov statistic. Ties (within and across samples,
// e.g. lattice-valued chains) advance both counters together before the
// difference is measured.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (i < a.size() && j < b.size())
      v = std::min(a[i], b[j]);
    else
      v = i < a.size() ? a[i] : b[j];
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

// one-sample Kolmogorov-Smirnov statistic against a cdf
template <class Cdf>
double ks_distance_to_cdf(std::vector<double> a, Cdf&& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max(d, std::abs((i + 1.0) / n - f));
    d = std::max(d, std::abs(static_cast<double>(i) / n - f));
  }
  return d;
}

}  // namespace nrj
