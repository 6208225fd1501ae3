#pragma once

// Chain-output diagnostics. ESS is 1/IAT with the integrated autocorrelation
// time estimated by the initial-monotone-positive-sequence truncation on
// paired lags; for non-reversible chains it is a descriptive statistic. All
// headline metrics run on the switch-proposal subchain of K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrj/numerics.hpp"
#include "nrj/pmf.hpp"
#include "nrj/rng.hpp"
#include "nrj/trace.hpp"

namespace nrj {

enum class SeriesFlag : std::uint8_t { None, Constant, Antithetic, Periodic };

inline const char* series_flag_name(SeriesFlag f) {
  switch (f) {
    case SeriesFlag::None: return "none";
    case SeriesFlag::Constant: return "constant";
    case SeriesFlag::Antithetic: return "antithetic";
    case SeriesFlag::Periodic: return "periodic";
  }
  return "?";
}

struct IatResult {
  double iat = 1.0;        // clamped below at 1
  double raw = 1.0;        // before the clamp
  SeriesFlag flag = SeriesFlag::None;
  int truncation_lag = 0;  // largest lag entering the sum
};

namespace detail {

// smallest exact period of the series, or 0 when aperiodic within the bound
template <class T>
std::size_t exact_period(std::span<const T> xs, std::size_t max_period) {
  const std::size_t n = xs.size();
  for (std::size_t p = 1; p <= std::min(max_period, n / 2); ++p) {
    bool ok = true;
    for (std::size_t i = 0; i + p < n; ++i) {
      if (xs[i] != xs[i + p]) {
        ok = false;
        break;
      }
    }
    if (ok) return p;
  }
  return 0;
}

// Geyer truncation over an autocovariance oracle. acov(j) must return the
// (biased) lag-j autocovariance.
template <class Acov>
IatResult iat_from_autocov(Acov&& acov, std::size_t n, std::size_t max_lag) {
  IatResult out;
  if (n < 10) throw std::invalid_argument("iat: series shorter than 10");
  const double var0 = acov(0);
  if (!(var0 > 0.0)) {
    out.iat = static_cast<double>(n);
    out.raw = static_cast<double>(n);
    out.flag = SeriesFlag::Constant;
    return out;
  }
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double rho1 = 0.0;
  std::size_t lag = 0;
  for (std::size_t m = 0; 2 * m + 1 < std::min(n, max_lag); ++m) {
    const double r0 = acov(2 * m) / var0;
    const double r1 = acov(2 * m + 1) / var0;
    if (m == 0) rho1 = r1;
    double pair = r0 + r1;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);  // enforce monotone decay
    prev = pair;
    sum += pair;
    lag = 2 * m + 1;
  }
  out.raw = -1.0 + 2.0 * sum;
  out.truncation_lag = static_cast<int>(lag);
  out.iat = std::max(1.0, out.raw);
  if (out.raw < 1.0 && rho1 < 0.0) out.flag = SeriesFlag::Antithetic;
  return out;
}

}  // namespace detail

inline IatResult iat_full(std::span<const double> xs,
                          std::size_t max_lag = 1 << 16) {
  const std::size_t n = xs.size();
  if (n < 10) throw std::invalid_argument("iat: series shorter than 10");
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = xs[i] - mean;
  auto acov = [&](std::size_t j) {
    double s = 0.0;
    for (std::size_t i = 0; i + j < n; ++i) s += c[i] * c[i + j];
    return s / static_cast<double>(n);
  };
  IatResult out = detail::iat_from_autocov(acov, n, max_lag);
  if (out.flag == SeriesFlag::None) {
    const std::size_t p = detail::exact_period(xs, std::size_t{8192});
    if (p > 0) out.flag = SeriesFlag::Periodic;
  }
  return out;
}

inline double iat(std::span<const double> xs) { return iat_full(xs).iat; }

// Integer series (model indicators): exact integer accumulators, no centered
// copy. Used on long switch subchains.
inline IatResult iat_int(std::span<const int> xs,
                         std::size_t max_lag = 1 << 16) {
  const std::size_t n = xs.size();
  if (n < 10) throw std::invalid_argument("iat: series shorter than 10");
  std::vector<std::int64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + xs[i];
  const double mean =
      static_cast<double>(prefix[n]) / static_cast<double>(n);
  auto acov = [&](std::size_t j) {
    std::int64_t dot = 0;
    const std::size_t m = n - j;
    for (std::size_t i = 0; i < m; ++i)
      dot += static_cast<std::int64_t>(xs[i]) * xs[i + j];
    const double head = static_cast<double>(prefix[m]);
    const double tail = static_cast<double>(prefix[n] - prefix[j]);
    return (static_cast<double>(dot) - mean * (head + tail) +
            static_cast<double>(m) * mean * mean) /
           static_cast<double>(n);
  };
  IatResult out = detail::iat_from_autocov(acov, n, max_lag);
  if (out.flag == SeriesFlag::None) {
    const std::size_t p = detail::exact_period(xs, std::size_t{8192});
    if (p > 0) out.flag = SeriesFlag::Periodic;
  }
  return out;
}

struct EssResult {
  double ess = 0.0;  // per switch-proposal iteration, in (0, 1]
  IatResult iat;
  std::size_t n = 0;  // switch proposals entering the estimate
};

inline EssResult ess_of_series(std::span<const int> k_series) {
  if (k_series.size() < 100)
    throw std::invalid_argument(
        "ess: fewer than 100 switch-proposal records");
  EssResult out;
  out.iat = iat_int(k_series);
  out.n = k_series.size();
  out.ess = 1.0 / out.iat.iat;
  return out;
}

// ESS of the k-subsequence restricted to switch-proposal iterations after
// burn-in.
inline EssResult ess_per_switch_iteration(const ChainTrace& trace,
                                          std::int64_t burn_in = 0) {
  const std::vector<int> ks = trace.switch_k_series(burn_in);
  return ess_of_series(ks);
}

inline double tv_distance(const Pmf& p, const Pmf& q) {
  if (p.k_min() != q.k_min() || p.size() != q.size())
    throw std::invalid_argument("tv_distance: support mismatch");
  double s = 0.0;
  for (int k = p.k_min(); k <= p.k_max(); ++k)
    s += std::abs(p.prob(k) - q.prob(k));
  return 0.5 * s;
}

// (TV(P) - TV(ideal)) / TV(ideal); NaN when the baseline is zero
inline double relative_tv_difference(double tv_p, double tv_ideal) {
  if (tv_ideal == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (tv_p - tv_ideal) / tv_ideal;
}

inline Pmf empirical_pmf(std::span<const int> ks, int k_min, int k_max) {
  std::vector<double> counts(static_cast<std::size_t>(k_max - k_min + 1), 0.0);
  for (int k : ks) {
    if (k < k_min || k > k_max)
      throw std::invalid_argument("empirical_pmf: k outside support");
    counts[static_cast<std::size_t>(k - k_min)] += 1.0;
  }
  return Pmf(k_min, std::move(counts));
}

struct RoundTripStats {
  std::int64_t count = 0;
  double mean_length = 0.0;  // accepted k-moves per completed excursion
};

// Completed low -> high -> low excursions of the k-path. Length counts the
// moves the indicator actually makes (holds contribute nothing), so the
// deterministic lifted sweep on a flat target scores exactly 2(k_max - 1).
inline RoundTripStats roundtrip_stats(std::span<const int> k_path, int low,
                                      int high) {
  if (k_path.empty()) throw std::invalid_argument("roundtrip_stats: empty path");
  RoundTripStats out;
  std::int64_t total_moves = 0;
  bool armed = false;       // inside an excursion (since last visit to low)
  bool seen_high = false;
  std::int64_t moves = 0;
  for (std::size_t i = 0; i < k_path.size(); ++i) {
    if (i > 0 && k_path[i] != k_path[i - 1] && armed) ++moves;
    if (k_path[i] == low) {
      if (armed && seen_high) {
        ++out.count;
        total_moves += moves;
      }
      armed = true;
      seen_high = false;
      moves = 0;
    } else if (k_path[i] == high && armed) {
      seen_high = true;
    }
  }
  if (out.count > 0)
    out.mean_length =
        static_cast<double>(total_moves) / static_cast<double>(out.count);
  return out;
}

struct ReplicateVariance {
  double variance = 0.0;
  double ci_lo = 0.0;  // percentile bootstrap, 2.5%
  double ci_hi = 0.0;  // 97.5%
};

inline ReplicateVariance replicate_variance(std::span<const double> estimates,
                                            int bootstrap = 2000,
                                            std::uint64_t seed = 0x5eed) {
  if (estimates.size() < 10)
    throw std::invalid_argument("replicate_variance: fewer than 10 replicates");
  ReplicateVariance out;
  out.variance = mean_var(estimates).var;
  RngStream rng(seed, 0xb007);
  std::vector<double> vars(static_cast<std::size_t>(bootstrap));
  std::vector<double> resample(estimates.size());
  for (int b = 0; b < bootstrap; ++b) {
    for (double& v : resample)
      v = estimates[rng.uniform_index(estimates.size())];
    vars[static_cast<std::size_t>(b)] = mean_var(resample).var;
  }
  std::sort(vars.begin(), vars.end());
  out.ci_lo = vars[static_cast<std::size_t>(0.025 * bootstrap)];
  out.ci_hi = vars[static_cast<std::size_t>(0.975 * bootstrap)];
  return out;
}

// One-sided bootstrap comparison: fraction of resamples in which
// var(a*) > var(b*). The ordering "var(a) <= var(b)" holds at level alpha
// when this fraction is below 1 - alpha.
inline double bootstrap_prob_var_greater(std::span<const double> a,
                                         std::span<const double> b,
                                         int bootstrap = 4000,
                                         std::uint64_t seed = 0x5eed) {
  RngStream rng(seed, 0x7a12);
  int greater = 0;
  std::vector<double> ra(a.size()), rb(b.size());
  for (int it = 0; it < bootstrap; ++it) {
    for (double& v : ra) v = a[rng.uniform_index(a.size())];
    for (double& v : rb) v = b[rng.uniform_index(b.size())];
    if (mean_var(ra).var > mean_var(rb).var) ++greater;
  }
  return static_cast<double>(greater) / bootstrap;
}

// One-sided bootstrap on means: fraction of resamples with mean(a*) <= mean(b*)
inline double bootstrap_prob_mean_leq(std::span<const double> a,
                                      std::span<const double> b,
                                      int bootstrap = 4000,
                                      std::uint64_t seed = 0x5eed) {
  RngStream rng(seed, 0x3ea5);
  int leq = 0;
  std::vector<double> ra(a.size()), rb(b.size());
  for (int it = 0; it < bootstrap; ++it) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      ma += a[rng.uniform_index(a.size())];
    for (std::size_t i = 0; i < b.size(); ++i)
      mb += b[rng.uniform_index(b.size())];
    if (ma / static_cast<double>(a.size()) <= mb / static_cast<double>(b.size()))
      ++leq;
  }
  return static_cast<double>(leq) / bootstrap;
}

struct DiagnosticsReport {
  EssResult ess;
  Pmf empirical;
  double tv_to_reference = std::numeric_limits<double>::quiet_NaN();
  double relative_tv = std::numeric_limits<double>::quiet_NaN();
  double switch_acceptance = 0.0;
  RoundTripStats roundtrips;
};

// Full report over a trace; TV fields are filled when a reference PMF is
// given, and the relative TV additionally needs the ideal baseline TV.
inline DiagnosticsReport diagnostics_report(
    const ChainTrace& trace, std::int64_t burn_in, int k_min, int k_max,
    const Pmf* reference = nullptr,
    double tv_ideal = std::numeric_limits<double>::quiet_NaN()) {
  DiagnosticsReport rep;
  rep.ess = ess_per_switch_iteration(trace, burn_in);
  std::vector<int> ks;
  for (const auto& r : trace.records)
    if (r.iter > burn_in) ks.push_back(r.k);
  rep.empirical = empirical_pmf(ks, k_min, k_max);
  if (reference) {
    rep.tv_to_reference = tv_distance(rep.empirical, *reference);
    if (!std::isnan(tv_ideal))
      rep.relative_tv = relative_tv_difference(rep.tv_to_reference, tv_ideal);
  }
  rep.switch_acceptance = trace.switch_acceptance_rate(burn_in);
  const auto path = trace.k_path();
  rep.roundtrips = roundtrip_stats(path, k_min, k_max);
  return rep;
}

inline std::vector<std::pair<std::string, double>> report_metric_rows(
    const DiagnosticsReport& rep) {
  return {
      {"ess_per_switch_iteration", rep.ess.ess},
      {"iat", rep.ess.iat.iat},
      {"iat_truncation_lag", static_cast<double>(rep.ess.iat.truncation_lag)},
      {"switch_proposals", static_cast<double>(rep.ess.n)},
      {"series_flag", static_cast<double>(rep.ess.iat.flag)},
      {"tv_to_reference", rep.tv_to_reference},
      {"relative_tv_difference", rep.relative_tv},
      {"switch_acceptance_rate", rep.switch_acceptance},
      {"roundtrip_count", static_cast<double>(rep.roundtrips.count)},
      {"roundtrip_mean_length", rep.roundtrips.mean_length},
  };
}

}  // namespace nrj
