#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace nrj {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double half_log_two_pi = 0.91893853320467274178;

inline double normal_logpdf(double x, double mean = 0.0, double sd = 1.0) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - half_log_two_pi;
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// log(sum_i exp(v_i)), stable; empty input or all -inf give -inf
inline double log_sum_exp(std::span<const double> v) {
  double m = neg_inf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline double log_sum_exp(double a, double b) {
  const double v[2] = {a, b};
  return log_sum_exp(std::span<const double>(v, 2));
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // unbiased (n-1 denominator)
  std::size_t n = 0;
};

inline MeanVar mean_var(std::span<const double> xs) {
  MeanVar out;
  out.n = xs.size();
  if (out.n == 0) return out;
  // shifted by the first element: exact for constant input
  const double pivot = xs[0];
  double m = 0.0;
  for (double x : xs) m += x - pivot;
  m /= static_cast<double>(out.n);
  double s2 = 0.0;
  for (double x : xs) s2 += (x - pivot - m) * (x - pivot - m);
  out.mean = pivot + m;
  out.var = out.n > 1 ? s2 / static_cast<double>(out.n - 1) : 0.0;
  return out;
}

// slope of least-squares fit y = a + b x
inline double regression_slope(std::span<const double> x,
                               std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace nrj
