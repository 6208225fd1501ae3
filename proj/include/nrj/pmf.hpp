#pragma once

// Probability mass function on a contiguous integer support {k_min, ..., k_max}.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrj/numerics.hpp"
#include "nrj/rng.hpp"

namespace nrj {

class Pmf {
 public:
  Pmf() = default;
  Pmf(int k_min, std::vector<double> probs) : k_min_(k_min), p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("Pmf: empty support");
    normalize();
  }

  static Pmf uniform(int k_min, int k_max) {
    return Pmf(k_min, std::vector<double>(
                          static_cast<std::size_t>(k_max - k_min + 1), 1.0));
  }

  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(p_.size()) - 1; }
  std::size_t size() const { return p_.size(); }
  bool contains(int k) const { return k >= k_min() && k <= k_max(); }

  double prob(int k) const { return contains(k) ? p_[idx(k)] : 0.0; }
  double log_prob(int k) const { return contains(k) ? logp_[idx(k)] : neg_inf; }

  const std::vector<double>& probs() const { return p_; }

  int sample(RngStream& rng) const {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p_.size(); ++i) {
      acc += p_[i];
      if (u < acc) return k_min_ + static_cast<int>(i);
    }
    return k_max();
  }

  // `k,probability` rows; '#' lines ignored; probabilities must sum to 1
  // within tol and the support must be contiguous.
  static Pmf load_csv(const std::string& path, double tol = 1e-9) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Pmf: cannot open " + path);
    std::vector<std::pair<int, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line.rfind("k,", 0) == 0) continue;  // header
      std::istringstream ss(line);
      int k;
      char comma;
      double p;
      if (!(ss >> k >> comma >> p) || comma != ',')
        throw std::runtime_error("Pmf: bad row in " + path + ": " + line);
      rows.emplace_back(k, p);
    }
    if (rows.empty()) throw std::runtime_error("Pmf: no rows in " + path);
    std::sort(rows.begin(), rows.end());
    std::vector<double> probs;
    probs.reserve(rows.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].first != rows[i - 1].first + 1)
        throw std::runtime_error("Pmf: support not contiguous in " + path);
      probs.push_back(rows[i].second);
      total += rows[i].second;
    }
    if (std::abs(total - 1.0) > tol)
      throw std::runtime_error("Pmf: probabilities in " + path +
                               " sum to " + std::to_string(total));
    return Pmf(rows.front().first, std::move(probs));
  }

  void save_csv(const std::string& path, const std::string& comment = "") const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("Pmf: cannot write " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "k,probability\n";
    char buf[64];
    for (std::size_t i = 0; i < p_.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p_[i]);
      out << (k_min_ + static_cast<int>(i)) << "," << buf << "\n";
    }
  }

 private:
  std::size_t idx(int k) const { return static_cast<std::size_t>(k - k_min_); }

  void normalize() {
    double total = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("Pmf: negative mass");
      total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("Pmf: zero total mass");
    for (double& v : p_) v /= total;
    logp_.resize(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i)
      logp_[i] = p_[i] > 0.0 ? std::log(p_[i]) : neg_inf;
  }

  int k_min_ = 0;
  std::vector<double> p_;
  std::vector<double> logp_;
};

}  // namespace nrj
