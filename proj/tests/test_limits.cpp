#include <doctest.h>

#include <cmath>
#include <vector>

#include "nrj/limits.hpp"
#include "nrj/numerics.hpp"

using namespace nrj;

TEST_CASE("discretized target") {
  SUBCASE("normalization") {
    const auto t = build_discretized_target(10000);
    double total = 0.0;
    for (int k = t.pmf.k_min(); k <= t.pmf.k_max(); ++k) total += t.pmf.prob(k);
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  SUBCASE("symmetry about an integer centring") {
    // n = 900: floor(30 log 900) = 204 states, psi = 102 exactly
    const auto t = build_discretized_target(900);
    REQUIRE(t.psi == doctest::Approx(102.0));
    for (int j = 1; j <= 80; ++j)
      CHECK(std::abs(t.pmf.prob(102 + j) - t.pmf.prob(102 - j)) < 1e-18);
  }
  SUBCASE("discrete log-derivative matches (log f_S)' in the bulk") {
    const int n = 10000;
    const auto t = build_discretized_target(n);
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const int centre = static_cast<int>(t.psi);
    double worst = 0.0;
    for (int k = centre - 2 * static_cast<int>(sqrt_n);
         k <= centre + 2 * static_cast<int>(sqrt_n); ++k) {
      const double lhs =
          sqrt_n * (t.pmf.prob(k + 1) / t.pmf.prob(k) - 1.0);
      const double rhs = log_fs_prime(t.rescale(k));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    CHECK(worst < 5.0 / sqrt_n);
  }
  SUBCASE("n too small") {
    CHECK_THROWS_AS(build_discretized_target(50), std::invalid_argument);
  }
}

TEST_CASE("langevin simulator") {
  SUBCASE("tau=1 freezes the path") {
    RngStream rng(1);
    const auto p = simulate_langevin(1.0, 1e-2, 10.0, rng, 0.7);
    for (double v : p.value) CHECK(v == 0.7);
  }
  SUBCASE("deterministic under a fixed stream") {
    RngStream r1(2), r2(2);
    const auto a = simulate_langevin(0.0, 1e-3, 5.0, r1);
    const auto b = simulate_langevin(0.0, 1e-3, 5.0, r2);
    CHECK(a.value == b.value);
  }
  SUBCASE("stationary variance is 1 (pooled replicate paths)") {
    std::vector<double> samples;
    for (int rep = 0; rep < 16; ++rep) {
      RngStream rng(1000 + static_cast<std::uint64_t>(rep));
      const auto p = simulate_langevin(0.0, 1e-3, 1000.0, rng);
      samples.insert(samples.end(), p.value.begin() + 1, p.value.end());
    }
    CHECK(std::abs(mean_var(samples).var - 1.0) < 0.05);
  }
}

TEST_CASE("zigzag simulator") {
  SUBCASE("motion towards the mode is deterministic (flip rate zero)") {
    int inward = 0;
    for (int rep = 0; rep < 50; ++rep) {
      RngStream rng(10 + static_cast<std::uint64_t>(rep));
      const RescaledPath p = simulate_zigzag(0.0, 1.0, rng, 1.5);
      if (p.direction.front() == -1) {
        ++inward;
        CHECK(p.value.back() == doctest::Approx(0.5).epsilon(1e-12));
      }
    }
    CHECK(inward > 10);
  }
  SUBCASE("long-run position marginal is f_S") {
    std::vector<double> samples;
    for (int rep = 0; rep < 8; ++rep) {
      RngStream rng(300 + static_cast<std::uint64_t>(rep));
      const auto p = simulate_zigzag(0.0, 10000.0, rng,
                                     std::numeric_limits<double>::quiet_NaN(),
                                     2.5);
      samples.insert(samples.end(), p.value.begin(), p.value.end());
    }
    CHECK(ks_distance_to_cdf(samples, [](double x) { return normal_cdf(x); }) <
          0.02);
  }
  SUBCASE("tau=1 freezes the path") {
    RngStream rng(11);
    const auto p = simulate_zigzag(1.0, 10.0, rng, -0.3);
    for (double v : p.value) CHECK(v == -0.3);
  }
}

TEST_CASE("rescale_chain") {
  SUBCASE("constant path at the centring is identically zero") {
    const auto t = build_discretized_target(900);  // psi = 102
    std::vector<int> path(2000, 102);
    const auto p = rescale_chain(path, 900, t.psi, 30.0, 10.0);
    for (double v : p.value) CHECK(v == 0.0);
  }
  SUBCASE("one step up moves Z by exactly 1/sqrt(n)") {
    const auto t = build_discretized_target(900);
    std::vector<int> path(100, 102);
    path[50] = 103;
    // record at the raw step resolution: speed 1, record_dt 1
    const auto p = rescale_chain(path, 900, t.psi, 1.0, 99.0, 1.0);
    CHECK(p.value[50] - p.value[49] == doctest::Approx(1.0 / 30.0));
  }
  SUBCASE("path shorter than speed*horizon is an error") {
    std::vector<int> path(10, 1);
    CHECK_THROWS_AS(rescale_chain(path, 900, 102.0, 30.0, 10.0),
                    std::invalid_argument);
  }
}

TEST_CASE("ks_distance") {
  SUBCASE("identical samples give zero") {
    std::vector<double> a{1.0, 2.0, 2.0, 3.0};
    CHECK(ks_distance(a, a) == 0.0);
  }
  SUBCASE("disjoint supports give one") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{10.0, 11.0};
    CHECK(ks_distance(a, b) == 1.0);
  }
  SUBCASE("two iid normal samples of size 1e4 sit below 0.03") {
    RngStream rng(12);
    std::vector<double> a(10000), b(10000);
    for (double& v : a) v = rng.normal();
    for (double& v : b) v = rng.normal();
    CHECK(ks_distance(a, b) < 0.03);
  }
  SUBCASE("ties across samples are handled jointly") {
    // half the mass of both samples sits on the same atom
    std::vector<double> a{0.5, 0.5, 1.0, 2.0};
    std::vector<double> b{0.5, 0.5, 1.5, 2.5};
    CHECK(ks_distance(a, b) == doctest::Approx(0.25));
  }
  SUBCASE("empty sample is an error") {
    std::vector<double> a{1.0};
    std::vector<double> empty;
    CHECK_THROWS_AS(ks_distance(a, empty), std::invalid_argument);
  }
}
