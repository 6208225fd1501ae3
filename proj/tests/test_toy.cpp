#include <doctest.h>

#include <cmath>

#include "nrj/numerics.hpp"
#include "nrj/targets/toy.hpp"

using namespace nrj;

TEST_CASE("phi_pmf construction") {
  SUBCASE("phi=2, k_max=3 gives (0.25, 0.5, 0.25)") {
    const auto fam = phi_pmf(2.0, 3);
    CHECK(fam.k_star == 2);
    CHECK(fam.pmf.prob(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fam.pmf.prob(2) == doctest::Approx(0.50).epsilon(1e-12));
    CHECK(fam.pmf.prob(3) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("mass sums to one and the family is symmetric about the mode") {
    for (double phi : {1.5, 2.0, 7.0}) {
      const auto fam = phi_pmf(phi, 31);
      double total = 0.0;
      for (int k = 1; k <= 31; ++k) total += fam.pmf.prob(k);
      CHECK(std::abs(total - 1.0) < 1e-12);
      for (int j = 1; j <= 15; ++j)
        CHECK(std::abs(fam.pmf.prob(fam.k_star - j) -
                       fam.pmf.prob(fam.k_star + j)) < 1e-15);
    }
  }
  SUBCASE("constant ratio 1/phi on both sides of the mode") {
    const double phi = 3.5;
    const auto fam = phi_pmf(phi, 21);
    for (int k = fam.k_star; k < 21; ++k)
      CHECK(std::abs(fam.pmf.prob(k + 1) / fam.pmf.prob(k) - 1.0 / phi) <
            1e-12);
    for (int k = fam.k_star; k > 1; --k)
      CHECK(std::abs(fam.pmf.prob(k - 1) / fam.pmf.prob(k) - 1.0 / phi) <
            1e-12);
  }
  SUBCASE("tail mass outside the central three states at phi=7, k_max=31") {
    const auto fam = phi_pmf(7.0, 31);
    const double inside = fam.pmf.prob(fam.k_star - 1) +
                          fam.pmf.prob(fam.k_star) +
                          fam.pmf.prob(fam.k_star + 1);
    CHECK(std::abs((1.0 - inside) - 0.0357) < 2e-4);
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(phi_pmf(1.0, 11), std::invalid_argument);
    CHECK_THROWS_AS(phi_pmf(0.5, 11), std::invalid_argument);
    CHECK_THROWS_AS(phi_pmf(2.0, 10), std::invalid_argument);  // even
    CHECK_THROWS_AS(phi_pmf(2.0, 1), std::invalid_argument);
  }
}

TEST_CASE("toy jump noise closed form") {
  SUBCASE("sigma=1 is exactly noiseless for any u") {
    for (double u : {-3.0, -0.5, 0.0, 1.7, 10.0})
      CHECK(toy_log_noise(u, 1.0) == 0.0);
  }
  SUBCASE("u=0 pins the noise to sigma") {
    CHECK(std::exp(toy_log_noise(0.0, 2.0)) == doctest::Approx(2.0));
    CHECK(std::exp(toy_log_noise(0.0, 0.5)) == doctest::Approx(0.5));
  }
  SUBCASE("matches the density ratio definition") {
    for (double sigma : {0.25, 0.7, 3.0}) {
      for (double u : {-2.0, 0.3, 1.5}) {
        const double direct =
            normal_logpdf(u) - normal_logpdf(u, 0.0, sigma);
        CHECK(std::abs(toy_log_noise(u, sigma) - direct) < 1e-12);
      }
    }
  }
}

TEST_CASE("toy bridge variance endpoints and midpoint") {
  const double sigma = 2.0;
  CHECK(toy_bridge_variance(0.0, sigma) == doctest::Approx(sigma * sigma));
  CHECK(toy_bridge_variance(1.0, sigma) == doctest::Approx(1.0));
  CHECK(toy_bridge_variance(0.5, sigma) == doctest::Approx(1.6).epsilon(1e-12));
}

TEST_CASE("exact conditional sampler moments (CLT oracle)") {
  ToyTarget target(phi_pmf(2.0, 11), 1.0);
  RngStream rng(2718);
  const int k = 3;
  std::vector<double> coord0;
  coord0.reserve(100000);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const ParamVector x = target.sample_conditional(k, rng);
    REQUIRE(x.size() == 3);
    coord0.push_back(x[0]);
    sum += x[1];
    sum2 += x[2] * x[2];
  }
  const auto mv = mean_var(coord0);
  CHECK(std::abs(mv.mean) < 0.01);
  CHECK(std::abs(mv.var - 1.0) < 0.015);
  CHECK(std::abs(sum / 100000) < 0.01);
  CHECK(std::abs(sum2 / 100000 - 1.0) < 0.015);
}

TEST_CASE("uniform variant and the smallest models") {
  const auto fam = uniform_phi_pmf(11);
  for (int k = 1; k <= 11; ++k)
    CHECK(fam.pmf.prob(k) == doctest::Approx(1.0 / 11));
  ToyTarget t(fam, 1.0);
  CHECK(t.dim(1) == 1);
  CHECK(std::isfinite(t.log_joint(1, {0.0})));
  CHECK(t.log_joint(0, {}) == neg_inf);
  CHECK(t.log_joint(12, {}) == neg_inf);
}
