#include <doctest.h>

#include <random>

#include "snqesa/binom_tilt.hpp"
#include "snqesa/common.hpp"

using namespace snq;

TEST_SUITE("binom_tilt") {
  TEST_CASE("h vanishes at tau and is linear at the median") {
    for (double tau : {0.05, 0.5, 0.9}) CHECK(h_eval(tau, tau, 77) == 0.0);
    CHECK(h_eval(0.4, 0.5, 100) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(invert_h(2.0, 0.5, 100) == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(invert_h(0.0, 0.37, 10) == 0.37);
  }

  TEST_CASE("derivatives match finite differences") {
    for (double tau : {0.1, 0.5, 0.95})
      for (double u = 0.05; u < 0.96; u += 0.1) {
        const double e = 1e-6;
        const double fd = (h_eval(u + e, tau, 50) - h_eval(u - e, tau, 50)) / (2 * e);
        CHECK(h_prime(u, tau, 50) == doctest::Approx(fd).epsilon(1e-6));
        const double fd2 = (h_prime(u + e, tau, 50) - h_prime(u - e, tau, 50)) / (2 * e);
        CHECK(h_second(u, tau, 50) == doctest::Approx(fd2).epsilon(1e-5));
      }
  }

  TEST_CASE("inversion round trip") {
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> ud(0.001, 0.999);
    for (int i = 0; i < 1000; ++i) {
      const double u = ud(eng), tau = ud(eng);
      const std::size_t n = 2 + eng() % 5000;
      const auto inv = invert_h_checked(h_eval(u, tau, n), tau, n);
      CHECK_FALSE(inv.at_guard);
      CHECK(inv.u == doctest::Approx(u).epsilon(1e-10));
    }
  }

  TEST_CASE("values outside the range of h hit the guard") {
    const auto inv = invert_h_checked(50.0, 0.5, 100);  // range is (-10, 10)
    CHECK(inv.at_guard);
    CHECK_THROWS_AS(h_eval(0.0, 0.5, 10), InputError);
  }

  TEST_CASE("KL and signed scalars") {
    CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
    const auto z = binom_scalars(0.3, 0.3, 20);
    CHECK(z.r == 0.0);
    CHECK(z.q_pm == 0.0);
    CHECK(z.kl == 0.0);
    const auto b = binom_scalars(0.9, 0.95, 100);
    CHECK(b.r < 0);
    CHECK(b.q_pm < 0);
    CHECK(b.r == doctest::Approx(-std::sqrt(2 * 100 * kl_bernoulli(0.9, 0.95))).epsilon(1e-14));
    // q = logit difference times sqrt(n u (1-u))
    const double q = std::log(0.9 * 0.05 / (0.95 * 0.1)) * std::sqrt(100 * 0.9 * 0.1);
    CHECK(b.q_pm == doctest::Approx(q).epsilon(1e-13));
  }
}
