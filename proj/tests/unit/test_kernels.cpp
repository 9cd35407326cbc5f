#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "snqesa/kernels.hpp"

namespace k = snq::kernels;

TEST_SUITE("kernels") {
  TEST_CASE("dispatch reports a valid isa") {
    const auto isa = k::active_isa();
    CHECK((isa == k::Isa::scalar || isa == k::Isa::avx2));
    if (isa == k::Isa::avx2) CHECK(k::avx2_available());
  }

  TEST_CASE("scalar kernels match naive loops") {
    std::vector<double> x{3, -1, 2, 2, 7, 0.5};
    CHECK(k::scalar::count_less_equal(x, 2.0) == 4);
    CHECK(k::scalar::sum(x) == doctest::Approx(13.5));
    CHECK(k::scalar::dot(x, x) == doctest::Approx(9 + 1 + 4 + 4 + 49 + 0.25));
    double g = 0;
    for (double v : x) g += std::exp(-0.5 * (v - 1) * (v - 1) * 4);
    CHECK(k::scalar::gaussian_kernel_sum(x, 1.0, 2.0) == doctest::Approx(g).epsilon(1e-14));
  }

  TEST_CASE("simd and scalar variants agree") {
    if (!k::avx2_available()) return;
    std::mt19937_64 eng(42);
    std::normal_distribution<double> nd;
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 1000u, 4099u}) {
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = nd(eng);
      for (auto& v : y) v = nd(eng) * 3;
      // ties at the threshold
      if (n > 4) x[2] = x[3] = 0.25;
      for (double t : {-1.0, 0.0, 0.25, 2.0})
        CHECK(k::avx2::count_less_equal(x, t) == k::scalar::count_less_equal(x, t));
      const double s = k::scalar::sum(x), a = k::avx2::sum(x);
      CHECK(std::fabs(a - s) <= 1e-12 * (1 + k::scalar::dot(x, x)));
      const double d = k::scalar::dot(x, y), e = k::avx2::dot(x, y);
      CHECK(std::fabs(d - e) <= 1e-12 * (1 + std::sqrt(k::scalar::dot(x, x) * k::scalar::dot(y, y))));
      for (double ib : {0.1, 1.0, 40.0}) {
        const double gs = k::scalar::gaussian_kernel_sum(x, 0.3, ib);
        const double ga = k::avx2::gaussian_kernel_sum(x, 0.3, ib);
        CHECK(std::fabs(gs - ga) <= 1e-12 * std::max(1.0, gs));
      }
    }
  }
}
