#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "snqesa/baselines.hpp"
#include "snqesa/ci_engine.hpp"

using namespace snq;

namespace {
QuantileSpec make(double tau, double alpha) {
  QuantileSpec s;
  s.tau = tau;
  s.alpha = alpha;
  return s;
}

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> x(n);
  for (auto& v : x) v = nd(eng);
  return x;
}

// brute force: widest l and narrowest u meeting each tail separately
std::pair<std::size_t, std::size_t> brute_equal_tailed(int n, double tau, double alpha) {
  std::size_t l = 0, u = n + 1;
  for (int a = 0; a <= n + 1; ++a)
    if (oracle::below(a, n, tau) <= alpha / 2 + 1e-12) l = std::max<std::size_t>(l, a);
  for (int b = n + 1; b >= 0; --b)
    if (oracle::at_or_above(b, n, tau) <= alpha / 2 + 1e-12) u = std::min<std::size_t>(u, b);
  return {l, u};
}
}  // namespace

TEST_SUITE("ci_engine") {
  TEST_CASE("equal-tailed rank pair matches enumeration") {
    for (int n : {5, 12, 30})
      for (double tau : {0.1, 0.5, 0.9})
        for (double a : {0.01, 0.05, 0.1}) {
          const auto got = exact_rank_pair(n, tau, a);
          const auto ref = brute_equal_tailed(n, tau, a);
          CHECK(got.first == ref.first);
          CHECK(got.second == ref.second);
          CHECK(rank_pair_coverage(n, tau, got.first, got.second) >= 1 - a - 1e-12);
        }
  }

  TEST_CASE("small median design") {
    const auto p = exact_rank_pair(5, 0.5, 0.05);
    // P(K<1) = 1/32 > 0.025, so the lower rank is open
    CHECK(p.first == 0);
    CHECK(p.second == 6);
    const auto r = exact_binomial_ci(Sample({1, 2, 3, 4, 5}), make(0.5, 0.05));
    CHECK(std::isinf(r.lower));
    CHECK(std::isinf(r.upper));
  }

  TEST_CASE("exact interval uses order statistics at the rank pair") {
    const Sample s(normals(100, 9));
    const auto r = exact_binomial_ci(s, make(0.95, 0.05));
    const auto p = exact_rank_pair(100, 0.95, 0.05);
    CHECK(r.lower == s.order_stat(p.first));
    CHECK(r.upper == s.order_stat(p.second));
    CHECK(r.method == "snqesa_disc");
  }

  TEST_CASE("minimum length never exceeds equal-tailed length") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      const Sample s(normals(20 + seed, seed));
      for (double tau : {0.25, 0.5, 0.9}) {
        const auto e = exact_binomial_ci(s, make(tau, 0.1));
        const auto m = min_length_ci(s, make(tau, 0.1));
        if (std::isfinite(e.length())) CHECK(m.length() <= e.length() + 1e-15);
        const auto mp = min_length_rank_pair(s.sorted(), tau, 0.1);
        CHECK(rank_pair_coverage(s.n(), tau, mp.first, mp.second) >= 0.9 - 1e-12);
      }
    }
  }

  TEST_CASE("symmetric sample at the median gives the equal-tailed pair") {
    std::vector<double> x(21);
    for (int i = 0; i < 21; ++i) x[i] = i - 10;
    const Sample s(x);
    CHECK(min_length_rank_pair(s.sorted(), 0.5, 0.05) == exact_rank_pair(21, 0.5, 0.05));
  }

  TEST_CASE("closed endpoints solve the tail equations") {
    const auto sp = make(0.9, 0.05);
    const Sample s(normals(200, 21));
    const auto r = snqesa_ci(s, sp);
    REQUIRE_FALSE(r.open_lo);
    REQUIRE_FALSE(r.open_hi);
    const TailConfig cfg = TailConfig::from_spec(sp);
    CHECK(std::fabs(interpolated_tail(s, r.lower, sp, cfg).p_up - 0.025) <= 1e-6);
    CHECK(std::fabs(interpolated_tail(s, r.upper, sp, cfg).p_down - 0.025) <= 1e-6);
    const double h = 1e-4;
    CHECK(interpolated_tail(s, r.lower - h, sp, cfg).p_up <= 0.025 + 1e-9);
    CHECK(interpolated_tail(s, r.lower + h, sp, cfg).p_up >= 0.025 - 1e-9);
    CHECK(r.lower < quantile_type8(s, 0.9));
    CHECK(r.upper > quantile_type8(s, 0.9));
  }

  TEST_CASE("intervals nest as alpha decreases") {
    const Sample s(normals(80, 4));
    const auto a = snqesa_ci(s, make(0.5, 0.2));
    const auto b = snqesa_ci(s, make(0.5, 0.05));
    const auto c = snqesa_ci(s, make(0.5, 0.01));
    CHECK(b.lower <= a.lower);
    CHECK(b.upper >= a.upper);
    CHECK(c.lower <= b.lower);
    CHECK(c.upper >= b.upper);
  }

  TEST_CASE("two points pin both ends to the order statistics") {
    const auto r = snqesa_ci(Sample({2.0, 5.0}), make(0.5, 0.05));
    CHECK(r.lower == 2.0);
    CHECK(r.upper == 5.0);
    CHECK(r.open_lo);
    CHECK(r.open_hi);
  }

  TEST_CASE("constant sample") {
    const auto r = snqesa_ci(Sample({3, 3, 3, 3}), make(0.5, 0.05));
    CHECK(r.lower == 3);
    CHECK(r.upper == 3);
    CHECK(r.diagnostic == "degenerate_sample");
  }

  TEST_CASE("cached count roots reproduce the direct call") {
    const auto sp = make(0.95, 0.05);
    const TailConfig cfg = TailConfig::from_spec(sp);
    const auto roots = snqesa_count_roots(150, sp, cfg);
    for (std::uint64_t seed = 1; seed < 6; ++seed) {
      const Sample s(normals(150, seed));
      const auto a = snqesa_ci(s, sp);
      const auto b = snqesa_ci(s, sp, cfg, roots);
      CHECK(a.lower == b.lower);
      CHECK(a.upper == b.upper);
    }
  }
}
