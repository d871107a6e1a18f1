#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "weyl/arcs.hpp"
#include "weyl/kernel.hpp"

using namespace weyl;

TEST_CASE("dirichlet approximation basics") {
  SECTION("t = 0") {
    auto a = dirichlet_approx(0.0, 10);
    REQUIRE(a.a == 0);
    REQUIRE(a.q == 1);
    REQUIRE(a.distance == 0.0);
  }
  SECTION("exact rational") {
    auto a = dirichlet_approx(1.0 / 3.0, 10);
    REQUIRE(a.a == 1);
    REQUIRE(a.q == 3);
    REQUIRE(a.distance < 1e-15);
  }
  SECTION("sqrt(2) - 1 at N = 16 gives the convergent 5/12") {
    // continued fraction [0; 2, 2, 2, ...]: convergents 0/1, 1/2, 2/5, 5/12, 12/29
    double t = std::sqrt(2.0) - 1.0;
    auto a = dirichlet_approx(t, 16);
    REQUIRE(a.q == 12);
    REQUIRE(a.a == 5);
    REQUIRE(a.distance == Catch::Approx(std::fabs(t - 5.0 / 12.0)).margin(1e-15));
    REQUIRE(a.distance < 1.0 / (12.0 * 16.0));
  }
  SECTION("arc constraints hold on random samples") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20000; ++trial) {
      double t = rng.uniform01();
      std::int64_t n = rng.uniform_int(1, 4096);
      auto a = dirichlet_approx(t, n);
      CAPTURE(t, n, a.a, a.q);
      REQUIRE(a.q >= 1);
      REQUIRE(a.q <= n);
      REQUIRE(a.a >= 0);
      REQUIRE(a.a < std::max<std::int64_t>(a.q, 1) + (a.q == 1 ? 1 : 0));
      REQUIRE(std::gcd(a.a, a.q) == 1);
      REQUIRE(a.distance < 1.0 / static_cast<double>(a.q * n));
    }
  }
}

TEST_CASE("envelope formula") {
  Envelope env{16, 3, 1, Rational(1)};
  RationalApproximation center{1, 3, 0.0};
  SECTION("arc center value N^d / q^{r/2}") {
    double t = 2 * std::numbers::pi / 3.0;
    REQUIRE(env.value(t, center) ==
            Catch::Approx(std::pow(16.0, 3) / std::sqrt(3.0)).epsilon(1e-12));
  }
  SECTION("q = 1 at t = 0 gives N^d") {
    Envelope e{16, 3, 1, Rational(1)};
    RationalApproximation a{0, 1, 0.0};
    REQUIRE(e.value(0.0, a) == Catch::Approx(std::pow(16.0, 3)).epsilon(1e-12));
  }
  SECTION("explicit off-center arithmetic") {
    // N = 16, q = 3, offset 1/(3*16*2)
    double off = 1.0 / (3.0 * 16.0 * 2.0);
    double t = 2 * std::numbers::pi * (1.0 / 3.0 + off);
    double expect = std::pow(16.0, 3) / (std::sqrt(3.0) * (1.0 + 16.0 * std::sqrt(off)));
    REQUIRE(env.value(t, center) == Catch::Approx(expect).epsilon(1e-12));
  }
  SECTION("monotone in the offset") {
    double prev = 1e300;
    for (double off = 0; off < 0.02; off += 1e-3) {
      double t = 2 * std::numbers::pi * (1.0 / 3.0 + off);
      double v = env.value(t, center);
      REQUIRE(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("counting lemma brute force") {
  SECTION("t = 0 saturates the floor") {
    for (std::int64_t n : {4, 16, 64}) {
      auto rep = counting_sum_check(n, 0.0);
      REQUIRE(rep.lhs == Catch::Approx(static_cast<double>((2 * n + 1) * n * n)));
      REQUIRE(rep.rhs == Catch::Approx(std::pow(static_cast<double>(n), 3)));
      // exact: (2N+1) N^2 / N^3 = 2 + 1/N
      REQUIRE(rep.ratio ==
              Catch::Approx(2.0 + 1.0 / static_cast<double>(n)).epsilon(1e-12));
    }
  }
  SECTION("t = 1/2 at N = 4") {
    auto rep = counting_sum_check(4, 0.5);
    double expect = 0;
    for (std::int64_t n = -4; n <= 4; ++n) {
      double d = std::max(circle_distance(0.5 * n), 0.25);
      expect += 1.0 / (d * d);
    }
    REQUIRE(rep.lhs == Catch::Approx(expect));
    REQUIRE(std::isfinite(rep.ratio));
  }
  SECTION("uniformity across dyadic N") {
    SplitMix64 rng(4242);
    std::vector<double> samples;
    for (int i = 0; i < 2000; ++i) samples.push_back(rng.uniform01());
    double prev_max = 0;
    bool first = true;
    for (std::int64_t n : {16, 64, 256}) {
      double mx = 0;
      for (double t : samples) mx = std::max(mx, counting_sum_check(n, t).ratio);
      if (!first) REQUIRE(mx <= 2.0 * prev_max);
      prev_max = mx;
      first = false;
    }
  }
}

TEST_CASE("weyl sums against the envelope") {
  Cutoff bump = Cutoff::bump();
  auto phi = [&](double x) { return bump(x); };
  SECTION("Z with f = 1 near t = 0") {
    RatMat gram(1, 1);
    gram.at(0, 0) = 1;
    SumCoefficient one{[](const IVec&) { return 1.0; }, 0.0, 1.0};
    auto res = weyl_sum(gram, one, {0.0}, 0.0, 32, 1e-4, {0.0}, phi, 2.0);
    // F ~ c N at the arc center of 0/1; the ratio stays O(1)
    REQUIRE(res.approx.q == 1);
    REQUIRE(res.ratio > 0.05);
    REQUIRE(res.ratio < 4.0);
  }
  SECTION("Gauss-sum depression at t = 2 pi a/q") {
    RatMat gram(1, 1);
    gram.at(0, 0) = 1;
    SumCoefficient one{[](const IVec&) { return 1.0; }, 0.0, 1.0};
    double t = 2 * std::numbers::pi * (1.0 / 5.0);
    // at H = 0 the complete-sum factorization gives
    // |F| ~ (sum phi / q) |sum_{m mod q} e^{-2 pi i m^2 / q}| = sum phi / sqrt(q)
    auto res = weyl_sum(gram, one, {0.0}, 0.0, 64, t, {0.0}, phi, 2.0);
    REQUIRE(res.approx.q == 5);
    double phi_total = 0;
    for (std::int64_t n = -128; n <= 128; ++n)
      phi_total += bump(static_cast<double>(n * n) / 4096.0);
    REQUIRE(std::abs(res.value) ==
            Catch::Approx(phi_total / std::sqrt(5.0)).epsilon(0.05));
    REQUIRE(res.ratio < 4.0);
    // the bound is uniform over H, so other H only push the ratio down
    auto res2 = weyl_sum(gram, one, {0.0}, 0.0, 64, t, {0.3}, phi, 2.0);
    REQUIRE(res2.ratio < 4.0);
  }
  SECTION("difference-bound spot check rejects liars") {
    RatMat gram(1, 1);
    gram.at(0, 0) = 1;
    // claims A = 0 but grows linearly
    SumCoefficient liar{[](const IVec& n) { return static_cast<double>(n[0]); }, 0.0, 1.0};
    REQUIRE_THROWS_AS(weyl_sum(gram, liar, {0.0}, 0.0, 16, 0.1, {0.0}, phi, 2.0),
                      PreconditionError);
  }
  SECTION("A2 weight lattice with the positive-root polynomial") {
    RootSystem rs = RootSystem::build(Series::A, 2);
    RatMat gram = rs.gram_weight();
    SumCoefficient poly{
        [&](const IVec& n) { return to_double(rs.positive_product(n)); },
        static_cast<double>(rs.num_positive_roots()), 4000.0};
    SplitMix64 rng(5);
    double prev_max = 0;
    bool first = true;
    for (std::int64_t n : {8, 16, 32}) {
      double mx = 0;
      for (int i = 0; i < 6; ++i) {
        double t_unit = (i < 3) ? (i / 3.0 + 1e-5) : rng.uniform01();
        double t = 2 * std::numbers::pi * 3.0 * t_unit;  // D = 3 for A2
        std::vector<double> h = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        auto res = weyl_sum(gram, poly, {0.0, 0.0}, 0.0, n, t, h, phi, 2.0, 7 + i);
        mx = std::max(mx, res.ratio);
      }
      if (!first) REQUIRE(mx <= 2.0 * prev_max);
      prev_max = mx;
      first = false;
    }
  }
}
