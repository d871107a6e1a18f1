#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "weyl/characters.hpp"

using namespace weyl;

namespace {

RootSystem su2_paper() {
  RootSystemConfig cfg;
  cfg.normalization = FormNormalization::custom_scale;
  cfg.custom_scale = 2;
  return RootSystem::build(Series::A, 1, cfg);
}

// theta in the standard SU(2) angle; H = theta * w has root coordinate theta/2.
TorusPoint su2_point(const RootSystem& rs, double theta) {
  return make_torus_point(rs, {theta / 2.0});
}

double rel_err(Complex a, Complex b) {
  double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0) return 0;
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("weight multiplicities via the Freudenthal recursion") {
  SECTION("SU(2), lambda = 4w: four weights of multiplicity one") {
    RootSystem rs = su2_paper();
    auto t = weight_multiplicities(rs, {4});
    REQUIRE(t->dimension == 4);
    REQUIRE(t->full.size() == 4);
    for (std::int64_t w : {3, 1, -1, -3}) REQUIRE(t->full.at({w}) == 1);
  }
  SECTION("trivial representation") {
    RootSystem rs = RootSystem::build(Series::B, 2);
    auto t = weight_multiplicities(rs, rs.rho_weight());
    REQUIRE(t->dimension == 1);
    REQUIRE(t->full.size() == 1);
    REQUIRE(t->full.at({0, 0}) == 1);
  }
  SECTION("A2 adjoint: zero weight twice, six roots once") {
    RootSystem rs = RootSystem::build(Series::A, 2);
    auto t = weight_multiplicities(rs, {2, 2});
    REQUIRE(t->dimension == 8);
    REQUIRE(t->full.at({0, 0}) == 2);
    for (const IVec& a : rs.positive_roots_weight()) {
      REQUIRE(t->full.at(a) == 1);
      REQUIRE(t->full.at(ivec_neg(a)) == 1);
    }
  }
  SECTION("totals match the Weyl dimension on random dominant weights") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> coord(1, 5);
    for (auto [series, rank] : {std::pair{Series::A, 2}, {Series::B, 2},
                                {Series::G, 2}, {Series::A, 3}}) {
      RootSystem rs = RootSystem::build(series, rank);
      for (int trial = 0; trial < 4; ++trial) {
        IVec lam(rank);
        for (int i = 0; i < rank; ++i) lam[i] = coord(rng);
        auto t = weight_multiplicities(rs, lam);
        REQUIRE(t->dimension == rs.weyl_dimension(lam).value);
        // support inside the convex hull: |w + rho-shift| bounded by |lambda|
        for (const auto& [w, m] : t->full) {
          REQUIRE(m >= 1);
          REQUIRE(rs.norm2_weight(ivec_add(w, rs.rho_weight())) <= rs.norm2_weight(lam));
        }
      }
    }
  }
}

TEST_CASE("SU(2) closed form sin(m theta)/sin(theta)") {
  RootSystem rs = su2_paper();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 60; ++trial) {
    double theta = unif(rng);
    if (circle_distance(theta / std::numbers::pi) <= 1e-3) continue;
    TorusPoint h = su2_point(rs, theta);
    for (std::int64_t m = 1; m <= 50; m += 7) {
      double expect = std::sin(m * theta) / std::sin(theta);
      Complex q = character_quotient(rs, {m}, h);
      Complex s = character_stable(rs, {m}, h);
      REQUIRE(std::abs(q - expect) <= 1e-12 * std::max(1.0, std::fabs(expect)));
      REQUIRE(std::abs(s - expect) <= 1e-10 * std::max(static_cast<double>(m), std::fabs(expect)));
    }
  }
}

TEST_CASE("character fixed points") {
  RootSystem a2 = RootSystem::build(Series::A, 2);
  SECTION("rho indexes the trivial character") {
    TorusPoint h = make_torus_point(a2, {0.71, 0.33});
    REQUIRE(rel_err(character_quotient(a2, a2.rho_weight(), h), Complex(1, 0)) < 1e-12);
  }
  SECTION("H = 0 gives the dimension") {
    TorusPoint h = make_torus_point(a2, {0.0, 0.0});
    REQUIRE(std::abs(character_stable(a2, {2, 2}, h) - Complex(8, 0)) < 1e-12);
  }
  SECTION("SU(2) at theta = pi/2 kills even m") {
    RootSystem rs = su2_paper();
    TorusPoint h = su2_point(rs, std::numbers::pi / 2);
    for (std::int64_t m = 2; m <= 10; m += 2)
      REQUIRE(std::abs(character_stable(rs, {m}, h)) < 1e-12);
  }
}

TEST_CASE("quotient and stable methods agree at generic points") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  std::uniform_int_distribution<int> coord(1, 4);
  for (auto [series, rank] : {std::pair{Series::A, 1}, {Series::A, 2}, {Series::B, 2}}) {
    RootSystem rs = RootSystem::build(series, rank);
    CAPTURE(rs.name());
    int done = 0;
    while (done < 250) {
      std::vector<double> coords(rank);
      for (int i = 0; i < rank; ++i) coords[i] = unif(rng);
      TorusPoint h = make_torus_point(rs, coords);
      if (h.min_wall_distance() < 1e-3) continue;
      IVec lam(rank);
      for (int i = 0; i < rank; ++i) lam[i] = coord(rng);
      Complex q = character_quotient(rs, lam, h);
      Complex s = character_stable(rs, lam, h);
      REQUIRE(rel_err(q, s) < 1e-9);
      // |chi| <= d_lambda
      REQUIRE(std::abs(s) <=
              static_cast<double>(rs.weyl_dimension(lam).value) + 1e-9);
      ++done;
    }
  }
}

TEST_CASE("stable character symmetries") {
  RootSystem rs = RootSystem::build(Series::B, 2);
  IVec lam = {2, 3};
  TorusPoint h = make_torus_point(rs, {0.41, 1.17});
  Complex base = character_stable(rs, lam, h);
  SECTION("Weyl invariance in H") {
    for (const WeylElement& s : rs.weyl_group()) {
      std::vector<double> sh(rs.rank(), 0.0);
      for (int i = 0; i < rs.rank(); ++i)
        for (int j = 0; j < rs.rank(); ++j)
          sh[i] += static_cast<double>(s.mat_root.at(i, j)) * h.coords[j];
      REQUIRE(rel_err(character_stable(rs, lam, make_torus_point(rs, sh)), base) < 1e-10);
    }
  }
  SECTION("coroot periodicity") {
    for (int i = 0; i < rs.rank(); ++i) {
      std::vector<double> shifted = h.coords;
      double li = to_double(rs.gram_root().at(i, i));
      shifted[i] += 2 * std::numbers::pi * 2.0 / li;
      REQUIRE(rel_err(character_stable(rs, lam, make_torus_point(rs, shifted)), base) <
              1e-10);
    }
  }
  SECTION("conjugation") {
    std::vector<double> neg = h.coords;
    for (auto& c : neg) c = -c;
    Complex conj = character_stable(rs, lam, make_torus_point(rs, neg));
    REQUIRE(rel_err(conj, std::conj(base)) < 1e-10);
  }
}

TEST_CASE("wall gate on the quotient method") {
  RootSystem rs = su2_paper();
  TorusPoint h = su2_point(rs, 1e-9);
  REQUIRE_THROWS_AS(character_quotient(rs, {3}, h), WallTooCloseError);
}

TEST_CASE("series evaluation near the walls") {
  SECTION("SU(2): matches the explicit small-angle expansion") {
    RootSystem rs = su2_paper();
    double theta1 = 0.01;
    TorusPoint h = su2_point(rs, theta1);
    for (std::int64_t m = 2; m <= 8; m += 2) {
      // (theta1 / (e^{-i theta}(e^{2 i theta1}-1))) sum_{n odd} (i^n/n!) 2 theta1^{n-1} m^n
      Complex denom = std::polar(1.0, -theta1) *
                      (std::polar(1.0, 2 * theta1) - Complex(1, 0));
      Complex sum = 0;
      double fact = 1;
      for (int n = 1; n <= 25; ++n) {
        fact *= n;
        if (n % 2 == 0) continue;
        Complex ipow = std::polar(1.0, n * std::numbers::pi / 2);
        sum += ipow / fact * 2.0 * std::pow(theta1, n - 1) * std::pow(double(m), n);
      }
      Complex expect = theta1 / denom * sum;
      auto got = character_series_near_wall(rs, {m}, h, 30);
      REQUIRE(rel_err(got.value, expect) < 1e-10);
    }
  }
  SECTION("on the wall lattice the modulus is the dimension") {
    RootSystem rs = su2_paper();
    TorusPoint h = su2_point(rs, std::numbers::pi);  // theta2 = pi, theta1 = 0
    for (std::int64_t m = 1; m <= 6; ++m) {
      auto got = character_series_near_wall(rs, {m}, h, 25);
      REQUIRE(std::fabs(std::abs(got.value) - static_cast<double>(m)) < 1e-10);
      // reference: sin(m theta)/sin(theta) -> m (-1)^{m+1} at theta = pi
      double expect = (m % 2 == 1) ? static_cast<double>(m) : -static_cast<double>(m);
      REQUIRE(std::abs(got.value - Complex(expect, 0)) < 1e-10);
    }
  }
  SECTION("agrees with the stable method close to all walls") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> coord(1, 4);
    for (auto [series, rank] :
         {std::pair{Series::A, 1}, {Series::A, 2}, {Series::B, 2}, {Series::G, 2}}) {
      RootSystem rs = RootSystem::build(series, rank);
      CAPTURE(rs.name());
      int height_max = 0;
      for (const IVec& a : rs.positive_roots_root()) {
        int ht = 0;
        for (auto v : a) ht += static_cast<int>(v);
        height_max = std::max(height_max, ht);
      }
      for (std::int64_t n : {8, 16, 32}) {
        for (int trial = 0; trial < 8; ++trial) {
          // simple-root fractions small enough that every positive root sits
          // within 1/N of its wall
          std::vector<double> frac(rank);
          for (int i = 0; i < rank; ++i)
            frac[i] = unif(rng) / static_cast<double>(n * height_max);
          std::vector<double> coords(rank, 0.0);
          RatMat ginv = rs.gram_root_inv();
          for (int i = 0; i < rank; ++i)
            for (int j = 0; j < rank; ++j)
              coords[i] += to_double(ginv.at(i, j)) * 2 * std::numbers::pi * frac[j];
          TorusPoint h = make_torus_point(rs, coords);
          for (double d : h.wall_distances) REQUIRE(d <= 1.0 / n + 1e-12);
          IVec lam(rank);
          for (int i = 0; i < rank; ++i) lam[i] = coord(rng);
          SeriesValue series_val;
          int m_order = 40;
          for (int attempt = 0;; ++attempt) {
            try {
              series_val = character_series_near_wall(rs, lam, h, m_order);
              break;
            } catch (const TruncationError& e) {
              REQUIRE(attempt < 6);
              m_order = std::max(e.required_order, m_order + 20);
            }
          }
          Complex stable = character_stable(rs, lam, h);
          double denom = std::max(std::abs(stable), 1.0);
          REQUIRE(std::abs(series_val.value - stable) / denom < 1e-6);
          REQUIRE(series_val.tail_bound <= 1e-6 * std::max(std::abs(series_val.value), 1.0));
        }
      }
    }
  }
  SECTION("truncation error carries a usable order") {
    RootSystem rs = su2_paper();
    TorusPoint h = su2_point(rs, 0.45);  // large theta1 for a big argument
    try {
      character_series_near_wall(rs, {40}, h, 8, 1e-9);
      FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
      REQUIRE(e.required_order > 8);
      REQUIRE_NOTHROW(character_series_near_wall(rs, {40}, h,
                                                 std::min(e.required_order + 10, 120), 1e-9));
    }
  }
  SECTION("far-from-wall points are rejected") {
    RootSystem rs = RootSystem::build(Series::A, 2);
    TorusPoint h = make_torus_point(rs, {1.9, 0.8});
    bool too_far = false;
    for (int i = 0; i < 2; ++i) {
      IVec e(2, 0);
      e[i] = 1;
      double x = rs.pair_root_torus(e, h.coords) / (2 * std::numbers::pi);
      if (circle_distance(x) > 0.26) too_far = true;
    }
    if (too_far)
      REQUIRE_THROWS_AS(character_series_near_wall(rs, {2, 2}, h), PreconditionError);
  }
}

TEST_CASE("finite differences of the character decay like N^{|P|-k}") {
  // lambda = mu + n1 a1 + n2 a2 with |n_i| <= N and H within 1/N of all
  // walls: |D_{i_1}...D_{i_k} chi| fits under C N^{|P|-k} with one C across N.
  RootSystem rs = RootSystem::build(Series::A, 2);
  IVec mu = rs.lattice_cosets()[1];
  auto chi_at = [&](std::int64_t n1, std::int64_t n2, const TorusPoint& h) {
    IVec lam = mu;
    const auto& posw = rs.positive_roots_weight();
    (void)posw;
    IVec a1w = rs.root_to_weight({1, 0}), a2w = rs.root_to_weight({0, 1});
    for (int j = 0; j < 2; ++j) lam[j] += n1 * a1w[j] + n2 * a2w[j];
    return char_ratio_series(rs, lam, h, 60, 1e-5).value;
  };
  std::map<std::int64_t, std::array<double, 3>> sup;  // N -> max |D^k chi| k=0,1,2
  for (std::int64_t n : {8, 16, 32}) {
    RatMat ginv = rs.gram_root_inv();
    std::vector<double> coords(2, 0.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        coords[i] += to_double(ginv.at(i, j)) * 2 * std::numbers::pi * 0.4 /
                     static_cast<double>(n);
    TorusPoint h = make_torus_point(rs, coords);
    std::array<double, 3> mx{0, 0, 0};
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::int64_t> pick(-n, n);
    for (int trial = 0; trial < 12; ++trial) {
      std::int64_t n1 = pick(rng), n2 = pick(rng);
      Complex f00 = chi_at(n1, n2, h);
      Complex f10 = chi_at(n1 + 1, n2, h);
      Complex f01 = chi_at(n1, n2 + 1, h);
      Complex f11 = chi_at(n1 + 1, n2 + 1, h);
      mx[0] = std::max(mx[0], std::abs(f00));
      mx[1] = std::max({mx[1], std::abs(f10 - f00), std::abs(f01 - f00)});
      mx[2] = std::max(mx[2], std::abs(f11 - f10 - f01 + f00));
    }
    sup[n] = mx;
  }
  const int np = 3;
  for (int k = 0; k < 3; ++k) {
    double c8 = sup[8][k] / std::pow(8.0, np - k);
    for (std::int64_t n : {16, 32}) {
      double cn = sup[n][k] / std::pow(static_cast<double>(n), np - k);
      CAPTURE(k, n, c8, cn);
      REQUIRE(cn <= 2.0 * std::max(c8, 1e-6));
    }
  }
}
