#include <catch2/catch_amalgamated.hpp>

#include "weyl/forms.hpp"
#include "weyl/rootsys.hpp"

using namespace weyl;

namespace {

RootSystem su2_paper() {
  // |w| = 1, so the Casimir values come out integral.
  RootSystemConfig cfg;
  cfg.normalization = FormNormalization::custom_scale;
  cfg.custom_scale = 2;
  return RootSystem::build(Series::A, 1, cfg);
}

}  // namespace

TEST_CASE("su2 paper convention has unit fundamental weight") {
  RootSystem rs = su2_paper();
  Weight w = Weight::fundamental({1});
  REQUIRE(pairing(rs.form(), w, w) == Rational(1));
  // k_m = m^2 - 1, an integer for every m
  for (std::int64_t m = 1; m <= 20; ++m) {
    Rational k = rs.casimir_eigenvalue({m});
    REQUIRE(k == Rational(m * m - 1));
  }
  REQUIRE(lattice_period(rs.form()).D == 1);
}

TEST_CASE("pairing is bilinear and symmetric") {
  RootSystem rs = RootSystem::build(Series::B, 2);
  Weight zero = Weight::fundamental({0, 0});
  Weight a = Weight::fundamental({3, -2});
  Weight b = Weight::simple_root({1, 4});
  REQUIRE(pairing(rs.form(), zero, a) == 0);
  REQUIRE(pairing(rs.form(), a, b) == pairing(rs.form(), b, a));
}

TEST_CASE("A2 standard pairings match the Cartan matrix oracle") {
  RootSystem rs = RootSystem::build(Series::A, 2);
  Weight a1 = Weight::simple_root({1, 0});
  Weight a2 = Weight::simple_root({0, 1});
  REQUIRE(pairing(rs.form(), a1, a1) == Rational(2));
  REQUIRE(pairing(rs.form(), a1, a2) == Rational(-1));
  // C_ij = 2 <a_i,a_j> / <a_j,a_j> reproduces the Cartan matrix exactly
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Weight ai = Weight::simple_root({i == 0 ? 1 : 0, i == 0 ? 0 : 1});
      Weight aj = Weight::simple_root({j == 0 ? 1 : 0, j == 0 ? 0 : 1});
      Rational c = 2 * pairing(rs.form(), ai, aj) / pairing(rs.form(), aj, aj);
      REQUIRE(c == Rational(rs.cartan().at(i, j)));
    }
}

TEST_CASE("lattice period from the exact weight Gram matrix") {
  SECTION("integral weight Gram gives D = 1") {
    RootSystem rs = su2_paper();
    REQUIRE(lattice_period(rs.form()).D == 1);
  }
  SECTION("A2 standard: weight pairings lie in (1/3)Z, D = 3") {
    RootSystem rs = RootSystem::build(Series::A, 2);
    // oracle: invert the Cartan matrix exactly and scan denominators
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Rational e = rs.gram_weight().at(i, j) * 3;
        REQUIRE(rat_den(e) == 1);
      }
    REQUIRE(lattice_period(rs.form()).D == 3);
    // minimality: no proper divisor works
    bool d1_ok = true;
    for (int i = 0; i < 2 && d1_ok; ++i)
      for (int j = 0; j < 2 && d1_ok; ++j)
        if (rat_den(rs.gram_weight().at(i, j)) != 1) d1_ok = false;
    REQUIRE_FALSE(d1_ok);
  }
  SECTION("B2 standard") {
    RootSystem rs = RootSystem::build(Series::B, 2);
    std::int64_t d = lattice_period(rs.form()).D;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        REQUIRE(rat_den(rs.gram_weight().at(i, j) * d) == 1);
  }
}

TEST_CASE("killing_dual satisfies the root-sum identity exactly") {
  for (auto [series, rank] : {std::pair{Series::A, 1}, {Series::A, 2},
                              {Series::B, 2}, {Series::G, 2}}) {
    RootSystemConfig cfg;
    cfg.normalization = FormNormalization::killing_dual;
    RootSystem rs = RootSystem::build(series, rank, cfg);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) {
        IVec ei(rank, 0), ej(rank, 0);
        ei[i] = 1;
        ej[j] = 1;
        Rational lhs = 0;
        for (const IVec& a : rs.positive_roots_root()) {
          Rational pa = bilinear(rs.gram_root(), ei, a);
          Rational pb = bilinear(rs.gram_root(), ej, a);
          lhs += 2 * pa * pb;  // both a and -a contribute
        }
        REQUIRE(lhs == rs.gram_root().at(i, j));
      }
  }
}

TEST_CASE("killing_dual norm of the su(2) fundamental weight is 1/8") {
  RootSystemConfig cfg;
  cfg.normalization = FormNormalization::killing_dual;
  RootSystem rs = RootSystem::build(Series::A, 1, cfg);
  Weight w = Weight::fundamental({1});
  REQUIRE(pairing(rs.form(), w, w) == Rational(1, 8));
}

TEST_CASE("gram validation") {
  REQUIRE_THROWS_AS(
      [] {
        RootSystemConfig cfg;
        cfg.normalization = FormNormalization::custom_scale;
        cfg.custom_scale = -1;
        return RootSystem::build(Series::A, 1, cfg);
      }(),
      NotRationalMetricError);
  RootSystem rs = RootSystem::build(Series::A, 2);
  for (const Rational& m : leading_principal_minors(rs.gram_root()))
    REQUIRE(m > 0);
  Weight bad = Weight::fundamental({1});
  Weight ok = Weight::fundamental({1, 0});
  REQUIRE_THROWS_AS(pairing(rs.form(), bad, ok), BasisMismatchError);
}
