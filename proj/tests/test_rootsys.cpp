#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "weyl/demazure.hpp"
#include "weyl/rootsys.hpp"

using namespace weyl;

namespace {

std::vector<RootSystem> desk_systems() {
  std::vector<RootSystem> v;
  v.push_back(RootSystem::build(Series::A, 1));
  v.push_back(RootSystem::build(Series::A, 2));
  v.push_back(RootSystem::build(Series::B, 2));
  v.push_back(RootSystem::build(Series::G, 2));
  v.push_back(RootSystem::build(Series::A, 3));
  v.push_back(RootSystem::build(Series::B, 3));
  v.push_back(RootSystem::build(Series::C, 3));
  return v;
}

std::set<IVec> all_roots(const RootSystem& rs) {
  std::set<IVec> phi;
  for (const IVec& a : rs.positive_roots_root()) {
    phi.insert(a);
    phi.insert(ivec_neg(a));
  }
  return phi;
}

IVec reflect_root(const RootSystem& rs, const IVec& alpha, const IVec& beta) {
  // s_alpha(beta) = beta - <beta, alpha^vee> alpha
  Rational c = 2 * bilinear(rs.gram_root(), beta, alpha) /
               bilinear(rs.gram_root(), alpha, alpha);
  REQUIRE(rat_den(c) == 1);
  std::int64_t ci = rat_num(c).convert_to<std::int64_t>();
  IVec out = beta;
  for (size_t i = 0; i < out.size(); ++i) out[i] -= ci * alpha[i];
  return out;
}

}  // namespace

TEST_CASE("dimension bookkeeping for known types") {
  struct Row {
    Series s;
    int r;
    int pos;
    int dim;
  };
  for (Row row : {Row{Series::A, 1, 1, 3}, Row{Series::A, 2, 3, 8},
                  Row{Series::B, 2, 4, 10}, Row{Series::G, 2, 6, 14},
                  Row{Series::A, 3, 6, 15}, Row{Series::B, 3, 9, 21},
                  Row{Series::C, 3, 9, 21}, Row{Series::D, 3, 6, 15},
                  Row{Series::F, 4, 24, 52}, Row{Series::D, 4, 12, 28}}) {
    RootSystem rs = RootSystem::build(row.s, row.r);
    CAPTURE(rs.name());
    REQUIRE(rs.num_positive_roots() == row.pos);
    REQUIRE(rs.dimension() == row.dim);
    REQUIRE(2 * rs.num_positive_roots() + rs.rank() == rs.dimension());
  }
}

TEST_CASE("A1 is the su(2) picture") {
  RootSystem rs = RootSystem::build(Series::A, 1);
  REQUIRE(rs.num_positive_roots() == 1);
  REQUIRE(rs.dimension() == 3);
  // w = a/2
  REQUIRE(rs.form().to_root_coords(Weight::fundamental({1}))[0] == Rational(1, 2));
  REQUIRE(rs.weyl_group().size() == 2);
  REQUIRE(rs.weyl_group()[1].mat_weight.at(0, 0) == -1);
}

TEST_CASE("root system axioms hold exactly") {
  for (const RootSystem& rs : desk_systems()) {
    CAPTURE(rs.name());
    auto phi = all_roots(rs);
    REQUIRE(phi.size() == 2 * static_cast<size_t>(rs.num_positive_roots()));
    for (const IVec& a : phi) {
      // (i) symmetry
      REQUIRE(phi.count(ivec_neg(a)) == 1);
      // (ii) only +-1 multiples
      for (int k = 2; k <= 4; ++k) {
        IVec ka = a;
        for (auto& x : ka) x *= k;
        REQUIRE(phi.count(ka) == 0);
      }
      for (const IVec& b : phi) {
        // (iii) reflection closure
        REQUIRE(phi.count(reflect_root(rs, a, b)) == 1);
        // (iv) integrality, checked inside reflect_root
      }
    }
  }
}

TEST_CASE("rho equals both of its definitions") {
  for (const RootSystem& rs : desk_systems()) {
    CAPTURE(rs.name());
    RatVec half_sum(rs.rank(), Rational(0));
    for (const IVec& a : rs.positive_roots_root())
      for (int i = 0; i < rs.rank(); ++i) half_sum[i] += Rational(a[i], 2);
    REQUIRE(half_sum == rs.rho_root());
    RatVec from_weights = rs.form().to_root_coords(Weight::fundamental(rs.rho_weight()));
    REQUIRE(half_sum == from_weights);
  }
}

TEST_CASE("weyl group orders and longest element") {
  struct Row {
    Series s;
    int r;
    size_t order;
  };
  for (Row row : {Row{Series::A, 1, 2}, Row{Series::A, 2, 6}, Row{Series::B, 2, 8},
                  Row{Series::G, 2, 12}, Row{Series::A, 3, 24}, Row{Series::B, 3, 48},
                  Row{Series::F, 4, 1152}}) {
    RootSystem rs = RootSystem::build(row.s, row.r);
    CAPTURE(rs.name());
    REQUIRE(rs.weyl_group().size() == row.order);
    REQUIRE(rs.longest_word().size() == static_cast<size_t>(rs.num_positive_roots()));
    // closure properties
    for (const WeylElement& s : rs.weyl_group()) {
      REQUIRE(rs.weyl_group()[s.inverse].word.size() == s.word.size());
      IMat prod = s.mat_weight * rs.weyl_group()[s.inverse].mat_weight;
      REQUIRE(prod == IMat::identity(rs.rank()));
    }
  }
}

TEST_CASE("weyl elements preserve the form and anti-invariance holds") {
  for (const RootSystem& rs : desk_systems()) {
    CAPTURE(rs.name());
    IVec lam(rs.rank());
    for (int i = 0; i < rs.rank(); ++i) lam[i] = 1 + (i * 2 + 1) % 5;
    Rational base = rs.positive_product(lam);
    for (const WeylElement& s : rs.weyl_group()) {
      IVec sl = imat_apply(s.mat_weight, lam);
      REQUIRE(rs.norm2_weight(sl) == rs.norm2_weight(lam));
      REQUIRE(rs.positive_product(sl) == Rational(s.det) * base);
    }
  }
}

TEST_CASE("chamber partition on a bounded lattice sample") {
  for (auto [series, rank] : {std::pair{Series::A, 2}, {Series::B, 2}}) {
    RootSystem rs = RootSystem::build(series, rank);
    CAPTURE(rs.name());
    for (std::int64_t x = -4; x <= 4; ++x)
      for (std::int64_t y = -4; y <= 4; ++y) {
        IVec lam = {x, y};
        bool off_walls = rs.positive_product(lam) != 0;
        int count = 0;
        for (const WeylElement& s : rs.weyl_group()) {
          IVec inv = imat_apply(rs.weyl_group()[s.inverse].mat_weight, lam);
          if (rs.strictly_dominant(inv)) ++count;
        }
        REQUIRE(count == (off_walls ? 1 : 0));
      }
  }
}

TEST_CASE("weyl dimension closed forms") {
  RootSystemConfig paper;
  paper.normalization = FormNormalization::custom_scale;
  paper.custom_scale = 2;
  RootSystem su2 = RootSystem::build(Series::A, 1, paper);
  for (std::int64_t m = 1; m <= 12; ++m)
    REQUIRE(su2.weyl_dimension({m}).value == m);

  for (const RootSystem& rs : desk_systems()) {
    CAPTURE(rs.name());
    REQUIRE(rs.weyl_dimension(rs.rho_weight()).value == 1);
  }

  RootSystem a2 = RootSystem::build(Series::A, 2);
  REQUIRE(a2.weyl_dimension({2, 2}).value == 8);
  auto on_wall = a2.weyl_dimension({0, 1});
  REQUIRE(on_wall.on_wall);
  REQUIRE(on_wall.value == 0);
}

TEST_CASE("casimir eigenvalues") {
  RootSystemConfig paper;
  paper.normalization = FormNormalization::custom_scale;
  paper.custom_scale = 2;
  RootSystem su2 = RootSystem::build(Series::A, 1, paper);
  REQUIRE(su2.casimir_eigenvalue({5}) == Rational(24));
  for (const RootSystem& rs : desk_systems()) {
    CAPTURE(rs.name());
    REQUIRE(rs.casimir_eigenvalue(rs.rho_weight()) == 0);
    IVec lam(rs.rank(), 1);
    lam[0] = 3;
    Rational k = rs.casimir_eigenvalue(lam);
    REQUIRE(rat_den(k * rs.lattice_period()) == 1);
  }
  RootSystem a2 = RootSystem::build(Series::A, 2);
  REQUIRE(a2.casimir_eigenvalue({2, 1}) == Rational(8, 3));
}

TEST_CASE("lattice cosets") {
  RootSystem su2 = RootSystem::build(Series::A, 1);
  REQUIRE(su2.lattice_cosets() == std::vector<IVec>{{0}, {1}});

  RootSystem a2 = RootSystem::build(Series::A, 2);
  REQUIRE(a2.lattice_cosets().size() == 3);
  REQUIRE(a2.coset_of({0, 0}) == IVec{0, 0});
  // representatives are pairwise incongruent and cover
  for (std::int64_t x = -3; x <= 3; ++x)
    for (std::int64_t y = -3; y <= 3; ++y) {
      IVec lam = {x, y};
      int hits = 0;
      for (const IVec& rep : a2.lattice_cosets())
        if (a2.in_root_lattice(ivec_sub(lam, rep))) ++hits;
      REQUIRE(hits == 1);
    }
}

TEST_CASE("rank ceiling and invalid types") {
  REQUIRE_THROWS_AS(RootSystem::build(Series::A, 5), PreconditionError);
  REQUIRE_THROWS_AS(RootSystem::build(Series::G, 3), PreconditionError);
  REQUIRE_THROWS_AS(RootSystem::build(Series::F, 2), PreconditionError);
  REQUIRE_FALSE(series_from_string("Z").has_value());
  RootSystemConfig cfg;
  cfg.rank_ceiling = 8;
  REQUIRE_NOTHROW(RootSystem::build(Series::A, 4, cfg));
}

TEST_CASE("alternative longest word is reduced and equal") {
  for (auto [series, rank] :
       {std::pair{Series::A, 2}, {Series::B, 2}, {Series::G, 2}, {Series::A, 3}}) {
    RootSystem rs = RootSystem::build(series, rank);
    CAPTURE(rs.name());
    auto w1 = rs.longest_word();
    auto w2 = rs.longest_word_alt();
    REQUIRE(w1.size() == w2.size());
    REQUIRE(w1 != w2);
    IMat m = IMat::identity(rs.rank());
    for (int i : w2) {
      IMat gen = IMat::identity(rs.rank());
      for (int k = 0; k < rs.rank(); ++k) gen.at(k, i) -= rs.cartan().at(i, k);
      m = m * gen;
    }
    REQUIRE(m == rs.weyl_group()[rs.longest_element()].mat_weight);
  }
}

TEST_CASE("torus points canonicalize and carry wall distances") {
  RootSystem a2 = RootSystem::build(Series::A, 2);
  TorusPoint h = make_torus_point(a2, {0.31, 0.17});
  REQUIRE(h.wall_distances.size() == 3);
  const double two_pi = 2 * std::numbers::pi;
  for (size_t i = 0; i < h.wall_distances.size(); ++i) {
    double v = a2.pair_root_torus(a2.positive_roots_root()[i], h.coords) / two_pi;
    REQUIRE(h.wall_distances[i] == Catch::Approx(circle_distance(v)).margin(1e-15));
  }
  // coroot-lattice shifts land on the same canonical representative
  std::vector<double> shifted = {0.31 + two_pi * 2.0 / 2.0, 0.17};
  TorusPoint h2 = make_torus_point(a2, shifted);
  REQUIRE(h2.coords[0] == Catch::Approx(h.coords[0]).margin(1e-12));
  REQUIRE(h2.coords[1] == Catch::Approx(h.coords[1]).margin(1e-12));
}

TEST_CASE("root subsystem decompositions") {
  RootSystem a2 = RootSystem::build(Series::A, 2);
  SECTION("H = 0 activates every wall") {
    TorusPoint h = make_torus_point(a2, {0.0, 0.0});
    auto dec = root_subsystem(a2, h, 8);
    REQUIRE(dec.subsystem_pos.size() == 3);
    REQUIRE(dec.rank_H == 2);
    REQUIRE(dec.weyl_subgroup.size() == 6);
    REQUIRE(dec.coset_reps.size() == 3);
  }
  SECTION("generic H activates nothing") {
    // pick phase fractions (0.23, 0.31, 0.54): all at least 0.2 from Z
    const double two_pi = 2 * std::numbers::pi;
    RatMat ginv = a2.gram_root_inv();
    std::vector<double> coords(2, 0.0);
    for (int i = 0; i < 2; ++i)
      coords[i] = to_double(ginv.at(i, 0)) * two_pi * 0.23 +
                  to_double(ginv.at(i, 1)) * two_pi * 0.31;
    TorusPoint h = make_torus_point(a2, coords);
    REQUIRE(h.min_wall_distance() > 1.0 / 8);
    auto dec = root_subsystem(a2, h, 8);
    REQUIRE(dec.empty());
    REQUIRE(dec.coset_reps.size() == 1);
  }
  SECTION("exactly one wall: A1 subsystem with index-2 projection quotient") {
    // Solve <a1, H> = 0 with <a2, H> generic: H = G^{-1} (0, c)
    RatMat ginv = a2.gram_root_inv();
    double c = 2.2;
    std::vector<double> coords(2);
    for (int i = 0; i < 2; ++i) coords[i] = to_double(ginv.at(i, 1)) * c;
    TorusPoint h = make_torus_point(a2, coords);
    auto dec = root_subsystem(a2, h, 64);
    REQUIRE(dec.subsystem_pos.size() == 1);
    REQUIRE(a2.positive_roots_root()[dec.subsystem_pos[0]] == IVec{1, 0});
    REQUIRE(dec.rank_H == 1);
    REQUIRE(dec.weyl_subgroup.size() == 2);
    REQUIRE(dec.coset_reps.size() == 2);  // Upsilon'_H / Gamma'_H
    // Z-closedness: no root outside Phi_H lies in its Z-span
    for (size_t i = 0; i < a2.positive_roots_root().size(); ++i) {
      if (static_cast<int>(i) == dec.subsystem_pos[0]) continue;
      const IVec& beta = a2.positive_roots_root()[i];
      // span of {a1} is multiples of a1
      REQUIRE_FALSE(beta[1] == 0);
    }
    // adapted basis: first vector projects onto a generator, the second to 0
    REQUIRE(dec.adapted_basis.size() == 2);
    const IVec& u2 = dec.adapted_basis[1];
    REQUIRE(a2.pair_root_weight(IVec{1, 0}, u2) == 0);
    // determinant of the adapted basis is +-1 (a true lattice basis)
    RatMat m(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.at(i, j) = Rational(dec.adapted_basis[i][j]);
    Rational det = rat_determinant(m);
    REQUIRE((det == 1 || det == -1));
  }
}
