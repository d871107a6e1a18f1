#pragma once

#include <cstdint>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/linalg.hpp"
#include "weyl/rational.hpp"

namespace weyl {

enum class FormNormalization {
  standard_long_root_2,  // long roots have squared length 2
  killing_dual,          // sum_{a in Phi} <l,a><m,a> = <l,m> holds exactly
  custom_scale,          // rational multiple of the standard form
};

enum class WeightBasis { fundamental, simple_root, adapted };

// Integer coordinate vector in a declared lattice basis.
struct Weight {
  IVec coords;
  WeightBasis basis = WeightBasis::fundamental;
  int adapted_id = -1;  // identifies the adapted basis, when basis == adapted

  static Weight fundamental(IVec c) { return Weight{std::move(c), WeightBasis::fundamental, -1}; }
  static Weight simple_root(IVec c) { return Weight{std::move(c), WeightBasis::simple_root, -1}; }
};

// Exact rational inner product on i*b in the simple-root basis.  The Cartan
// matrix (hence all basis conversions) is derivable from the Gram matrix, so
// this type is self-contained.
struct GramForm {
  int rank = 0;
  RatMat gram_simple;          // <a_i, a_j>, already scaled per `tag`
  FormNormalization tag = FormNormalization::standard_long_root_2;
  Rational scale = 1;          // multiplier relative to the standard form

  IMat cartan;                 // C_ij = 2 <a_i,a_j> / <a_j,a_j>, scale-free
  RatMat cartan_inv;
  RatMat gram_weight;          // <w_i, w_j> = C^{-1} G C^{-T}
  RatMat weight_to_root;       // column-vector map: x = B n, B = C^{-T}

  static GramForm create(RatMat gram, FormNormalization tag, Rational scale) {
    GramForm f;
    f.rank = gram.rows;
    f.gram_simple = std::move(gram);
    f.tag = tag;
    f.scale = scale;
    if (scale <= 0) throw NotRationalMetricError("scale must be a positive rational");
    validate_gram(f.gram_simple);
    f.cartan = IMat(f.rank, f.rank);
    for (int i = 0; i < f.rank; ++i)
      for (int j = 0; j < f.rank; ++j) {
        Rational c = 2 * f.gram_simple.at(i, j) / f.gram_simple.at(j, j);
        if (rat_den(c) != 1)
          throw InvariantViolationError("non-integral Cartan entry");
        f.cartan.at(i, j) = rat_num(c).convert_to<std::int64_t>();
      }
    f.cartan_inv = rat_inverse(to_ratmat(f.cartan));
    f.weight_to_root = f.cartan_inv.transposed();
    RatMat b = f.weight_to_root;
    f.gram_weight = b.transposed() * f.gram_simple * b;
    return f;
  }

  static void validate_gram(const RatMat& g) {
    if (g.rows != g.cols) throw InvariantViolationError("Gram matrix not square");
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.cols; ++j)
        if (g.at(i, j) != g.at(j, i))
          throw InvariantViolationError("Gram matrix not symmetric");
    for (const Rational& m : leading_principal_minors(g))
      if (m <= 0) throw InvariantViolationError("Gram matrix not positive definite");
  }

  // Coordinates of a weight in the simple-root basis, exact.
  RatVec to_root_coords(const Weight& w) const {
    if (static_cast<int>(w.coords.size()) != rank)
      throw BasisMismatchError("weight rank does not match form rank");
    switch (w.basis) {
      case WeightBasis::simple_root:
        return to_ratvec(w.coords);
      case WeightBasis::fundamental: {
        RatVec out(rank, Rational(0));
        for (int i = 0; i < rank; ++i)
          for (int j = 0; j < rank; ++j)
            out[i] += weight_to_root.at(i, j) * w.coords[j];
        return out;
      }
      case WeightBasis::adapted:
        throw BasisMismatchError(
            "adapted-basis weights must be converted by their decomposition");
    }
    throw BasisMismatchError("unknown basis tag");
  }
};

struct LatticePeriod {
  std::int64_t D = 1;
};

// Exact inner product of two weights, converting each to simple-root
// coordinates first.  Symmetric in its arguments.
inline Rational pairing(const GramForm& f, const Weight& a, const Weight& b) {
  RatVec x = f.to_root_coords(a), y = f.to_root_coords(b);
  Rational s = 0;
  for (int i = 0; i < f.rank; ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (int j = 0; j < f.rank; ++j)
      if (y[j] != 0) row += f.gram_simple.at(i, j) * y[j];
    s += x[i] * row;
  }
  return s;
}

// Least D in N with D * <w_i, w_j> integral for all fundamental weights:
// the lcm of the denominators of the exact weight Gram matrix.
inline LatticePeriod lattice_period(const GramForm& f) {
  BigInt d = 1;
  for (int i = 0; i < f.rank; ++i)
    for (int j = 0; j < f.rank; ++j) d = int_lcm(d, rat_den(f.gram_weight.at(i, j)));
  return LatticePeriod{d.convert_to<std::int64_t>()};
}

}  // namespace weyl
