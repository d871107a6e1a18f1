#pragma once

#include <vector>

#include "weyl/errors.hpp"
#include "weyl/polynomial.hpp"
#include "weyl/rootsys.hpp"

namespace weyl {

// Polynomials here are functions on i*b in simple-root coordinates of the
// argument.  The linear functional <a, .> has coefficient vector G a.

inline RatVec root_functional(const RootSystem& rs, const IVec& a) {
  RatVec g(rs.rank(), Rational(0));
  for (int i = 0; i < rs.rank(); ++i)
    for (int j = 0; j < rs.rank(); ++j) g[i] += rs.gram_root().at(i, j) * a[j];
  return g;
}

// Reflection s_a acting on simple-root coordinates: s_a(a_j) = a_j - c_j a
// with c_j = 2 <a_j, a> / <a, a> (an integer by root-system integrality).
inline RatMat reflection_matrix_root(const RootSystem& rs, const IVec& a) {
  Rational a2 = bilinear(rs.gram_root(), a, a);
  RatMat m = RatMat::identity(rs.rank());
  for (int j = 0; j < rs.rank(); ++j) {
    IVec ej(rs.rank(), 0);
    ej[j] = 1;
    Rational c = 2 * bilinear(rs.gram_root(), ej, a) / a2;
    if (rat_den(c) != 1) throw InvariantViolationError("non-integral root reflection");
    if (c == 0) continue;
    for (int k = 0; k < rs.rank(); ++k) m.at(k, j) -= c * a[k];
  }
  return m;
}

// (s f)(x) = f(s^{-1} x).
template <class C>
MultiPoly<C> reflect_poly(const RootSystem& rs, const MultiPoly<C>& f,
                          const WeylElement& s) {
  const WeylElement& inv = rs.weyl_group()[s.inverse];
  return f.substituted_linear(to_ratmat(inv.mat_root));
}

// Divided difference Delta_a(f) = (f - s_a f) / <a, .>.  The numerator is
// exactly divisible; a failure indicates an arithmetic bug.
template <class C>
MultiPoly<C> demazure(const RootSystem& rs, const MultiPoly<C>& f, const IVec& a) {
  MultiPoly<C> num = f - f.substituted_linear(reflection_matrix_root(rs, a));
  return divide_by_linear(std::move(num), root_functional(rs, a));
}

// Composition Delta_{a_{i_1}} ... Delta_{a_{i_k}} along a word in simple
// reflections, rightmost operator applied first.
template <class C>
MultiPoly<C> apply_demazure_word(const RootSystem& rs, MultiPoly<C> f,
                                 const std::vector<int>& word) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (f.is_zero()) return f;
    IVec simple(rs.rank(), 0);
    simple[*it] = 1;
    f = demazure(rs, f, simple);
  }
  return f;
}

// The operator along the canonical reduced word of the longest element;
// well-defined independently of the word choice.
template <class C>
MultiPoly<C> delta_longest(const RootSystem& rs, MultiPoly<C> f) {
  return apply_demazure_word(rs, std::move(f), rs.longest_word());
}

// sum_s det(s) (s h); always anti-invariant.
template <class C>
MultiPoly<C> antisymmetrize(const RootSystem& rs, const MultiPoly<C>& h) {
  MultiPoly<C> out(h.nvars());
  for (const WeylElement& s : rs.weyl_group()) {
    MultiPoly<C> sh = reflect_poly(rs, h, s);
    if (s.det > 0)
      out += sh;
    else
      out -= sh;
  }
  return out;
}

// d_det(x) = prod_{a in P} <a, x>.
inline RatPoly d_det_poly(const RootSystem& rs) {
  RatPoly p = RatPoly::constant(rs.rank(), Rational(1));
  for (const IVec& a : rs.positive_roots_root()) {
    RatVec g = root_functional(rs, a);
    p = p * RatPoly::linear_form(rs.rank(), g);
  }
  return p;
}

template <class C>
bool is_anti_invariant(const RootSystem& rs, const MultiPoly<C>& f) {
  for (int i = 0; i < rs.rank(); ++i) {
    IVec simple(rs.rank(), 0);
    simple[i] = 1;
    MultiPoly<C> sf = f.substituted_linear(reflection_matrix_root(rs, simple));
    if (!(sf + f).is_zero()) return false;
  }
  return true;
}

// For anti-invariant f, the unique invariant g with f = d_det * g, computed
// as delta(f) / |W|.  The factorization is re-checked exactly.
inline RatPoly invariant_part(const RootSystem& rs, const RatPoly& f) {
  if (!is_anti_invariant(rs, f))
    throw PreconditionError("polynomial is not anti-invariant");
  RatPoly g =
      delta_longest(rs, f).scaled(Rational(1, static_cast<long>(rs.weyl_group().size())));
  if (!(d_det_poly(rs) * g == f))
    throw InvariantViolationError("anti-invariant factorization failed");
  return g;
}

// <lambda, .> as a polynomial, for an integer weight in weight coordinates.
template <class C>
MultiPoly<C> weight_functional_poly(const RootSystem& rs, const IVec& lambda_w,
                                    const C& proto) {
  std::vector<C> coeffs;
  coeffs.reserve(rs.rank());
  for (int j = 0; j < rs.rank(); ++j) {
    IVec ej(rs.rank(), 0);
    ej[j] = 1;
    Rational c = rs.pair_root_weight(ej, lambda_w);
    coeffs.push_back(CoeffOps<C>::rational_constant(c, proto));
  }
  return MultiPoly<C>::linear_form(rs.rank(), coeffs);
}

// <lambda, .> with lambda a formal parameter: coefficients are linear
// polynomials in the parameter's weight coordinates.
inline ParamPoly formal_weight_functional(const RootSystem& rs) {
  int r = rs.rank();
  std::vector<RatPoly> coeffs;
  coeffs.reserve(r);
  for (int j = 0; j < r; ++j) {
    RatPoly cj(r);
    for (int i = 0; i < r; ++i) {
      IVec ej(r, 0), ni(r, 0);
      ej[j] = 1;
      ni[i] = 1;
      Rational pij = rs.pair_root_weight(ej, ni);
      std::vector<int> e(r, 0);
      e[i] = 1;
      cj.add_term(e, pij);
    }
    coeffs.push_back(cj);
  }
  return ParamPoly::linear_form(r, coeffs);
}

}  // namespace weyl
