#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <type_traits>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/linalg.hpp"
#include "weyl/rational.hpp"

namespace weyl {

template <class C>
class MultiPoly;

// What a coefficient ring must provide.  Instantiated for Rational (exact
// paths), double (numeric series paths), and MultiPoly<Rational> (polynomials
// whose coefficients are polynomials in a formal weight parameter).
template <class C>
struct CoeffOps;

template <>
struct CoeffOps<Rational> {
  static bool is_zero(const Rational& c) { return c == 0; }
  static Rational mul_rational(const Rational& c, const Rational& r) { return c * r; }
  static double magnitude(const Rational& c) { return std::fabs(to_double(c)); }
  static Rational rational_constant(const Rational& r, const Rational&) { return r; }
};

template <>
struct CoeffOps<double> {
  static bool is_zero(double c) { return c == 0.0; }
  static double mul_rational(double c, const Rational& r) { return c * to_double(r); }
  static double magnitude(double c) { return std::fabs(c); }
  static double rational_constant(const Rational& r, double) { return to_double(r); }
};

// Sparse multivariate polynomial, keyed by exponent multi-index.  No zero
// coefficients are stored; the term map is ordered, so iteration (and any
// floating-point accumulation) is deterministic.
template <class C>
class MultiPoly {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, C>;

  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, C value) {
    MultiPoly p(nvars);
    p.add_term(Exponents(nvars, 0), value);
    return p;
  }
  // sum_i coeffs[i] * x_i
  static MultiPoly linear_form(int nvars, const std::vector<C>& coeffs) {
    MultiPoly p(nvars);
    for (int i = 0; i < nvars; ++i) {
      Exponents e(nvars, 0);
      e[i] = 1;
      p.add_term(e, coeffs[i]);
    }
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int v : e) s += v;
      d = std::max(d, s);
    }
    return d;
  }

  int degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  void add_term(const Exponents& e, const C& c) {
    if (CoeffOps<C>::is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = it->second + c;
      if (CoeffOps<C>::is_zero(it->second)) terms_.erase(it);
    }
  }

  MultiPoly operator-() const { return scaled(Rational(-1)); }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_arity(o);
    for (const auto& [e, c] : o.terms_)
      add_term(e, CoeffOps<C>::mul_rational(c, Rational(-1)));
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_arity(b);
    MultiPoly p(a.nvars_ ? a.nvars_ : b.nvars_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea);
        for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
        p.add_term(e, ca * cb);
      }
    return p;
  }

  MultiPoly scaled(const Rational& r) const {
    MultiPoly p(nvars_);
    if (r == 0) return p;
    for (const auto& [e, c] : terms_)
      p.terms_.emplace(e, CoeffOps<C>::mul_rational(c, r));
    return p;
  }

  bool operator==(const MultiPoly& o) const { return terms_ == o.terms_; }

  // Substitute x_i = sum_j m(i,j) y_j.
  MultiPoly substituted_linear(const RatMat& m) const {
    if (terms_.empty()) return *this;
    const C& proto = terms_.begin()->second;
    std::vector<MultiPoly> images(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      MultiPoly li(nvars_);
      for (int j = 0; j < nvars_; ++j) {
        if (m.at(i, j) == 0) continue;
        Exponents e(nvars_, 0);
        e[j] = 1;
        li.add_term(e, CoeffOps<C>::rational_constant(m.at(i, j), proto));
      }
      images[i] = std::move(li);
    }
    MultiPoly one = MultiPoly::constant(nvars_, CoeffOps<C>::rational_constant(1, proto));
    std::vector<std::vector<MultiPoly>> pows(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      pows[i].push_back(one);
      int dmax = degree_in(i);
      for (int d = 1; d <= dmax; ++d) pows[i].push_back(pows[i][d - 1] * images[i]);
    }
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      MultiPoly term = MultiPoly::constant(nvars_, c);
      for (int i = 0; i < nvars_; ++i)
        if (e[i] > 0) term = term * pows[i][e[i]];
      out += term;
    }
    return out;
  }

  double max_coeff_magnitude() const {
    double m = 0;
    for (const auto& [e, c] : terms_) m = std::max(m, CoeffOps<C>::magnitude(c));
    return m;
  }

  // Drops terms with e[var] >= dmin and magnitude <= tol (rounding residue
  // from inexact coefficient rings); returns false if any larger term with
  // e[var] >= dmin survives.
  bool drop_small_terms_at(int var, int dmin, double tol) {
    bool clean = true;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first[var] >= dmin) {
        if (CoeffOps<C>::magnitude(it->second) <= tol) {
          it = terms_.erase(it);
          continue;
        }
        clean = false;
      }
      ++it;
    }
    return clean;
  }

 private:
  void check_arity(const MultiPoly& o) const {
    if (nvars_ && o.nvars_ && nvars_ != o.nvars_)
      throw InvariantViolationError("polynomial arity mismatch");
  }

  int nvars_ = 0;
  TermMap terms_;
};

template <>
struct CoeffOps<MultiPoly<Rational>> {
  static bool is_zero(const MultiPoly<Rational>& c) { return c.is_zero(); }
  static MultiPoly<Rational> mul_rational(const MultiPoly<Rational>& c,
                                          const Rational& r) {
    return c.scaled(r);
  }
  static double magnitude(const MultiPoly<Rational>& c) {
    return c.max_coeff_magnitude();
  }
  static MultiPoly<Rational> rational_constant(const Rational& r,
                                               const MultiPoly<Rational>& proto) {
    return MultiPoly<Rational>::constant(proto.nvars(), r);
  }
};

using RatPoly = MultiPoly<Rational>;
using DblPoly = MultiPoly<double>;
// Polynomial in the torus variable whose coefficients are exact polynomials
// in a formal weight parameter.
using ParamPoly = MultiPoly<MultiPoly<Rational>>;

inline double eval_poly(const DblPoly& p, const std::vector<double>& x) {
  double s = 0;
  for (const auto& [e, c] : p.terms()) {
    double t = c;
    for (size_t i = 0; i < x.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

inline Rational eval_poly(const RatPoly& p, const RatVec& x) {
  Rational s = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational t = c;
    for (size_t i = 0; i < x.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

inline DblPoly to_double_poly(const RatPoly& p) {
  DblPoly q(p.nvars());
  for (const auto& [e, c] : p.terms()) q.add_term(e, to_double(c));
  return q;
}

// Substitute an integer weight for the formal parameter of a ParamPoly.
inline RatPoly bind_parameter(const ParamPoly& p, const IVec& lambda) {
  RatPoly out(p.nvars());
  for (const auto& [e, cpoly] : p.terms())
    out.add_term(e, eval_poly(cpoly, to_ratvec(lambda)));
  return out;
}

// Exact division of f by the linear form sum_j g_j x_j, by synthetic division
// in a pivot variable (the coordinate change sending the form to an axis,
// performed lazily).  Throws if the division is not exact; for double
// coefficients a relative remainder below `double_tol` is discarded instead.
template <class C>
MultiPoly<C> divide_by_linear(MultiPoly<C> f, const RatVec& g,
                              double double_tol = 1e-9,
                              double double_tol_abs = 0.0) {
  int n = f.nvars();
  // pivot on the largest coefficient so the elimination never amplifies
  int pivot = -1;
  double best = 0;
  for (size_t j = 0; j < g.size(); ++j) {
    double mag = std::fabs(to_double(g[j]));
    if (g[j] != 0 && mag > best) {
      pivot = static_cast<int>(j);
      best = mag;
    }
  }
  if (pivot < 0) throw PreconditionError("division by the zero form");
  if (f.is_zero()) return f;
  const C proto = f.terms().begin()->second;
  double input_scale = f.max_coeff_magnitude();

  MultiPoly<C> lin(n);
  for (int j = 0; j < n; ++j) {
    if (g[j] == 0) continue;
    typename MultiPoly<C>::Exponents e(n, 0);
    e[j] = 1;
    lin.add_term(e, CoeffOps<C>::rational_constant(g[j], proto));
  }
  Rational inv_pivot = 1 / g[pivot];

  MultiPoly<C> q(n);
  while (!f.is_zero()) {
    int d = f.degree_in(pivot);
    if (d == 0) {
      if constexpr (std::is_same_v<C, double>) {
        double thresh = std::max(double_tol * std::max(input_scale, 1.0), double_tol_abs);
        if (f.max_coeff_magnitude() <= thresh) break;  // rounding residue
      }
      throw InvariantViolationError("polynomial is not divisible by the linear form");
    }
    MultiPoly<C> qpart(n);
    for (const auto& [e, c] : f.terms()) {
      if (e[pivot] != d) continue;
      typename MultiPoly<C>::Exponents e2(e);
      e2[pivot] -= 1;
      qpart.add_term(e2, CoeffOps<C>::mul_rational(c, inv_pivot));
    }
    q += qpart;
    f -= qpart * lin;
    if constexpr (std::is_same_v<C, double>) {
      // the top pivot-degree must cancel; sweep out rounding residue
      double thresh = std::max(double_tol * std::max(input_scale, 1.0), double_tol_abs);
      if (!f.drop_small_terms_at(pivot, d, thresh))
        throw InvariantViolationError("polynomial is not divisible by the linear form");
    }
  }
  return q;
}

}  // namespace weyl
