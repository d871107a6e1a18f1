#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/rational.hpp"

namespace weyl {

using IVec = std::vector<std::int64_t>;
using RatVec = std::vector<Rational>;

// Dense matrix over an arbitrary scalar.  Sizes here are tiny (rank <= 8), so
// no attempt is made at anything clever.
template <class T>
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

  T& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const T& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = T(1);
    return m;
  }

  Matrix transposed() const {
    Matrix m(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
    return m;
  }

  friend Matrix operator*(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw InvariantViolationError("matrix shape mismatch");
    Matrix m(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        const T& v = x.at(i, k);
        if (v == T(0)) continue;
        for (int j = 0; j < y.cols; ++j) m.at(i, j) += v * y.at(k, j);
      }
    return m;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (static_cast<int>(v.size()) != cols)
      throw InvariantViolationError("matrix/vector shape mismatch");
    std::vector<T> out(rows, T(0));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out[i] += at(i, j) * v[j];
    return out;
  }

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

using RatMat = Matrix<Rational>;
using IMat = Matrix<std::int64_t>;
using BigMat = Matrix<BigInt>;

inline IVec ivec_add(const IVec& x, const IVec& y) {
  IVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

inline IVec ivec_sub(const IVec& x, const IVec& y) {
  IVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

inline IVec ivec_neg(const IVec& x) {
  IVec r(x.size());
  for (size_t i = 0; i < x.size(); ++i) r[i] = -x[i];
  return r;
}

inline IVec imat_apply(const IMat& m, const IVec& v) {
  IVec out(m.rows, 0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out[i] += m.at(i, j) * v[j];
  return out;
}

inline RatVec to_ratvec(const IVec& v) {
  RatVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
  return r;
}

inline std::vector<double> to_dvec(const RatVec& v) {
  std::vector<double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = to_double(v[i]);
  return r;
}

inline Matrix<double> to_dmat(const RatMat& m) {
  Matrix<double> d(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) d.at(i, j) = to_double(m.at(i, j));
  return d;
}

inline RatMat to_ratmat(const IMat& m) {
  RatMat r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(i, j) = Rational(m.at(i, j));
  return r;
}

// x^T M y with integer coordinate vectors and a rational Gram matrix.
inline Rational bilinear(const RatMat& m, const IVec& x, const IVec& y) {
  Rational s = 0;
  for (int i = 0; i < m.rows; ++i) {
    if (x[i] == 0) continue;
    Rational row = 0;
    for (int j = 0; j < m.cols; ++j)
      if (y[j] != 0) row += m.at(i, j) * y[j];
    s += Rational(x[i]) * row;
  }
  return s;
}

// Exact inverse by Gauss-Jordan elimination.
inline RatMat rat_inverse(const RatMat& m) {
  if (m.rows != m.cols) throw InvariantViolationError("inverse of non-square matrix");
  int n = m.rows;
  RatMat a = m, inv = RatMat::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (a.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) throw InvariantViolationError("singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a.at(piv, j), a.at(col, j));
        std::swap(inv.at(piv, j), inv.at(col, j));
      }
    Rational d = a.at(col, col);
    for (int j = 0; j < n; ++j) { a.at(col, j) /= d; inv.at(col, j) /= d; }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      Rational f = a.at(i, col);
      if (f == 0) continue;
      for (int j = 0; j < n; ++j) {
        a.at(i, j) -= f * a.at(col, j);
        inv.at(i, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

inline Rational rat_determinant(RatMat a) {
  if (a.rows != a.cols) throw InvariantViolationError("determinant of non-square matrix");
  int n = a.rows;
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (a.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) return Rational(0);
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a.at(piv, j), a.at(col, j));
      det = -det;
    }
    det *= a.at(col, col);
    for (int i = col + 1; i < n; ++i) {
      Rational f = a.at(i, col) / a.at(col, col);
      if (f == 0) continue;
      for (int j = col; j < n; ++j) a.at(i, j) -= f * a.at(col, j);
    }
  }
  return det;
}

// All leading principal minors, for the exact positive-definiteness test.
inline std::vector<Rational> leading_principal_minors(const RatMat& m) {
  std::vector<Rational> minors;
  for (int k = 1; k <= m.rows; ++k) {
    RatMat sub(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub.at(i, j) = m.at(i, j);
    minors.push_back(rat_determinant(sub));
  }
  return minors;
}

// ---------------------------------------------------------------------------
// Integer normal forms.  Used for lattice cosets, adapted bases of sublattices
// and membership tests.  Entries stay tiny at the ranks this library targets;
// BigInt removes any overflow concern in intermediate steps.

struct RowHNF {
  BigMat h;              // row Hermite normal form
  BigMat u;              // unimodular, u * a = h
  std::vector<int> pivot_col;  // per nonzero row
};

// Row-style HNF: pivots positive, entries above a pivot reduced to [0, pivot),
// zero rows at the bottom.
inline RowHNF row_hnf(BigMat a) {
  int m = a.rows, n = a.cols;
  BigMat u = BigMat::identity(m);
  auto swap_rows = [&](int i, int j) {
    for (int k = 0; k < n; ++k) std::swap(a.at(i, k), a.at(j, k));
    for (int k = 0; k < m; ++k) std::swap(u.at(i, k), u.at(j, k));
  };
  auto addmul_row = [&](int dst, int src, const BigInt& f) {
    for (int k = 0; k < n; ++k) a.at(dst, k) += f * a.at(src, k);
    for (int k = 0; k < m; ++k) u.at(dst, k) += f * u.at(src, k);
  };
  auto negate_row = [&](int i) {
    for (int k = 0; k < n; ++k) a.at(i, k) = -a.at(i, k);
    for (int k = 0; k < m; ++k) u.at(i, k) = -u.at(i, k);
  };

  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    // gcd out the column below `row`
    while (true) {
      int best = -1;
      for (int i = row; i < m; ++i)
        if (a.at(i, col) != 0 && (best < 0 || abs(a.at(i, col)) < abs(a.at(best, col))))
          best = i;
      if (best < 0) break;
      swap_rows(row, best);
      bool done = true;
      for (int i = row + 1; i < m; ++i) {
        if (a.at(i, col) == 0) continue;
        BigInt q = a.at(i, col) / a.at(row, col);
        addmul_row(i, row, -q);
        if (a.at(i, col) != 0) done = false;
      }
      if (done) break;
    }
    if (row < m && a.at(row, col) != 0) {
      if (a.at(row, col) < 0) negate_row(row);
      // reduce entries above the pivot
      for (int i = 0; i < row; ++i) {
        BigInt q = a.at(i, col);
        // floor division toward canonical range [0, pivot)
        BigInt p = a.at(row, col);
        BigInt f = q / p;
        if (q - f * p < 0) f -= 1;
        if (f != 0) addmul_row(i, row, -f);
      }
      pivots.push_back(col);
      ++row;
    }
  }
  return RowHNF{a, u, pivots};
}

// Is x in the lattice generated by the rows of hnf.h?
inline bool lattice_contains(const RowHNF& hnf, const IVec& x) {
  std::vector<BigInt> v(x.begin(), x.end());
  for (size_t r = 0; r < hnf.pivot_col.size(); ++r) {
    int c = hnf.pivot_col[r];
    if (v[c] == 0) continue;
    BigInt p = hnf.h.at(static_cast<int>(r), c);
    if (v[c] % p != 0) return false;
    BigInt f = v[c] / p;
    for (int k = 0; k < hnf.h.cols; ++k) v[k] -= f * hnf.h.at(static_cast<int>(r), k);
  }
  for (const auto& e : v)
    if (e != 0) return false;
  return true;
}

struct SNF {
  BigMat d;  // u * a * v = d, diagonal with d11 | d22 | ...
  BigMat u;  // unimodular m x m
  BigMat v;  // unimodular n x n
};

inline SNF smith_normal_form(BigMat a) {
  int m = a.rows, n = a.cols;
  BigMat u = BigMat::identity(m), v = BigMat::identity(n);

  auto row_addmul = [&](int dst, int src, const BigInt& f) {
    for (int k = 0; k < n; ++k) a.at(dst, k) += f * a.at(src, k);
    for (int k = 0; k < m; ++k) u.at(dst, k) += f * u.at(src, k);
  };
  auto col_addmul = [&](int dst, int src, const BigInt& f) {
    for (int k = 0; k < m; ++k) a.at(k, dst) += f * a.at(k, src);
    for (int k = 0; k < n; ++k) v.at(k, dst) += f * v.at(k, src);
  };
  auto row_swap = [&](int i, int j) {
    for (int k = 0; k < n; ++k) std::swap(a.at(i, k), a.at(j, k));
    for (int k = 0; k < m; ++k) std::swap(u.at(i, k), u.at(j, k));
  };
  auto col_swap = [&](int i, int j) {
    for (int k = 0; k < m; ++k) std::swap(a.at(k, i), a.at(k, j));
    for (int k = 0; k < n; ++k) std::swap(v.at(k, i), v.at(k, j));
  };
  auto row_negate = [&](int i) {
    for (int k = 0; k < n; ++k) a.at(i, k) = -a.at(i, k);
    for (int k = 0; k < m; ++k) u.at(i, k) = -u.at(i, k);
  };

  int t = 0;
  while (t < std::min(m, n)) {
    // find the smallest nonzero entry in the remaining block
    int pi = -1, pj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (a.at(i, j) != 0 &&
            (pi < 0 || abs(a.at(i, j)) < abs(a.at(pi, pj)))) { pi = i; pj = j; }
    if (pi < 0) break;
    row_swap(t, pi);
    col_swap(t, pj);

    bool clean = true;
    for (int i = t + 1; i < m; ++i) {
      if (a.at(i, t) == 0) continue;
      row_addmul(i, t, -(a.at(i, t) / a.at(t, t)));
      if (a.at(i, t) != 0) clean = false;
    }
    for (int j = t + 1; j < n; ++j) {
      if (a.at(t, j) == 0) continue;
      col_addmul(j, t, -(a.at(t, j) / a.at(t, t)));
      if (a.at(t, j) != 0) clean = false;
    }
    if (!clean) continue;

    // divisibility: fold any non-multiple into the pivot and redo
    bool redo = false;
    for (int i = t + 1; i < m && !redo; ++i)
      for (int j = t + 1; j < n && !redo; ++j)
        if (a.at(i, j) % a.at(t, t) != 0) {
          row_addmul(t, i, 1);
          redo = true;
        }
    if (redo) continue;
    if (a.at(t, t) < 0) row_negate(t);
    ++t;
  }
  return SNF{a, u, v};
}

// Given the rows of `gens` spanning a full-quotient-rank sublattice of Z^n,
// returns coset representatives of Z^n modulo that sublattice.
inline std::vector<IVec> lattice_quotient_reps(const BigMat& gens) {
  SNF snf = smith_normal_form(gens);
  int n = gens.cols;
  int rank = 0;
  while (rank < std::min(snf.d.rows, snf.d.cols) && snf.d.at(rank, rank) != 0) ++rank;
  if (rank != n)
    throw PreconditionError("lattice quotient is infinite");
  // Z^n / (rows of gens) = Z^n / span(d_i * w_i) where w_i are rows of v^{-1};
  // equivalently, coordinates in the w-basis live in Z/d_i.  Representatives
  // are sums c_i * w_i with 0 <= c_i < d_i.
  RatMat vr(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vr.at(i, j) = Rational(snf.v.at(i, j));
  RatMat vinv = rat_inverse(vr);  // rows of v^{-1} (as w-basis) are integral
  std::vector<IVec> reps;
  std::vector<std::int64_t> counter(n, 0), limits(n);
  for (int i = 0; i < n; ++i)
    limits[i] = snf.d.at(i, i).convert_to<std::int64_t>();
  while (true) {
    IVec rep(n, 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rational e = vinv.at(i, j) * counter[i];
        if (rat_den(e) != 1) throw InvariantViolationError("non-integral SNF basis");
        rep[j] += e.convert_to<std::int64_t>();
      }
    reps.push_back(rep);
    int k = n - 1;
    while (k >= 0 && ++counter[k] == limits[k]) counter[k--] = 0;
    if (k < 0) break;
  }
  return reps;
}

}  // namespace weyl
