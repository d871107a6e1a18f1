#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/linalg.hpp"
#include "weyl/rational.hpp"
#include "weyl/rootsys.hpp"
#include "weyl/util.hpp"

namespace weyl {

using Complex = std::complex<double>;

// Reduced rational a/q approximating a point of the unit circle, with
// q <= N and ||t - a/q|| < 1/(qN).
struct RationalApproximation {
  std::int64_t a = 0;
  std::int64_t q = 1;
  double distance = 0;
};

// Continued-fraction convergents: take the last one with denominator <= N.
// The next convergent's denominator exceeds N, which gives the Dirichlet
// bound |t - p/q| < 1/(q (N+1)).
inline RationalApproximation dirichlet_approx(double t_unit, std::int64_t n_scale) {
  if (n_scale < 1) throw PreconditionError("N must be >= 1");
  t_unit -= std::floor(t_unit);
  std::int64_t p_prev = 1, q_prev = 0;  // h_{-1}/k_{-1}
  std::int64_t p = 0, q = 1;            // h_0/k_0 for a_0 = 0 since t in [0,1)
  double x = t_unit;
  for (int iter = 0; iter < 64; ++iter) {
    double fx = std::floor(x);
    x -= fx;
    if (x < 1e-15) break;
    x = 1.0 / x;
    std::int64_t digit = static_cast<std::int64_t>(std::floor(x));
    if (digit <= 0) break;
    // guard against overflow in pathological tails
    if (q > (std::int64_t(1) << 40)) break;
    std::int64_t p_next = digit * p + p_prev;
    std::int64_t q_next = digit * q + q_prev;
    if (q_next > n_scale) break;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  std::int64_t a = ((p % q) + q) % q;
  RationalApproximation out;
  out.a = a;
  out.q = q;
  out.distance = circle_distance(t_unit - static_cast<double>(p) / static_cast<double>(q));
  return out;
}

// The major-arc bound N^d / (sqrt(q) (1 + N ||t/(2 pi D) - a/q||^{1/2}))^r.
struct Envelope {
  std::int64_t N = 1;
  int d = 1;
  int r = 1;
  Rational period_over_2pi = 1;  // D, so that t lives on [0, 2 pi D)

  double value(double t, const RationalApproximation& approx) const {
    double t_unit = t / (2 * std::numbers::pi * to_double(period_over_2pi));
    double off = circle_distance(t_unit - static_cast<double>(approx.a) /
                                              static_cast<double>(approx.q));
    double denom = std::sqrt(static_cast<double>(approx.q)) *
                   (1.0 + static_cast<double>(N) * std::sqrt(off));
    return std::pow(static_cast<double>(N), d) / std::pow(denom, r);
  }
};

inline double envelope_value(const Envelope& env, double t,
                             const RationalApproximation& approx) {
  return env.value(t, approx);
}

struct CountingReport {
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
  RationalApproximation approx;
};

// Brute-force check of the counting bound:
// sum_{|n| <= N} max(||n t||, 1/N)^{-2}  <=  C N^3 / (sqrt q (1 + N ||t - a/q||^{1/2}))^2.
inline CountingReport counting_sum_check(std::int64_t n_scale, double t_unit) {
  if (n_scale < 2) throw PreconditionError("N must be >= 2");
  double lhs = 0;
  double floor_val = 1.0 / static_cast<double>(n_scale);
  for (std::int64_t n = -n_scale; n <= n_scale; ++n) {
    double d = std::max(circle_distance(t_unit * static_cast<double>(n)), floor_val);
    lhs += 1.0 / (d * d);
  }
  RationalApproximation approx = dirichlet_approx(t_unit, n_scale);
  double off = circle_distance(t_unit - static_cast<double>(approx.a) /
                                            static_cast<double>(approx.q));
  double denom = std::sqrt(static_cast<double>(approx.q)) *
                 (1.0 + static_cast<double>(n_scale) * std::sqrt(off));
  double rhs = std::pow(static_cast<double>(n_scale), 3) / (denom * denom);
  return {lhs, rhs, lhs / rhs, approx};
}

// Coefficient function for Weyl-type sums, with its declared growth exponent:
// |D_{i_1}...D_{i_n} f| <= c N^{A - n} uniformly over |n_i| <= box_multiplier N.
struct SumCoefficient {
  std::function<double(const IVec&)> f;
  double growth_exponent = 0;  // A
  double constant = 1;         // c
};

struct WeylSumResult {
  Complex value{0, 0};
  double envelope = 0;
  double ratio = 0;
  std::int64_t terms = 0;
  RationalApproximation approx;
};

namespace detail {

// Iterated finite difference by inclusion-exclusion over shift subsets.
inline double iterated_difference(const std::function<double(const IVec&)>& f,
                                  const IVec& base, const std::vector<int>& dirs) {
  size_t n = dirs.size();
  double sum = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    IVec pt = base;
    int bits = 0;
    for (size_t k = 0; k < n; ++k)
      if (mask >> k & 1) {
        pt[dirs[k]] += 1;
        ++bits;
      }
    double sgn = ((n - bits) % 2 == 0) ? 1.0 : -1.0;
    sum += sgn * f(pt);
  }
  return sum;
}

}  // namespace detail

// F(t,H) = sum_{l in L} e^{-i t |l + l0|^2 + i <l, H>} phi((|l + l0|^2 + C)/N^2) f(l)
// over the lattice with the given Gram matrix, together with the ratio
// against N^{r+A} / (sqrt q (1 + N ||t/(2 pi D) - a/q||^{1/2}))^r.
inline WeylSumResult weyl_sum(const RatMat& gram, const SumCoefficient& coeff,
                              const std::vector<double>& offset, double c_offset,
                              std::int64_t n_scale, double t,
                              const std::vector<double>& h,
                              const std::function<double(double)>& phi,
                              double support_radius, std::uint64_t spot_seed = 1,
                              double box_multiplier = 4.0) {
  int r = gram.rows;
  if (static_cast<int>(offset.size()) != r || static_cast<int>(h.size()) != r)
    throw PreconditionError("offset and H must match the lattice rank");

  // spot-check the declared finite-difference growth before summing
  {
    SplitMix64 rng(spot_seed);
    std::int64_t box = static_cast<std::int64_t>(box_multiplier * n_scale);
    for (int trial = 0; trial < 24; ++trial) {
      IVec pt(r);
      for (int i = 0; i < r; ++i) pt[i] = rng.uniform_int(-box, box);
      int order = static_cast<int>(rng.uniform_int(1, 3));
      std::vector<int> dirs(order);
      for (int k = 0; k < order; ++k) dirs[k] = static_cast<int>(rng.uniform_int(0, r - 1));
      double diff = std::fabs(detail::iterated_difference(coeff.f, pt, dirs));
      double bound = coeff.constant *
                     std::pow(static_cast<double>(n_scale), coeff.growth_exponent - order);
      if (diff > bound)
        throw PreconditionError("coefficient fails its declared difference bound");
    }
  }

  Matrix<double> g = to_dmat(gram);
  RatMat ginv = rat_inverse(gram);
  double bound2 = support_radius * static_cast<double>(n_scale * n_scale) +
                  std::fabs(c_offset);
  double off_norm = 0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) off_norm += offset[i] * g.at(i, j) * offset[j];
  double reach = std::sqrt(bound2) + std::sqrt(std::max(off_norm, 0.0)) + 1;
  std::vector<std::int64_t> box(r);
  for (int i = 0; i < r; ++i)
    box[i] = static_cast<std::int64_t>(reach * std::sqrt(to_double(ginv.at(i, i)))) + 1;

  std::vector<Complex> terms;
  IVec n(r);
  for (int i = 0; i < r; ++i) n[i] = -box[i];
  while (true) {
    double q2 = 0;  // |l + l0|^2
    double ph = 0;  // <l, H>
    for (int i = 0; i < r; ++i) {
      double xi = static_cast<double>(n[i]) + offset[i];
      for (int j = 0; j < r; ++j) {
        q2 += xi * g.at(i, j) * (static_cast<double>(n[j]) + offset[j]);
        ph += static_cast<double>(n[i]) * g.at(i, j) * h[j];
      }
    }
    double phi_val = phi((q2 + c_offset) / static_cast<double>(n_scale * n_scale));
    if (phi_val != 0.0)
      terms.push_back(phi_val * coeff.f(n) * std::polar(1.0, -t * q2 + ph));
    int idx = r - 1;
    while (idx >= 0 && ++n[idx] > box[idx]) n[idx--] = -box[idx];
    if (idx < 0) break;
  }

  // lattice period D: least natural number with D <w_i, w_j> integral
  BigInt dper = 1;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) dper = int_lcm(dper, rat_den(gram.at(i, j)));

  WeylSumResult out;
  out.value = tree_sum(terms);
  out.terms = static_cast<std::int64_t>(terms.size());
  double dd = dper.convert_to<double>();
  double t_unit = t / (2 * std::numbers::pi * dd);
  out.approx = dirichlet_approx(t_unit - std::floor(t_unit), n_scale);
  double off = circle_distance(t_unit - static_cast<double>(out.approx.a) /
                                            static_cast<double>(out.approx.q));
  double denom = std::sqrt(static_cast<double>(out.approx.q)) *
                 (1.0 + static_cast<double>(n_scale) * std::sqrt(off));
  out.envelope = std::pow(static_cast<double>(n_scale), r + coeff.growth_exponent) /
                 std::pow(denom, r);
  out.ratio = std::abs(out.value) / out.envelope;
  return out;
}

}  // namespace weyl
