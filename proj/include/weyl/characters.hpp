#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "weyl/demazure.hpp"
#include "weyl/errors.hpp"
#include "weyl/polynomial.hpp"
#include "weyl/rootsys.hpp"

namespace weyl {

using Complex = std::complex<double>;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

// Quotient-formula gate, in turns; keeps the Weyl denominator large enough
// for ~1e-8 relative accuracy in double precision.
inline constexpr double kWallTolerance = 1e-6;

struct WeightMultiplicityTable {
  std::map<IVec, std::int64_t> dominant;  // dominant weight -> multiplicity
  std::map<IVec, std::int64_t> full;      // orbit-expanded
  std::int64_t dimension = 0;
};

namespace detail {

inline WeightMultiplicityTable freudenthal(const RootSystem& rs, const IVec& lambda) {
  if (!rs.strictly_dominant(lambda))
    throw PreconditionError("weight multiplicities need a strictly dominant index");
  const int r = rs.rank();
  const IVec rho = rs.rho_weight();
  IVec hw = ivec_sub(lambda, rho);  // highest weight of the representation
  const Rational target = rs.norm2_weight(lambda);  // |hw + rho|^2
  const double target_d = to_double(target);

  // Enumerate dominant candidates hw - sum k_i a_i inside the shifted ball.
  std::vector<std::int64_t> kmax(r);
  for (int i = 0; i < r; ++i) {
    double gii = to_double(rs.gram_root_inv().at(i, i));
    kmax[i] = static_cast<std::int64_t>(2.0 * std::sqrt(target_d * gii)) + 2;
  }
  struct Cand {
    IVec mu;
    std::int64_t height;
  };
  std::vector<Cand> cands;
  IVec k(r, 0);
  while (true) {
    IVec mu = hw;
    std::int64_t height = 0;
    for (int i = 0; i < r; ++i) {
      height += k[i];
      if (k[i])
        for (int j = 0; j < r; ++j) mu[j] -= k[i] * rs.cartan().at(i, j);
    }
    bool dominant = std::all_of(mu.begin(), mu.end(),
                                [](std::int64_t v) { return v >= 0; });
    if (dominant) {
      Rational n2 = rs.norm2_weight(ivec_add(mu, rho));
      if (n2 < target || (height == 0)) cands.push_back({mu, height});
    }
    int idx = r - 1;
    while (idx >= 0 && ++k[idx] > kmax[idx]) k[idx--] = 0;
    if (idx < 0) break;
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.height < b.height; });

  WeightMultiplicityTable table;
  std::map<IVec, std::int64_t>& dom = table.dominant;
  const auto& posw = rs.positive_roots_weight();
  for (const Cand& cand : cands) {
    if (cand.height == 0) {
      dom[cand.mu] = 1;
      continue;
    }
    Rational num = 0;
    for (const IVec& alpha : posw) {
      std::int64_t kk = 1;
      while (true) {
        IVec nu = cand.mu;
        for (int j = 0; j < r; ++j) nu[j] += kk * alpha[j];
        Rational n2 = rs.norm2_weight(ivec_add(nu, rho));
        if (n2 > target) break;  // increasing in kk for dominant mu
        auto it = dom.find(rs.dominant_representative(nu));
        if (it != dom.end() && it->second > 0)
          num += Rational(it->second) * rs.pair_weight_weight(nu, alpha);
        ++kk;
      }
    }
    Rational denom = target - rs.norm2_weight(ivec_add(cand.mu, rho));
    Rational m = 2 * num / denom;
    if (rat_den(m) != 1 || m < 0)
      throw InvariantViolationError("Freudenthal multiplicity is not a nonnegative integer");
    std::int64_t mi = rat_num(m).convert_to<std::int64_t>();
    if (mi > 0) dom[cand.mu] = mi;
  }

  // Orbit expansion; multiplicities are Weyl-invariant.
  for (const auto& [mu, m] : dom) {
    for (const WeylElement& s : rs.weyl_group()) {
      IVec smu = imat_apply(s.mat_weight, mu);
      auto [it, inserted] = table.full.emplace(smu, m);
      if (!inserted && it->second != m)
        throw InvariantViolationError("orbit expansion produced conflicting multiplicities");
    }
  }
  for (const auto& [w, m] : table.full) table.dimension += m;
  WeylDimension d = rs.weyl_dimension(lambda);
  if (table.dimension != d.value)
    throw InvariantViolationError("multiplicity total does not match the Weyl dimension");
  return table;
}

// Small synchronized LRU keyed by (root system, weight).
template <class V>
class LruCache {
 public:
  explicit LruCache(size_t cap) : cap_(cap) {}

  template <class F>
  std::shared_ptr<const V> get(const std::string& key, F&& make) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
    auto value = std::make_shared<const V>(make());
    order_.push_front(key);
    map_.emplace(key, std::make_pair(value, order_.begin()));
    if (map_.size() > cap_) {
      map_.erase(order_.back());
      order_.pop_back();
    }
    return value;
  }

 private:
  size_t cap_;
  std::mutex mu_;
  std::list<std::string> order_;
  std::map<std::string, std::pair<std::shared_ptr<const V>, std::list<std::string>::iterator>> map_;
};

inline std::string ivec_key(const IVec& v) {
  std::string s;
  for (auto x : v) s += std::to_string(x) + ",";
  return s;
}

}  // namespace detail

inline std::shared_ptr<const WeightMultiplicityTable> weight_multiplicities(
    const RootSystem& rs, const IVec& lambda) {
  static detail::LruCache<WeightMultiplicityTable> cache(512);
  std::string key = rs.name() + "|" + detail::ivec_key(lambda);
  return cache.get(key, [&] { return detail::freudenthal(rs, lambda); });
}

// Weyl denominator sum_s det(s) e^{i <s rho, H>}.
inline Complex weyl_denominator(const RootSystem& rs, const std::vector<double>& h) {
  Complex den = 0;
  IVec rho = rs.rho_weight();
  for (const WeylElement& s : rs.weyl_group()) {
    double phase = rs.pair_weight_torus(imat_apply(s.mat_weight, rho), h);
    den += static_cast<double>(s.det) * std::polar(1.0, phase);
  }
  return den;
}

// Antisymmetrized ratio sum_s det(s) e^{i<s lambda,H>} / D_P(H) for any
// integer weight; equals the character when lambda is strictly dominant.
inline Complex char_ratio_quotient(const RootSystem& rs, const IVec& lambda,
                                   const TorusPoint& h) {
  double mind = h.min_wall_distance();
  if (mind < kWallTolerance) throw WallTooCloseError(mind, kWallTolerance);
  Complex num = 0;
  for (const WeylElement& s : rs.weyl_group()) {
    double phase = rs.pair_weight_torus(imat_apply(s.mat_weight, lambda), h.coords);
    num += static_cast<double>(s.det) * std::polar(1.0, phase);
  }
  return num / weyl_denominator(rs, h.coords);
}

inline Complex character_quotient(const RootSystem& rs, const IVec& lambda,
                                  const TorusPoint& h) {
  if (!rs.strictly_dominant(lambda))
    throw PreconditionError("quotient character needs a strictly dominant index");
  return char_ratio_quotient(rs, lambda, h);
}

// Multiplicity-weighted exponential sum; valid everywhere, exact d_lambda at
// H = 0 up to rounding.
inline Complex character_stable(const RootSystem& rs, const IVec& lambda,
                                const TorusPoint& h) {
  auto table = weight_multiplicities(rs, lambda);
  Complex sum = 0;
  for (const auto& [w, m] : table->full) {
    double phase = rs.pair_weight_torus(w, h.coords);
    sum += static_cast<double>(m) * std::polar(1.0, phase);
  }
  return sum;
}

struct SeriesValue {
  Complex value{0.0, 0.0};
  double tail_bound = 0.0;
  int terms_used = 0;
};

namespace detail {

// Per-(root system, weight) polynomials q_m = delta(f_m)/|W| with
// f_m = sum_s det(s) <s lambda, .>^m, i.e. f_m / d_det by the anti-invariant
// factorization; double coefficients, exactness covered by the demazure
// module's exact tests.
struct SeriesPolys {
  std::vector<DblPoly> q;  // index m in [0, M]
  int order = 0;
};

inline SeriesPolys make_series_polys(const RootSystem& rs, const IVec& lambda, int order) {
  const int r = rs.rank();
  SeriesPolys sp;
  sp.order = order;
  sp.q.assign(order + 1, DblPoly(r));

  std::vector<DblPoly> pw;   // running powers of <s lambda, .>
  std::vector<DblPoly> lin;  // the linear forms themselves
  std::vector<int> dets;
  for (const WeylElement& s : rs.weyl_group()) {
    IVec sl = imat_apply(s.mat_weight, lambda);
    lin.push_back(weight_functional_poly<double>(rs, sl, 0.0));
    pw.push_back(DblPoly::constant(r, 1.0));
    dets.push_back(s.det);
  }
  std::vector<RatVec> pos_functionals;
  for (const IVec& a : rs.positive_roots_root())
    pos_functionals.push_back(root_functional(rs, a));
  const int np = rs.num_positive_roots();

  for (int m = 0; m <= order; ++m) {
    if (m > 0)
      for (size_t s = 0; s < pw.size(); ++s) pw[s] = pw[s] * lin[s];
    if (m < np) continue;  // delta lowers degree by |P|
    DblPoly fm(r);
    double raw_scale = 1.0;
    for (size_t s = 0; s < pw.size(); ++s) {
      raw_scale = std::max(raw_scale, pw[s].max_coeff_magnitude());
      if (dets[s] > 0)
        fm += pw[s];
      else
        fm -= pw[s];
    }
    // rounding noise floor is set by the powers before antisymmetrization
    double noise = 1e-10 * raw_scale;
    for (const RatVec& g : pos_functionals) {
      if (fm.is_zero()) break;
      fm = divide_by_linear(std::move(fm), g, 1e-8, noise);
    }
    sp.q[m] = std::move(fm);
  }
  return sp;
}

inline std::shared_ptr<const SeriesPolys> series_polys(const RootSystem& rs,
                                                       const IVec& lambda, int order) {
  static LruCache<SeriesPolys> cache(512);
  std::string key = rs.name() + "|" + weyl::to_string(rs.form().scale) + "|" +
                    ivec_key(lambda) + "|" + std::to_string(order);
  return cache.get(key, [&] { return make_series_polys(rs, lambda, order); });
}

inline double signed_frac(double x) {  // in (-1/2, 1/2]
  return x - std::ceil(x - 0.5);
}

// x / (e^{ix} - 1) = -i e^{-ix/2} x / (2 sin(x/2)), stable near x = 0.
inline Complex wall_factor(double x) {
  double g = (x == 0.0) ? 1.0 : x / (2.0 * std::sin(0.5 * x));
  return Complex(0.0, -1.0) * std::polar(g, -0.5 * x);
}

}  // namespace detail

// Character (or antisymmetrized ratio, for non-dominant weights) through the
// wall-splitting H = H1 + H2 and the power series in H1, reorganized so every
// factor stays bounded near the walls.  Returns the value together with a
// tail bound estimated from the computed terms.
inline SeriesValue char_ratio_series(const RootSystem& rs, const IVec& lambda,
                                     const TorusPoint& h, int order = 40,
                                     double target_rel_tol = 1e-6) {
  const int r = rs.rank();
  // Split off the wall-lattice part using the duals of the simple roots.
  std::vector<double> v(r);
  for (int i = 0; i < r; ++i) {
    IVec e(r, 0);
    e[i] = 1;
    double x = rs.pair_root_torus(e, h.coords) / kTwoPi;
    double frac = detail::signed_frac(x);
    if (std::fabs(frac) > 0.26)
      throw PreconditionError(
          "torus point is too far from the walls for the series decomposition");
    v[i] = kTwoPi * frac;
  }
  std::vector<double> h1(r, 0.0);
  Matrix<double> ginv = to_dmat(rs.gram_root_inv());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) h1[i] += ginv.at(i, j) * v[j];
  std::vector<double> h2(r);
  for (int i = 0; i < r; ++i) h2[i] = h.coords[i] - h1[i];

  // Bounded per-root factors <a,H1> / (e^{i<a,H1>} - 1).
  Complex factors = 1.0;
  for (const IVec& a : rs.positive_roots_root()) {
    double x = rs.pair_root_torus(a, h1);
    if (std::fabs(x) > 1.6 * std::numbers::pi)
      throw PreconditionError("positive-root phase too large for the series split");
    factors *= detail::wall_factor(x);
  }
  Complex prefactor =
      std::polar(1.0, rs.pair_weight_torus(lambda, h2) +
                          rs.pair_weight_torus(rs.rho_weight(), h.coords));

  auto sp = detail::series_polys(rs, lambda, order);
  const int np = rs.num_positive_roots();
  std::vector<double> h1_abs(r);
  for (int i = 0; i < r; ++i) h1_abs[i] = std::fabs(h1[i]);
  Complex series = 0;
  double log_mfact = 0;  // log m!
  double cancellation_scale = 0;  // sum over m of |q_m| evaluated termwise
  std::vector<double> magnitudes(order + 1, 0.0);
  Complex ipow(1.0, 0.0);
  const Complex iunit(0.0, 1.0);
  for (int m = 0; m <= order; ++m) {
    if (m > 0) log_mfact += std::log(static_cast<double>(m));
    if (m >= np && !sp->q[m].is_zero()) {
      double qm = eval_poly(sp->q[m], h1);
      double qabs = 0;
      for (const auto& [e, c] : sp->q[m].terms()) {
        double t = std::fabs(c);
        for (int i = 0; i < r; ++i)
          for (int k = 0; k < e[i]; ++k) t *= h1_abs[i];
        qabs += t;
      }
      double term_mag = std::fabs(qm) * std::exp(-log_mfact);
      magnitudes[m] = term_mag;
      cancellation_scale += qabs * std::exp(-log_mfact);
      series += ipow * std::exp(-log_mfact) * qm;
    }
    ipow *= iunit;
  }
  Complex value = prefactor * factors * series;
  // Coefficients carry rounding noise that the termwise cancellation can
  // amplify; report it so out-of-regime points are visibly unreliable.
  double rounding_abs = 1e-13 * cancellation_scale * std::abs(prefactor * factors);

  // Tail from the C^m/m! majorization: |q_m(h1)|/m! <= C^m/m! gives
  // C >= |q_m(h1)|^{1/m}, fitted over the last computed terms.
  double cfit = 0;
  {
    double lf = 0;
    for (int m = 1; m <= order; ++m) {
      lf += std::log(static_cast<double>(m));
      if (m >= std::max(np, order - 10) && magnitudes[m] > 0)
        cfit = std::max(cfit, std::exp((std::log(magnitudes[m]) + lf) / m));
    }
  }
  double tail = 0;
  if (cfit > 0) {
    double term = std::exp((order + 1) * std::log(cfit) - std::lgamma(order + 2.0));
    for (int m = order + 1; m < order + 400 && term > 1e-300; ++m) {
      tail += term;
      term *= cfit / (m + 1);
    }
  }
  double tail_abs = tail * std::abs(prefactor * factors);
  SeriesValue out{value, tail_abs + rounding_abs, order};
  double scale = std::abs(value);
  if (tail_abs > target_rel_tol * scale && tail_abs > 1e-300) {
    // While the terms are still growing the fitted C underestimates the true
    // argument, so pad it before solving C^m/m! < tolerance for m.
    int required = order;
    double c_safe = 1.5 * std::max(cfit, 1.0);
    double lc = std::log(c_safe);
    double lg = 0;
    double budget = std::log(std::max(target_rel_tol * std::max(scale, tail_abs), 1e-280));
    for (int m = 1; m < 4000; ++m) {
      lg += std::log(static_cast<double>(m));
      required = m;
      if (m > order && m * lc - lg < budget) break;
    }
    throw TruncationError(required,
                          "series truncation too small: tail bound " +
                              std::to_string(tail_abs) + " exceeds tolerance; need about " +
                              std::to_string(required) + " terms");
  }
  return out;
}

inline SeriesValue character_series_near_wall(const RootSystem& rs, const IVec& lambda,
                                              const TorusPoint& h, int order = 40,
                                              double target_rel_tol = 1e-6) {
  if (!rs.strictly_dominant(lambda))
    throw PreconditionError("series character needs a strictly dominant index");
  return char_ratio_series(rs, lambda, h, order, target_rel_tol);
}

}  // namespace weyl
