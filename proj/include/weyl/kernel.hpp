#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "weyl/characters.hpp"
#include "weyl/errors.hpp"
#include "weyl/rootsys.hpp"
#include "weyl/util.hpp"

namespace weyl {

// Smooth compactly supported frequency cutoff.
struct Cutoff {
  enum class Family { bump_default, custom };
  Family family = Family::bump_default;
  double support_radius = 2.0;
  std::function<double(double)> fn;  // used when family == custom

  double operator()(double x) const {
    if (family == Family::bump_default) {
      double u = x / 2.0;
      if (u <= -1.0 || u >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    return std::fabs(x) >= support_radius ? 0.0 : fn(x);
  }

  static Cutoff bump() { return Cutoff{}; }
  static Cutoff custom(double radius, std::function<double(double)> f) {
    return Cutoff{Family::custom, radius, std::move(f)};
  }
};

enum class KernelMethod { weight_chamber, weight_lattice, root_coset, stable_multiplicity };

inline std::string kernel_method_name(KernelMethod m) {
  switch (m) {
    case KernelMethod::weight_chamber: return "weight_chamber";
    case KernelMethod::weight_lattice: return "weight_lattice";
    case KernelMethod::root_coset: return "root_coset";
    case KernelMethod::stable_multiplicity: return "stable_multiplicity";
  }
  return "?";
}

struct KernelSpec {
  std::int64_t N = 8;
  Cutoff cutoff;
  KernelMethod method = KernelMethod::weight_lattice;
  Rational beta = 1;  // metric scale; eigenvalues are beta^{-1}(|l|^2 - |rho|^2)
  std::int64_t term_budget = 8'000'000;
};

struct KernelValue {
  Complex value{0.0, 0.0};
  std::int64_t terms_summed = 0;
  KernelMethod method_used = KernelMethod::weight_lattice;
};

// All lattice points lambda with phi(k_lambda / N^2) != 0, sorted by
// nondecreasing |lambda|^2 (ties by coordinates) for deterministic summation.
inline std::vector<IVec> enumerate_weights(const RootSystem& rs, const KernelSpec& spec) {
  int r = rs.rank();
  // |lambda|^2 < beta * radius * N^2 + |rho|^2; coordinate box from the
  // inverse weight Gram diagonal.
  Rational radius(static_cast<long>(std::ceil(spec.cutoff.support_radius * 1024)) + 1, 1024);
  Rational bound2 =
      spec.beta * radius * Rational(spec.N) * Rational(spec.N) + rs.rho_norm2();
  double bound2_d = to_double(bound2);
  RatMat gw_inv = rat_inverse(rs.gram_weight());
  std::vector<std::int64_t> box(r);
  for (int i = 0; i < r; ++i)
    box[i] = static_cast<std::int64_t>(std::sqrt(bound2_d * to_double(gw_inv.at(i, i)))) + 1;
  std::int64_t cells = 1;
  for (int i = 0; i < r; ++i) {
    cells *= 2 * box[i] + 1;
    if (cells > spec.term_budget)
      throw ResourceError(cells, "weight enumeration box exceeds the term budget");
  }

  std::vector<std::pair<Rational, IVec>> found;
  IVec n(r);
  for (int i = 0; i < r; ++i) n[i] = -box[i];
  double inv_n2 = 1.0 / static_cast<double>(spec.N * spec.N);
  double beta_inv = 1.0 / to_double(spec.beta);
  while (true) {
    Rational n2 = rs.norm2_weight(n);
    if (n2 <= bound2) {
      double k = to_double(n2 - rs.rho_norm2()) * beta_inv;
      if (spec.cutoff(k * inv_n2) != 0.0) found.emplace_back(n2, n);
    }
    int idx = r - 1;
    while (idx >= 0 && ++n[idx] > box[idx]) n[idx--] = -box[idx];
    if (idx < 0) break;
  }
  std::sort(found.begin(), found.end());
  std::vector<IVec> out;
  out.reserve(found.size());
  for (auto& [n2, v] : found) out.push_back(std::move(v));
  return out;
}

// Shared per-(root system, N) kernel state: the enumerated support with
// cached eigenvalues and polynomial factors.
class KernelEvaluator {
 public:
  KernelEvaluator(const RootSystem& rs, KernelSpec spec)
      : rs_(&rs), spec_(std::move(spec)) {
    auto support = enumerate_weights(rs, spec_);
    nodes_.reserve(support.size());
    double beta_inv = 1.0 / to_double(spec_.beta);
    for (IVec& lam : support) {
      Node node;
      node.k = to_double(rs.casimir_eigenvalue(lam)) * beta_inv;
      node.phi = spec_.cutoff(node.k / static_cast<double>(spec_.N * spec_.N));
      node.pos_product = to_double(rs.positive_product(lam));
      node.dominant = rs.strictly_dominant(lam);
      node.lam = std::move(lam);
      nodes_.push_back(std::move(node));
    }
    pos_product_rho_ = to_double(rs.positive_product_rho());
    rho_k_ = to_double(rs.rho_norm2()) * beta_inv;
  }

  const RootSystem& root_system() const { return *rs_; }
  const KernelSpec& spec() const { return spec_; }
  std::int64_t support_size() const { return static_cast<std::int64_t>(nodes_.size()); }

  KernelValue evaluate(double t, const TorusPoint& h) const {
    return evaluate(t, h, spec_.method);
  }

  KernelValue evaluate(double t, const TorusPoint& h, KernelMethod method) const {
    switch (method) {
      case KernelMethod::weight_chamber: return eval_chamber(t, h);
      case KernelMethod::weight_lattice: return eval_lattice(t, h);
      case KernelMethod::root_coset: return eval_coset(t, h);
      case KernelMethod::stable_multiplicity: return eval_stable(t, h);
    }
    throw PreconditionError("unknown kernel method");
  }

 private:
  struct Node {
    IVec lam;
    double k = 0;
    double phi = 0;
    double pos_product = 0;
    bool dominant = false;
  };

  KernelValue eval_chamber(double t, const TorusPoint& h) const {
    std::vector<Complex> terms;
    std::int64_t count = 0;
    for (const Node& node : nodes_) {
      if (!node.dominant) continue;
      ++count;
      Complex chi = char_ratio_quotient(*rs_, node.lam, h);
      double d = node.pos_product / pos_product_rho_;
      terms.push_back(node.phi * d * std::polar(1.0, -t * node.k) * chi);
    }
    return {tree_sum(terms), count, KernelMethod::weight_chamber};
  }

  KernelValue eval_lattice(double t, const TorusPoint& h) const {
    double mind = h.min_wall_distance();
    if (mind < kWallTolerance) throw WallTooCloseError(mind, kWallTolerance);
    // e^{it|rho|^2} / (prod <a,rho> D_P(H)) sum_l e^{-it|l|^2 + i<l,H>} phi(...) prod <a,l>,
    // with the rho-shift and the rho-product kept explicit.
    std::vector<Complex> terms;
    terms.reserve(nodes_.size());
    for (const Node& node : nodes_) {
      double phase = -t * (node.k + rho_k_) + rs_->pair_weight_torus(node.lam, h.coords);
      terms.push_back(node.phi * node.pos_product * std::polar(1.0, phase));
    }
    Complex sum = tree_sum(terms);
    Complex pref = std::polar(1.0, t * rho_k_) /
                   (pos_product_rho_ * weyl_denominator(*rs_, h.coords));
    return {pref * sum, static_cast<std::int64_t>(nodes_.size()),
            KernelMethod::weight_lattice};
  }

  KernelValue eval_coset(double t, const TorusPoint& h) const {
    bool near_wall = h.min_wall_distance() < kWallTolerance;
    Complex total = 0;
    std::int64_t count = 0;
    for (const IVec& mu : rs_->lattice_cosets()) {
      std::vector<Complex> terms;
      for (const Node& node : nodes_) {
        if (rs_->coset_of(node.lam) != mu) continue;
        ++count;
        Complex chi = near_wall ? stable_ratio(node.lam, h)
                                : char_ratio_quotient(*rs_, node.lam, h);
        if (chi == Complex(0.0, 0.0)) continue;
        terms.push_back(node.phi * std::polar(1.0, -t * node.k) *
                        (node.pos_product / pos_product_rho_) * chi);
      }
      total += tree_sum(terms);
    }
    // 1/|W| bookkeeping of the full-lattice rewrite: every chamber
    // representative appears once per Weyl image
    return {total / static_cast<double>(rs_->weyl_group().size()), count,
            KernelMethod::root_coset};
  }

  KernelValue eval_stable(double t, const TorusPoint& h) const {
    std::vector<Complex> terms;
    std::int64_t count = 0;
    for (const Node& node : nodes_) {
      if (!node.dominant) continue;
      ++count;
      double d = node.pos_product / pos_product_rho_;
      Complex chi = character_stable(*rs_, node.lam, h);
      terms.push_back(node.phi * d * std::polar(1.0, -t * node.k) * chi);
    }
    return {tree_sum(terms), count, KernelMethod::stable_multiplicity};
  }

  // Antisymmetrized ratio for arbitrary integer weights, valid on the walls:
  // zero when the weight is wall-fixed, otherwise +-chi of the dominant
  // representative evaluated through the multiplicity table.
  Complex stable_ratio(const IVec& lam, const TorusPoint& h) const {
    IVec rep = lam;
    int sign = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < rs_->rank(); ++i) {
        if (rep[i] < 0) {
          std::int64_t ni = rep[i];
          for (int j = 0; j < rs_->rank(); ++j) rep[j] -= ni * rs_->cartan().at(i, j);
          sign = -sign;
          changed = true;
        }
      }
    }
    if (!rs_->strictly_dominant(rep)) return 0.0;  // wall-fixed: vanishes
    return static_cast<double>(sign) * character_stable(*rs_, rep, h);
  }

  const RootSystem* rs_;
  KernelSpec spec_;
  std::vector<Node> nodes_;
  double pos_product_rho_ = 1;
  double rho_k_ = 0;
};

inline KernelValue schrodinger_kernel(const RootSystem& rs, const KernelSpec& spec,
                                      double t, const TorusPoint& h) {
  return KernelEvaluator(rs, spec).evaluate(t, h);
}

// Circle factor: sum_n phi(alpha^{-1} n^2 / N^2) e^{-i t alpha^{-1} n^2 + i n theta}.
inline KernelValue torus_kernel(const Rational& alpha, std::int64_t n_scale,
                                const Cutoff& cutoff, double t, double theta) {
  if (alpha <= 0) throw NotRationalMetricError("circle scale must be positive");
  double alpha_inv = 1.0 / to_double(alpha);
  double n2max = cutoff.support_radius * static_cast<double>(n_scale * n_scale) /
                 alpha_inv;
  auto nmax = static_cast<std::int64_t>(std::sqrt(std::max(n2max, 0.0))) + 1;
  std::vector<Complex> terms;
  for (std::int64_t n = -nmax; n <= nmax; ++n) {
    double k = alpha_inv * static_cast<double>(n * n);
    double phi = cutoff(k / static_cast<double>(n_scale * n_scale));
    if (phi == 0.0) continue;
    terms.push_back(phi * std::polar(1.0, -t * k + theta * static_cast<double>(n)));
  }
  return {tree_sum(terms), static_cast<std::int64_t>(terms.size()),
          KernelMethod::weight_lattice};
}

// Rational product metric on T^n x G_1 x ... x G_m.
struct ProductMetric {
  std::vector<Rational> circle_scales;  // alpha_i
  std::vector<Rational> group_scales;   // beta_j
  Rational d0 = 1;                      // alpha_i^{-1}, beta_j^{-1} in d0^{-1} N

  static ProductMetric create(std::vector<Rational> circles, std::vector<Rational> groups) {
    ProductMetric m;
    m.circle_scales = std::move(circles);
    m.group_scales = std::move(groups);
    bool any = false;
    Rational d0;
    auto fold = [&](const Rational& scale) {
      if (scale <= 0) throw NotRationalMetricError("metric scales must be positive");
      Rational p = rational_period(1 / scale);
      d0 = any ? rational_lcm(d0, p) : p;
      any = true;
    };
    for (const Rational& a : m.circle_scales) fold(a);
    for (const Rational& b : m.group_scales) fold(b);
    if (!any) throw PreconditionError("empty product metric");
    m.d0 = d0;
    for (const Rational& a : m.circle_scales)
      if (rat_den(m.d0 / a) != 1) throw NotRationalMetricError("circle scale witness failed");
    for (const Rational& b : m.group_scales)
      if (rat_den(m.d0 / b) != 1) throw NotRationalMetricError("group scale witness failed");
    return m;
  }
};

// T = 2 pi D0 prod_j D_j; returned as T / (2 pi).
inline Rational flow_period_over_2pi(const ProductMetric& metric,
                                     const std::vector<const RootSystem*>& groups) {
  if (groups.size() != metric.group_scales.size())
    throw PreconditionError("product metric does not match the factor list");
  Rational t = metric.d0;
  for (const RootSystem* rs : groups) t *= Rational(rs->lattice_period());
  return t;
}

struct ProductPoint {
  std::vector<double> angles;       // one per circle factor
  std::vector<TorusPoint> points;   // one per simple factor
};

// Product kernel: the product of the factor kernels at a common time.
inline KernelValue product_kernel(const ProductMetric& metric,
                                  const std::vector<const RootSystem*>& groups,
                                  const KernelSpec& base_spec, double t,
                                  const ProductPoint& at) {
  if (at.angles.size() != metric.circle_scales.size() ||
      at.points.size() != groups.size())
    throw PreconditionError("product point does not match the factor list");
  KernelValue out;
  out.value = 1.0;
  out.terms_summed = 1;
  out.method_used = base_spec.method;
  for (size_t i = 0; i < metric.circle_scales.size(); ++i) {
    KernelValue f = torus_kernel(metric.circle_scales[i], base_spec.N, base_spec.cutoff,
                                 t, at.angles[i]);
    out.value *= f.value;
    out.terms_summed *= f.terms_summed;
  }
  for (size_t j = 0; j < groups.size(); ++j) {
    KernelSpec spec = base_spec;
    spec.beta = metric.group_scales[j];
    KernelValue f = KernelEvaluator(*groups[j], spec).evaluate(t, at.points[j]);
    out.value *= f.value;
    out.terms_summed *= f.terms_summed;
  }
  return out;
}

}  // namespace weyl
