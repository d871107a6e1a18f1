#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weyl/arcs.hpp"
#include "weyl/kernel.hpp"
#include "weyl/report.hpp"
#include "weyl/rootsys.hpp"
#include "weyl/util.hpp"

namespace weyl {

enum class Scenario { identity, near_all_walls, mixed_subsystem, generic };

inline std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::identity: return "identity";
    case Scenario::near_all_walls: return "near_all_walls";
    case Scenario::mixed_subsystem: return "mixed_subsystem";
    case Scenario::generic: return "generic";
  }
  return "?";
}

struct ScenarioSample {
  TorusPoint h;
  Scenario tag = Scenario::generic;
  std::string subsystem;  // positive-root index set of Phi_H, for mixed tags
};

// Flow period of the beta-scaled kernel, as a multiple of 2 pi: the least
// rational P with P * beta^{-1} (|l|^2 - |rho|^2) integral for all weights.
inline Rational kernel_period_over_2pi(const RootSystem& rs, const Rational& beta) {
  return Rational(rs.lattice_period()) * rational_period(1 / beta);
}

struct TimeSample {
  double t = 0;        // seconds, in [0, 2 pi D)
  std::int64_t a = 0;  // arc data of t / (2 pi D)
  std::int64_t q = 1;
  double offset = 0;   // ||t/(2 pi D) - a/q||
  std::string kind;    // center / edge / random
};

struct GridParams {
  int per_scenario = 10;
  std::int64_t q_max = 8;
  bool arc_edges = true;
  int random_t = 4;
};

// Tag a torus point by its active-wall subsystem at scale N.
inline ScenarioSample classify_sample(const RootSystem& rs, TorusPoint h,
                                      std::int64_t n_scale) {
  ScenarioSample s;
  auto dec = root_subsystem(rs, h, n_scale);
  if (dec.empty()) {
    s.tag = Scenario::generic;
  } else if (dec.subsystem_pos.size() ==
             static_cast<size_t>(rs.num_positive_roots())) {
    bool at_zero = true;
    for (double d : h.wall_distances)
      if (d > 1e-12) at_zero = false;
    s.tag = at_zero ? Scenario::identity : Scenario::near_all_walls;
  } else {
    s.tag = Scenario::mixed_subsystem;
    for (size_t i = 0; i < dec.subsystem_pos.size(); ++i)
      s.subsystem += (i ? "+" : "") + std::to_string(dec.subsystem_pos[i]);
  }
  s.h = std::move(h);
  return s;
}

// Wall-stratified torus grid with all scenario tags populated (the mixed tag
// exists only for rank >= 2).  Tags are recomputed for the given N.
inline std::vector<ScenarioSample> build_h_grid(const RootSystem& rs,
                                                std::int64_t n_scale,
                                                const GridParams& params,
                                                SplitMix64& rng) {
  int r = rs.rank();
  int height_max = 0;
  for (const IVec& a : rs.positive_roots_root()) {
    int ht = 0;
    for (auto v : a) ht += static_cast<int>(v);
    height_max = std::max(height_max, ht);
  }
  RatMat ginv = rs.gram_root_inv();
  auto from_simple_fracs = [&](const std::vector<double>& frac) {
    std::vector<double> coords(r, 0.0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        coords[i] += to_double(ginv.at(i, j)) * 2 * std::numbers::pi * frac[j];
    return make_torus_point(rs, coords);
  };

  std::vector<ScenarioSample> out;
  // identity element
  out.push_back(classify_sample(rs, make_torus_point(rs, std::vector<double>(r, 0.0)),
                                n_scale));
  // near all walls: every positive root within 1/N
  for (int k = 0; k < params.per_scenario; ++k) {
    std::vector<double> frac(r);
    for (int i = 0; i < r; ++i)
      frac[i] = rng.uniform(-1.0, 1.0) / static_cast<double>(n_scale * height_max);
    ScenarioSample s = classify_sample(rs, from_simple_fracs(frac), n_scale);
    out.push_back(std::move(s));
  }
  // mixed: one simple wall exact or near, the rest generic (rank >= 2)
  if (r >= 2) {
    int added = 0;
    int guard = 0;
    while (added < params.per_scenario && guard++ < 50 * params.per_scenario) {
      std::vector<double> frac(r);
      int wall = static_cast<int>(rng.uniform_int(0, r - 1));
      for (int i = 0; i < r; ++i) {
        if (i == wall)
          frac[i] = (rng.uniform01() < 0.5)
                        ? 0.0
                        : rng.uniform(-0.5, 0.5) / static_cast<double>(n_scale * height_max);
        else
          frac[i] = rng.uniform(0.15, 0.35) * (rng.uniform01() < 0.5 ? 1 : -1);
      }
      ScenarioSample s = classify_sample(rs, from_simple_fracs(frac), n_scale);
      if (s.tag != Scenario::mixed_subsystem) continue;
      out.push_back(std::move(s));
      ++added;
    }
  }
  // generic: everything farther than 1/N from the walls
  {
    int added = 0;
    int guard = 0;
    while (added < params.per_scenario && guard++ < 200 * params.per_scenario) {
      std::vector<double> coords(r);
      for (int i = 0; i < r; ++i) coords[i] = rng.uniform(0.0, 2 * std::numbers::pi);
      ScenarioSample s = classify_sample(rs, make_torus_point(rs, coords), n_scale);
      if (s.tag != Scenario::generic) continue;
      out.push_back(std::move(s));
      ++added;
    }
  }
  // extra density within 4/N of each wall (stratified refinement): these are
  // tagged by whatever they classify to
  for (int k = 0; k < params.per_scenario / 2 + 1; ++k) {
    std::vector<double> frac(r);
    for (int i = 0; i < r; ++i)
      frac[i] = rng.uniform(-4.0, 4.0) / static_cast<double>(n_scale * height_max);
    out.push_back(classify_sample(rs, from_simple_fracs(frac), n_scale));
  }
  return out;
}

// Major-arc time samples for t / (2 pi D): centers a/q for q <= q_max, edge
// offsets at 1/(2 q N), and uniform-random fillers (classified afterwards).
inline std::vector<TimeSample> build_t_samples(const Rational& period_over_2pi,
                                               std::int64_t n_scale,
                                               const GridParams& params,
                                               SplitMix64& rng) {
  std::vector<TimeSample> out;
  double period = 2 * std::numbers::pi * to_double(period_over_2pi);
  for (std::int64_t q = 1; q <= params.q_max; ++q) {
    for (std::int64_t a = 0; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      double center = static_cast<double>(a) / static_cast<double>(q);
      TimeSample c;
      c.t = period * center;
      c.a = a;
      c.q = q;
      c.offset = 0;
      c.kind = "center";
      out.push_back(c);
      if (params.arc_edges) {
        double off = 1.0 / (2.0 * static_cast<double>(q) * static_cast<double>(n_scale));
        TimeSample e;
        e.t = period * (center + off);
        e.a = a;
        e.q = q;
        e.offset = off;
        e.kind = "edge";
        out.push_back(e);
      }
    }
  }
  for (int k = 0; k < params.random_t; ++k) {
    double u = rng.uniform01();
    RationalApproximation ap = dirichlet_approx(u, n_scale);
    TimeSample t;
    t.t = period * u;
    t.a = ap.a;
    t.q = ap.q;
    t.offset = ap.distance;
    t.kind = "random";
    out.push_back(t);
  }
  return out;
}

struct BoundCell {
  double max_ratio = 0;
  double argmax_t = 0;
  std::vector<double> argmax_h;
  std::int64_t samples = 0;
};

struct BoundReport {
  std::string estimate;
  std::vector<std::int64_t> n_ladder;
  // (N, scenario) -> worst ratio
  std::map<std::pair<std::int64_t, std::string>, BoundCell> cells;
  std::map<std::string, double> fitted_constant;  // at the smallest N
  // (N, scenario) -> max-ratio growth from the previous dyadic N
  std::map<std::pair<std::int64_t, std::string>, double> growth;
  double growth_limit = 2.0;
  bool pass = true;
  std::vector<std::vector<std::string>> rows;  // CSV payload

  void finalize() {
    for (auto& [key, cell] : cells) {
      auto [n, scen] = key;
      auto prev = std::find(n_ladder.begin(), n_ladder.end(), n);
      if (prev == n_ladder.begin() || prev == n_ladder.end()) {
        if (prev != n_ladder.end()) fitted_constant[scen] = cell.max_ratio;
        continue;
      }
      std::int64_t n_prev = *(prev - 1);
      auto it = cells.find({n_prev, scen});
      if (it == cells.end()) continue;
      double denom = std::max(it->second.max_ratio, 1e-12);
      double g = cell.max_ratio / denom;
      growth[{n, scen}] = g;
      if (g > growth_limit) pass = false;
    }
  }
};

// Evaluate |K_N(t, exp H)| with the method suited to the sample's position:
// the full-lattice route away from the walls, the stable route on them.
inline double kernel_abs(const KernelEvaluator& eval, double t, const TorusPoint& h) {
  KernelMethod m = (h.min_wall_distance() < kWallTolerance)
                       ? KernelMethod::stable_multiplicity
                       : KernelMethod::weight_lattice;
  return std::abs(eval.evaluate(t, h, m).value);
}

// sup over the torus grid of |K_N| against the major-arc envelope, tracked
// per dyadic N and scenario tag.
inline BoundReport dispersive_scan(const RootSystem& rs, const KernelSpec& base_spec,
                                   const std::vector<std::int64_t>& n_ladder,
                                   const GridParams& params, std::uint64_t seed,
                                   int threads = 1) {
  BoundReport report;
  report.estimate = "dispersive_sup";
  report.n_ladder = n_ladder;
  Rational period_over_2pi = kernel_period_over_2pi(rs, base_spec.beta);
  Envelope env{0, rs.dimension(), rs.rank(), period_over_2pi};

  for (std::int64_t n : n_ladder) {
    SplitMix64 rng(seed ^ (0x9e37ULL * n));
    KernelSpec spec = base_spec;
    spec.N = n;
    KernelEvaluator eval(rs, spec);
    auto h_grid = build_h_grid(rs, n, params, rng);
    auto t_samples = build_t_samples(period_over_2pi, n, params, rng);
    env.N = n;

    std::vector<double> values =
        parallel_map<double>(t_samples.size() * h_grid.size(), threads, [&](size_t idx) {
          const TimeSample& ts = t_samples[idx / h_grid.size()];
          const ScenarioSample& hs = h_grid[idx % h_grid.size()];
          return kernel_abs(eval, ts.t, hs.h);
        });

    for (size_t ti = 0; ti < t_samples.size(); ++ti) {
      const TimeSample& ts = t_samples[ti];
      RationalApproximation ap{ts.a, ts.q, ts.offset};
      double envelope = env.value(ts.t, ap);
      for (size_t hi = 0; hi < h_grid.size(); ++hi) {
        const ScenarioSample& hs = h_grid[hi];
        double ratio = values[ti * h_grid.size() + hi] / envelope;
        auto& cell = report.cells[{n, scenario_name(hs.tag)}];
        ++cell.samples;
        if (ratio > cell.max_ratio) {
          cell.max_ratio = ratio;
          cell.argmax_t = ts.t;
          cell.argmax_h = hs.h.coords;
        }
        report.rows.push_back({fmt_int(n), fmt_double(ts.t), fmt_int(ts.a), fmt_int(ts.q),
                               fmt_double(ts.offset),
                               fmt_double(values[ti * h_grid.size() + hi]),
                               fmt_double(envelope), fmt_double(ratio),
                               scenario_name(hs.tag)});
      }
    }
  }
  report.finalize();
  return report;
}

// L^p norm of K_N(t, .) by Weyl-integration quadrature on the maximal torus,
// with grid-refinement self-checking, against N^{d - d/p} envelopes.
inline BoundReport lp_scan(const RootSystem& rs, const KernelSpec& base_spec,
                           const std::vector<std::int64_t>& n_ladder, double p,
                           const GridParams& params, std::uint64_t seed,
                           int threads = 1, int base_points_per_n = 64) {
  if (rs.rank() > 2)
    throw PreconditionError("lp_scan quadrature supports rank <= 2");
  BoundReport report;
  report.estimate = "lp_norm";
  report.n_ladder = n_ladder;
  Rational period_over_2pi = kernel_period_over_2pi(rs, base_spec.beta);
  Envelope env{0, rs.dimension(), rs.rank(), period_over_2pi};
  const double wsize = static_cast<double>(rs.weyl_group().size());

  auto lp_norm = [&](const KernelEvaluator& eval, double t, std::int64_t points) {
    int r = rs.rank();
    // uniform grid in coroot coordinates over [0, 2 pi)^r
    std::vector<std::int64_t> dims(r, points);
    std::int64_t total = 1;
    for (int i = 0; i < r; ++i) total *= dims[i];
    std::vector<double> cell_vals = parallel_map<double>(
        static_cast<size_t>(total), threads, [&](size_t idx) {
          std::vector<double> coords(r);
          size_t rem = idx;
          for (int i = 0; i < r; ++i) {
            std::int64_t ci = static_cast<std::int64_t>(rem % dims[i]);
            rem /= dims[i];
            double c = (static_cast<double>(ci) + 0.5) * 2 * std::numbers::pi /
                       static_cast<double>(dims[i]);
            double li = to_double(rs.gram_root().at(i, i));
            coords[i] = 2.0 * c / li;
          }
          TorusPoint h = make_torus_point(rs, coords);
          double kv = kernel_abs(eval, t, h);
          double dp = std::abs(weyl_denominator(rs, h.coords));
          return std::pow(kv, p) * dp * dp;
        });
    double sum = 0;
    for (double v : cell_vals) sum += v;
    double avg = sum / static_cast<double>(total);
    return std::pow(avg / wsize, 1.0 / p);
  };

  for (std::int64_t n : n_ladder) {
    SplitMix64 rng(seed ^ (0x517cULL * n));
    KernelSpec spec = base_spec;
    spec.N = n;
    KernelEvaluator eval(rs, spec);
    auto t_samples = build_t_samples(period_over_2pi, n, params, rng);
    env.N = n;
    for (const TimeSample& ts : t_samples) {
      std::int64_t points = base_points_per_n * n;
      double coarse = lp_norm(eval, ts.t, points / 2);
      double fine = lp_norm(eval, ts.t, points);
      if (std::fabs(fine - coarse) > 0.05 * std::max(fine, 1e-30))
        throw ResolutionError("lp quadrature did not converge at N = " +
                              std::to_string(n));
      RationalApproximation ap{ts.a, ts.q, ts.offset};
      double envelope = env.value(ts.t, ap) *
                        std::pow(static_cast<double>(n), -static_cast<double>(rs.dimension()) / p);
      double ratio = fine / envelope;
      auto& cell = report.cells[{n, std::string("lp")}];
      ++cell.samples;
      if (ratio > cell.max_ratio) {
        cell.max_ratio = ratio;
        cell.argmax_t = ts.t;
      }
      report.rows.push_back({fmt_int(n), fmt_double(ts.t), fmt_int(ts.a), fmt_int(ts.q),
                             fmt_double(ts.offset), fmt_double(fine), fmt_double(envelope),
                             fmt_double(ratio), "lp"});
    }
  }
  report.finalize();
  return report;
}

// Product-group dispersive scan: the product kernel against the product
// envelope N^d / (sqrt q (1 + N ||t/T - a/q||^{1/2}))^r with d, r summed over
// the factors and T the rational-metric flow period.  Also verifies the
// period itself: |K(T) - K(0)| must vanish.
struct ProductScanResult {
  BoundReport report;
  Rational period_over_2pi;
  double period_defect = 0;  // |K(T)-K(0)| / |K(0)|
  bool period_pass = false;
};

inline ProductScanResult product_dispersive_scan(
    const ProductMetric& metric, const std::vector<const RootSystem*>& groups,
    const KernelSpec& base_spec, const std::vector<std::int64_t>& n_ladder,
    const GridParams& params, std::uint64_t seed) {
  ProductScanResult out;
  out.report.estimate = "product_dispersive_sup";
  out.report.n_ladder = n_ladder;
  out.period_over_2pi = flow_period_over_2pi(metric, groups);
  int d_total = static_cast<int>(metric.circle_scales.size());
  int r_total = static_cast<int>(metric.circle_scales.size());
  for (const RootSystem* g : groups) {
    d_total += g->dimension();
    r_total += g->rank();
  }
  Envelope env{0, d_total, r_total, out.period_over_2pi};

  for (std::int64_t n : n_ladder) {
    SplitMix64 rng(seed ^ (0xfaceULL * n));
    KernelSpec spec = base_spec;
    spec.N = n;
    auto t_samples = build_t_samples(out.period_over_2pi, n, params, rng);
    env.N = n;
    // point grid: random angles paired with wall-stratified group samples
    std::vector<std::pair<ProductPoint, std::string>> pts;
    for (int k = 0; k < params.per_scenario; ++k) {
      ProductPoint at;
      for (size_t i = 0; i < metric.circle_scales.size(); ++i)
        at.angles.push_back(rng.uniform(0.0, 2 * std::numbers::pi));
      std::string tag = "generic";
      for (const RootSystem* g : groups) {
        auto grid = build_h_grid(*g, n, GridParams{1, params.q_max, false, 0}, rng);
        const auto& pick = grid[rng.uniform_int(0, static_cast<std::int64_t>(grid.size()) - 1)];
        at.points.push_back(pick.h);
        tag = scenario_name(pick.tag);
      }
      pts.emplace_back(std::move(at), tag);
    }
    for (const TimeSample& ts : t_samples) {
      RationalApproximation ap{ts.a, ts.q, ts.offset};
      double envelope = env.value(ts.t, ap);
      for (const auto& [at, tag] : pts) {
        KernelSpec pspec = spec;
        pspec.method = KernelMethod::stable_multiplicity;
        double val = std::abs(product_kernel(metric, groups, pspec, ts.t, at).value);
        double ratio = val / envelope;
        auto& cell = out.report.cells[{n, tag}];
        ++cell.samples;
        if (ratio > cell.max_ratio) {
          cell.max_ratio = ratio;
          cell.argmax_t = ts.t;
        }
        out.report.rows.push_back({fmt_int(n), fmt_double(ts.t), fmt_int(ts.a),
                                   fmt_int(ts.q), fmt_double(ts.offset), fmt_double(val),
                                   fmt_double(envelope), fmt_double(ratio), tag});
      }
    }
  }
  out.report.finalize();

  // period check at the smallest N
  {
    SplitMix64 rng(seed ^ 0xbeefULL);
    KernelSpec spec = base_spec;
    spec.N = n_ladder.front();
    spec.method = KernelMethod::stable_multiplicity;
    ProductPoint at;
    for (size_t i = 0; i < metric.circle_scales.size(); ++i)
      at.angles.push_back(rng.uniform(0.0, 2 * std::numbers::pi));
    for (const RootSystem* g : groups) {
      std::vector<double> coords(g->rank());
      for (auto& c : coords) c = rng.uniform(0.3, 2.8);
      at.points.push_back(make_torus_point(*g, coords));
    }
    double period = 2 * std::numbers::pi * to_double(out.period_over_2pi);
    Complex k0 = product_kernel(metric, groups, spec, 0.0, at).value;
    Complex kt = product_kernel(metric, groups, spec, period, at).value;
    out.period_defect = std::abs(kt - k0) / std::max(std::abs(k0), 1e-300);
    out.period_pass = out.period_defect < 1e-9;
  }
  return out;
}

// Brute-force counting bound over uniformly sampled times, tracked across
// dyadic N.
inline BoundReport counting_scan(const std::vector<std::int64_t>& n_ladder,
                                 int samples, std::uint64_t seed) {
  BoundReport report;
  report.estimate = "counting_bound";
  report.n_ladder = n_ladder;
  SplitMix64 rng(seed);
  std::vector<double> ts(samples);
  for (auto& t : ts) t = rng.uniform01();
  for (std::int64_t n : n_ladder) {
    auto& cell = report.cells[{n, std::string("counting")}];
    for (double t : ts) {
      CountingReport rep = counting_sum_check(n, t);
      ++cell.samples;
      if (rep.ratio > cell.max_ratio) {
        cell.max_ratio = rep.ratio;
        cell.argmax_t = t;
      }
    }
    report.rows.push_back({fmt_int(n), fmt_double(cell.argmax_t), fmt_int(0), fmt_int(0),
                           fmt_double(0), fmt_double(0), fmt_double(0),
                           fmt_double(cell.max_ratio), "counting"});
  }
  report.finalize();
  return report;
}

// Weyl-differencing sums for the flat and polynomial coefficient families on
// the rank-1 lattice and a weight lattice, against their envelopes.
inline BoundReport weylsum_scan(const RootSystem& rs,
                                const std::vector<std::int64_t>& n_ladder,
                                const GridParams& params, std::uint64_t seed) {
  BoundReport report;
  report.estimate = "weyl_sum";
  report.n_ladder = n_ladder;
  Cutoff bump = Cutoff::bump();
  auto phi = [bump](double x) { return bump(x); };

  struct Combo {
    std::string name;
    RatMat gram;
    SumCoefficient coeff;
  };
  std::vector<Combo> combos;
  {
    RatMat z(1, 1);
    z.at(0, 0) = 1;
    combos.push_back({"Z_flat", z, SumCoefficient{[](const IVec&) { return 1.0; }, 0, 2}});
    combos.push_back(
        {"Z_linear", z,
         SumCoefficient{[](const IVec& v) { return static_cast<double>(v[0]); }, 1, 2}});
    combos.push_back({rs.name() + "_flat", rs.gram_weight(),
                      SumCoefficient{[](const IVec&) { return 1.0; }, 0, 2}});
    const RootSystem* rsp = &rs;
    combos.push_back(
        {rs.name() + "_posprod", rs.gram_weight(),
         SumCoefficient{[rsp](const IVec& v) { return to_double(rsp->positive_product(v)); },
                        static_cast<double>(rs.num_positive_roots()), 1000.0}});
  }

  for (std::int64_t n : n_ladder) {
    SplitMix64 rng(seed ^ (0xabc1ULL * n));
    for (const Combo& combo : combos) {
      BigInt dper = 1;
      for (int i = 0; i < combo.gram.rows; ++i)
        for (int j = 0; j < combo.gram.cols; ++j)
          dper = int_lcm(dper, rat_den(combo.gram.at(i, j)));
      Rational d_over(dper);
      auto t_samples = build_t_samples(d_over, n, params, rng);
      auto& cell = report.cells[{n, combo.name}];
      for (const TimeSample& ts : t_samples) {
        std::vector<double> h(combo.gram.rows);
        for (auto& x : h) x = rng.uniform(-2.0, 2.0);
        std::vector<double> zero_off(combo.gram.rows, 0.0);
        WeylSumResult res = weyl_sum(combo.gram, combo.coeff, zero_off, 0.0, n, ts.t, h,
                                     phi, 2.0, seed ^ 0x77ULL);
        ++cell.samples;
        if (res.ratio > cell.max_ratio) {
          cell.max_ratio = res.ratio;
          cell.argmax_t = ts.t;
          cell.argmax_h = h;
        }
        report.rows.push_back({fmt_int(n), fmt_double(ts.t), fmt_int(res.approx.a),
                               fmt_int(res.approx.q), fmt_double(ts.offset),
                               fmt_double(std::abs(res.value)), fmt_double(res.envelope),
                               fmt_double(res.ratio), combo.name});
      }
    }
  }
  report.finalize();
  return report;
}

struct LevelsetReport {
  std::string estimate = "levelset";
  std::vector<std::int64_t> n_values;
  // (N, multiplier) -> max over trials of m_lambda / bound
  std::map<std::pair<std::int64_t, int>, double> max_ratio;
  std::map<std::pair<std::int64_t, int>, double> growth;
  bool pass = true;
  std::vector<std::vector<std::string>> rows;
};

// Desk-scale level-set experiment: random unit-L2 data from Gaussian diagonal
// coefficients, evolved and sampled on (t, torus) with Weyl-measure weights;
// the empirical superlevel measure is compared against
// N^{dp/2 - (d+2)} lambda^{-p} at lambda = multiplier * N^{d/2 - r/4}.
inline LevelsetReport levelset_check(const RootSystem& rs, const KernelSpec& base_spec,
                                     const std::vector<std::int64_t>& n_values, double p,
                                     int trials, std::uint64_t seed,
                                     const std::vector<int>& multipliers = {1, 2, 4},
                                     int t_points = 96, int h_points = 192) {
  if (trials < 1 || static_cast<std::int64_t>(t_points) * h_points < 64)
    throw SampleSizeError("level-set sampling grid is too small");
  LevelsetReport report;
  report.n_values = n_values;
  const int r = rs.rank();
  const int d = rs.dimension();
  double period =
      2 * std::numbers::pi * to_double(kernel_period_over_2pi(rs, base_spec.beta));

  for (std::int64_t n : n_values) {
    KernelSpec spec = base_spec;
    spec.N = n;
    // modes: strictly dominant weights with k_lambda <= 4 N^2
    struct Mode {
      IVec lam;
      double k;
      double phi;
      double dim;
      std::shared_ptr<const WeightMultiplicityTable> table;
    };
    std::vector<Mode> modes;
    {
      KernelSpec wide = spec;
      wide.cutoff = Cutoff::custom(4.0, [](double) { return 1.0; });
      for (const IVec& lam : enumerate_weights(rs, wide)) {
        if (!rs.strictly_dominant(lam)) continue;
        double k = to_double(rs.casimir_eigenvalue(lam)) / to_double(spec.beta);
        if (k > 4.0 * static_cast<double>(n * n)) continue;
        Mode m;
        m.lam = lam;
        m.k = k;
        m.phi = spec.cutoff(k / static_cast<double>(n * n));
        m.dim = static_cast<double>(rs.weyl_dimension(lam).value);
        m.table = weight_multiplicities(rs, lam);
        modes.push_back(std::move(m));
      }
    }
    // torus sample points with Weyl weights
    std::vector<TorusPoint> hs;
    std::vector<double> weights;
    for (int j = 0; j < h_points; ++j) {
      std::vector<double> coords(r);
      SplitMix64 hrng(seed ^ 0xabcdULL ^ (j * 7919ULL));
      for (int i = 0; i < r; ++i) coords[i] = hrng.uniform(0.0, 2 * std::numbers::pi);
      TorusPoint h = make_torus_point(rs, coords);
      double dp = std::abs(weyl_denominator(rs, h.coords));
      weights.push_back(dp * dp / static_cast<double>(rs.weyl_group().size()));
      hs.push_back(std::move(h));
    }
    // the bound lives on the major arcs: classify each uniform time cell by
    // its Dirichlet approximation and keep those with q <= sqrt(N)
    std::vector<double> arc_times;
    {
      auto qcap = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
      for (int tj = 0; tj < t_points; ++tj) {
        double t = period * (static_cast<double>(tj) + 0.5) / t_points;
        RationalApproximation ap = dirichlet_approx(t / period, n);
        if (ap.q <= qcap) arc_times.push_back(t);
      }
    }

    for (int multiplier : multipliers) {
      double lam_star = static_cast<double>(multiplier) *
                        std::pow(static_cast<double>(n),
                                 static_cast<double>(d) / 2.0 - static_cast<double>(r) / 4.0);
      double bound = std::pow(static_cast<double>(n), static_cast<double>(d) * p / 2.0 -
                                                          (static_cast<double>(d) + 2.0)) *
                     std::pow(lam_star, -p);
      double worst = 0;
      for (int trial = 0; trial < trials; ++trial) {
        SplitMix64 rng(seed + 1000003ULL * trial + 17ULL * n);
        // Gaussian diagonal coefficients, normalized via Plancherel
        std::vector<std::vector<Complex>> coeff(modes.size());
        double norm2 = 0;
        for (size_t mi = 0; mi < modes.size(); ++mi) {
          coeff[mi].resize(static_cast<size_t>(modes[mi].dim));
          for (auto& c : coeff[mi]) {
            c = Complex(rng.gaussian(), rng.gaussian());
            norm2 += modes[mi].dim * std::norm(c);
          }
        }
        double inv_norm = 1.0 / std::sqrt(norm2);
        double measure = 0;
        for (size_t hj = 0; hj < hs.size(); ++hj) {
          // t-independent torus pairing per mode
          std::vector<Complex> inner(modes.size());
          for (size_t mi = 0; mi < modes.size(); ++mi) {
            const Mode& mode = modes[mi];
            if (mode.phi == 0) continue;
            Complex acc = 0;
            size_t ci = 0;
            for (const auto& [w, mult] : mode.table->full) {
              Complex phase = std::polar(1.0, rs.pair_weight_torus(w, hs[hj].coords));
              for (std::int64_t rep = 0; rep < mult; ++rep) acc += coeff[mi][ci++] * phase;
            }
            inner[mi] = acc * mode.dim * mode.phi * inv_norm;
          }
          for (double t : arc_times) {
            Complex val = 0;
            for (size_t mi = 0; mi < modes.size(); ++mi) {
              if (modes[mi].phi == 0) continue;
              val += inner[mi] * std::polar(1.0, -t * modes[mi].k);
            }
            if (std::abs(val) > lam_star) measure += weights[hj];
          }
        }
        measure *= period / (static_cast<double>(t_points) * static_cast<double>(hs.size()));
        worst = std::max(worst, measure / bound);
        report.rows.push_back({fmt_int(n), fmt_int(multiplier), fmt_int(trial),
                               fmt_double(lam_star), fmt_double(measure),
                               fmt_double(bound), fmt_double(measure / bound)});
      }
      report.max_ratio[{n, multiplier}] = worst;
    }
  }
  for (int multiplier : multipliers) {
    for (size_t i = 1; i < n_values.size(); ++i) {
      double prev = report.max_ratio[{n_values[i - 1], multiplier}];
      double cur = report.max_ratio[{n_values[i], multiplier}];
      if (prev <= 1e-12 && cur <= 1e-12) continue;
      double g = cur / std::max(prev, 1e-12);
      report.growth[{n_values[i], multiplier}] = g;
      if (g > 2.0) report.pass = false;
    }
  }
  return report;
}

}  // namespace weyl
