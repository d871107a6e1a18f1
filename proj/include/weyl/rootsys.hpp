#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/forms.hpp"
#include "weyl/linalg.hpp"
#include "weyl/rational.hpp"

namespace weyl {

enum class Series { A, B, C, D, E, F, G };

inline std::optional<Series> series_from_string(const std::string& s) {
  if (s.size() != 1) return std::nullopt;
  switch (s[0]) {
    case 'A': return Series::A;
    case 'B': return Series::B;
    case 'C': return Series::C;
    case 'D': return Series::D;
    case 'E': return Series::E;
    case 'F': return Series::F;
    case 'G': return Series::G;
    default: return std::nullopt;
  }
}

inline char series_to_char(Series s) {
  switch (s) {
    case Series::A: return 'A';
    case Series::B: return 'B';
    case Series::C: return 'C';
    case Series::D: return 'D';
    case Series::E: return 'E';
    case Series::F: return 'F';
    case Series::G: return 'G';
  }
  return '?';
}

struct RootSystemConfig {
  FormNormalization normalization = FormNormalization::standard_long_root_2;
  Rational custom_scale = 1;  // used when normalization == custom_scale
  int rank_ceiling = 4;       // E6-E8 are gated behind raising this
};

struct WeylElement {
  IMat mat_weight;        // action on fundamental-weight coordinates
  IMat mat_root;          // action on simple-root coordinates
  int det = 1;
  std::vector<int> word;  // shortlex-minimal reduced word in simple reflections
  int inverse = -1;       // index of the inverse element
};

// Real point H in i*b, stored in simple-root coordinates, canonicalized
// modulo 2*pi times the coroot lattice, together with the per-positive-root
// wall distances ||<a,H>/2pi|| (in turns).
struct TorusPoint {
  std::vector<double> coords;
  std::vector<double> wall_distances;

  double min_wall_distance() const {
    double m = 0.5;
    for (double d : wall_distances) m = std::min(m, d);
    return m;
  }
};

inline double circle_distance(double x) {  // distance from x to Z
  double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

struct WeylDimension {
  std::int64_t value = 0;
  bool on_wall = false;  // some <a,lambda> vanished (value is then 0)
};

namespace detail {

struct DynkinData {
  RatMat gram;  // standard normalization: long roots have squared length 2
  int expected_positive_roots;
};

inline DynkinData dynkin_data(Series s, int r) {
  switch (s) {
    case Series::A: {
      if (r < 1) throw PreconditionError("A series needs rank >= 1");
      RatMat g(r, r);
      for (int i = 0; i < r; ++i) g.at(i, i) = 2;
      for (int i = 0; i + 1 < r; ++i) { g.at(i, i + 1) = -1; g.at(i + 1, i) = -1; }
      return {g, r * (r + 1) / 2};
    }
    case Series::B: {
      if (r < 2) throw PreconditionError("B series needs rank >= 2");
      RatMat g(r, r);
      for (int i = 0; i < r; ++i) g.at(i, i) = 2;
      g.at(r - 1, r - 1) = 1;
      for (int i = 0; i + 1 < r; ++i) { g.at(i, i + 1) = -1; g.at(i + 1, i) = -1; }
      return {g, r * r};
    }
    case Series::C: {
      if (r < 2) throw PreconditionError("C series needs rank >= 2");
      RatMat g(r, r);
      for (int i = 0; i < r; ++i) g.at(i, i) = 1;
      g.at(r - 1, r - 1) = 2;
      for (int i = 0; i + 2 < r; ++i) {
        g.at(i, i + 1) = Rational(-1, 2);
        g.at(i + 1, i) = Rational(-1, 2);
      }
      g.at(r - 2, r - 1) = -1;
      g.at(r - 1, r - 2) = -1;
      return {g, r * r};
    }
    case Series::D: {
      if (r < 3) throw PreconditionError("D series needs rank >= 3");
      RatMat g(r, r);
      for (int i = 0; i < r; ++i) g.at(i, i) = 2;
      for (int i = 0; i + 1 < r - 1; ++i) { g.at(i, i + 1) = -1; g.at(i + 1, i) = -1; }
      g.at(r - 3, r - 1) = -1;
      g.at(r - 1, r - 3) = -1;
      return {g, r * (r - 1)};
    }
    case Series::E: {
      if (r < 6 || r > 8) throw PreconditionError("E series needs rank 6, 7, or 8");
      RatMat g(r, r);
      for (int i = 0; i < r; ++i) g.at(i, i) = 2;
      auto link = [&](int i, int j) { g.at(i - 1, j - 1) = -1; g.at(j - 1, i - 1) = -1; };
      link(1, 3);
      link(3, 4);
      link(2, 4);
      for (int k = 4; k < r; ++k) link(k, k + 1);
      int np = (r == 6) ? 36 : (r == 7 ? 63 : 120);
      return {g, np};
    }
    case Series::F: {
      if (r != 4) throw PreconditionError("F series needs rank 4");
      RatMat g(4, 4);
      RatVec d = {2, 2, 1, 1};
      for (int i = 0; i < 4; ++i) g.at(i, i) = d[i];
      g.at(0, 1) = g.at(1, 0) = -1;
      g.at(1, 2) = g.at(2, 1) = -1;
      g.at(2, 3) = g.at(3, 2) = Rational(-1, 2);
      return {g, 24};
    }
    case Series::G: {
      if (r != 2) throw PreconditionError("G series needs rank 2");
      RatMat g(2, 2);
      g.at(0, 0) = Rational(2, 3);
      g.at(1, 1) = 2;
      g.at(0, 1) = g.at(1, 0) = -1;
      return {g, 6};
    }
  }
  throw PreconditionError("unknown series");
}

}  // namespace detail

class RootSystem {
 public:
  static RootSystem build(Series series, int rank, RootSystemConfig cfg = {});

  Series series() const { return series_; }
  int rank() const { return rank_; }
  int dimension() const { return dim_; }
  std::int64_t lattice_period() const { return period_; }
  const GramForm& form() const { return form_; }
  const IMat& cartan() const { return form_.cartan; }
  const RatMat& cartan_inv() const { return form_.cartan_inv; }
  const RatMat& gram_root() const { return form_.gram_simple; }
  const RatMat& gram_weight() const { return form_.gram_weight; }
  const RatMat& gram_root_inv() const { return gram_root_inv_; }

  const std::vector<IVec>& positive_roots_root() const { return pos_root_; }
  const std::vector<IVec>& positive_roots_weight() const { return pos_weight_; }
  int num_positive_roots() const { return static_cast<int>(pos_root_.size()); }

  IVec rho_weight() const { return IVec(rank_, 1); }
  const RatVec& rho_root() const { return rho_root_; }

  const std::vector<WeylElement>& weyl_group() const { return weyl_; }
  int longest_element() const { return longest_; }
  const std::vector<int>& longest_word() const { return weyl_[longest_].word; }
  std::vector<int> longest_word_alt() const;

  Rational pair_weight_weight(const IVec& n1, const IVec& n2) const {
    return bilinear(form_.gram_weight, n1, n2);
  }
  // <a, l> for a in simple-root coordinates, l in weight coordinates.
  Rational pair_root_weight(const IVec& a, const IVec& n) const {
    return bilinear(pair_rw_, a, n);
  }
  // <l, H> in radians, l in weight coordinates, H in simple-root coordinates.
  double pair_weight_torus(const IVec& n, const std::vector<double>& h) const {
    double s = 0;
    for (int i = 0; i < rank_; ++i) {
      if (n[i] == 0) continue;
      double row = 0;
      for (int j = 0; j < rank_; ++j) row += pair_wr_d_.at(i, j) * h[j];
      s += static_cast<double>(n[i]) * row;
    }
    return s;
  }
  double pair_root_torus(const IVec& a, const std::vector<double>& h) const {
    double s = 0;
    for (int i = 0; i < rank_; ++i) {
      if (a[i] == 0) continue;
      double row = 0;
      for (int j = 0; j < rank_; ++j) row += gram_root_d_.at(i, j) * h[j];
      s += static_cast<double>(a[i]) * row;
    }
    return s;
  }

  Rational norm2_weight(const IVec& n) const { return pair_weight_weight(n, n); }

  bool strictly_dominant(const IVec& n) const {
    return std::all_of(n.begin(), n.end(), [](std::int64_t v) { return v >= 1; });
  }

  // Product over positive roots of <a, lambda>; anti-invariant, vanishes
  // exactly on chamber walls.
  Rational positive_product(const IVec& lambda_w) const {
    Rational p = 1;
    for (const IVec& a : pos_weight_) {
      p *= bilinear(form_.gram_weight, a, lambda_w);
      if (p == 0) return p;
    }
    return p;
  }

  WeylDimension weyl_dimension(const IVec& lambda_w) const {
    Rational num = positive_product(lambda_w);
    if (num == 0) return {0, true};
    Rational d = num / pos_product_rho_;
    if (rat_den(d) != 1 || d <= 0)
      throw InvariantViolationError("Weyl dimension is not a positive integer");
    return {rat_num(d).convert_to<std::int64_t>(), false};
  }

  // |lambda|^2 - |rho|^2, exact; lies in (1/D) Z.
  Rational casimir_eigenvalue(const IVec& lambda_w) const {
    return norm2_weight(lambda_w) - rho_norm2_;
  }
  const Rational& rho_norm2() const { return rho_norm2_; }
  const Rational& positive_product_rho() const { return pos_product_rho_; }

  const std::vector<IVec>& lattice_cosets() const { return cosets_; }

  bool in_root_lattice(const IVec& lambda_w) const {
    for (int i = 0; i < rank_; ++i) {
      Rational c = 0;
      for (int j = 0; j < rank_; ++j) c += cartan_inv_t_.at(i, j) * lambda_w[j];
      if (rat_den(c) != 1) return false;
    }
    return true;
  }

  IVec coset_of(const IVec& lambda_w) const {
    for (const IVec& rep : cosets_)
      if (in_root_lattice(ivec_sub(lambda_w, rep))) return rep;
    throw InvariantViolationError("coset representative not found");
  }

  IVec root_to_weight(const IVec& x) const {
    IVec n(rank_, 0);
    for (int j = 0; j < rank_; ++j)
      for (int i = 0; i < rank_; ++i) n[j] += form_.cartan.at(i, j) * x[i];
    return n;
  }

  int find_element(const IMat& mat_weight) const {
    auto it = weyl_index_.find(mat_weight.a);
    if (it == weyl_index_.end())
      throw InvariantViolationError("matrix is not a Weyl element");
    return it->second;
  }

  IVec dominant_representative(IVec n) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < rank_; ++i) {
        if (n[i] < 0) {
          std::int64_t ni = n[i];
          for (int j = 0; j < rank_; ++j) n[j] -= ni * form_.cartan.at(i, j);
          changed = true;
        }
      }
    }
    return n;
  }

  IMat reflection_matrix_weight(const IVec& a) const;

  std::string name() const {
    return std::string(1, series_to_char(series_)) + std::to_string(rank_);
  }

 private:
  Series series_{};
  int rank_ = 0, dim_ = 0;
  GramForm form_;
  RatMat gram_root_inv_;
  RatMat cartan_inv_t_;
  RatMat pair_rw_;                // <a_i, w_j>
  Matrix<double> pair_wr_d_;      // n^T (C^{-1} G) h
  Matrix<double> gram_root_d_;
  std::vector<IVec> pos_root_, pos_weight_;
  RatVec rho_root_;
  Rational rho_norm2_, pos_product_rho_;
  std::int64_t period_ = 1;
  std::vector<WeylElement> weyl_;
  std::map<std::vector<std::int64_t>, int> weyl_index_;
  int longest_ = -1;
  std::vector<IVec> cosets_;
};

inline RootSystem RootSystem::build(Series series, int rank, RootSystemConfig cfg) {
  if (rank > cfg.rank_ceiling)
    throw PreconditionError("rank " + std::to_string(rank) +
                            " exceeds the configured ceiling " +
                            std::to_string(cfg.rank_ceiling));
  detail::DynkinData dd = detail::dynkin_data(series, rank);

  RootSystem rs;
  rs.series_ = series;
  rs.rank_ = rank;

  // Positive roots by closure from the simple roots via root strings; needs
  // only the Cartan integers, which do not depend on the normalization.
  GramForm std_form =
      GramForm::create(dd.gram, FormNormalization::standard_long_root_2, 1);
  const IMat& c = std_form.cartan;
  std::map<IVec, bool> seen;
  std::vector<IVec> roots, frontier;
  for (int i = 0; i < rank; ++i) {
    IVec e(rank, 0);
    e[i] = 1;
    frontier.push_back(e);
    seen[e] = true;
    roots.push_back(e);
  }
  while (!frontier.empty()) {
    std::vector<IVec> next;
    for (const IVec& beta : frontier) {
      for (int i = 0; i < rank; ++i) {
        std::int64_t k = 0;  // <beta, a_i^vee>
        for (int j = 0; j < rank; ++j) k += beta[j] * c.at(j, i);
        std::int64_t p = 0;  // depth of the downward a_i-string through beta
        IVec down = beta;
        while (true) {
          down[i] -= 1;
          if (std::any_of(down.begin(), down.end(),
                          [](std::int64_t v) { return v < 0; }) ||
              !seen.count(down))
            break;
          ++p;
        }
        if (p - k > 0) {
          IVec up = beta;
          up[i] += 1;
          if (!seen.count(up)) {
            seen[up] = true;
            roots.push_back(up);
            next.push_back(up);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(roots.begin(), roots.end());
  if (static_cast<int>(roots.size()) != dd.expected_positive_roots)
    throw InvariantViolationError("positive-root closure has unexpected size");
  rs.pos_root_ = roots;
  rs.dim_ = 2 * static_cast<int>(roots.size()) + rank;

  Rational scale = 1;
  if (cfg.normalization == FormNormalization::custom_scale) {
    scale = cfg.custom_scale;
    if (scale <= 0) throw NotRationalMetricError("custom scale must be positive");
  } else if (cfg.normalization == FormNormalization::killing_dual) {
    // Solve sum_{a in Phi} <l,a><m,a> = k <l,m> against the standard form;
    // the Killing-dual form is (1/k) times the standard one.
    RatMat m(rank, rank);
    for (const IVec& a : roots) {
      RatVec ga(rank, Rational(0));
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) ga[i] += dd.gram.at(i, j) * a[j];
      for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) m.at(i, j) += 2 * ga[i] * ga[j];
    }
    Rational k = m.at(0, 0) / dd.gram.at(0, 0);
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j)
        if (m.at(i, j) != k * dd.gram.at(i, j))
          throw InvariantViolationError("Killing-dual scale is not a scalar");
    scale = 1 / k;
  }
  RatMat gram = dd.gram;
  for (auto& e : gram.a) e *= scale;
  rs.form_ = GramForm::create(gram, cfg.normalization, scale);
  rs.gram_root_inv_ = rat_inverse(rs.form_.gram_simple);
  rs.cartan_inv_t_ = rs.form_.cartan_inv.transposed();

  rs.pos_weight_.reserve(roots.size());
  for (const IVec& a : roots) rs.pos_weight_.push_back(rs.root_to_weight(a));

  // rho both ways: half-sum of positive roots and sum of fundamental weights.
  {
    IVec sum(rank, 0);
    for (const IVec& n : rs.pos_weight_) sum = ivec_add(sum, n);
    for (int i = 0; i < rank; ++i)
      if (sum[i] != 2)
        throw InvariantViolationError("rho does not equal the sum of fundamental weights");
  }
  rs.rho_root_.assign(rank, Rational(0));
  for (const IVec& a : roots)
    for (int i = 0; i < rank; ++i) rs.rho_root_[i] += Rational(a[i], 2);

  rs.rho_norm2_ = rs.norm2_weight(rs.rho_weight());
  rs.pos_product_rho_ = 1;
  for (const IVec& n : rs.pos_weight_)
    rs.pos_product_rho_ *= bilinear(rs.form_.gram_weight, n, rs.rho_weight());

  rs.period_ = ::weyl::lattice_period(rs.form_).D;

  rs.pair_rw_ = rs.form_.gram_simple * rs.form_.weight_to_root;
  rs.pair_wr_d_ = to_dmat(rs.form_.cartan_inv * rs.form_.gram_simple);
  rs.gram_root_d_ = to_dmat(rs.form_.gram_simple);

  // Weyl group closure, breadth-first so each element's recorded word is its
  // shortlex-minimal reduced word.
  std::vector<IMat> gens_w(rank), gens_r(rank);
  for (int i = 0; i < rank; ++i) {
    IMat sw = IMat::identity(rank), sr = IMat::identity(rank);
    for (int k = 0; k < rank; ++k) sw.at(k, i) -= rs.form_.cartan.at(i, k);
    for (int j = 0; j < rank; ++j) sr.at(i, j) -= rs.form_.cartan.at(j, i);
    gens_w[i] = sw;
    gens_r[i] = sr;
  }
  rs.weyl_.push_back(WeylElement{IMat::identity(rank), IMat::identity(rank), 1, {}, 0});
  rs.weyl_index_[rs.weyl_[0].mat_weight.a] = 0;
  for (size_t head = 0; head < rs.weyl_.size(); ++head) {
    for (int i = 0; i < rank; ++i) {
      IMat mw = rs.weyl_[head].mat_weight * gens_w[i];
      if (rs.weyl_index_.count(mw.a)) continue;
      WeylElement next;
      next.mat_weight = mw;
      next.mat_root = rs.weyl_[head].mat_root * gens_r[i];
      next.det = -rs.weyl_[head].det;
      next.word = rs.weyl_[head].word;
      next.word.push_back(i);
      rs.weyl_index_[mw.a] = static_cast<int>(rs.weyl_.size());
      rs.weyl_.push_back(std::move(next));
    }
  }
  for (size_t k = 0; k < rs.weyl_.size(); ++k) {
    if (rs.weyl_[k].inverse >= 0 && rs.weyl_[k].word.size() > 0) continue;
    IMat m = IMat::identity(rank);
    const auto& w = rs.weyl_[k].word;
    for (auto it = w.rbegin(); it != w.rend(); ++it) m = m * gens_w[*it];
    int idx = rs.weyl_index_.at(m.a);
    rs.weyl_[k].inverse = idx;
    rs.weyl_[idx].inverse = static_cast<int>(k);
  }
  size_t np = roots.size();
  for (size_t k = 0; k < rs.weyl_.size(); ++k)
    if (rs.weyl_[k].word.size() == np) {
      if (rs.longest_ >= 0)
        throw InvariantViolationError("longest element is not unique");
      rs.longest_ = static_cast<int>(k);
    }
  if (rs.longest_ < 0)
    throw InvariantViolationError("no element of length |P| found");

  // Weight lattice modulo root lattice; the root lattice in weight
  // coordinates is generated by the rows of the Cartan matrix.
  BigMat gens(rank, rank);
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) gens.at(i, j) = rs.form_.cartan.at(i, j);
  rs.cosets_ = lattice_quotient_reps(gens);
  for (auto& rep : rs.cosets_) rep = rs.dominant_representative(rep);
  std::sort(rs.cosets_.begin(), rs.cosets_.end());
  rs.cosets_.erase(std::unique(rs.cosets_.begin(), rs.cosets_.end()),
                   rs.cosets_.end());
  std::int64_t det_c =
      abs(rat_num(rat_determinant(to_ratmat(rs.form_.cartan)))).convert_to<std::int64_t>();
  if (rs.cosets_.size() != static_cast<size_t>(det_c))
    throw InvariantViolationError("coset count does not match det(Cartan)");

  return rs;
}

inline std::vector<int> RootSystem::longest_word_alt() const {
  // Greedy left-descent stripping, largest index first; differs from the
  // shortlex word whenever the longest element has more than one reduced word.
  std::vector<int> word;
  std::vector<IMat> gens_w(rank_), gens_r(rank_);
  for (int i = 0; i < rank_; ++i) {
    IMat sw = IMat::identity(rank_), sr = IMat::identity(rank_);
    for (int k = 0; k < rank_; ++k) sw.at(k, i) -= form_.cartan.at(i, k);
    for (int j = 0; j < rank_; ++j) sr.at(i, j) -= form_.cartan.at(j, i);
    gens_w[i] = sw;
    gens_r[i] = sr;
  }
  auto is_descent = [&](const IMat& root_mat, int i) {
    // column i is the image of a_i; a left descent of w means w^{-1}(a_i) < 0
    for (int k = 0; k < rank_; ++k)
      if (root_mat.at(k, i) > 0) return false;
    return true;
  };
  IMat minv = weyl_[longest_].mat_root;  // the longest element is an involution
  IMat mw = weyl_[longest_].mat_weight;
  IMat ident = IMat::identity(rank_);
  while (!(mw == ident)) {
    int pick = -1;
    for (int i = rank_ - 1; i >= 0; --i)
      if (is_descent(minv, i)) { pick = i; break; }
    if (pick < 0) throw InvariantViolationError("descent search failed");
    word.push_back(pick);
    mw = gens_w[pick] * mw;       // w <- s_i w
    minv = minv * gens_r[pick];   // w^{-1} <- w^{-1} s_i
  }
  return word;
}

inline IMat RootSystem::reflection_matrix_weight(const IVec& a) const {
  // s_a(l) = l - <l, a^vee> a; the n_j-coefficient of <l, a^vee> is
  // a_j |a_j|^2 / <a,a>.
  IVec n_a = root_to_weight(a);
  Rational a2 = bilinear(form_.gram_simple, a, a);
  IMat m = IMat::identity(rank_);
  for (int j = 0; j < rank_; ++j) {
    Rational coeff = Rational(a[j]) * form_.gram_simple.at(j, j) / a2;
    if (coeff == 0) continue;
    for (int k = 0; k < rank_; ++k) {
      Rational entry = Rational(m.at(k, j)) - coeff * n_a[k];
      if (rat_den(entry) != 1)
        throw InvariantViolationError("reflection does not preserve the weight lattice");
      m.at(k, j) = rat_num(entry).convert_to<std::int64_t>();
    }
  }
  return m;
}

inline TorusPoint make_torus_point(const RootSystem& rs, std::vector<double> coords) {
  constexpr double two_pi = 2 * std::numbers::pi;
  int r = rs.rank();
  if (static_cast<int>(coords.size()) != r)
    throw PreconditionError("torus point has wrong dimension");
  // Coroot coordinates c_i = h_i |a_i|^2 / 2, reduced into [0, 2 pi).
  for (int i = 0; i < r; ++i) {
    double li = to_double(rs.gram_root().at(i, i));
    double cc = coords[i] * li / 2.0;
    cc -= two_pi * std::floor(cc / two_pi);
    coords[i] = 2.0 * cc / li;
  }
  TorusPoint tp;
  tp.coords = std::move(coords);
  tp.wall_distances.reserve(rs.positive_roots_root().size());
  for (const IVec& a : rs.positive_roots_root()) {
    double v = rs.pair_root_torus(a, tp.coords) / two_pi;
    tp.wall_distances.push_back(circle_distance(v));
  }
  return tp;
}

// ---------------------------------------------------------------------------
// Root subsystem attached to a torus point (walls within 1/N), with the
// lattice data needed to decompose kernels along it.

struct RootSubsystemDecomposition {
  std::vector<int> near_walls;         // indices into P: Q_H cap P
  std::vector<int> subsystem_pos;      // indices into P: P_H
  std::vector<IVec> subsystem_simple;  // simple system of Phi_H, root coords
  std::vector<int> weyl_subgroup;      // indices into the ambient Weyl group
  int rank_H = 0;
  std::vector<IVec> adapted_basis;     // u_1..u_r, weight coords; the first
                                       // rank_H project onto a basis of
                                       // Upsilon_H, the rest project to zero
  std::vector<IVec> coset_reps;        // Upsilon'_H / Gamma'_H, weight coords

  bool empty() const { return rank_H == 0; }
};

inline RootSubsystemDecomposition root_subsystem(const RootSystem& rs,
                                                 const TorusPoint& h,
                                                 std::int64_t n_scale) {
  if (n_scale < 1) throw PreconditionError("N must be >= 1");
  int r = rs.rank();
  RootSubsystemDecomposition out;
  const auto& pos = rs.positive_roots_root();
  double thresh = 1.0 / static_cast<double>(n_scale);
  for (size_t i = 0; i < pos.size(); ++i)
    if (h.wall_distances[i] <= thresh) out.near_walls.push_back(static_cast<int>(i));

  if (out.near_walls.empty()) {
    out.rank_H = 0;
    for (int i = 0; i < r; ++i) {
      IVec e(r, 0);
      e[i] = 1;
      out.adapted_basis.push_back(e);
    }
    out.coset_reps.push_back(IVec(r, 0));
    out.weyl_subgroup.push_back(0);
    return out;
  }

  // Phi_H = Phi intersected with the Z-span of Q_H.
  BigMat qmat(static_cast<int>(out.near_walls.size()), r);
  for (size_t k = 0; k < out.near_walls.size(); ++k)
    for (int j = 0; j < r; ++j)
      qmat.at(static_cast<int>(k), j) = pos[out.near_walls[k]][j];
  RowHNF span = row_hnf(qmat);
  for (size_t i = 0; i < pos.size(); ++i)
    if (lattice_contains(span, pos[i]))
      out.subsystem_pos.push_back(static_cast<int>(i));
  out.rank_H = static_cast<int>(span.pivot_col.size());

  // Simple system of Phi_H: positive elements that are not a sum of two.
  std::vector<IVec> ph;
  for (int i : out.subsystem_pos) ph.push_back(pos[i]);
  for (const IVec& a : ph) {
    bool decomposable = false;
    for (const IVec& b : ph) {
      if (b == a) continue;
      IVec diff = ivec_sub(a, b);
      if (std::binary_search(ph.begin(), ph.end(), diff)) {
        decomposable = true;
        break;
      }
    }
    if (!decomposable) out.subsystem_simple.push_back(a);
  }
  if (static_cast<int>(out.subsystem_simple.size()) != out.rank_H)
    throw InvariantViolationError("subsystem simple system has wrong size");

  // Subgroup generated by the subsystem's simple reflections.
  {
    std::vector<int> gen_idx;
    for (const IVec& a : out.subsystem_simple)
      gen_idx.push_back(rs.find_element(rs.reflection_matrix_weight(a)));
    std::map<std::vector<std::int64_t>, int> sub_seen;
    std::vector<int> order;
    order.push_back(0);
    sub_seen[IMat::identity(r).a] = 0;
    for (size_t head = 0; head < order.size(); ++head) {
      for (int g : gen_idx) {
        IMat prod =
            rs.weyl_group()[order[head]].mat_weight * rs.weyl_group()[g].mat_weight;
        if (sub_seen.count(prod.a)) continue;
        int idx = rs.find_element(prod);
        sub_seen[prod.a] = idx;
        order.push_back(idx);
      }
    }
    out.weyl_subgroup = order;
    std::sort(out.weyl_subgroup.begin(), out.weyl_subgroup.end());
  }

  // Projections of the fundamental weights onto V_H in the coordinates of the
  // subsystem's simple roots; these generate Upsilon_H.
  int rh = out.rank_H;
  RatMat gram_sub(rh, rh);
  for (int i = 0; i < rh; ++i)
    for (int j = 0; j < rh; ++j)
      gram_sub.at(i, j) = bilinear(rs.gram_root(), out.subsystem_simple[i],
                                   out.subsystem_simple[j]);
  RatMat gram_sub_inv = rat_inverse(gram_sub);
  std::vector<RatVec> proj_coords(r);  // per fundamental weight
  for (int k = 0; k < r; ++k) {
    IVec n(r, 0);
    n[k] = 1;
    RatVec rhs(rh);
    for (int i = 0; i < rh; ++i)
      rhs[i] = rs.pair_root_weight(out.subsystem_simple[i], n);
    RatVec cc(rh, Rational(0));
    for (int i = 0; i < rh; ++i)
      for (int j = 0; j < rh; ++j) cc[i] += gram_sub_inv.at(i, j) * rhs[j];
    proj_coords[k] = cc;
  }
  BigInt denom = 1;
  for (const auto& cvec : proj_coords)
    for (const auto& e : cvec) denom = int_lcm(denom, rat_den(e));
  BigMat gens(r, rh);
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < rh; ++j) gens.at(k, j) = rat_num(proj_coords[k][j] * Rational(denom));
  RowHNF basis_h = row_hnf(gens);
  if (static_cast<int>(basis_h.pivot_col.size()) != rh)
    throw InvariantViolationError("projection lattice has wrong rank");

  // u_i = sum_k U_{ik} w_k realizes the HNF basis rows of Upsilon_H.
  std::vector<IVec> u_rows(rh, IVec(r, 0));
  for (int i = 0; i < rh; ++i)
    for (int k = 0; k < r; ++k)
      u_rows[i][k] = basis_h.u.at(i, k).convert_to<std::int64_t>();

  // Coordinates (in the HNF basis of Upsilon_H) of a vector given by its
  // scaled subsystem-simple coordinates; exact forward substitution.
  auto upsilon_coords = [&](RatVec scaled) {
    std::vector<Rational> coeff(rh, Rational(0));
    for (int row = 0; row < rh; ++row) {
      int pcol = basis_h.pivot_col[row];
      Rational f = scaled[pcol] / Rational(basis_h.h.at(row, pcol));
      coeff[row] = f;
      for (int a2 = 0; a2 < rh; ++a2)
        scaled[a2] -= f * Rational(basis_h.h.at(row, a2));
    }
    for (int a2 = 0; a2 < rh; ++a2)
      if (scaled[a2] != 0)
        throw InvariantViolationError("vector does not lie in Upsilon_H");
    return coeff;
  };

  // Extend u_1..u_rh to a basis of the weight lattice, then correct the added
  // vectors to have zero projection onto V_H.
  BigMat urows_mat(rh, r);
  for (int i = 0; i < rh; ++i)
    for (int j = 0; j < r; ++j) urows_mat.at(i, j) = u_rows[i][j];
  SNF ext = smith_normal_form(urows_mat);
  for (int i = 0; i < rh; ++i)
    if (ext.d.at(i, i) != 1)
      throw InvariantViolationError("adapted sublattice is not primitive");
  RatMat vrat(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) vrat.at(i, j) = Rational(ext.v.at(i, j));
  RatMat vinv = rat_inverse(vrat);
  std::vector<IVec> full_basis = u_rows;
  for (int i = rh; i < r; ++i) {
    IVec u(r, 0);
    for (int j = 0; j < r; ++j) {
      if (rat_den(vinv.at(i, j)) != 1)
        throw InvariantViolationError("basis extension is not integral");
      u[j] = rat_num(vinv.at(i, j)).convert_to<std::int64_t>();
    }
    RatVec scaled(rh, Rational(0));
    for (int a2 = 0; a2 < rh; ++a2) {
      Rational s = 0;
      for (int k = 0; k < r; ++k) s += proj_coords[k][a2] * u[k];
      scaled[a2] = s * Rational(denom);
    }
    auto coeff = upsilon_coords(scaled);
    for (int row = 0; row < rh; ++row) {
      if (rat_den(coeff[row]) != 1)
        throw InvariantViolationError("non-integral Upsilon_H coordinates");
      std::int64_t cr = rat_num(coeff[row]).convert_to<std::int64_t>();
      for (int j = 0; j < r; ++j) u[j] -= cr * u_rows[row][j];
    }
    full_basis.push_back(u);
  }
  out.adapted_basis = full_basis;

  // Gamma'_H inside Upsilon'_H: u-coordinates of each subsystem simple root.
  BigMat gamma_coords(rh, rh);
  for (int i = 0; i < rh; ++i) {
    RatVec scaled(rh, Rational(0));
    scaled[i] = Rational(denom);
    auto coeff = upsilon_coords(scaled);
    for (int row = 0; row < rh; ++row) {
      if (rat_den(coeff[row]) != 1)
        throw InvariantViolationError("root has non-integral Upsilon_H coordinates");
      gamma_coords.at(i, row) = rat_num(coeff[row]);
    }
  }
  for (const IVec& cu : lattice_quotient_reps(gamma_coords)) {
    IVec rep(r, 0);
    for (int i = 0; i < rh; ++i)
      for (int j = 0; j < r; ++j) rep[j] += cu[i] * u_rows[i][j];
    out.coset_reps.push_back(rep);
  }
  return out;
}

}  // namespace weyl
