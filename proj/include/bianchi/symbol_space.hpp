#pragma once

// Manin-symbol presentation of weight-k modular symbols for Gamma_1(n), the
// boundary map and cuspidal subspace, the map b, and the conversion of
// modular symbols {alpha, beta} to Manin symbols.
//
// Coefficients. For k = 2 every relation has rational coefficients and the
// space is built over Q. For k > 2 the slash action brings in w, so the space
// is the K-vector space written over Q with basis {1, w}: generator g with
// coefficient a + b w is stored in columns 2g and 2g+1.

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bianchi/linalg.hpp"
#include "bianchi/matrix.hpp"
#include "bianchi/residue.hpp"

namespace bianchi {

inline std::vector<EnPoint> enumerate_En(const Level& level) { return EnSet(level).points(); }

inline EnPoint en_normalize(const QuadInt& u, const QuadInt& v, const Level& level) {
  return EnSet(level).normalize(u, v);
}

// ---------------------------------------------------------------- relations

/// A relation sum_j sign_j [P|_{M_j^-1}, g M_j] = 0, imposed for every
/// generator [P, g].
struct RelationWord {
  std::string name;
  std::vector<std::pair<int, Mat22>> terms;
};

/// Matrices M_j with M_j(0, oo) = (c_j, c_{j+1}) around a closed polygon of
/// cusps; consecutive cusps must be unimodular neighbours.
inline std::vector<Mat22> polygon_matrices(const std::vector<Cusp>& cusps) {
  std::vector<Mat22> out;
  const std::size_t m = cusps.size();
  for (std::size_t j = 0; j < m; ++j) {
    const Cusp& x = cusps[j];
    const Cusp& y = cusps[(j + 1) % m];
    Mat22 g{y.num(), x.num(), y.den(), x.den()};
    QuadInt e = g.det();
    if (!is_unit(e)) throw std::logic_error("polygon edge is not unimodular");
    QuadInt inv = unit_inverse(e);
    g.a = g.a * inv;
    g.c = g.c * inv;
    out.push_back(g);
  }
  return out;
}

inline std::vector<RelationWord> relation_words(FieldId f) {
  const QuadInt zero(f, 0), one(f, 1), w = QuadInt::omega(f), eps = fundamental_unit(f);
  const Mat22 I = Mat22::identity(f);
  const Mat22 S{zero, -one, one, zero};
  const Mat22 TS{one, -one, one, zero};
  const Mat22 J = Mat22::diag(eps, one);
  std::vector<RelationWord> out;
  out.push_back({"S", {{1, I}, {1, S}}});
  out.push_back({"TS", {{1, I}, {1, TS}, {1, TS * TS}}});
  out.push_back({"J", {{1, I}, {-1, J}}});
  if (f.d() == 1 || f.d() == 3) {
    out.push_back({"D", {{1, I}, {-1, Mat22::diag(eps, unit_inverse(eps))}}});
  }
  if (f.d() == 1) {
    const Mat22 X{w, one, one, zero};
    out.push_back({"X", {{1, I}, {1, X}, {1, X * X}}});
  }
  auto polygon = [&](const std::string& name, const std::vector<Cusp>& cusps) {
    RelationWord r{name, {}};
    for (const Mat22& m : polygon_matrices(cusps)) r.terms.push_back({1, m});
    out.push_back(r);
  };
  const Cusp c0 = Cusp::of(zero), coo = Cusp::infinity(f);
  const QuadInt two(f, 2), three(f, 3);
  if (f.d() == 2) polygon("square", {c0, coo, Cusp::of(w), Cusp(w, two)});
  if (f.d() == 7) {
    for (const QuadInt& mu : {w, w - one})
      polygon("square", {c0, coo, Cusp::of(mu), Cusp(mu, two)});
  }
  if (f.d() == 11) {
    for (const QuadInt& mu : {w, w - one})
      polygon("hexagon", {c0, coo, Cusp::of(mu), Cusp(two * mu, three), Cusp(mu, two),
                          Cusp(mu, three)});
  }
  return out;
}

/// Every matrix occurring in the relation words, without repeats.
inline std::vector<Mat22> relation_generators(FieldId f) {
  std::vector<Mat22> out;
  for (const auto& r : relation_words(f))
    for (const auto& [s, m] : r.terms)
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  return out;
}

// ------------------------------------------------------------ boundary classes

/// Classes of boundary symbols g (X^w (x) [oo]) for g running over E_n, under
/// g ~ g h for h upper triangular in GL2(O). cls[p] is the class of point p
/// (-1 when the class is zero) and B(p) = eps^expo[p] B(class rep).
struct CuspClasses {
  int count = 0;
  int unit_order = 1;
  std::vector<int> cls;
  std::vector<int> expo;
};

inline CuspClasses cusp_classes(const EnSet& en, int degree) {
  const FieldId f = en.level().field();
  const ResidueRing& R = en.ring();
  const int n = en.size();
  const int ord = static_cast<int>(units(f).size());
  std::vector<int> parent(n), ex(n, 0);
  std::vector<char> dead(n, 0);
  std::iota(parent.begin(), parent.end(), 0);
  // ex[p]: B(p) = eps^ex[p] B(parent[p])
  std::vector<int> path;
  auto find = [&](int p) {
    path.clear();
    int r = p;
    while (parent[r] != r) {
      path.push_back(r);
      r = parent[r];
    }
    int acc = 0;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      acc = (acc + ex[*it]) % ord;
      ex[*it] = acc;
      parent[*it] = r;
    }
    return std::pair<int, int>{r, p == r ? 0 : ex[p]};
  };
  // B(q) = eps^e B(p)
  auto join = [&](int p, int q, int e) {
    auto [rp, ep] = find(p);
    auto [rq, eq] = find(q);
    int x = (((e + ep - eq) % ord) + ord) % ord;
    if (rp == rq) {
      if (x != 0) dead[rp] = 1;
      return;
    }
    parent[rq] = rp;
    ex[rq] = x;
    dead[rp] = dead[rp] || dead[rq];
  };
  const int w = R.index(QuadInt::omega(f)), e = R.index(fundamental_unit(f));
  for (int p = 0; p < n; ++p) {
    const EnPoint& pt = en.point(p);
    join(p, en.find(pt.u, R.add(pt.v, pt.u)), 0);
    join(p, en.find(pt.u, R.add(pt.v, R.mul(pt.u, w))), 0);
    join(p, en.find(R.mul(pt.u, e), pt.v), 0);
    join(p, en.find(pt.u, R.mul(pt.v, e)), degree);
  }
  CuspClasses out;
  out.unit_order = ord;
  out.cls.assign(n, -1);
  out.expo.assign(n, 0);
  std::map<int, int> root_class;
  for (int p = 0; p < n; ++p) {
    auto [r, ep] = find(p);
    if (dead[r]) continue;
    auto it = root_class.find(r);
    if (it == root_class.end()) it = root_class.emplace(r, out.count++).first;
    out.cls[p] = it->second;
    out.expo[p] = ep;
  }
  return out;
}

// ------------------------------------------------------------------ the space

struct ManinGen {
  int monomial = 0;  ///< the monomial X^(k-2-i) Y^i
  int point = 0;     ///< index into E_n
};

/// Formal O-linear combination of Manin generators, keyed by generator index.
using ManinVec = std::map<int, QuadInt>;

inline void add_to(ManinVec& v, int gen, const QuadInt& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = v.emplace(gen, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) v.erase(it);
  }
}

inline QuadInt omega_power(FieldId f, int r) {
  QuadInt x(f, 1);
  for (int i = 0; i < r; ++i) x = x * QuadInt::omega(f);
  return x;
}

class SymbolSpace {
 public:
  SymbolSpace(const Level& level, int weight) : level_(level), k_(weight) {
    if (weight < 2) throw std::invalid_argument("weight must be at least 2");
    if (weight % 2 == 1 && divides(level.generator(), QuadInt(level.field(), 2)))
      throw std::invalid_argument("odd weight needs -I outside Gamma_1(n), i.e. n not dividing 2");
    en_ = EnSet(level);
    rdim_ = k_ == 2 ? 1 : 2;
    build_relations();
    build_quotient();
    build_boundary();
  }

  const Level& level() const { return level_; }
  FieldId field() const { return level_.field(); }
  int weight() const { return k_; }
  int degree() const { return k_ - 2; }
  const EnSet& en() const { return en_; }

  int num_generators() const { return (degree() + 1) * en_.size(); }
  ManinGen generator(int g) const { return {g / en_.size(), g % en_.size()}; }
  int generator_index(int monomial, int point) const { return monomial * en_.size() + point; }

  /// Columns per generator in the rational presentation (1 for k = 2, else 2).
  int rdim() const { return rdim_; }
  int num_columns() const { return num_generators() * rdim_; }

  const SparseMat& relation_matrix() const { return relations_; }
  const std::vector<RelationWord>& words() const { return words_; }

  int dim() const { return static_cast<int>(basis_cols_.size()); }
  const std::vector<int>& basis_columns() const { return basis_cols_; }

  /// Rational column vector of a formal O-combination of generators.
  SparseVec columns_of(const ManinVec& v) const {
    std::vector<SparseVec::Entry> e;
    for (const auto& [g, c] : v) {
      if (rdim_ == 1) {
        if (!c.is_rational()) throw std::domain_error("irrational coefficient in a weight-2 space");
        e.emplace_back(g, Rational(c.a()));
      } else {
        e.emplace_back(2 * g, Rational(c.a()));
        e.emplace_back(2 * g + 1, Rational(c.b()));
      }
    }
    return SparseVec(std::move(e));
  }

  /// The O-combination represented by column `col` (generator times w^r).
  ManinVec column_element(int col) const {
    return {{col / rdim_, omega_power(field(), col % rdim_)}};
  }

  /// Image in the quotient, in coordinates on basis_columns().
  SparseVec project(const SparseVec& columns) const {
    std::map<int, Rational> acc;
    for (const auto& [j, c] : columns.entries())
      for (const auto& [i, x] : proj_[j].entries()) acc[i] += c * x;
    std::vector<SparseVec::Entry> e;
    for (auto& [i, x] : acc)
      if (sgn(x) != 0) e.emplace_back(i, x);
    return SparseVec(std::move(e));
  }
  SparseVec project(const ManinVec& v) const { return project(columns_of(v)); }

  /// A preimage in the column space of a quotient vector.
  SparseVec lift(const SparseVec& q) const {
    std::vector<SparseVec::Entry> e;
    for (const auto& [i, c] : q.entries()) e.emplace_back(basis_cols_[i], c);
    return SparseVec(std::move(e));
  }

  const CuspClasses& cusp_classes() const { return cusps_; }
  int cusp_class_count() const { return cusps_.count; }

  /// Boundary of a formal combination, in the rational coordinates of the
  /// cusp classes (class c with coefficient a + b w sits at rdim*c + {0,1}).
  SparseVec boundary_of(const ManinVec& v) const {
    const FieldId f = field();
    const ResidueRing& R = en_.ring();
    const int w = degree();
    std::map<int, QuadInt> acc;
    auto add = [&](int point, const QuadInt& c) {
      int cl = cusps_.cls[point];
      if (cl < 0) return;
      QuadInt x = c * eps_pow_[cusps_.expo[point]];
      auto [it, fresh] = acc.emplace(cl, x);
      if (!fresh) it->second += x;
    };
    for (const auto& [g, c] : v) {
      ManinGen mg = generator(g);
      const EnPoint& p = en_.point(mg.point);
      if (mg.monomial == 0) add(mg.point, c);
      if (mg.monomial == w) add(en_.find(p.v, R.neg(p.u)), -c);
    }
    std::vector<SparseVec::Entry> e;
    for (const auto& [cl, x] : acc) {
      if (rdim_ == 1) {
        e.emplace_back(cl, Rational(x.a()));
      } else {
        e.emplace_back(2 * cl, Rational(x.a()));
        e.emplace_back(2 * cl + 1, Rational(x.b()));
      }
    }
    (void)f;
    return SparseVec(std::move(e));
  }

  /// Boundary map on the quotient: rows are boundary coordinates, columns the
  /// quotient basis.
  const SparseMat& boundary_matrix() const { return boundary_; }
  const Subspace& cuspidal() const { return cuspidal_; }
  int cuspidal_dim() const { return cuspidal_.dim(); }

  /// Relation rows as O-combinations, for checking.
  ManinVec relation_element(int gen, const RelationWord& r) const {
    const ManinGen mg = generator(gen);
    ManinVec out;
    const HomPoly P = HomPoly::monomial(field(), degree(), mg.monomial);
    for (const auto& [sign, m] : r.terms) {
      int q = en_.act(mg.point, m);
      if (q < 0) throw std::logic_error("relation matrix left E_n");
      HomPoly Q = poly_slash(P, unit_det_inverse(m));
      for (int i = 0; i <= degree(); ++i)
        add_to(out, generator_index(i, q), QuadInt(field(), sign) * Q.coeff(i));
    }
    return out;
  }

 private:
  void build_relations() {
    words_ = relation_words(field());
    relations_ = SparseMat(0, num_columns());
    const FieldId f = field();
    for (int g = 0; g < num_generators(); ++g)
      for (const auto& r : words_) {
        ManinVec v = relation_element(g, r);
        if (v.empty()) continue;
        relations_.append_row(columns_of(v));
        if (rdim_ == 2) {
          ManinVec vw;
          for (const auto& [j, c] : v) add_to(vw, j, c * QuadInt::omega(f));
          relations_.append_row(columns_of(vw));
        }
      }
  }

  void build_quotient() {
    RowReducer red(num_columns());
    std::vector<int> order(relations_.rows());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return relations_.row(a).nnz() < relations_.row(b).nnz();
    });
    for (int i : order) red.insert(relations_.row(i));
    red.finish();
    std::vector<int> qindex(num_columns(), -1);
    for (int j = 0; j < num_columns(); ++j)
      if (!red.is_pivot(j)) {
        qindex[j] = static_cast<int>(basis_cols_.size());
        basis_cols_.push_back(j);
      }
    proj_.assign(num_columns(), SparseVec());
    for (int j = 0; j < num_columns(); ++j) {
      if (qindex[j] >= 0) {
        proj_[j] = SparseVec::unit(qindex[j]);
        continue;
      }
      std::vector<SparseVec::Entry> e;
      for (const auto& [i, c] : red.pivot_row(j).entries())
        if (i != j) e.emplace_back(qindex[i], -c);
      proj_[j] = SparseVec(std::move(e));
    }
  }

  void build_boundary() {
    cusps_ = bianchi::cusp_classes(en_, degree());
    QuadInt e = fundamental_unit(field()), x(field(), 1);
    for (int i = 0; i < cusps_.unit_order; ++i) {
      eps_pow_.push_back(x);
      x = x * e;
    }
    boundary_ = SparseMat(0, dim());
    std::vector<std::tuple<int, int, Rational>> t;
    for (int i = 0; i < dim(); ++i) {
      SparseVec b = boundary_of(column_element(basis_cols_[i]));
      for (const auto& [r, c] : b.entries()) t.emplace_back(r, i, c);
    }
    boundary_ = SparseMat::from_triples(cusps_.count * rdim_, dim(), t);
    cuspidal_ = kernel(boundary_);
  }

  Level level_;
  int k_;
  EnSet en_;
  int rdim_ = 1;
  std::vector<RelationWord> words_;
  SparseMat relations_;
  std::vector<int> basis_cols_;
  std::vector<SparseVec> proj_;
  CuspClasses cusps_;
  std::vector<QuadInt> eps_pow_;
  SparseMat boundary_;
  Subspace cuspidal_;
};

inline SymbolSpace build_space(const Level& level, int weight) { return SymbolSpace(level, weight); }

inline Subspace cuspidal_subspace(const SymbolSpace& s) { return s.cuspidal(); }

// ------------------------------------------------------- the target of b

/// Symbols [a]_m for m | n and a in (O/m)^x, modulo [a] = (-1)^k [-a].
class BoundaryTarget {
 public:
  BoundaryTarget(const Level& level, int weight) : level_(level), k_(weight), top_(level.generator()) {
    divisors_ = divisors_up_to_units(level.generator());
    for (std::size_t m = 0; m < divisors_.size(); ++m) {
      ResidueRing R(divisors_[m]);
      rings_.push_back(R);
      std::vector<std::pair<int, int>> slot(R.size(), {-1, 0});
      for (int a = 0; a < R.size(); ++a) {
        if (!R.is_unit(a) || slot[a].first >= 0) continue;
        int na = R.neg(a);
        if (na == a && weight % 2 == 1) {
          slot[a] = {-1, 0};  // [a] = -[a]
          continue;
        }
        int c = static_cast<int>(labels_.size());
        labels_.push_back("[" + format(R.element(a)) + "]_(" + format(divisors_[m]) + ")");
        slot[a] = {c, 1};
        if (na != a) slot[na] = {c, weight % 2 == 0 ? 1 : -1};
      }
      slots_.push_back(std::move(slot));
    }
    for (int u = 0; u < top_.size(); ++u) gcd_class_.push_back(divisor_index(top_.element(u)));
  }

  int size() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int c) const { return labels_[c]; }
  const std::vector<QuadInt>& divisors() const { return divisors_; }

  /// Index of the divisor class of gcd(x, n).
  int divisor_index(const QuadInt& x) const {
    QuadInt g = gcd(x, level_.generator());
    for (std::size_t m = 0; m < divisors_.size(); ++m)
      if (divisors_[m] == g) return static_cast<int>(m);
    throw std::logic_error("gcd is not a listed divisor");
  }

  /// (class, sign) of [a]_m; class -1 for the zero symbol. Throws when a is
  /// not invertible modulo m.
  std::pair<int, int> symbol(int m, const QuadInt& a) const {
    const ResidueRing& R = rings_[m];
    int i = R.index(a);
    if (!R.is_unit(i)) throw std::domain_error("[a]_m needs a invertible modulo m");
    return slots_[m][i];
  }

  /// [x^{-1} mod (y, n)]_{(y, n)} for residues x, y of O/n.
  std::pair<int, int> inverse_symbol(int x, int y) const {
    int m = gcd_class_[y];
    const ResidueRing& R = rings_[m];
    int i = R.index(top_.element(x));
    return slots_[m][R.inverse(i)];
  }

 private:
  Level level_;
  int k_;
  ResidueRing top_;
  std::vector<QuadInt> divisors_;
  std::vector<ResidueRing> rings_;
  std::vector<std::vector<std::pair<int, int>>> slots_;
  std::vector<int> gcd_class_;
  std::vector<std::string> labels_;
};

/// Element of the boundary target: class index -> coefficient.
using BoundaryVec = std::map<int, QuadInt>;

inline void add_symbol(BoundaryVec& out, std::pair<int, int> sym, const QuadInt& c) {
  if (sym.first < 0 || c.is_zero()) return;
  QuadInt x = QuadInt(c.field(), sym.second) * c;
  auto [it, fresh] = out.emplace(sym.first, x);
  if (!fresh) {
    it->second += x;
    if (it->second.is_zero()) out.erase(it);
  }
}

/// b(P[u,v]) = P(1,0) [v^-1]_(u,n) - P(0,1) [u^-1]_(v,n), extended linearly.
inline BoundaryVec boundary_b(const SymbolSpace& s, const BoundaryTarget& t, const ManinVec& x) {
  BoundaryVec out;
  const int w = s.degree();
  for (const auto& [g, c] : x) {
    ManinGen mg = s.generator(g);
    const EnPoint& p = s.en().point(mg.point);
    if (mg.monomial == 0) add_symbol(out, t.inverse_symbol(p.v, p.u), c);
    if (mg.monomial == w) add_symbol(out, t.inverse_symbol(p.u, p.v), -c);
  }
  return out;
}

/// b on the column space, with rows 2c and 2c+1 for the 1 and w parts of
/// target class c.
inline SparseMat boundary_b_matrix(const SymbolSpace& s, const BoundaryTarget& t) {
  std::vector<std::tuple<int, int, Rational>> triples;
  for (int col = 0; col < s.num_columns(); ++col)
    for (const auto& [c, x] : boundary_b(s, t, s.column_element(col))) {
      if (sgn(x.a()) != 0) triples.emplace_back(2 * c, col, Rational(x.a()));
      if (sgn(x.b()) != 0) triples.emplace_back(2 * c + 1, col, Rational(x.b()));
    }
  return SparseMat::from_triples(2 * t.size(), s.num_columns(), triples);
}

/// mu(d([P, g])) = P(1,0) [Gamma g(1,0)] - P(0,1) [Gamma g(0,1)], where the
/// orbit of a primitive column (a, c) is recorded as [a]_(c, n).
inline BoundaryVec boundary_mu_del(const BoundaryTarget& t, const HomPoly& P, const Mat22& g) {
  if (g.det() != QuadInt(g.field(), 1)) throw std::invalid_argument("boundary_mu_del needs g in SL2(O)");
  BoundaryVec out;
  add_symbol(out, t.symbol(t.divisor_index(g.c), g.a), P.at_x());
  add_symbol(out, t.symbol(t.divisor_index(g.d), g.b), -P.at_y());
  return out;
}

// ------------------------------------------------------- modular symbols

struct ModSymTerm {
  Rational coeff;
  HomPoly poly;
  Cusp alpha;
  Cusp beta;
};

/// A formal sum of P (x) {alpha, beta}.
struct ModSym {
  int weight = 2;
  std::vector<ModSymTerm> terms;
};

/// Matrices g_j with sum_j g_j {0, oo} = {oo, beta}, from the continued
/// fraction of beta computed with euclid_div; each g_j has determinant 1.
inline std::vector<Mat22> convergent_matrices(const Cusp& beta) {
  const FieldId f = beta.num().field();
  std::vector<Mat22> out;
  if (beta.is_infinity()) return out;
  QuadInt p2(f, 0), q2(f, 1), p1(f, 1), q1(f, 0);
  QuadInt x = beta.num(), y = beta.den();
  while (!y.is_zero()) {
    DivResult d = euclid_div(x, y);
    QuadInt p = d.q * p1 + p2, q = d.q * q1 + q2;
    Mat22 g{p, p1, q, q1};
    if (g.det() != QuadInt(f, 1)) {
      g.a = -g.a;
      g.c = -g.c;
    }
    out.push_back(g);
    p2 = p1;
    q2 = q1;
    p1 = p;
    q1 = q;
    x = y;
    y = d.r;
  }
  if (Cusp(p1, q1) != beta) throw std::logic_error("continued fraction did not reach the cusp");
  return out;
}

/// Expansion of a modular symbol as a rational combination of columns.
inline SparseVec manin_columns(const ModSym& m, const SymbolSpace& s) {
  if (m.weight != s.weight()) throw std::invalid_argument("weight mismatch");
  const EnSet& en = s.en();
  std::map<int, Rational> acc;
  auto side = [&](const ModSymTerm& t, const Cusp& c, int sign) {
    for (const Mat22& g : convergent_matrices(c)) {
      int q = en.index_of(g.c, g.d);
      HomPoly Q = poly_slash(t.poly, unit_det_inverse(g));
      ManinVec v;
      for (int i = 0; i <= s.degree(); ++i) add_to(v, s.generator_index(i, q), Q.coeff(i));
      SparseVec cols = s.columns_of(v);
      for (const auto& [j, x] : cols.entries()) acc[j] += Rational(sign) * t.coeff * x;
    }
  };
  for (const ModSymTerm& t : m.terms) {
    if (t.poly.degree() != s.degree()) throw std::invalid_argument("polynomial degree mismatch");
    side(t, t.beta, 1);
    side(t, t.alpha, -1);
  }
  std::vector<SparseVec::Entry> e;
  for (auto& [j, x] : acc)
    if (sgn(x) != 0) e.emplace_back(j, x);
  return SparseVec(std::move(e));
}

inline SparseVec modular_to_manin(const ModSym& m, const SymbolSpace& s) {
  return s.project(manin_columns(m, s));
}

/// [P, g] as a modular symbol P|_g (x) {g0, g oo}.
inline ModSymTerm manin_as_modular(const HomPoly& P, const Mat22& g) {
  const FieldId f = g.field();
  return {Rational(1), poly_slash(P, g), apply(g, Cusp::of(QuadInt(f, 0))), apply(g, Cusp::infinity(f))};
}

}  // namespace bianchi
