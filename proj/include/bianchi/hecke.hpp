#pragma once

// Hecke operators T_eta on the Manin presentation via Heilbronn-Merel
// families, an independent oracle through coset representatives of
// Gamma_1(n)\Delta_eta, and simultaneous rational eigensystems.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bianchi/heilbronn.hpp"
#include "bianchi/symbol_space.hpp"

namespace bianchi {

struct HeckeOperator {
  QuadInt eta;
  SparseMat matrix;           ///< on the quotient basis, acting on columns
  SparseMat cuspidal_matrix;  ///< on the echelon basis of the cuspidal subspace
};

inline bool coprime_to_level(const SymbolSpace& s, const QuadInt& eta) {
  return is_unit(gcd(eta, s.level().generator()));
}

/// T_free(P[u,v]) = sum_M u_M P(aX+bY, cX+dY)[(u,v)M] over M with (u,v)M in
/// E_n, on a single Manin generator.
inline ManinVec hecke_free_image(const SymbolSpace& s, const HeilbronnFamily& fam,
                                 const std::vector<EnSet::Reduced>& reduced, int gen,
                                 const QuadInt& coeff) {
  const ManinGen mg = s.generator(gen);
  const FieldId f = s.field();
  const HomPoly P = HomPoly::monomial(f, s.degree(), mg.monomial);
  ManinVec out;
  for (std::size_t j = 0; j < fam.matrices.size(); ++j) {
    int q = s.en().act(mg.point, reduced[j]);
    if (q < 0) continue;
    const Mat22& m = fam.matrices[j].m;
    HomPoly Q = P.substitute(m.a, m.b, m.c, m.d);
    QuadInt c = coeff * QuadInt(f, fam.matrices[j].multiplicity);
    for (int i = 0; i <= s.degree(); ++i) add_to(out, s.generator_index(i, q), c * Q.coeff(i));
  }
  return out;
}

inline std::vector<EnSet::Reduced> reduce_family(const SymbolSpace& s, const HeilbronnFamily& fam) {
  std::vector<EnSet::Reduced> out;
  for (const auto& h : fam.matrices) out.push_back(s.en().reduce(h.m));
  return out;
}

/// Applies T_free to an arbitrary column vector of the free module.
inline SparseVec hecke_free_apply(const SymbolSpace& s, const HeilbronnFamily& fam,
                                  const SparseVec& columns) {
  auto reduced = reduce_family(s, fam);
  const int r = s.rdim();
  SparseVec out;
  for (const auto& [col, x] : columns.entries()) {
    ManinVec img = hecke_free_image(s, fam, reduced, col / r, omega_power(s.field(), col % r));
    SparseVec v = s.columns_of(img);
    out.axpy(x, v);
  }
  return out;
}

inline SparseMat restrict_sparse(const SparseMat& m, const Subspace& v) {
  return SparseMat::from_dense(restrict_to(m, v));
}

/// Matrix of T_eta on the quotient from a given family (u_M = multiplicity).
/// Non-coprime eta is accepted here; whether the result is well defined on
/// the quotient is then the caller's question.
inline SparseMat hecke_matrix_from_family(const SymbolSpace& s, const HeilbronnFamily& fam) {
  auto reduced = reduce_family(s, fam);
  std::vector<std::tuple<int, int, Rational>> t;
  const int r = s.rdim();
  for (int j = 0; j < s.dim(); ++j) {
    int col = s.basis_columns()[j];
    ManinVec img = hecke_free_image(s, fam, reduced, col / r, omega_power(s.field(), col % r));
    SparseVec q = s.project(img);
    for (const auto& [i, x] : q.entries()) t.emplace_back(i, j, x);
  }
  return SparseMat::from_triples(s.dim(), s.dim(), t);
}

inline HeckeOperator hecke_on_manin(const SymbolSpace& s, const QuadInt& eta,
                                    ResidueConvention conv = ResidueConvention::Division) {
  if (!coprime_to_level(s, eta))
    throw std::invalid_argument("eta = " + format(eta) + " is not coprime to the level");
  HeckeOperator op;
  op.eta = eta;
  op.matrix = hecke_matrix_from_family(s, cached_family(eta, conv));
  op.cuspidal_matrix = restrict_sparse(op.matrix, s.cuspidal());
  return op;
}

/// The operator of the one-matrix family {diag(1, u)}; T_{u eta} = R_u T_eta.
inline SparseMat unit_twist(const SymbolSpace& s, const QuadInt& u) {
  if (!is_unit(u)) throw std::invalid_argument(format(u) + " is not a unit");
  const FieldId f = s.field();
  HeilbronnFamily fam;
  fam.eta = u;
  fam.matrices.push_back({Mat22::diag(QuadInt(f, 1), u), QuadInt(f, 1), QuadInt(f, 0), 1, 1});
  return hecke_matrix_from_family(s, fam);
}

// ---------------------------------------------------------------- oracle

/// delta' delta^-1 in Gamma_1(n), for delta, delta' of determinant eta.
inline bool same_gamma1_coset(const Level& level, const QuadInt& eta, const Mat22& d1, const Mat22& d2) {
  const QuadInt& n = level.generator();
  Mat22 p = d1 * shimura_tilde(d2);
  if (!(divides(eta, p.a) && divides(eta, p.b) && divides(eta, p.c) && divides(eta, p.d))) return false;
  Mat22 g{exact_div(p.a, eta), exact_div(p.b, eta), exact_div(p.c, eta), exact_div(p.d, eta)};
  return divides(n, g.c) && divides(n, g.d - QuadInt(level.field(), 1));
}

struct PhiDeltaPair {
  Mat22 delta;  ///< in Delta_eta
  Mat22 g;      ///< in SL2(O), M = delta g
};

/// For M of determinant eta with (0,1)M unimodular mod n: g in SL2(O) whose
/// bottom row is eta^-1 (0,1)M mod n, and delta = M g^-1, which lies in Delta_eta.
inline PhiDeltaPair phi_delta_pair(const EnSet& en, const QuadInt& eta, const Mat22& m) {
  const ResidueRing& R = en.ring();
  int e = R.inverse(R.index(eta));
  int u = R.mul(e, R.index(m.c)), v = R.mul(e, R.index(m.d));
  int p = en.find(u, v);
  if (p < 0) throw std::invalid_argument("bottom row of M is not unimodular modulo the level");
  Mat22 g = en.lift_to_sl2(en.point(p));
  return {m * shimura_tilde(g), g};
}

/// Representatives of Gamma_1(n)\Delta_eta, Delta_eta = {det = eta, c = 0,
/// a = 1 mod n}, found by brute force in growing boxes.
inline std::vector<Mat22> delta_representatives(const Level& level, const QuadInt& eta,
                                                int max_box = 4) {
  const FieldId f = level.field();
  const QuadInt& n = level.generator();
  if (!is_unit(gcd(eta, n))) throw std::invalid_argument("eta is not coprime to the level");
  long target = 0;
  for (const QuadInt& d : divisors_up_to_units(eta)) target += norm(d).get_si();
  std::vector<Mat22> reps;
  auto known = [&](const Mat22& m) {
    return std::any_of(reps.begin(), reps.end(),
                       [&](const Mat22& r) { return same_gamma1_coset(level, eta, m, r); });
  };
  for (int box = 0; box <= max_box && static_cast<long>(reps.size()) < target; ++box) {
    std::vector<QuadInt> small;
    for (int x = -box; x <= box; ++x)
      for (int y = -box; y <= box; ++y) small.emplace_back(f, x, y);
    for (const QuadInt& t : small) {
      QuadInt a = QuadInt(f, 1) + n * t;
      for (const QuadInt& cc : small) {
        QuadInt c = n * cc;
        for (const QuadInt& b : small) {
          QuadInt num = eta + b * c;
          if (!divides(a, num)) continue;
          Mat22 m{a, b, c, exact_div(num, a)};
          if (!known(m)) reps.push_back(m);
          if (static_cast<long>(reps.size()) == target) return reps;
        }
      }
    }
  }
  if (static_cast<long>(reps.size()) < target)
    throw std::runtime_error("delta_representatives: search budget exceeded");
  return reps;
}

/// T_eta from P (x) {alpha, beta} -> sum_delta P|_delta (x) {delta alpha, delta beta},
/// applied to lifted Manin symbols and converted back with modular_to_manin.
inline HeckeOperator hecke_oracle(const SymbolSpace& s, const QuadInt& eta) {
  const FieldId f = s.field();
  std::vector<Mat22> reps = delta_representatives(s.level(), eta);
  std::vector<std::tuple<int, int, Rational>> t;
  const int r = s.rdim();
  for (int j = 0; j < s.dim(); ++j) {
    int col = s.basis_columns()[j];
    ManinGen mg = s.generator(col / r);
    HomPoly P = omega_power(f, col % r) * HomPoly::monomial(f, s.degree(), mg.monomial);
    Mat22 g = s.en().lift_to_sl2(s.en().point(mg.point));
    ModSym m{s.weight(), {}};
    for (const Mat22& delta : reps) m.terms.push_back(manin_as_modular(P, delta * g));
    SparseVec q = modular_to_manin(m, s);
    for (const auto& [i, x] : q.entries()) t.emplace_back(i, j, x);
  }
  HeckeOperator op;
  op.eta = eta;
  op.matrix = SparseMat::from_triples(s.dim(), s.dim(), t);
  op.cuspidal_matrix = restrict_sparse(op.matrix, s.cuspidal());
  return op;
}

struct CommuteCertificate {
  bool full = false;
  bool cuspidal = false;
  bool ok() const { return full && cuspidal; }
};

inline CommuteCertificate commute_check(const HeckeOperator& a, const HeckeOperator& b) {
  if (a.matrix.rows() != b.matrix.rows()) throw std::invalid_argument("operators on different spaces");
  CommuteCertificate c;
  c.full = (a.matrix * b.matrix) == (b.matrix * a.matrix);
  c.cuspidal = (a.cuspidal_matrix * b.cuspidal_matrix) == (b.cuspidal_matrix * a.cuspidal_matrix);
  return c;
}

// ---------------------------------------------------------- eigensystems

struct EigenSystem {
  std::string label;
  std::vector<std::pair<QuadInt, Rational>> eigenvalues;  ///< (eta, lambda_eta)
  Subspace space;                                         ///< in cuspidal coordinates
};

struct ResidualFactor {
  std::vector<std::pair<QuadInt, Rational>> eigenvalues;  ///< rational part so far
  QuadInt eta;                                            ///< operator that failed to split
  RatPoly factor;
  int dim = 0;
};

struct EigenTable {
  std::vector<QuadInt> etas;
  std::vector<EigenSystem> systems;
  std::vector<ResidualFactor> residual;
};

/// Simultaneous rational eigensystems of the cuspidal restrictions, refined
/// by increasing N(eta). Pieces with an irreducible irrational factor are
/// reported and not split further.
inline EigenTable eigensystems(const SymbolSpace& s, std::vector<QuadInt> etas) {
  std::stable_sort(etas.begin(), etas.end(),
                   [](const QuadInt& x, const QuadInt& y) { return norm(x) < norm(y); });
  EigenTable table;
  table.etas = etas;
  const int k = s.cuspidal_dim();
  if (k == 0) return table;
  struct Piece {
    std::vector<std::pair<QuadInt, Rational>> vals;
    Subspace space;
  };
  std::vector<Piece> pieces{{{}, Subspace::full(k)}};
  for (const QuadInt& eta : etas) {
    HeckeOperator op = hecke_on_manin(s, eta);
    std::vector<Piece> next;
    for (const Piece& p : pieces) {
      EigenDecomposition e = rational_eigensystem(op.cuspidal_matrix, p.space);
      for (const auto& piece : e.eigen) {
        Piece q = p;
        q.vals.emplace_back(eta, piece.value);
        q.space = piece.space;
        next.push_back(std::move(q));
      }
      if (e.residual.size() > 1)
        table.residual.push_back({p.vals, eta, e.residual, e.residual_space.dim()});
    }
    pieces = std::move(next);
  }
  int label = 0;
  for (auto& p : pieces) table.systems.push_back({"f" + std::to_string(++label), p.vals, p.space});
  return table;
}

}  // namespace bianchi
