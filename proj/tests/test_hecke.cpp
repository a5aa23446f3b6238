#include <gtest/gtest.h>

#include <map>

#include "bianchi/hecke.hpp"

using namespace bianchi;

namespace {

const int kFields[] = {1, 2, 3, 7, 11};

QuadInt Q(int d, long a, long b = 0) { return QuadInt(FieldId(d), a, b); }

std::vector<QuadInt> canonical_of_norm(FieldId f, long lo, long hi) {
  std::vector<QuadInt> out;
  for (long m = lo; m <= hi; ++m)
    for (const QuadInt& e : elements_of_norm(f, m))
      if (canonical_associate(e).rep == e) out.push_back(e);
  return out;
}

std::vector<QuadInt> coprime_etas(const SymbolSpace& s, long lo, long hi) {
  std::vector<QuadInt> out;
  for (const QuadInt& e : canonical_of_norm(s.field(), lo, hi))
    if (coprime_to_level(s, e)) out.push_back(e);
  return out;
}

bool columns_in(const SparseMat& m, const Subspace& v) {
  for (const SparseVec& b : v.basis())
    if (!v.contains(m.apply(b))) return false;
  return true;
}

// a_p of the elliptic curve 11a for p < 30.
const std::map<long, long> k11a = {{2, -2}, {3, -1}, {5, 1},  {7, -2}, {11, 1},
                                   {13, 4}, {17, -2}, {19, 0}, {23, -1}, {29, 0}};

// Eigenvalue of the base change of 11a to Q(sqrt(-11)) at eta, from the
// factorization of eta into prime elements.
long base_change_11a(const QuadInt& eta) {
  std::map<QuadInt, int> fact;
  QuadInt x = eta;
  while (!is_unit(x)) {
    QuadInt p;
    for (const QuadInt& d : divisors_up_to_units(x))
      if (!is_unit(d)) {
        p = d;
        break;
      }
    x = exact_div(x, p);
    ++fact[p];
  }
  long out = 1;
  for (const auto& [p, r] : fact) {
    long np = norm(p).get_si();
    long ap;
    if (np == 11 || k11a.count(np)) {
      ap = k11a.at(np);
    } else {
      long q = 1;
      while (q * q < np) ++q;
      ap = k11a.at(q) * k11a.at(q) - 2 * q;
    }
    long prev = 1, cur = ap;
    for (int i = 1; i < r; ++i) {
      long next = ap * cur - np * prev;
      prev = cur;
      cur = next;
    }
    out *= cur;
  }
  return out;
}

}  // namespace

TEST(Hecke, UnitEtaIsIdentity) {
  SymbolSpace s(Level(Q(1, 2, 1)), 2);
  EXPECT_EQ(hecke_on_manin(s, Q(1, 1)).matrix, SparseMat::identity(s.dim()));
  EXPECT_EQ(hecke_oracle(s, Q(1, 1)).matrix, SparseMat::identity(s.dim()));
}

TEST(Hecke, RejectsNonCoprime) {
  SymbolSpace s(Level(Q(1, 2, 1)), 2);
  EXPECT_THROW(hecke_on_manin(s, Q(1, 2, 1)), std::invalid_argument);
  EXPECT_THROW(hecke_oracle(s, Q(1, 5)), std::invalid_argument);
}

TEST(Hecke, OracleEquivalenceGaussian) {
  SymbolSpace s(Level(Q(1, 2, 1)), 2);
  for (const QuadInt& eta : {Q(1, 1, 1), Q(1, 2, -1), Q(1, 2), Q(1, 3)})
    EXPECT_EQ(hecke_on_manin(s, eta).matrix, hecke_oracle(s, eta).matrix) << format(eta);
}

TEST(Hecke, OracleEquivalenceAllFields) {
  for (int d : kFields)
    for (const QuadInt& n : canonical_of_norm(FieldId(d), 2, 13)) {
      SymbolSpace s(Level(n), 2);
      for (const QuadInt& eta : coprime_etas(s, 2, 10))
        EXPECT_EQ(hecke_on_manin(s, eta).matrix, hecke_oracle(s, eta).matrix)
            << d << " n=" << format(n) << " eta=" << format(eta);
    }
}

TEST(Hecke, OracleEquivalenceHigherWeight) {
  for (auto [d, n, k] : std::vector<std::tuple<int, QuadInt, int>>{
           {1, Q(1, 2, 1), 4}, {3, Q(3, 3), 3}, {2, Q(2, 3), 3}, {7, Q(7, 2, 1), 4}}) {
    SymbolSpace s(Level(n), k);
    for (const QuadInt& eta : coprime_etas(s, 2, 9))
      EXPECT_EQ(hecke_on_manin(s, eta).matrix, hecke_oracle(s, eta).matrix)
          << d << " k=" << k << " eta=" << format(eta);
  }
}

TEST(Hecke, OracleRepresentativeCount) {
  for (int d : kFields) {
    Level level(Q(d, 3));
    for (const QuadInt& p : canonical_of_norm(FieldId(d), 2, 13)) {
      if (divisors_up_to_units(p).size() != 2 || !is_unit(gcd(p, level.generator()))) continue;
      EXPECT_EQ(static_cast<long>(delta_representatives(level, p).size()), norm(p).get_si() + 1);
      EXPECT_EQ(static_cast<long>(delta_representatives(level, p).size()), class_count_prime(p));
    }
  }
}

TEST(Hecke, PhiDeltaPairs) {
  for (int d : {1, 3, 11}) {
    Level level(Q(d, 3));
    EnSet en(level);
    const ResidueRing& R = en.ring();
    for (const QuadInt& eta : canonical_of_norm(FieldId(d), 2, 10)) {
      if (!is_unit(gcd(eta, level.generator()))) continue;
      auto reps = delta_representatives(level, eta);
      for (std::size_t i = 0; i < reps.size(); ++i)
        for (std::size_t j = 0; j < reps.size(); ++j)
          EXPECT_EQ(same_gamma1_coset(level, eta, reps[i], reps[j]), i == j);
      int e = R.inverse(R.index(eta));
      for (const auto& h : generate(eta).matrices) {
        if (en.index_of(h.m.c, h.m.d) < 0) continue;
        PhiDeltaPair pair = phi_delta_pair(en, eta, h.m);
        EXPECT_EQ(pair.g.det(), Q(d, 1));
        EXPECT_EQ(pair.delta * pair.g, h.m);
        EXPECT_EQ(pair.delta.det(), eta);
        EXPECT_TRUE(divides(level.generator(), pair.delta.c));
        EXPECT_TRUE(divides(level.generator(), pair.delta.a - Q(d, 1)));
        EXPECT_EQ(R.index(pair.g.c), R.mul(e, R.index(h.m.c)));
        EXPECT_EQ(R.index(pair.g.d), R.mul(e, R.index(h.m.d)));
        int hits = 0;
        for (const Mat22& r : reps) hits += same_gamma1_coset(level, eta, pair.delta, r);
        EXPECT_EQ(hits, 1);
      }
    }
  }
}

TEST(Hecke, Commutativity) {
  SymbolSpace s(Level(Q(1, 3)), 2);
  auto a = hecke_on_manin(s, Q(1, 1, 1)), b = hecke_on_manin(s, Q(1, 2, 1));
  EXPECT_TRUE(commute_check(a, b).ok());
  EXPECT_TRUE(commute_check(a, hecke_on_manin(s, Q(1, 1))).ok());
  for (auto [d, n, k] : std::vector<std::tuple<int, QuadInt, int>>{
           {2, Q(2, 3), 2}, {3, Q(3, 4, -3), 2}, {11, Q(11, 1, -2), 2}, {11, Q(11, 4), 2}, {1, Q(1, 2, 1), 4}}) {
    SymbolSpace t(Level(n), k);
    std::vector<HeckeOperator> ops;
    for (const QuadInt& eta : coprime_etas(t, 2, 16)) ops.push_back(hecke_on_manin(t, eta));
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = i + 1; j < ops.size(); ++j) EXPECT_TRUE(commute_check(ops[i], ops[j]).ok());
  }
}

TEST(Hecke, CuspidalInvariance) {
  for (auto [d, n] : std::vector<std::pair<int, QuadInt>>{{11, Q(11, 1, -2)}, {11, Q(11, 4)}, {1, Q(1, 3)}}) {
    SymbolSpace s(Level(n), 2);
    for (const QuadInt& eta : coprime_etas(s, 2, 12)) {
      HeckeOperator op = hecke_on_manin(s, eta);
      EXPECT_TRUE(columns_in(op.matrix, s.cuspidal())) << d << " " << format(eta);
      EXPECT_EQ(op.cuspidal_matrix.rows(), s.cuspidal_dim());
    }
  }
}

TEST(Hecke, TieBreakIndependence) {
  for (auto [d, n, k] : std::vector<std::tuple<int, QuadInt, int>>{
           {1, Q(1, 3), 2}, {3, Q(3, 4, -3), 2}, {7, Q(7, 3), 2}, {11, Q(11, 4), 2}, {1, Q(1, 2, 1), 4}}) {
    SymbolSpace s(Level(n), k);
    for (const QuadInt& eta : coprime_etas(s, 2, 20)) {
      HeilbronnFamily a = generate(eta), b = generate(eta, ResidueConvention::LexMax);
      SparseMat ma = hecke_matrix_from_family(s, a), mb = hecke_matrix_from_family(s, b);
      EXPECT_EQ(ma, mb) << d << " " << format(eta);
      Rational ta = 0, tb = 0;
      for (int i = 0; i < s.dim(); ++i) {
        ta += ma.at(i, i);
        tb += mb.at(i, i);
      }
      EXPECT_EQ(ta, tb);
    }
  }
}

TEST(Hecke, AssociatesDifferByUnitTwist) {
  for (auto [d, n, k] : std::vector<std::tuple<int, QuadInt, int>>{
           {1, Q(1, 2, 1), 4}, {3, Q(3, 3, 1), 3}, {3, Q(3, 3, 1), 4}, {2, Q(2, 3), 3}, {1, Q(1, 3), 2}}) {
    SymbolSpace s(Level(n), k);
    for (const QuadInt& eta : coprime_etas(s, 2, 10)) {
      HeckeOperator t = hecke_on_manin(s, eta);
      for (const QuadInt& u : units(s.field())) {
        SparseMat twisted = hecke_on_manin(s, u * eta).matrix;
        EXPECT_EQ(twisted, unit_twist(s, u) * t.matrix) << d << " k=" << k << " " << format(eta);
        if (k == 2) {
          EXPECT_EQ(twisted, t.matrix);
        }
      }
    }
  }
}

TEST(Eigen, EmptyCuspidalSpace) {
  SymbolSpace s(Level(Q(1, 3)), 2);
  ASSERT_EQ(s.cuspidal_dim(), 0);
  EigenTable t = eigensystems(s, coprime_etas(s, 2, 10));
  EXPECT_TRUE(t.systems.empty());
  EXPECT_TRUE(t.residual.empty());
}

TEST(Eigen, BaseChangeOf11a) {
  SymbolSpace s(Level(Q(11, 1, -2)), 2);
  ASSERT_EQ(s.cuspidal_dim(), 1);
  auto etas = coprime_etas(s, 2, 30);
  EigenTable t = eigensystems(s, etas);
  ASSERT_EQ(t.systems.size(), 1u);
  EXPECT_TRUE(t.residual.empty());
  const auto& sys = t.systems[0];
  EXPECT_EQ(sys.space.dim(), 1);
  ASSERT_EQ(sys.eigenvalues.size(), etas.size());
  for (const auto& [eta, lambda] : sys.eigenvalues)
    EXPECT_EQ(lambda, Rational(base_change_11a(eta))) << format(eta);
}

TEST(Eigen, IrrationalPairIsReported) {
  SymbolSpace s(Level(Q(11, 4)), 2);
  ASSERT_EQ(s.cuspidal_dim(), 2);
  EigenTable t = eigensystems(s, coprime_etas(s, 2, 12));
  EXPECT_TRUE(t.systems.empty());
  ASSERT_FALSE(t.residual.empty());
  EXPECT_EQ(t.residual[0].dim, 2);
  EXPECT_EQ(poly_to_string(t.residual[0].factor), "x^2 + 3");
}
