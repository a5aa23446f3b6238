#include <gtest/gtest.h>

#include <random>

#include "bianchi/linalg.hpp"

using namespace bianchi;

namespace {

SparseMat dense(std::vector<std::vector<long>> rows) {
  DenseMat d;
  for (auto& r : rows) {
    std::vector<Rational> q;
    for (long x : r) q.emplace_back(x);
    d.push_back(q);
  }
  return SparseMat::from_dense(d);
}

SparseMat random_matrix(std::mt19937_64& rng, int r, int c, double density, int range) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> v(-range, range);
  std::vector<std::tuple<int, int, Rational>> t;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (u(rng) < density) {
        Rational q(v(rng), 1 + (v(rng) + range) % 3);
        q.canonicalize();
        t.emplace_back(i, j, q);
      }
  return SparseMat::from_triples(r, c, t);
}

// Independent dense RREF with textbook row operations.
DenseMat textbook_rref(DenseMat a) {
  int r = static_cast<int>(a.size()), c = r ? static_cast<int>(a[0].size()) : 0, lead = 0;
  for (int row = 0; row < r && lead < c; ++lead) {
    int i = row;
    while (i < r && sgn(a[i][lead]) == 0) ++i;
    if (i == r) continue;
    std::swap(a[i], a[row]);
    Rational p = a[row][lead];
    for (auto& x : a[row]) x /= p;
    for (int k = 0; k < r; ++k) {
      if (k == row || sgn(a[k][lead]) == 0) continue;
      Rational f = a[k][lead];
      for (int j = 0; j < c; ++j) a[k][j] -= f * a[row][j];
    }
    ++row;
  }
  DenseMat out;
  for (auto& row : a)
    if (std::any_of(row.begin(), row.end(), [](const Rational& x) { return sgn(x) != 0; }))
      out.push_back(row);
  return out;
}

}  // namespace

TEST(Echelon, Examples) {
  Echelon e = echelon(SparseMat::identity(3));
  EXPECT_EQ(e.rank, 3);
  EXPECT_EQ(e.pivots, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(echelon(SparseMat(2, 3)).rank, 0);
  Echelon p = echelon(dense({{1, 2}, {2, 4}}));
  EXPECT_EQ(p.rank, 1);
  EXPECT_EQ(p.reduced.dense(), (DenseMat{{Rational(1), Rational(2)}}));
}

TEST(Echelon, MatchesTextbookAndIsIdempotent) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 60; ++k) {
    int r = 1 + static_cast<int>(rng() % 9), c = 1 + static_cast<int>(rng() % 9);
    SparseMat m = random_matrix(rng, r, c, 0.4, 4);
    Echelon e = echelon(m);
    EXPECT_EQ(e.reduced.dense(), textbook_rref(m.dense()));
    EXPECT_EQ(echelon(e.reduced).reduced, e.reduced);
    // row shuffle
    SparseMat s(0, c);
    for (int i = r - 1; i >= 0; --i) s.append_row(m.row(i));
    EXPECT_EQ(echelon(s).rank, e.rank);
    EXPECT_EQ(echelon(s).reduced, e.reduced);
  }
}

TEST(Kernel, Examples) {
  EXPECT_EQ(kernel(SparseMat::identity(4)).dim(), 0);
  EXPECT_EQ(kernel(SparseMat(2, 3)).dim(), 3);
  Subspace k = kernel(dense({{1, 1}}));
  ASSERT_EQ(k.dim(), 1);
  EXPECT_EQ(k.basis()[0], SparseVec({{0, Rational(1)}, {1, Rational(-1)}}));
}

TEST(Kernel, RankNullity) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 60; ++k) {
    int r = 1 + static_cast<int>(rng() % 10), c = 1 + static_cast<int>(rng() % 10);
    SparseMat m = random_matrix(rng, r, c, 0.3, 3);
    Subspace ker = kernel(m);
    EXPECT_EQ(ker.dim() + echelon(m).rank, c);
    for (const auto& v : ker.basis()) EXPECT_TRUE(m.apply(v).empty());
  }
}

TEST(Subspace, CoordinatesAndIntersection) {
  Subspace a = Subspace::span(3, {SparseVec({{0, 1}, {1, 1}}), SparseVec({{2, 1}})});
  Subspace b = Subspace::span(3, {SparseVec({{0, 1}}), SparseVec({{1, 1}, {2, -1}})});
  Subspace c = intersect(a, b);
  ASSERT_EQ(c.dim(), 1);
  EXPECT_TRUE(a.contains(c.basis()[0]));
  EXPECT_TRUE(b.contains(c.basis()[0]));
  SparseVec v({{0, 2}, {1, 2}, {2, 5}});
  auto co = a.coordinates(v);
  EXPECT_EQ(a.combine(co), v);
  EXPECT_THROW(a.coordinates(SparseVec({{0, 1}})), std::domain_error);
}

TEST(Charpoly, SmallCases) {
  // x^2 - x - 1 from its companion matrix
  RatPoly p = charpoly(dense({{0, 1}, {1, 1}}).dense());
  EXPECT_EQ(p, (RatPoly{Rational(-1), Rational(-1), Rational(1)}));
  RatPoly q = charpoly(dense({{2, 0, 0}, {0, 2, 0}, {0, 0, 5}}).dense());
  EXPECT_EQ(q, (RatPoly{Rational(-20), Rational(24), Rational(-9), Rational(1)}));
}

TEST(Charpoly, CayleyHamiltonAndTrace) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 30; ++k) {
    int n = 1 + static_cast<int>(rng() % 7);
    DenseMat a = random_matrix(rng, n, n, 0.6, 5).dense();
    RatPoly p = charpoly(a);
    ASSERT_EQ(p.size(), static_cast<std::size_t>(n + 1));
    Rational tr = 0;
    for (int i = 0; i < n; ++i) tr += a[i][i];
    EXPECT_EQ(p[n - 1], -tr);
    DenseMat z = poly_of_matrix(p, a);
    for (auto& row : z)
      for (auto& x : row) EXPECT_EQ(sgn(x), 0);
  }
}

TEST(RationalEigensystem, Examples) {
  SparseMat diag = dense({{2, 0, 0}, {0, 2, 0}, {0, 0, 5}});
  auto e = rational_eigensystem(diag, Subspace::full(3));
  ASSERT_EQ(e.eigen.size(), 2u);
  EXPECT_EQ(e.eigen[0].value, 2);
  EXPECT_EQ(e.eigen[0].space.dim(), 2);
  EXPECT_EQ(e.eigen[1].value, 5);
  EXPECT_EQ(e.eigen[1].space.dim(), 1);
  EXPECT_EQ(e.residual, (RatPoly{Rational(1)}));

  auto rot = rational_eigensystem(dense({{0, -1}, {1, 0}}), Subspace::full(2));
  EXPECT_TRUE(rot.eigen.empty());
  EXPECT_EQ(rot.residual, (RatPoly{Rational(1), Rational(0), Rational(1)}));
  EXPECT_EQ(rot.residual_space.dim(), 2);

  auto fib = rational_eigensystem(dense({{0, 1}, {1, 1}}), Subspace::full(2));
  EXPECT_TRUE(fib.eigen.empty());
  EXPECT_EQ(fib.residual, (RatPoly{Rational(-1), Rational(-1), Rational(1)}));
}

TEST(RationalEigensystem, RestrictionAndInvarianceCheck) {
  SparseMat m = dense({{1, 1, 0}, {0, 1, 0}, {0, 0, 3}});
  Subspace v = Subspace::span(3, {SparseVec({{0, 1}}), SparseVec({{2, 1}})});
  auto e = rational_eigensystem(m, v);
  ASSERT_EQ(e.eigen.size(), 2u);
  for (const auto& piece : e.eigen)
    for (const auto& b : piece.space.basis()) {
      SparseVec mv = m.apply(b), lv = b;
      lv.scale(piece.value);
      EXPECT_EQ(mv, lv);
    }
  Subspace bad = Subspace::span(3, {SparseVec({{1, 1}})});
  EXPECT_THROW(rational_eigensystem(m, bad), std::domain_error);
  EXPECT_THROW(rational_eigensystem(dense({{1, 2, 3}}), Subspace::full(3)), std::invalid_argument);
}

TEST(RationalEigensystem, RandomConjugatedDiagonal) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 10; ++k) {
    int n = 6;
    DenseMat d(n, std::vector<Rational>(n, Rational(0)));
    std::vector<long> vals{3, -2, 3, 7, 0, -2};
    for (int i = 0; i < n; ++i) d[i][i] = vals[i];
    // unipotent conjugation keeps entries integral
    DenseMat u = identity_dense(n), ui = identity_dense(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) u[i][j] = static_cast<long>(rng() % 5) - 2;
    // invert the upper unitriangular u by back substitution
    for (int j = 0; j < n; ++j)
      for (int i = j - 1; i >= 0; --i) {
        Rational s = 0;
        for (int l = i + 1; l <= j; ++l) s += u[i][l] * ui[l][j];
        ui[i][j] = -s;
      }
    SparseMat a = SparseMat::from_dense(multiply(multiply(u, d), ui));
    auto e = rational_eigensystem(a, Subspace::full(n));
    ASSERT_EQ(e.eigen.size(), 4u);
    EXPECT_EQ(e.eigen[0].value, -2);
    EXPECT_EQ(e.eigen[0].space.dim(), 2);
    EXPECT_EQ(e.eigen[3].value, 7);
  }
}
