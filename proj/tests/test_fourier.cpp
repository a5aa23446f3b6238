#include <gtest/gtest.h>

#include <cmath>

#include "bianchi/fourier.hpp"

using namespace bianchi;

namespace {

QuadInt Q(int d, long a, long b = 0) { return QuadInt(FieldId(d), a, b); }

std::vector<QuadInt> coprime_etas(const SymbolSpace& s, long hi) {
  std::vector<QuadInt> out;
  for (long m = 2; m <= hi; ++m)
    for (const QuadInt& e : elements_of_norm(s.field(), m))
      if (canonical_associate(e).rep == e && coprime_to_level(s, e)) out.push_back(e);
  return out;
}

// The weight-2 level sqrt(-11) in Q(sqrt(-11)), whose cuspidal space is the
// base change of 11a.
struct Level11 {
  SymbolSpace space{Level(Q(11, 1, -2)), 2};
  EigenTable table = eigensystems(space, coprime_etas(space, 30));
  DualFunctional phi = eigen_functional(space, table.systems.at(0));
  SeedElement seed = find_seed(phi);
};

const Level11& level11() {
  static const Level11 l;
  return l;
}

const FourierTable& direct200() {
  static const FourierTable t = fourier_coefficients(level11().phi, level11().seed, 200);
  return t;
}

Mat22 generic_gamma() {
  const QuadInt n = Q(11, 1, -2), w = Q(11, 0, 1), one = Q(11, 1);
  return Mat22{one + w * n, w, n, one};
}

}  // namespace

TEST(Bessel, OracleValues) {
  struct Row {
    double t, k0, k1;
  };
  // independent high-precision values
  const Row rows[] = {{0.5, 0.92441907122766586, 1.6564411200033009},
                      {1.0, 0.42102443824070833, 0.60190723019723457},
                      {2.0, 0.11389387274953344, 0.13986588181652243},
                      {5.0, 0.0036910983340425943, 0.0040446134454521642},
                      {10.0, 1.7780062316167652e-5, 1.8648773453825585e-5},
                      {30.0, 2.1324774964630564e-14, 2.1677320018915494e-14}};
  for (const Row& r : rows) {
    EXPECT_NEAR(bessel_K(0, r.t) / r.k0, 1.0, 1e-12) << r.t;
    EXPECT_NEAR(bessel_K(1, r.t) / r.k1, 1.0, 1e-12) << r.t;
  }
  EXPECT_NEAR(bessel_K(0, 1.0), 0.421024438241, 1e-10);
  EXPECT_NEAR(bessel_K(1, 1.0), 0.601907230197, 1e-10);
}

TEST(Bessel, DerivativeOfK0IsMinusK1) {
  const double h = 1e-5;
  for (double t : {0.5, 1.0, 2.0}) {
    double fd = (bessel_K(0, t + h) - bessel_K(0, t - h)) / (2 * h);
    EXPECT_LT(std::abs(fd + bessel_K(1, t)), 1e-6) << t;
  }
}

TEST(Bessel, RejectsNonPositive) {
  EXPECT_THROW(bessel_K(0, 0.0), std::domain_error);
  EXPECT_THROW(bessel_K(1, -1.0), std::domain_error);
  EXPECT_THROW(bessel_K(2, 1.0), std::invalid_argument);
}

TEST(Bessel, DecayInNorm) {
  for (int d : {1, 2, 3, 7, 11})
    for (double t : {0.5, 1.0, 2.0}) {
      const double dk = -FieldId(d).disc();
      double prev0 = INFINITY, prev1 = INFINITY;
      for (long n = 1; n <= 300; ++n) {
        double s = 4 * std::numbers::pi * std::sqrt(n / dk) * t;
        double v0 = t * t * bessel_K(0, s), v1 = t * t * bessel_K(1, s);
        EXPECT_LT(v0, prev0);
        EXPECT_LT(v1, prev1);
        prev0 = v0;
        prev1 = v1;
      }
    }
}

TEST(Functional, SlashTrivialCases) {
  const Level11& l = level11();
  const FieldId f = l.space.field();
  EXPECT_EQ(functional_slash(l.phi, Mat22::identity(f), l.seed), l.phi(l.seed.image()));
  SeedElement zero(l.space, SparseVec());
  EXPECT_EQ(functional_slash(l.phi, Mat22{Q(11, 2), Q(11, 1), Q(11, 0), Q(11, 1, 1)}, zero), 0);
}

TEST(Functional, SeedNeedsBoundaryZero) {
  const Level11& l = level11();
  bool rejected = false;
  for (int col = 0; col < l.space.num_columns() && !rejected; ++col) {
    try {
      SeedElement x(l.space, SparseVec::unit(col));
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
  }
  EXPECT_TRUE(rejected);
}

TEST(Functional, EigenvectorOfFullSpace) {
  const Level11& l = level11();
  for (const auto& [eta, lambda] : l.table.systems[0].eigenvalues) {
    SparseMat t = hecke_on_manin(l.space, eta).matrix;
    for (int j = 0; j < l.space.dim(); ++j) {
      SparseVec col = t.apply(SparseVec::unit(j));
      EXPECT_EQ(l.phi(col), lambda * l.phi.coefficients[j]);
    }
  }
}

TEST(Fourier, CoefficientsMatchHeckeMatrices) {
  const Level11& l = level11();
  const SparseVec mx = l.seed.image();
  for (long m = 1; m <= 30; ++m)
    for (const QuadInt& eta : elements_of_norm(l.space.field(), m)) {
      if (canonical_associate(eta).rep != eta) continue;
      HeilbronnFamily fam = generate(eta);
      Rational lhs = 0;
      for (const auto& h : fam.matrices) lhs += h.multiplicity * functional_slash(l.phi, h.m, l.seed);
      EXPECT_EQ(lhs, l.phi(hecke_matrix_from_family(l.space, fam).apply(mx))) << format(eta);
    }
}

TEST(Fourier, EigenMultiplicativity) {
  const Level11& l = level11();
  const FourierTable& t = direct200();
  ASSERT_NE(t.a1, 0);
  EXPECT_EQ(t.at(Q(11, 1)), t.a1);
  for (const auto& [eta, lambda] : l.table.systems[0].eigenvalues) {
    EXPECT_EQ(t.at(eta), lambda * t.a1) << format(eta);
    EXPECT_EQ(t.at(-eta), lambda * t.a1) << format(eta);
  }
}

TEST(Fourier, MultiplicativeTableAgreesWithDirect) {
  const Level11& l = level11();
  FourierTable m = multiplicative_coefficients(l.phi, l.seed, 200);
  const FourierTable& d = direct200();
  ASSERT_EQ(m.entries.size(), d.entries.size());
  for (std::size_t i = 0; i < d.entries.size(); ++i) {
    EXPECT_EQ(m.entries[i].alpha, d.entries[i].alpha);
    EXPECT_EQ(m.entries[i].value, d.entries[i].value) << format(d.entries[i].alpha);
  }
}

TEST(Fourier, Linearity) {
  const Level11& l = level11();
  SparseVec twice;
  twice.axpy(2, l.seed.columns());
  FourierTable a = fourier_coefficients(l.phi, l.seed, 20);
  FourierTable b = fourier_coefficients(l.phi, SeedElement(l.space, twice), 20);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(b.entries[i].value, 2 * a.entries[i].value);
}

TEST(Fourier, WeightTwoOnly) {
  SymbolSpace s(Level(Q(1, 2, 1)), 4);
  DualFunctional phi{&s, std::vector<Rational>(s.dim())};
  EXPECT_THROW(fourier_coefficients(phi, SeedElement(s, SparseVec()), 5), std::invalid_argument);
}

TEST(Fourier, JsonRoundTrip) {
  FourierTable t = fourier_coefficients(level11().phi, level11().seed, 15);
  FourierTable u = fourier_table_from_json(to_json(t));
  EXPECT_EQ(u.level, t.level);
  EXPECT_EQ(u.a1, t.a1);
  ASSERT_EQ(u.entries.size(), t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    EXPECT_EQ(u.entries[i].alpha, t.entries[i].alpha);
    EXPECT_EQ(u.entries[i].value, t.entries[i].value);
  }
}

TEST(Series, ZeroTable) {
  FourierTable t;
  t.field = FieldId(11);
  t.level = Q(11, 1, -2);
  t.norm_bound = 10;
  SeriesValue v = eval_series(t, {Complex(0.1, 0.2), 1.0});
  for (const Complex& c : v.value) EXPECT_EQ(c, Complex(0));
  EXPECT_EQ(v.tail, 0);
}

TEST(Series, SingleTermComponents) {
  for (int d : {1, 2, 3, 7, 11}) {
    FourierTable t;
    t.field = FieldId(d);
    t.level = Q(d, 1);
    t.norm_bound = 0;
    QuadInt alpha = Q(d, 2, 1);
    t.entries.push_back({alpha, Rational(3)});
    SeriesValue v = eval_series(t, {Complex(0.1, 0.2), 0.7});
    Complex u = to_complex(alpha) / sqrt_disc(t.field);
    u /= std::abs(u);
    EXPECT_NEAR(std::abs(v.value[0]), std::abs(v.value[2]), 1e-15);
    EXPECT_LT(std::abs(v.value[2] + std::conj(u) / u * v.value[0]), 1e-15);
  }
}

TEST(Series, PsiPeriodicity) {
  const FourierTable& t = direct200();
  const H3Point w{Complex(0.1, 0.2), 1.0};
  SeriesValue base = eval_series(t, w);
  for (const QuadInt& mu : {Q(11, 1), Q(11, 0, 1), Q(11, -3, 2)}) {
    SeriesValue moved = eval_series(t, {w.z + to_complex(mu), w.t});
    C3 diff;
    for (int i = 0; i < 3; ++i) diff[i] = moved.value[i] - base.value[i];
    EXPECT_LT(norm3(diff), 1e-12 * norm3(base.value)) << format(mu);
  }
}

TEST(Series, TailBoundCoversTruncation) {
  const Level11& l = level11();
  FourierTable small = fourier_coefficients(l.phi, l.seed, 40);
  const H3Point w{Complex(0.1, 0.2), 1.0};
  SeriesValue a = eval_series(small, w), b = eval_series(direct200(), w);
  C3 diff;
  for (int i = 0; i < 3; ++i) diff[i] = a.value[i] - b.value[i];
  EXPECT_GT(norm3(diff), 0);
  EXPECT_LT(norm3(diff), a.tail);
}

TEST(Automorphy, IdentityIsExact) {
  const FieldId f(11);
  AutomorphyCheck c = automorphy_residual(direct200(), Mat22::identity(f), {Complex(0.05, 0.1), 1.2});
  EXPECT_EQ(c.residual, 0);
}

TEST(Automorphy, Translations) {
  const QuadInt n = Q(11, 1, -2), one = Q(11, 1), zero = Q(11, 0);
  for (const QuadInt& b : {n, Q(11, 1), Q(11, 0, 1), n * Q(11, 2, 1)}) {
    AutomorphyCheck c = automorphy_residual(direct200(), Mat22{one, b, zero, one}, {Complex(0.05, 0.1), 1.2});
    EXPECT_LT(c.residual, 1e-6) << format(b);
  }
}

TEST(Automorphy, GenericGammaWithinBudget) {
  const Mat22 g = generic_gamma();
  for (double t : {0.8, 1.0, 1.5}) {
    AutomorphyCheck c = automorphy_residual(direct200(), g, {Complex(0.05, 0.1), t});
    EXPECT_LE(c.residual, c.budget) << t;
  }
}

TEST(Automorphy, GenericGammaNearIsometricSphere) {
  // both w and gamma w sit at height about 1/sqrt(11), where the table converges fast
  const Level11& l = level11();
  FourierTable t = multiplicative_coefficients(l.phi, l.seed, 400);
  const Mat22 g = generic_gamma();
  const Complex c = to_complex(g.c), d = to_complex(g.d);
  for (Complex dz : {Complex(0.05, 0), Complex(0, -0.04), Complex(0.02, 0.03)}) {
    AutomorphyCheck r = automorphy_residual(t, g, {-d / c + dz, 0.28});
    EXPECT_GT(r.image.t, 0.2);
    EXPECT_LT(r.residual, 1e-6);
    EXPECT_LE(r.residual, r.budget);
  }
}

TEST(Automorphy, RejectsOutsideGamma1) {
  const QuadInt one = Q(11, 1), zero = Q(11, 0);
  EXPECT_THROW(automorphy_residual(direct200(), Mat22{one, zero, one, one}, {Complex(0), 1.0}),
               std::invalid_argument);
  EXPECT_THROW(automorphy_residual(direct200(), Mat22{zero, -one, one, zero}, {Complex(0), 1.0}),
               std::invalid_argument);
}
