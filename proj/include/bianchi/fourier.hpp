#pragma once

// Fourier-Bessel expansion of a weight-2 cusp form attached to a Hecke
// eigenfunctional phi and a seed x with b(x) = 0:
//
//   F(z, t) = sum_alpha a_alpha t^2 K_alpha(4 pi |alpha'| t) psi(alpha' z),
//   a_alpha = sum_{M in X_alpha} phi|_M(x),  alpha' = alpha / sqrt(d_K),
//
// with psi(z) = exp(2 pi i (z + conj z)) and
// K_alpha(s) = (-(i/2) u K_1(s), K_0(s), (i/2) conj(u) K_1(s)), u = alpha'/|alpha'|.
// The automorphy check uses sigma^2 of j(gamma, w) scaled to determinant 1,
// acting on the basis X^2, -XY, Y^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "bianchi/hecke.hpp"

namespace bianchi {

using Complex = std::complex<double>;
using C3 = std::array<Complex, 3>;

/// K_0 or K_1 at t > 0.
inline double bessel_K(int j, double t) {
  if (j != 0 && j != 1) throw std::invalid_argument("bessel_K: order must be 0 or 1");
  if (!(t > 0)) throw std::domain_error("bessel_K needs t > 0");
  return std::cyl_bessel_k(static_cast<double>(j), t);
}

struct H3Point {
  Complex z;
  double t = 1;
};

inline H3Point make_point(Complex z, double t) {
  if (!(t > 0)) throw std::domain_error("points of H3 need t > 0");
  return {z, t};
}

inline Complex to_complex(const QuadInt& x) {
  const FieldId f = x.field();
  const double r = std::sqrt(static_cast<double>(f.d()));
  Complex w = f.half_integral() ? Complex(0.5, r / 2) : Complex(0, r);
  return x.a().get_d() + x.b().get_d() * w;
}

/// sqrt(d_K) on the positive imaginary axis.
inline Complex sqrt_disc(FieldId f) { return {0, std::sqrt(static_cast<double>(-f.disc()))}; }

// ------------------------------------------------------------ functionals

/// A linear functional on M_k, stored on the quotient basis.
struct DualFunctional {
  const SymbolSpace* space = nullptr;
  std::vector<Rational> coefficients;

  Rational operator()(const SparseVec& quotient) const { return quotient.dot(coefficients); }
  Rational on_columns(const SparseVec& columns) const { return (*this)(space->project(columns)); }
};

/// A joint left eigenvector of the full Hecke matrices with the eigenvalues
/// of `sys`. It kills every other generalized eigenspace, in particular the
/// Eisenstein part.
inline DualFunctional eigen_functional(const SymbolSpace& s, const EigenSystem& sys) {
  const int n = s.dim();
  SparseMat stacked(0, n);
  for (const auto& [eta, lambda] : sys.eigenvalues) {
    std::vector<std::tuple<int, int, Rational>> diag;
    for (int i = 0; i < n; ++i) diag.emplace_back(i, i, lambda);
    SparseMat m = hecke_on_manin(s, eta).matrix.transpose() - SparseMat::from_triples(n, n, diag);
    for (int i = 0; i < m.rows(); ++i) stacked.append_row(m.row(i));
  }
  Subspace k = kernel(stacked);
  if (k.dim() == 0) throw std::logic_error("no left eigenvector for system " + sys.label);
  DualFunctional phi{&s, std::vector<Rational>(n)};
  for (const auto& [i, x] : k.basis().front().entries()) phi.coefficients[i] = x;
  return phi;
}

/// x in the free module on E_n with b(x) = 0.
class SeedElement {
 public:
  SeedElement(const SymbolSpace& s, SparseVec columns) : space_(&s), columns_(std::move(columns)) {
    BoundaryTarget t(s.level(), s.weight());
    if (!boundary_b_matrix(s, t).apply(columns_).empty())
      throw std::invalid_argument("seed element has b(x) != 0");
  }

  const SymbolSpace& space() const { return *space_; }
  const SparseVec& columns() const { return columns_; }
  /// m(x), the image in M_k.
  SparseVec image() const { return space_->project(columns_); }

 private:
  const SymbolSpace* space_;
  SparseVec columns_;
};

/// The first basis vector of ker b with phi(m(x)) != 0.
inline SeedElement find_seed(const DualFunctional& phi) {
  const SymbolSpace& s = *phi.space;
  Subspace kb = kernel(boundary_b_matrix(s, BoundaryTarget(s.level(), s.weight())));
  for (const SparseVec& x : kb.basis())
    if (sgn(phi.on_columns(x)) != 0) return SeedElement(s, x);
  throw std::runtime_error("phi vanishes on m(ker b)");
}

/// sum_{M in fam} phi|_M(x).
inline Rational slash_sum(const DualFunctional& phi, const HeilbronnFamily& fam, const SeedElement& x) {
  return phi.on_columns(hecke_free_apply(x.space(), fam, x.columns()));
}

/// phi|_M(x): substitute P(aX+bY, cX+dY)[(u,v)M] termwise, drop pairs
/// outside E_n, evaluate phi.
inline Rational functional_slash(const DualFunctional& phi, const Mat22& m, const SeedElement& x) {
  HeilbronnFamily fam;
  fam.eta = m.det();
  fam.matrices.push_back({m, QuadInt(m.field(), 1), QuadInt(m.field(), 0), 1, 1});
  return slash_sum(phi, fam, x);
}

// ------------------------------------------------------------ coefficients

struct FourierEntry {
  QuadInt alpha;
  Rational value;
};

struct FourierTable {
  FieldId field;
  QuadInt level;
  long norm_bound = 0;
  Rational a1;
  std::string method = "direct";  ///< "direct" or "multiplicative"
  std::vector<FourierEntry> entries;

  /// a_alpha, or 0 when alpha is not in the table.
  Rational at(const QuadInt& alpha) const {
    for (const auto& e : entries)
      if (e.alpha == alpha) return e.value;
    return 0;
  }
};

namespace detail {
inline void check_weight_two(const DualFunctional& phi, const SeedElement& x) {
  if (phi.space != &x.space()) throw std::invalid_argument("phi and x live on different spaces");
  if (x.space().weight() != 2) throw std::invalid_argument("Fourier expansions are implemented for weight 2 only");
}

inline FourierTable empty_table(const SeedElement& x, long bound, const Rational& a1) {
  FourierTable t;
  t.field = x.space().field();
  t.level = x.space().level().generator();
  t.norm_bound = bound;
  t.a1 = a1;
  return t;
}
}  // namespace detail

/// a_alpha for every nonzero alpha with N(alpha) <= bound, each from its own
/// Heilbronn-Merel family.
inline FourierTable fourier_coefficients(const DualFunctional& phi, const SeedElement& x, long bound) {
  detail::check_weight_two(phi, x);
  const FieldId f = x.space().field();
  FourierTable t = detail::empty_table(x, bound, phi(x.image()));
  for (long m = 1; m <= bound; ++m)
    for (const QuadInt& alpha : elements_of_norm(f, m))
      t.entries.push_back({alpha, slash_sum(phi, cached_family(alpha), x)});
  return t;
}

/// The same table for an eigenfunctional from a_{alpha beta} a_1 = a_alpha a_beta
/// (alpha, beta coprime) and a_{u alpha} = a_alpha: only prime powers are
/// computed from their families.
inline FourierTable multiplicative_coefficients(const DualFunctional& phi, const SeedElement& x, long bound) {
  detail::check_weight_two(phi, x);
  const FieldId f = x.space().field();
  const Rational a1 = phi(x.image());
  if (sgn(a1) == 0) throw std::invalid_argument("a_1 = 0; the multiplicative table needs a_1 != 0");
  FourierTable t = detail::empty_table(x, bound, a1);
  t.method = "multiplicative";
  std::map<QuadInt, Rational> ratio;  // canonical alpha -> a_alpha / a_1
  ratio[QuadInt(f, 1)] = 1;
  for (long m = 2; m <= bound; ++m) {
    long p = 2;
    while (m % p != 0) ++p;
    std::vector<QuadInt> primes = elements_of_norm(f, p);
    if (primes.empty()) primes.push_back(QuadInt(f, p));
    for (const QuadInt& alpha : elements_of_norm(f, m)) {
      const QuadInt rep = canonical_associate(alpha).rep;
      if (ratio.count(rep)) continue;
      QuadInt power(f, 1), rest = rep;
      for (const QuadInt& pi : primes) {
        if (!divides(pi, rest)) continue;
        while (divides(pi, rest)) {
          rest = exact_div(rest, pi);
          power = power * pi;
        }
        break;
      }
      if (is_unit(rest))
        ratio[rep] = slash_sum(phi, cached_family(rep), x) / a1;
      else
        ratio[rep] = ratio.at(canonical_associate(power).rep) * ratio.at(canonical_associate(rest).rep);
    }
  }
  for (long m = 1; m <= bound; ++m)
    for (const QuadInt& alpha : elements_of_norm(f, m))
      t.entries.push_back({alpha, a1 * ratio.at(canonical_associate(alpha).rep)});
  return t;
}

// ------------------------------------------------------------ evaluation

struct SeriesValue {
  C3 value{};
  double tail = 0;      ///< estimate of the omitted terms N(alpha) > bound
  double roundoff = 0;
};

inline double norm3(const C3& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

/// Tail estimate from Ramanujan-type growth |a_alpha| <= A N^(1/2) (1 + log N),
/// A fitted on the table, and 2 pi / sqrt|d_K| elements per unit of norm.
inline double tail_estimate(const FourierTable& table, double t) {
  double amax = 0;
  for (const auto& e : table.entries) {
    double n = norm(e.alpha).get_d();
    amax = std::max(amax, std::abs(e.value.get_d()) / std::sqrt(n));
  }
  if (amax == 0) return 0;
  const double dk = -table.field.disc();
  const double density = 2 * std::numbers::pi / std::sqrt(dk);
  double sum = 0;
  for (long n = table.norm_bound + 1;; ++n) {
    double s = 4 * std::numbers::pi * t * std::sqrt(n / dk);
    double term = density * amax * std::sqrt(double(n)) * (1 + std::log(double(n))) * t * t *
                  (bessel_K(0, s) + bessel_K(1, s));
    sum += term;
    if (term <= 1e-20 * sum || term == 0) break;
  }
  return sum;
}

inline SeriesValue eval_series(const FourierTable& table, const H3Point& w) {
  if (!(w.t > 0)) throw std::domain_error("eval_series needs t > 0");
  SeriesValue out;
  const Complex root = sqrt_disc(table.field);
  const Complex i(0, 1);
  const double two_pi = 2 * std::numbers::pi;
  double magnitude = 0;
  for (const auto& e : table.entries) {
    const double a = e.value.get_d();
    if (a == 0) continue;
    const Complex ap = to_complex(e.alpha) / root;
    const double r = std::abs(ap);
    const double s = 2 * two_pi * r * w.t;
    const double k0 = bessel_K(0, s), k1 = bessel_K(1, s);
    const Complex u = ap / r;
    const Complex c = a * w.t * w.t * std::exp(i * (two_pi * 2 * (ap * w.z).real()));
    out.value[0] += c * (-0.5 * i) * u * k1;
    out.value[1] += c * k0;
    out.value[2] += c * (0.5 * i) * std::conj(u) * k1;
    magnitude += std::abs(a) * w.t * w.t * (k0 + k1);
  }
  out.tail = tail_estimate(table, w.t);
  out.roundoff = 16 * std::numeric_limits<double>::epsilon() * magnitude;
  return out;
}

// ------------------------------------------------------------ automorphy

inline bool in_gamma1(const Mat22& g, const QuadInt& n) {
  const QuadInt one(g.field(), 1);
  return g.det() == one && divides(n, g.c) && divides(n, g.d - one);
}

inline H3Point act(const Mat22& g, const H3Point& w) {
  const Complex a = to_complex(g.a), b = to_complex(g.b), c = to_complex(g.c), d = to_complex(g.d);
  const Complex cz = c * w.z + d;
  const double den = std::norm(cz) + std::norm(c) * w.t * w.t;
  return {((a * w.z + b) * std::conj(cz) + a * std::conj(c) * w.t * w.t) / den, w.t / den};
}

using C3x3 = std::array<std::array<Complex, 3>, 3>;

/// Symmetric square on the coefficient vectors in the basis X^2, -XY, Y^2.
inline C3x3 sym2(Complex p, Complex q, Complex r, Complex s) {
  return {{{p * p, -p * q, q * q}, {-2. * p * r, p * s + q * r, -2. * q * s}, {r * r, -r * s, s * s}}};
}

/// sigma^2(j(gamma, w)^-1) with j scaled to determinant 1.
inline C3x3 automorphy_factor(const Mat22& g, const H3Point& w) {
  const Complex c = to_complex(g.c), d = to_complex(g.d);
  const Complex cz = c * w.z + d;
  const double scale = std::sqrt(std::norm(cz) + std::norm(c) * w.t * w.t);
  // j = [[cz+d, -ct], [conj(c) t, conj(cz+d)]] / scale; inverse of a det-1 matrix
  const Complex p = std::conj(cz) / scale, q = c * w.t / scale, r = -std::conj(c) * w.t / scale,
                s = cz / scale;
  return sym2(p, q, r, s);
}

struct AutomorphyCheck {
  double residual = 0;  ///< |sigma^2(j^-1) F(gamma w) - F(w)| / |F(w)|
  double budget = 0;    ///< tail plus roundoff of both evaluations, relative
  double factor_norm = 0;  ///< Frobenius norm of sigma^2(j^-1)
  H3Point image;
  bool ok() const { return residual <= budget; }
};

inline AutomorphyCheck automorphy_residual(const FourierTable& table, const Mat22& gamma, const H3Point& w) {
  if (!in_gamma1(gamma, table.level))
    throw std::invalid_argument(format(gamma) + " is not in Gamma_1(" + format(table.level) + ")");
  AutomorphyCheck out;
  out.image = act(gamma, w);
  SeriesValue here = eval_series(table, w), there = eval_series(table, out.image);
  C3x3 s = automorphy_factor(gamma, w);
  C3 diff{};
  double fro = 0;
  for (int i = 0; i < 3; ++i) {
    diff[i] = -here.value[i];
    for (int j = 0; j < 3; ++j) {
      diff[i] += s[i][j] * there.value[j];
      fro += std::norm(s[i][j]);
    }
  }
  fro = std::sqrt(fro);
  out.factor_norm = fro;
  double scale = norm3(here.value);
  if (scale == 0) scale = 1;
  out.residual = norm3(diff) / scale;
  out.budget = (fro * (there.tail + there.roundoff) + here.tail + here.roundoff) / scale;
  return out;
}

// ------------------------------------------------------------ json

inline json to_json(const FourierTable& t) {
  json a = json::array();
  for (const auto& e : t.entries)
    a.push_back({{"alpha", format(e.alpha)}, {"exact", e.value.get_str()}, {"re", e.value.get_d()}, {"im", 0.0}});
  return {{"d", t.field.d()},          {"level", format(t.level)}, {"norm_bound", t.norm_bound},
          {"a1", t.a1.get_str()},      {"method", t.method},       {"a", a}};
}

inline FourierTable fourier_table_from_json(const json& j) {
  FourierTable t;
  t.field = FieldId(j.at("d").get<int>());
  t.level = parse_quadint(t.field, j.at("level").get<std::string>());
  t.norm_bound = j.at("norm_bound").get<long>();
  t.a1 = Rational(j.at("a1").get<std::string>());
  t.method = j.value("method", "direct");
  for (const auto& e : j.at("a"))
    t.entries.push_back({parse_quadint(t.field, e.at("alpha").get<std::string>()),
                         Rational(e.at("exact").get<std::string>())});
  return t;
}

}  // namespace bianchi
