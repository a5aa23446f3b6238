#pragma once

// The residue ring O/n, the level data, and the set E_n of unimodular pairs.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bianchi/matrix.hpp"

namespace bianchi {

class Level {
 public:
  Level() = default;
  explicit Level(const QuadInt& generator)
      : gen_(canonical_associate(generator).rep), norm_(gen_.norm()) {
    if (generator.is_zero()) throw std::invalid_argument("level generator must be nonzero");
  }

  FieldId field() const { return gen_.field(); }
  const QuadInt& generator() const { return gen_; }
  const mpz_class& norm() const { return norm_; }

  friend bool operator==(const Level& x, const Level& y) { return x.gen_ == y.gen_; }

 private:
  QuadInt gen_;
  mpz_class norm_;
};

/// O/mO with elements indexed 0..N(m)-1 through the Hermite form of mO:
/// index y*g + x stands for x + y*w with 0 <= x < g, 0 <= y < h.
class ResidueRing {
 public:
  ResidueRing() = default;
  explicit ResidueRing(const QuadInt& modulus) : mod_(modulus) {
    if (modulus.is_zero()) throw std::invalid_argument("zero modulus");
    if (modulus.norm() > mpz_class(1L << 24))
      throw std::domain_error("modulus too large for a residue table");
    IdealLattice L = ideal_lattice(modulus);
    g_ = L.g.get_si();
    s_ = L.s.get_si();
    h_ = L.h.get_si();
    t_ = modulus.field().omega_trace();
    n_ = modulus.field().omega_norm();
  }

  FieldId field() const { return mod_.field(); }
  const QuadInt& modulus() const { return mod_; }
  int size() const { return static_cast<int>(g_ * h_); }

  int index(const QuadInt& x) const {
    mpz_class y, k, a;
    mpz_fdiv_qr_ui(k.get_mpz_t(), y.get_mpz_t(), x.b().get_mpz_t(), static_cast<unsigned long>(h_));
    a = x.a() - k * s_;
    mpz_class xr;
    mpz_fdiv_r_ui(xr.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(g_));
    return static_cast<int>(y.get_si() * g_ + xr.get_si());
  }

  QuadInt element(int i) const { return QuadInt(field(), i % g_, i / g_); }

  int zero() const { return 0; }
  int one() const { return reduce(1, 0); }

  int add(int i, int j) const { return reduce(i % g_ + j % g_, i / g_ + j / g_); }
  int neg(int i) const { return reduce(-(i % g_), -(i / g_)); }
  int sub(int i, int j) const { return add(i, neg(j)); }
  int mul(int i, int j) const {
    int64_t x1 = i % g_, y1 = i / g_, x2 = j % g_, y2 = j / g_;
    int64_t yy = y1 * y2;
    return reduce(x1 * x2 - n_ * yy, x1 * y2 + x2 * y1 + t_ * yy);
  }

  bool is_unit(int i) const { return inverse_or_minus1(i) >= 0; }

  int inverse(int i) const {
    int r = inverse_or_minus1(i);
    if (r < 0) throw std::domain_error("not invertible modulo " + format(mod_));
    return r;
  }

 private:
  int reduce(int64_t x, int64_t y) const {
    int64_t k = y >= 0 ? y / h_ : -((-y + h_ - 1) / h_);
    y -= k * h_;
    x -= k * s_;
    x %= g_;
    if (x < 0) x += g_;
    return static_cast<int>(y * g_ + x);
  }

  int inverse_or_minus1(int i) const {
    Bezout e = xgcd(element(i), mod_);
    if (!bianchi::is_unit(e.g)) return -1;
    return index(e.s * unit_inverse(e.g));
  }

  QuadInt mod_;
  int64_t g_ = 1, s_ = 0, h_ = 1, t_ = 0, n_ = 1;
};

struct EnPoint {
  int u = 0;
  int v = 0;
  friend bool operator==(const EnPoint& x, const EnPoint& y) { return x.u == y.u && x.v == y.v; }
  friend bool operator<(const EnPoint& x, const EnPoint& y) {
    return x.u != y.u ? x.u < y.u : x.v < y.v;
  }
};

/// E_n with fast lookup: the unimodular pairs of (O/n)^2 in lexicographic
/// order of residue indices.
class EnSet {
 public:
  EnSet() = default;
  explicit EnSet(const Level& level) : level_(level), ring_(level.generator()) {
    const int N = ring_.size();
    // gcd(u, n) class of every residue, then unimodularity as
    // "v is a unit modulo gcd(u, n)".
    std::vector<QuadInt> divs = divisors_up_to_units(level.generator());
    std::vector<int> class_of(N);
    for (int u = 0; u < N; ++u) {
      QuadInt g = gcd(ring_.element(u), level.generator());
      for (std::size_t k = 0; k < divs.size(); ++k)
        if (divs[k] == g) class_of[u] = static_cast<int>(k);
    }
    std::vector<std::vector<char>> coprime(divs.size(), std::vector<char>(N));
    for (std::size_t k = 0; k < divs.size(); ++k)
      for (int v = 0; v < N; ++v) coprime[k][v] = is_unit(gcd(ring_.element(v), divs[k]));
    index_.assign(static_cast<std::size_t>(N) * N, -1);
    for (int u = 0; u < N; ++u)
      for (int v = 0; v < N; ++v)
        if (coprime[class_of[u]][v]) {
          index_[static_cast<std::size_t>(u) * N + v] = static_cast<int>(points_.size());
          points_.push_back({u, v});
        }
  }

  const Level& level() const { return level_; }
  const ResidueRing& ring() const { return ring_; }
  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<EnPoint>& points() const { return points_; }
  const EnPoint& point(int i) const { return points_[i]; }

  /// Index of (u, v), or -1 when the pair is not unimodular.
  int find(int u, int v) const { return index_[static_cast<std::size_t>(u) * ring_.size() + v]; }

  int index_of(const QuadInt& u, const QuadInt& v) const {
    return find(ring_.index(u), ring_.index(v));
  }

  /// Canonical point for a unimodular pair; throws otherwise.
  EnPoint normalize(const QuadInt& u, const QuadInt& v) const {
    int i = index_of(u, v);
    if (i < 0) throw std::invalid_argument("pair is not unimodular modulo the level");
    return points_[i];
  }

  QuadInt u_of(const EnPoint& p) const { return ring_.element(p.u); }
  QuadInt v_of(const EnPoint& p) const { return ring_.element(p.v); }

  /// (u, v) * M reduced, as residue indices (may be non-unimodular).
  struct Reduced {
    int a, b, c, d;
  };
  Reduced reduce(const Mat22& m) const {
    return {ring_.index(m.a), ring_.index(m.b), ring_.index(m.c), ring_.index(m.d)};
  }
  /// Index of (u, v) * M in E_n, or -1.
  int act(int point_index, const Reduced& m) const {
    const EnPoint& p = points_[point_index];
    int u = ring_.add(ring_.mul(m.a, p.u), ring_.mul(m.c, p.v));
    int v = ring_.add(ring_.mul(m.b, p.u), ring_.mul(m.d, p.v));
    return find(u, v);
  }
  int act(int point_index, const Mat22& m) const { return act(point_index, reduce(m)); }

  /// Some g in SL2(O) whose bottom row reduces to p.
  Mat22 lift_to_sl2(const EnPoint& p) const {
    const FieldId f = level_.field();
    QuadInt u = u_of(p), v = v_of(p);
    const QuadInt& n = level_.generator();
    if (v.is_zero() && !is_unit(u)) v = n;
    if (!is_unit(gcd_or_zero(u, v))) {
      bool done = false;
      for (long m = 0; m < 10000 && !done; ++m)
        for (const QuadInt& t : elements_of_norm(f, m)) {
          QuadInt u2 = u + t * n;
          if (is_unit(gcd_or_zero(u2, v))) {
            u = u2;
            done = true;
            break;
          }
        }
      if (!done) throw std::logic_error("lift_to_sl2: no coprime lift found");
    }
    // s v + t u = e with e a unit; g = [[s, -t],[u, v]] / e has det 1
    Bezout e = xgcd(v, u);
    QuadInt inv = unit_inverse(e.g);
    Mat22 g{e.s * inv, -(e.t * inv), u, v};
    if (g.det() != QuadInt(f, 1)) throw std::logic_error("lift_to_sl2: bad determinant");
    return g;
  }

 private:
  static QuadInt gcd_or_zero(const QuadInt& a, const QuadInt& b) {
    if (a.is_zero() && b.is_zero()) return a;
    return gcd(a, b);
  }

  Level level_;
  ResidueRing ring_;
  std::vector<EnPoint> points_;
  std::vector<int> index_;
};

/// |E_n| = N(n)^2 prod_{p | n} (1 - N(p)^-2), from the prime factorization.
inline mpz_class en_count_formula(const Level& level) {
  mpz_class N = level.norm();
  mpq_class r = N * N;
  for (const QuadInt& p : divisors_up_to_units(level.generator())) {
    if (norm(p) == 1) continue;
    // p is prime iff its only divisors are 1 and p
    if (divisors_up_to_units(p).size() != 2) continue;
    mpz_class np = norm(p);
    r *= mpq_class(np * np - 1, np * np);
  }
  r.canonicalize();
  if (r.get_den() != 1) throw std::logic_error("non-integral E_n count");
  return r.get_num();
}

}  // namespace bianchi
