#pragma once

// Exact arithmetic in the ring of integers O of Q(sqrt(-d)) for the five
// Euclidean imaginary quadratic fields d = 1, 2, 3, 7, 11.
//
// Elements are a + b*w in the integral basis {1, w}, where
//   w = sqrt(-d)          for d = 1, 2
//   w = (1 + sqrt(-d))/2  for d = 3, 7, 11
// so that w^2 = t*w - n with (t, n) = (0, d) or (1, (1+d)/4).

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bianchi {

class FieldId {
 public:
  FieldId() : FieldId(1) {}
  explicit FieldId(int d) : d_(d) {
    if (d != 1 && d != 2 && d != 3 && d != 7 && d != 11)
      throw std::invalid_argument("d must be one of 1, 2, 3, 7, 11 (got " +
                                  std::to_string(d) + ")");
  }

  int d() const { return d_; }
  /// True when w = (1 + sqrt(-d))/2.
  bool half_integral() const { return d_ % 4 == 3; }
  /// Discriminant of the field: -4d or -d.
  int disc() const { return half_integral() ? -d_ : -4 * d_; }
  /// Trace of w.
  long omega_trace() const { return half_integral() ? 1 : 0; }
  /// Norm of w.
  long omega_norm() const { return half_integral() ? (1 + d_) / 4 : d_; }
  /// 4*N(w) - Tr(w)^2, so that 4 N(a + b w) = (2a + t b)^2 + D b^2.
  long reduced_disc() const { return 4 * omega_norm() - omega_trace() * omega_trace(); }

  /// Squared covering radius of O in units of N: every x in K has
  /// N(x - q) <= epsilon for some q in O.
  mpq_class epsilon() const {
    mpq_class e = half_integral() ? mpq_class((1 + d_) * (1 + d_), 16 * d_)
                                  : mpq_class(1 + d_, 4);
    e.canonicalize();
    return e;
  }

  std::string name() const { return "Q(sqrt(-" + std::to_string(d_) + "))"; }

  friend bool operator==(FieldId x, FieldId y) { return x.d_ == y.d_; }
  friend bool operator!=(FieldId x, FieldId y) { return x.d_ != y.d_; }

 private:
  int d_;
};

class QuadInt {
 public:
  QuadInt() = default;
  explicit QuadInt(FieldId f, mpz_class a = 0, mpz_class b = 0)
      : f_(f), a_(std::move(a)), b_(std::move(b)) {}

  static QuadInt omega(FieldId f) { return QuadInt(f, 0, 1); }

  FieldId field() const { return f_; }
  const mpz_class& a() const { return a_; }
  const mpz_class& b() const { return b_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
  bool is_rational() const { return sgn(b_) == 0; }

  mpz_class norm() const {
    return a_ * a_ + f_.omega_trace() * a_ * b_ + f_.omega_norm() * b_ * b_;
  }
  mpz_class trace() const { return 2 * a_ + f_.omega_trace() * b_; }
  QuadInt conj() const { return QuadInt(f_, a_ + f_.omega_trace() * b_, -b_); }

  QuadInt operator-() const { return QuadInt(f_, -a_, -b_); }

  QuadInt& operator+=(const QuadInt& y) {
    a_ += y.a_;
    b_ += y.b_;
    return *this;
  }
  QuadInt& operator-=(const QuadInt& y) {
    a_ -= y.a_;
    b_ -= y.b_;
    return *this;
  }
  QuadInt& operator*=(const QuadInt& y) {
    *this = *this * y;
    return *this;
  }

  friend QuadInt operator+(QuadInt x, const QuadInt& y) { return x += y; }
  friend QuadInt operator-(QuadInt x, const QuadInt& y) { return x -= y; }
  friend QuadInt operator*(const QuadInt& x, const QuadInt& y) {
    const FieldId f = x.f_;
    mpz_class bb = x.b_ * y.b_;
    return QuadInt(f, x.a_ * y.a_ - f.omega_norm() * bb,
                   x.a_ * y.b_ + x.b_ * y.a_ + f.omega_trace() * bb);
  }
  friend QuadInt operator*(const QuadInt& x, const mpz_class& k) {
    return QuadInt(x.f_, x.a_ * k, x.b_ * k);
  }
  friend QuadInt operator*(const mpz_class& k, const QuadInt& x) { return x * k; }

  friend bool operator==(const QuadInt& x, const QuadInt& y) {
    return x.a_ == y.a_ && x.b_ == y.b_;
  }
  friend bool operator!=(const QuadInt& x, const QuadInt& y) { return !(x == y); }
  /// Lexicographic on (a, b); used only for containers and tie-breaks.
  friend bool operator<(const QuadInt& x, const QuadInt& y) {
    int c = cmp(x.a_, y.a_);
    return c != 0 ? c < 0 : cmp(x.b_, y.b_) < 0;
  }

 private:
  FieldId f_;
  mpz_class a_ = 0;
  mpz_class b_ = 0;
};

inline mpz_class norm(const QuadInt& x) { return x.norm(); }

inline QuadInt make_int(FieldId f, long a, long b = 0) { return QuadInt(f, a, b); }

/// Coordinates of x/y in the basis {1, w}, as exact rationals.
inline std::pair<mpq_class, mpq_class> exact_quotient(const QuadInt& x, const QuadInt& y) {
  if (y.is_zero()) throw std::domain_error("division by zero in O");
  QuadInt num = x * y.conj();
  mpz_class n = y.norm();
  mpq_class qa(num.a(), n), qb(num.b(), n);
  qa.canonicalize();
  qb.canonicalize();
  return {qa, qb};
}

inline bool divides(const QuadInt& y, const QuadInt& x) {
  if (y.is_zero()) return x.is_zero();
  QuadInt num = x * y.conj();
  mpz_class n = y.norm();
  return mpz_divisible_p(num.a().get_mpz_t(), n.get_mpz_t()) &&
         mpz_divisible_p(num.b().get_mpz_t(), n.get_mpz_t());
}

/// x / y, which must be exact.
inline QuadInt exact_div(const QuadInt& x, const QuadInt& y) {
  if (y.is_zero()) throw std::domain_error("division by zero in O");
  QuadInt num = x * y.conj();
  mpz_class n = y.norm();
  if (!mpz_divisible_p(num.a().get_mpz_t(), n.get_mpz_t()) ||
      !mpz_divisible_p(num.b().get_mpz_t(), n.get_mpz_t()))
    throw std::domain_error("inexact division in O");
  mpz_class qa, qb;
  mpz_divexact(qa.get_mpz_t(), num.a().get_mpz_t(), n.get_mpz_t());
  mpz_divexact(qb.get_mpz_t(), num.b().get_mpz_t(), n.get_mpz_t());
  return QuadInt(x.field(), qa, qb);
}

struct DivResult {
  QuadInt q;
  QuadInt r;
};

/// a = q b + r with q a nearest lattice point to a/b, so N(r) <= eps_d N(b).
/// Ties go to the lexicographically smaller (q.a, q.b).
inline DivResult euclid_div(const QuadInt& a, const QuadInt& b) {
  const FieldId f = a.field();
  if (b.is_zero()) throw std::domain_error("euclid_div: division by zero");
  QuadInt num = a * b.conj();
  mpz_class n = b.norm();
  mpz_class fa, fb;
  mpz_fdiv_q(fa.get_mpz_t(), num.a().get_mpz_t(), n.get_mpz_t());
  mpz_fdiv_q(fb.get_mpz_t(), num.b().get_mpz_t(), n.get_mpz_t());
  // The nearest point lies within this 4x4 window for every supported d.
  bool have = false;
  DivResult best;
  mpz_class best_norm;
  for (long i = -1; i <= 2; ++i) {
    for (long j = -1; j <= 2; ++j) {
      QuadInt q(f, fa + i, fb + j);
      QuadInt r = a - q * b;
      mpz_class nr = r.norm();
      if (!have || nr < best_norm || (nr == best_norm && q < best.q)) {
        have = true;
        best_norm = nr;
        best = {q, r};
      }
    }
  }
  return best;
}

inline QuadInt fundamental_unit(FieldId f) {
  switch (f.d()) {
    case 1: return QuadInt(f, 0, 1);  // i
    case 3: return QuadInt(f, 0, 1);  // w, a primitive sixth root of unity
    default: return QuadInt(f, -1, 0);
  }
}

/// The unit group, listed as powers 1, e, e^2, ... of the fundamental unit.
inline std::vector<QuadInt> units(FieldId f) {
  std::vector<QuadInt> out;
  QuadInt e = fundamental_unit(f), u(f, 1, 0);
  do {
    out.push_back(u);
    u = u * e;
  } while (u != QuadInt(f, 1, 0));
  return out;
}

inline bool is_unit(const QuadInt& x) { return x.norm() == 1; }

inline QuadInt unit_inverse(const QuadInt& u) {
  if (!is_unit(u)) throw std::domain_error("not a unit");
  return u.conj();
}

struct Associate {
  QuadInt rep;   ///< canonical representative
  QuadInt unit;  ///< x = unit * rep
};

/// Canonical representative of the associate class of x: the element of the
/// unit orbit with lexicographically largest (a, b). Units map to 1.
inline Associate canonical_associate(const QuadInt& x) {
  const FieldId f = x.field();
  if (x.is_zero()) return {x, QuadInt(f, 1, 0)};
  Associate best{x, QuadInt(f, 1, 0)};
  for (const QuadInt& u : units(f)) {
    QuadInt y = x * u;  // x = u^{-1} y
    if (best.rep < y) best = {y, unit_inverse(u)};
  }
  return best;
}

/// Canonical generator of the ideal (a, b).
inline QuadInt gcd(QuadInt a, QuadInt b) {
  if (a.is_zero() && b.is_zero()) throw std::domain_error("gcd(0, 0) is undefined");
  while (!b.is_zero()) {
    QuadInt r = euclid_div(a, b).r;
    a = std::move(b);
    b = std::move(r);
  }
  return canonical_associate(a).rep;
}

struct Bezout {
  QuadInt g;  ///< a generator of (a, b), not normalized
  QuadInt s;
  QuadInt t;  ///< s a + t b = g
};

inline Bezout xgcd(const QuadInt& a, const QuadInt& b) {
  const FieldId f = a.field();
  QuadInt r0 = a, r1 = b;
  QuadInt s0(f, 1), s1(f, 0), t0(f, 0), t1(f, 1);
  while (!r1.is_zero()) {
    DivResult qr = euclid_div(r0, r1);
    QuadInt s2 = s0 - qr.q * s1, t2 = t0 - qr.q * t1;
    r0 = std::move(r1);
    r1 = std::move(qr.r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return {r0, s0, t0};
}

/// All x in O with N(x) = m, sorted. m must be small enough for a linear scan.
inline std::vector<QuadInt> elements_of_norm(FieldId f, const mpz_class& m) {
  std::vector<QuadInt> out;
  if (sgn(m) < 0) return out;
  if (sgn(m) == 0) {
    out.emplace_back(f);
    return out;
  }
  if (!m.fits_slong_p() || m > mpz_class(1L << 40))
    throw std::domain_error("elements_of_norm: norm too large for enumeration");
  const long mm = m.get_si();
  const long D = f.reduced_disc(), t = f.omega_trace();
  // (2a + t b)^2 + D b^2 = 4m
  for (long b = 0; D * b * b <= 4 * mm; ++b) {
    long rest = 4 * mm - D * b * b;
    mpz_class s = sqrt(mpz_class(rest));
    if (s * s != rest) continue;
    long sv = s.get_si();
    for (long bs : {b, -b}) {
      for (long ss : {sv, -sv}) {
        long twice_a = ss - t * bs;
        if (twice_a % 2 != 0) continue;
        out.emplace_back(f, twice_a / 2, bs);
      }
      if (b == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<mpz_class> integer_divisors(const mpz_class& m) {
  std::vector<mpz_class> out;
  mpz_class r = abs(m);
  for (mpz_class k = 1; k * k <= r; ++k) {
    if (r % k == 0) {
      out.push_back(k);
      if (k * k != r) out.push_back(r / k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// One canonical divisor of eta per associate class, sorted by (N, a, b).
inline std::vector<QuadInt> divisors_up_to_units(const QuadInt& eta) {
  if (eta.is_zero()) throw std::domain_error("divisors of zero");
  std::vector<QuadInt> out;
  for (const mpz_class& k : integer_divisors(eta.norm())) {
    for (const QuadInt& x : elements_of_norm(eta.field(), k)) {
      if (!divides(x, eta)) continue;
      QuadInt c = canonical_associate(x).rep;
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [](const QuadInt& x, const QuadInt& y) {
    mpz_class nx = x.norm(), ny = y.norm();
    return nx != ny ? nx < ny : x < y;
  });
  return out;
}

/// Which remainder represents each class of O/delta.
enum class ResidueConvention {
  Division,  ///< the euclid_div remainder
  LexMax,    ///< among the minimal-norm elements of the class, the lexicographically largest
};

/// The lattice delta*O in Hermite form: it is spanned by (g, 0) and (s, h)
/// in {1, w} coordinates, with g*h = N(delta) and 0 <= s < g.
struct IdealLattice {
  mpz_class g, s, h;
};

inline IdealLattice ideal_lattice(const QuadInt& delta) {
  if (delta.is_zero()) throw std::domain_error("lattice of the zero ideal");
  QuadInt v1 = delta, v2 = delta * QuadInt::omega(delta.field());
  mpz_class h, p, q;
  mpz_gcdext(h.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t(), v1.b().get_mpz_t(),
             v2.b().get_mpz_t());
  IdealLattice L;
  mpz_class s = p * v1.a() + q * v2.a();
  if (sgn(h) == 0) {
    // delta rational and w*delta has b = delta; cannot happen for delta != 0
    throw std::logic_error("degenerate ideal lattice");
  }
  L.h = h;
  L.g = abs((v2.b() / h) * v1.a() - (v1.b() / h) * v2.a());
  mpz_fdiv_r(L.s.get_mpz_t(), s.get_mpz_t(), L.g.get_mpz_t());
  return L;
}

/// A transversal of O/delta with every element of norm < N(delta), sorted.
inline std::vector<QuadInt> residues_below(const QuadInt& delta,
                                           ResidueConvention conv = ResidueConvention::Division) {
  const FieldId f = delta.field();
  IdealLattice L = ideal_lattice(delta);
  std::vector<QuadInt> out;
  if (conv == ResidueConvention::Division) {
    for (mpz_class y = 0; y < L.h; ++y)
      for (mpz_class x = 0; x < L.g; ++x)
        out.push_back(euclid_div(QuadInt(f, x, y), delta).r);
  } else {
    // Every minimal-norm element of a class differs from the Division
    // remainder by a multiple of delta; scan the nearby ones.
    for (mpz_class y = 0; y < L.h; ++y)
      for (mpz_class x = 0; x < L.g; ++x) {
        QuadInt r = euclid_div(QuadInt(f, x, y), delta).r;
        QuadInt chosen = r;
        for (int s = -2; s <= 2; ++s)
          for (int t = -2; t <= 2; ++t) {
            QuadInt c = r + delta * QuadInt(f, s, t);
            if (norm(c) == norm(r) && chosen < c) chosen = c;
          }
        out.push_back(chosen);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// "a+bw" with explicit signs, e.g. "3-2w", "1+0w".
inline std::string format(const QuadInt& x) {
  std::string s = x.a().get_str();
  s += sgn(x.b()) < 0 ? "-" : "+";
  s += mpz_class(abs(x.b())).get_str();
  s += "w";
  return s;
}

/// "Q(sqrt(-1)):3-2*w"
inline std::string to_string(const QuadInt& x) {
  std::string s = x.field().name() + ":" + x.a().get_str();
  s += sgn(x.b()) < 0 ? "-" : "+";
  s += mpz_class(abs(x.b())).get_str() + "*w";
  return s;
}

namespace detail {
inline std::string strip_spaces(const std::string& s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t') out.push_back(c);
  return out;
}
}  // namespace detail

/// Parses "3", "-w", "2+1w", "3-2*w", "1+i" (d=1 only), optionally prefixed by
/// the field tag "Q(sqrt(-d)):". Throws std::invalid_argument on bad input.
inline QuadInt parse_quadint(FieldId f, const std::string& text) {
  std::string s = detail::strip_spaces(text);
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    if (s.substr(0, colon) != f.name())
      throw std::invalid_argument("field tag mismatch in '" + text + "'");
    s = s.substr(colon + 1);
  }
  if (s.empty()) throw std::invalid_argument("empty element string");
  mpz_class a = 0, b = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (any) {
      throw std::invalid_argument("malformed element '" + text + "'");
    }
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    std::string digits = s.substr(start, pos - start);
    bool is_w = false;
    if (pos < s.size() && s[pos] == '*') {
      ++pos;
      if (pos >= s.size() || digits.empty())
        throw std::invalid_argument("malformed element '" + text + "'");
    }
    if (pos < s.size() && (s[pos] == 'w' || (s[pos] == 'i' && f.d() == 1))) {
      is_w = true;
      ++pos;
    }
    if (digits.empty() && !is_w) throw std::invalid_argument("malformed element '" + text + "'");
    mpz_class v = digits.empty() ? mpz_class(1) : mpz_class(digits);
    (is_w ? b : a) += sign * v;
    any = true;
  }
  return QuadInt(f, a, b);
}

}  // namespace bianchi
