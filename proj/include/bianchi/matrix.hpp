#pragma once

// 2x2 matrices over O, cusps in P^1(K), and homogeneous polynomials with
// coefficients in O.

#include <stdexcept>
#include <string>
#include <vector>

#include "bianchi/ok_ring.hpp"

namespace bianchi {

struct Mat22 {
  QuadInt a, b, c, d;

  static Mat22 identity(FieldId f) {
    return {QuadInt(f, 1), QuadInt(f, 0), QuadInt(f, 0), QuadInt(f, 1)};
  }
  static Mat22 diag(const QuadInt& x, const QuadInt& y) {
    FieldId f = x.field();
    return {x, QuadInt(f, 0), QuadInt(f, 0), y};
  }

  FieldId field() const { return a.field(); }
  QuadInt det() const { return a * d - b * c; }

  friend Mat22 operator*(const Mat22& x, const Mat22& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Mat22& x, const Mat22& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const Mat22& x, const Mat22& y) { return !(x == y); }
  friend bool operator<(const Mat22& x, const Mat22& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    if (x.c != y.c) return x.c < y.c;
    return x.d < y.d;
  }
};

/// The adjugate [[d,-b],[-c,a]], so that M * tilde(M) = det(M) I.
inline Mat22 shimura_tilde(const Mat22& m) { return {m.d, -m.b, -m.c, m.a}; }

/// Inverse of a matrix whose determinant is a unit.
inline Mat22 unit_det_inverse(const Mat22& m) {
  QuadInt det = m.det();
  if (!is_unit(det)) throw std::domain_error("matrix is not invertible over O");
  QuadInt e = unit_inverse(det);
  Mat22 t = shimura_tilde(m);
  return {t.a * e, t.b * e, t.c * e, t.d * e};
}

inline std::string format(const Mat22& m) {
  return "[[" + format(m.a) + "," + format(m.b) + "],[" + format(m.c) + "," + format(m.d) + "]]";
}

/// A point of P^1(K) = K u {infinity}, stored as p/q with (p, q) = 1 and q a
/// canonical associate; infinity is 1/0.
class Cusp {
 public:
  Cusp() = default;
  Cusp(QuadInt p, QuadInt q) {
    if (p.is_zero() && q.is_zero()) throw std::invalid_argument("0/0 is not a cusp");
    FieldId f = p.field();
    if (q.is_zero()) {
      p_ = QuadInt(f, 1);
      q_ = QuadInt(f, 0);
      return;
    }
    QuadInt g = gcd(p, q);
    p = exact_div(p, g);
    q = exact_div(q, g);
    Associate c = canonical_associate(q);
    p_ = exact_div(p, c.unit);
    q_ = c.rep;
  }

  static Cusp infinity(FieldId f) { return Cusp(QuadInt(f, 1), QuadInt(f, 0)); }
  static Cusp of(const QuadInt& x) { return Cusp(x, QuadInt(x.field(), 1)); }

  const QuadInt& num() const { return p_; }
  const QuadInt& den() const { return q_; }
  bool is_infinity() const { return q_.is_zero(); }

  friend bool operator==(const Cusp& x, const Cusp& y) { return x.p_ == y.p_ && x.q_ == y.q_; }
  friend bool operator!=(const Cusp& x, const Cusp& y) { return !(x == y); }
  friend bool operator<(const Cusp& x, const Cusp& y) {
    return x.q_ != y.q_ ? x.q_ < y.q_ : x.p_ < y.p_;
  }

 private:
  QuadInt p_, q_;
};

inline Cusp apply(const Mat22& m, const Cusp& x) {
  return Cusp(m.a * x.num() + m.b * x.den(), m.c * x.num() + m.d * x.den());
}

inline std::string format(const Cusp& x) {
  if (x.is_infinity()) return "oo";
  if (x.den() == QuadInt(x.den().field(), 1)) return format(x.num());
  return "(" + format(x.num()) + ")/(" + format(x.den()) + ")";
}

/// Homogeneous polynomial of degree w in X, Y; coefficient i belongs to the
/// monomial X^(w-i) Y^i.
class HomPoly {
 public:
  HomPoly() = default;
  HomPoly(FieldId f, int degree) : c_(degree + 1, QuadInt(f)) {
    if (degree < 0) throw std::invalid_argument("negative degree");
  }

  static HomPoly monomial(FieldId f, int degree, int i) {
    HomPoly p(f, degree);
    p.c_.at(i) = QuadInt(f, 1);
    return p;
  }
  static HomPoly constant(const QuadInt& x) {
    HomPoly p(x.field(), 0);
    p.c_[0] = x;
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  FieldId field() const { return c_.front().field(); }
  const QuadInt& coeff(int i) const { return c_.at(i); }
  QuadInt& coeff(int i) { return c_.at(i); }
  const std::vector<QuadInt>& coeffs() const { return c_; }

  /// P(1, 0)
  const QuadInt& at_x() const { return c_.front(); }
  /// P(0, 1)
  const QuadInt& at_y() const { return c_.back(); }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!x.is_zero()) return false;
    return true;
  }

  HomPoly& operator+=(const HomPoly& o) {
    check_degree(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  friend HomPoly operator+(HomPoly x, const HomPoly& y) { return x += y; }
  friend HomPoly operator*(const QuadInt& k, HomPoly p) {
    for (auto& x : p.c_) x = k * x;
    return p;
  }
  friend bool operator==(const HomPoly& x, const HomPoly& y) { return x.c_ == y.c_; }

  /// P(l1, l2) for linear forms l1 = p X + q Y, l2 = r X + s Y.
  HomPoly substitute(const QuadInt& p, const QuadInt& q, const QuadInt& r,
                     const QuadInt& s) const {
    const int w = degree();
    const FieldId f = field();
    // powers of the two linear forms
    std::vector<std::vector<QuadInt>> pw1(w + 1), pw2(w + 1);
    pw1[0] = {QuadInt(f, 1)};
    pw2[0] = {QuadInt(f, 1)};
    for (int e = 1; e <= w; ++e) {
      pw1[e] = times_linear(pw1[e - 1], p, q);
      pw2[e] = times_linear(pw2[e - 1], r, s);
    }
    HomPoly out(f, w);
    for (int i = 0; i <= w; ++i) {
      if (c_[i].is_zero()) continue;
      const auto& u = pw1[w - i];
      const auto& v = pw2[i];
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (u[j].is_zero()) continue;
        QuadInt cu = c_[i] * u[j];
        for (std::size_t k = 0; k < v.size(); ++k) out.c_[j + k] += cu * v[k];
      }
    }
    return out;
  }

 private:
  void check_degree(const HomPoly& o) const {
    if (o.degree() != degree()) throw std::invalid_argument("polynomial degree mismatch");
  }
  static std::vector<QuadInt> times_linear(const std::vector<QuadInt>& a, const QuadInt& p,
                                           const QuadInt& q) {
    std::vector<QuadInt> out(a.size() + 1, QuadInt(p.field()));
    for (std::size_t j = 0; j < a.size(); ++j) {
      out[j] += a[j] * p;
      out[j + 1] += a[j] * q;
    }
    return out;
  }

  std::vector<QuadInt> c_;
};

/// P|_g (X, Y) = P(dX - bY, -cX + aY). This is a left action:
/// (P|_g)|_h = P|_{hg}.
inline HomPoly poly_slash(const HomPoly& p, const Mat22& g) {
  return p.substitute(g.d, -g.b, -g.c, g.a);
}

}  // namespace bianchi
