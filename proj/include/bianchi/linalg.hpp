#pragma once

// Exact linear algebra over Q: sparse row-reduced echelon forms, kernels,
// subspaces, characteristic polynomials and rational eigenspaces.

#include <gmpxx.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace bianchi {

using Rational = mpq_class;

/// Sparse vector: entries sorted by index, no zeros stored.
class SparseVec {
 public:
  using Entry = std::pair<int, Rational>;

  SparseVec() = default;
  /// Entries may be unsorted and contain repeats or zeros.
  explicit SparseVec(std::vector<Entry> entries) : e_(std::move(entries)) { normalize(); }

  static SparseVec unit(int i) { return SparseVec({{i, Rational(1)}}); }

  const std::vector<Entry>& entries() const { return e_; }
  bool empty() const { return e_.empty(); }
  std::size_t nnz() const { return e_.size(); }
  int leading() const { return e_.empty() ? -1 : e_.front().first; }

  Rational at(int i) const {
    auto it = std::lower_bound(e_.begin(), e_.end(), i,
                               [](const Entry& e, int k) { return e.first < k; });
    return (it != e_.end() && it->first == i) ? it->second : Rational(0);
  }

  /// this += c * other
  void axpy(const Rational& c, const SparseVec& other) {
    if (sgn(c) == 0 || other.empty()) return;
    std::vector<Entry> out;
    out.reserve(e_.size() + other.e_.size());
    auto i = e_.begin();
    auto j = other.e_.begin();
    while (i != e_.end() || j != other.e_.end()) {
      if (j == other.e_.end() || (i != e_.end() && i->first < j->first)) {
        out.push_back(std::move(*i++));
      } else if (i == e_.end() || j->first < i->first) {
        out.emplace_back(j->first, c * j->second);
        ++j;
      } else {
        Rational v = i->second + c * j->second;
        if (sgn(v) != 0) out.emplace_back(i->first, std::move(v));
        ++i;
        ++j;
      }
    }
    e_ = std::move(out);
  }

  void scale(const Rational& c) {
    if (sgn(c) == 0) {
      e_.clear();
      return;
    }
    for (auto& e : e_) e.second *= c;
  }

  Rational dot(const std::vector<Rational>& dense) const {
    Rational s = 0;
    for (const auto& [i, v] : e_) s += v * dense[i];
    return s;
  }

  friend bool operator==(const SparseVec& x, const SparseVec& y) { return x.e_ == y.e_; }

 private:
  void normalize() {
    std::sort(e_.begin(), e_.end(),
              [](const Entry& x, const Entry& y) { return x.first < y.first; });
    std::vector<Entry> out;
    for (auto& e : e_) {
      if (!out.empty() && out.back().first == e.first)
        out.back().second += e.second;
      else
        out.push_back(std::move(e));
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Entry& e) { return sgn(e.second) == 0; }),
              out.end());
    e_ = std::move(out);
  }

  std::vector<Entry> e_;
};

/// Row-major sparse matrix.
class SparseMat {
 public:
  SparseMat() = default;
  SparseMat(int rows, int cols) : cols_(cols), rows_(rows) {}

  static SparseMat identity(int n) {
    SparseMat m(n, n);
    for (int i = 0; i < n; ++i) m.rows_[i] = SparseVec::unit(i);
    return m;
  }

  /// From (row, col, value) triples; repeats are summed.
  static SparseMat from_triples(int rows, int cols,
                                const std::vector<std::tuple<int, int, Rational>>& t) {
    std::vector<std::vector<SparseVec::Entry>> r(rows);
    for (const auto& [i, j, v] : t) {
      if (i < 0 || i >= rows || j < 0 || j >= cols)
        throw std::out_of_range("matrix entry out of range");
      r[i].emplace_back(j, v);
    }
    SparseMat m(rows, cols);
    for (int i = 0; i < rows; ++i) m.rows_[i] = SparseVec(std::move(r[i]));
    return m;
  }

  static SparseMat from_dense(const std::vector<std::vector<Rational>>& d) {
    int rows = static_cast<int>(d.size());
    int cols = rows ? static_cast<int>(d[0].size()) : 0;
    SparseMat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      std::vector<SparseVec::Entry> e;
      for (int j = 0; j < cols; ++j)
        if (sgn(d[i][j]) != 0) e.emplace_back(j, d[i][j]);
      m.rows_[i] = SparseVec(std::move(e));
    }
    return m;
  }

  int rows() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }
  const SparseVec& row(int i) const { return rows_[i]; }
  void set_row(int i, SparseVec v) { rows_[i] = std::move(v); }
  void append_row(SparseVec v) { rows_.push_back(std::move(v)); }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.nnz();
    return n;
  }

  Rational at(int i, int j) const { return rows_[i].at(j); }

  std::vector<std::tuple<int, int, Rational>> triples() const {
    std::vector<std::tuple<int, int, Rational>> t;
    for (int i = 0; i < rows(); ++i)
      for (const auto& [j, v] : rows_[i].entries()) t.emplace_back(i, j, v);
    return t;
  }

  std::vector<std::vector<Rational>> dense() const {
    std::vector<std::vector<Rational>> d(rows(), std::vector<Rational>(cols_, Rational(0)));
    for (int i = 0; i < rows(); ++i)
      for (const auto& [j, v] : rows_[i].entries()) d[i][j] = v;
    return d;
  }

  SparseMat transpose() const {
    std::vector<std::vector<SparseVec::Entry>> c(cols_);
    for (int i = 0; i < rows(); ++i)
      for (const auto& [j, v] : rows_[i].entries()) c[j].emplace_back(i, v);
    SparseMat t(cols_, rows());
    for (int j = 0; j < cols_; ++j) t.rows_[j] = SparseVec(std::move(c[j]));
    return t;
  }

  /// Row vector times matrix: v^T M.
  SparseVec left_apply(const SparseVec& v) const {
    SparseVec out;
    for (const auto& [i, c] : v.entries()) out.axpy(c, rows_[i]);
    return out;
  }

  /// M v for a sparse column vector.
  SparseVec apply(const SparseVec& v) const {
    std::vector<SparseVec::Entry> e;
    for (int i = 0; i < rows(); ++i) {
      Rational s = 0;
      const auto& re = rows_[i].entries();
      auto a = re.begin();
      auto b = v.entries().begin();
      while (a != re.end() && b != v.entries().end()) {
        if (a->first < b->first)
          ++a;
        else if (b->first < a->first)
          ++b;
        else {
          s += a->second * b->second;
          ++a;
          ++b;
        }
      }
      if (sgn(s) != 0) e.emplace_back(i, s);
    }
    return SparseVec(std::move(e));
  }

  friend SparseMat operator*(const SparseMat& a, const SparseMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    SparseMat m(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) m.rows_[i] = b.left_apply(a.rows_[i]);
    return m;
  }

  friend SparseMat operator-(const SparseMat& a, const SparseMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw std::invalid_argument("matrix shape mismatch");
    SparseMat m = a;
    for (int i = 0; i < a.rows(); ++i) m.rows_[i].axpy(Rational(-1), b.rows_[i]);
    return m;
  }

  friend bool operator==(const SparseMat& a, const SparseMat& b) {
    return a.cols_ == b.cols_ && a.rows_ == b.rows_;
  }

  bool is_zero() const {
    return std::all_of(rows_.begin(), rows_.end(), [](const SparseVec& r) { return r.empty(); });
  }

 private:
  int cols_ = 0;
  std::vector<SparseVec> rows_;
};

/// Incremental reduction to reduced row-echelon form. Rows are inserted one
/// at a time; each is reduced against the pivots seen so far and, if
/// nonzero, becomes a new pivot row at its leading column. finish() performs
/// the back-substitution, after which the rows form the unique RREF of the
/// span of everything inserted.
class RowReducer {
 public:
  explicit RowReducer(int cols) : cols_(cols), pivot_of_(cols, -1) {}

  /// Reduces v against the current pivots; returns the remainder.
  SparseVec reduce(SparseVec v) const {
    // Walk entries in column order; pivot rows only touch columns >= their
    // pivot, so one ordered pass suffices.
    std::map<int, Rational> w;
    for (const auto& [i, c] : v.entries()) w.emplace(i, c);
    for (auto it = w.begin(); it != w.end();) {
      int p = pivot_of_[it->first];
      if (p < 0) {
        ++it;
        continue;
      }
      Rational c = -it->second;
      for (const auto& [j, x] : rows_[p].entries()) {
        auto [jt, fresh] = w.emplace(j, c * x);
        if (!fresh) jt->second += c * x;
      }
      // the pivot entry itself is now zero
      auto next = std::next(it);
      while (next != w.end() && sgn(next->second) == 0) next = w.erase(next);
      w.erase(it);
      it = next;
    }
    std::vector<SparseVec::Entry> e;
    for (auto& [i, c] : w)
      if (sgn(c) != 0) e.emplace_back(i, c);
    return SparseVec(std::move(e));
  }

  /// Returns true when v was independent of the rows already inserted.
  bool insert(const SparseVec& v) {
    if (finished_) throw std::logic_error("RowReducer: insert after finish");
    SparseVec r = reduce(v);
    if (r.empty()) return false;
    Rational lead = r.entries().front().second;
    r.scale(1 / lead);
    pivot_of_[r.leading()] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(r));
    return true;
  }

  void finish() {
    if (finished_) return;
    for (int k = static_cast<int>(rows_.size()) - 1; k >= 0; --k) {
      SparseVec& row = rows_[k];
      bool dirty = false;
      for (const auto& [j, c] : row.entries())
        if (pivot_of_[j] >= 0 && pivot_of_[j] != k) {
          dirty = true;
          break;
        }
      if (!dirty) continue;
      // Later rows are already fully reduced.
      std::vector<std::pair<int, Rational>> kill;
      for (const auto& [j, c] : row.entries())
        if (pivot_of_[j] >= 0 && pivot_of_[j] != k) kill.emplace_back(pivot_of_[j], c);
      for (const auto& [p, c] : kill) row.axpy(-c, rows_[p]);
    }
    finished_ = true;
  }

  int rank() const { return static_cast<int>(rows_.size()); }
  int cols() const { return cols_; }
  bool is_pivot(int col) const { return pivot_of_[col] >= 0; }
  const SparseVec& pivot_row(int col) const { return rows_[pivot_of_[col]]; }

  /// Pivot columns in increasing order.
  std::vector<int> pivots() const {
    std::vector<int> p;
    for (int j = 0; j < cols_; ++j)
      if (pivot_of_[j] >= 0) p.push_back(j);
    return p;
  }

  /// Rows sorted by pivot column. Requires finish().
  std::vector<SparseVec> rows_sorted() const {
    std::vector<SparseVec> out;
    for (int j = 0; j < cols_; ++j)
      if (pivot_of_[j] >= 0) out.push_back(rows_[pivot_of_[j]]);
    return out;
  }

 private:
  int cols_;
  bool finished_ = false;
  std::vector<int> pivot_of_;
  std::vector<SparseVec> rows_;
};

struct Echelon {
  SparseMat reduced;  ///< nonzero rows of the RREF
  int rank = 0;
  std::vector<int> pivots;
};

inline Echelon echelon(const SparseMat& m) {
  RowReducer rr(m.cols());
  std::vector<int> order(m.rows());
  for (int i = 0; i < m.rows(); ++i) order[i] = i;
  // Sparse rows first keeps fill-in down; the result does not depend on order.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return m.row(a).nnz() < m.row(b).nnz(); });
  for (int i : order) rr.insert(m.row(i));
  rr.finish();
  Echelon e;
  e.rank = rr.rank();
  e.pivots = rr.pivots();
  e.reduced = SparseMat(0, m.cols());
  for (auto& r : rr.rows_sorted()) e.reduced.append_row(std::move(r));
  return e;
}

/// A subspace of Q^n stored by its reduced row-echelon basis.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(int ambient) : ambient_(ambient) {}

  static Subspace span(int ambient, const std::vector<SparseVec>& vectors) {
    SparseMat m(0, ambient);
    for (const auto& v : vectors) m.append_row(v);
    Echelon e = echelon(m);
    Subspace s(ambient);
    for (int i = 0; i < e.reduced.rows(); ++i) s.basis_.push_back(e.reduced.row(i));
    s.pivots_ = e.pivots;
    return s;
  }

  static Subspace full(int ambient) {
    std::vector<SparseVec> b;
    for (int i = 0; i < ambient; ++i) b.push_back(SparseVec::unit(i));
    return span(ambient, b);
  }

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<SparseVec>& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }

  /// Coordinates of v in the echelon basis; throws if v is not in the space.
  std::vector<Rational> coordinates(const SparseVec& v) const {
    std::vector<Rational> c(dim());
    SparseVec r = v;
    for (int i = 0; i < dim(); ++i) {
      c[i] = v.at(pivots_[i]);
      r.axpy(-c[i], basis_[i]);
    }
    if (!r.empty()) throw std::domain_error("vector is not in the subspace");
    return c;
  }

  bool contains(const SparseVec& v) const {
    SparseVec r = v;
    for (int i = 0; i < dim(); ++i) r.axpy(-v.at(pivots_[i]), basis_[i]);
    return r.empty();
  }

  bool contains(const Subspace& w) const {
    return std::all_of(w.basis_.begin(), w.basis_.end(),
                       [&](const SparseVec& v) { return contains(v); });
  }

  SparseVec combine(const std::vector<Rational>& coords) const {
    SparseVec v;
    for (int i = 0; i < dim(); ++i) v.axpy(coords[i], basis_[i]);
    return v;
  }

  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
  }

 private:
  int ambient_ = 0;
  std::vector<SparseVec> basis_;
  std::vector<int> pivots_;
};

/// Right null space of m.
inline Subspace kernel(const SparseMat& m) {
  Echelon e = echelon(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int p : e.pivots) is_pivot[p] = true;
  // Column j of the RREF, for each free column j.
  std::vector<std::vector<SparseVec::Entry>> col(m.cols());
  for (int i = 0; i < e.reduced.rows(); ++i)
    for (const auto& [j, v] : e.reduced.row(i).entries())
      if (!is_pivot[j]) col[j].emplace_back(e.pivots[i], -v);
  std::vector<SparseVec> basis;
  for (int j = 0; j < m.cols(); ++j) {
    if (is_pivot[j]) continue;
    auto entries = col[j];
    entries.emplace_back(j, Rational(1));
    basis.emplace_back(std::move(entries));
  }
  return Subspace::span(m.cols(), basis);
}

inline Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("ambient mismatch");
  // x = sum s_i a_i = sum t_j b_j; solve for (s, t).
  int n = a.ambient_dim(), da = a.dim(), db = b.dim();
  std::vector<std::vector<SparseVec::Entry>> cols(n);
  for (int i = 0; i < da; ++i)
    for (const auto& [k, v] : a.basis()[i].entries()) cols[k].emplace_back(i, v);
  for (int j = 0; j < db; ++j)
    for (const auto& [k, v] : b.basis()[j].entries()) cols[k].emplace_back(da + j, -v);
  SparseMat m(0, da + db);
  for (auto& c : cols) m.append_row(SparseVec(std::move(c)));
  Subspace k = kernel(m);
  std::vector<SparseVec> out;
  for (const auto& v : k.basis()) {
    SparseVec x;
    for (const auto& [i, c] : v.entries())
      if (i < da) x.axpy(c, a.basis()[i]);
    out.push_back(std::move(x));
  }
  return Subspace::span(n, out);
}

// ---------------------------------------------------------------------------
// Dense square matrices and polynomials over Q.

using DenseMat = std::vector<std::vector<Rational>>;

/// Coefficients, lowest degree first; no trailing zeros.
using RatPoly = std::vector<Rational>;

inline void trim(RatPoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline Rational eval(const RatPoly& p, const Rational& x) {
  Rational s = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

/// p / (x - r), assuming r is a root.
inline RatPoly deflate(const RatPoly& p, const Rational& r) {
  int n = static_cast<int>(p.size()) - 1;
  RatPoly q(n);
  Rational carry = 0;
  for (int i = n; i >= 1; --i) {
    carry = p[i] + carry * r;
    q[i - 1] = carry;
  }
  return q;
}

/// Scales p to a primitive integer polynomial with positive leading coefficient.
inline std::vector<mpz_class> primitive_part(const RatPoly& p) {
  mpz_class den = 1;
  for (const auto& c : p) den = lcm(den, c.get_den());
  std::vector<mpz_class> z;
  mpz_class g = 0;
  for (const auto& c : p) {
    mpz_class v = c.get_num() * (den / c.get_den());
    g = gcd(g, v);
    z.push_back(v);
  }
  if (sgn(g) != 0)
    for (auto& v : z) v /= g;
  if (!z.empty() && sgn(z.back()) < 0)
    for (auto& v : z) v = -v;
  return z;
}

/// Characteristic polynomial det(x I - A) via reduction to Hessenberg form.
inline RatPoly charpoly(DenseMat a) {
  const int n = static_cast<int>(a.size());
  for (int m = 1; m < n - 1; ++m) {
    int piv = -1;
    for (int i = m; i < n; ++i)
      if (sgn(a[i][m - 1]) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != m) {
      std::swap(a[piv], a[m]);
      for (int i = 0; i < n; ++i) std::swap(a[i][piv], a[i][m]);
    }
    for (int i = m + 1; i < n; ++i) {
      if (sgn(a[i][m - 1]) == 0) continue;
      Rational u = a[i][m - 1] / a[m][m - 1];
      for (int j = 0; j < n; ++j) a[i][j] -= u * a[m][j];
      for (int j = 0; j < n; ++j) a[j][m] += u * a[j][i];
    }
  }
  // p_k = char poly of leading k x k block.
  std::vector<RatPoly> p(n + 1);
  p[0] = {Rational(1)};
  for (int k = 1; k <= n; ++k) {
    // p_k = (x - a_kk) p_{k-1} - sum_{i<k} a_ik (prod_{j=i+1}^{k} a_{j,j-1}) p_{i-1}
    RatPoly r(k + 1, Rational(0));
    for (int i = 0; i < k; ++i) {
      r[i + 1] += p[k - 1][i];
      r[i] -= a[k - 1][k - 1] * p[k - 1][i];
    }
    Rational t = 1;
    for (int i = k - 1; i >= 1; --i) {
      t *= a[i][i - 1];
      if (sgn(t) == 0) break;
      Rational c = t * a[i - 1][k - 1];
      for (std::size_t j = 0; j < p[i - 1].size(); ++j) r[j] -= c * p[i - 1][j];
    }
    p[k] = std::move(r);
  }
  return p[n];
}

namespace detail {

inline std::vector<std::complex<double>> numeric_eigenvalues(const DenseMat& a) {
  const int n = static_cast<int>(a.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a[i][j].get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()[i]);
  return out;
}

}  // namespace detail

/// Rational roots of p with multiplicity, plus the remaining factor.
/// Candidates come from floating-point approximations (typically the
/// eigenvalues of the matrix p was computed from) and from small integers;
/// every root is certified exactly before it is divided out.
struct RootSplit {
  std::vector<std::pair<Rational, int>> roots;  ///< sorted by value
  RatPoly residual;                             ///< monic, no rational roots found
};

inline RootSplit rational_roots(RatPoly p, const std::vector<std::complex<double>>& hints = {}) {
  trim(p);
  if (p.empty()) throw std::invalid_argument("rational_roots of the zero polynomial");
  std::map<Rational, int> found;
  auto strip = [&](const Rational& r) {
    int mult = 0;
    while (p.size() > 1 && sgn(eval(p, r)) == 0) {
      p = deflate(p, r);
      ++mult;
    }
    if (mult > 0) found[r] += mult;
  };
  strip(Rational(0));
  std::vector<mpz_class> dens{1};
  mpz_class lead = primitive_part(p).back();
  if (lead != 1 && lead < 100000) dens = {};
  if (dens.empty())
    for (mpz_class q = 1; q <= lead; ++q)
      if (lead % q == 0) dens.push_back(q);
  for (const auto& h : hints) {
    if (p.size() <= 1) break;
    if (std::abs(h.imag()) > 1e-3 * (1 + std::abs(h.real()))) continue;
    for (const auto& q : dens) {
      double x = h.real() * q.get_d();
      if (!std::isfinite(x) || std::abs(x) > 1e15) continue;
      mpz_class c(static_cast<long>(std::llround(x)));
      for (int delta = -1; delta <= 1; ++delta) {
        Rational r(c + delta, q);
        r.canonicalize();
        strip(r);
      }
    }
  }
  for (long k = -64; k <= 64 && p.size() > 1; ++k) strip(Rational(k));
  RootSplit out;
  for (auto& [r, m] : found) out.roots.emplace_back(r, m);
  Rational lc = p.back();
  for (auto& c : p) c /= lc;
  out.residual = std::move(p);
  return out;
}

inline DenseMat identity_dense(int n) {
  DenseMat m(n, std::vector<Rational>(n, Rational(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline DenseMat multiply(const DenseMat& a, const DenseMat& b) {
  const int n = static_cast<int>(a.size()), k = static_cast<int>(b.size());
  const int m = k ? static_cast<int>(b[0].size()) : 0;
  DenseMat c(n, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) {
      if (sgn(a[i][l]) == 0) continue;
      for (int j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

/// p(A) by Horner's rule.
inline DenseMat poly_of_matrix(const RatPoly& p, const DenseMat& a) {
  const int n = static_cast<int>(a.size());
  DenseMat r(n, std::vector<Rational>(n, Rational(0)));
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    r = multiply(r, a);
    for (int i = 0; i < n; ++i) r[i][i] += *it;
  }
  return r;
}

/// Matrix of the restriction of m (acting on column vectors) to the
/// invariant subspace v, in v's echelon basis: column j holds the
/// coordinates of m * v_j. Throws std::domain_error if v is not invariant.
inline DenseMat restrict_to(const SparseMat& m, const Subspace& v) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (m.cols() != v.ambient_dim()) throw std::invalid_argument("ambient mismatch");
  const int k = v.dim();
  DenseMat a(k, std::vector<Rational>(k, Rational(0)));
  for (int j = 0; j < k; ++j) {
    std::vector<Rational> c;
    try {
      c = v.coordinates(m.apply(v.basis()[j]));
    } catch (const std::domain_error&) {
      throw std::domain_error("subspace is not invariant under the matrix");
    }
    for (int i = 0; i < k; ++i) a[i][j] = c[i];
  }
  return a;
}

/// Lifts a subspace of coordinate space Q^dim(v) back into v's ambient space.
inline Subspace lift(const Subspace& coords, const Subspace& v) {
  std::vector<SparseVec> out;
  for (const auto& c : coords.basis()) {
    SparseVec x;
    for (const auto& [i, t] : c.entries()) x.axpy(t, v.basis()[i]);
    out.push_back(std::move(x));
  }
  return Subspace::span(v.ambient_dim(), out);
}

struct EigenPiece {
  Rational value;
  Subspace space;
};

struct EigenDecomposition {
  std::vector<EigenPiece> eigen;       ///< rational eigenvalues, increasing
  RatPoly residual;                    ///< monic factor with no rational roots
  Subspace residual_space;             ///< kernel of residual(m) on v
};

/// Rational eigenvalues and eigenspaces of m restricted to the invariant
/// subspace v, with the unsplit remainder of the characteristic polynomial.
inline EigenDecomposition rational_eigensystem(const SparseMat& m, const Subspace& v) {
  DenseMat a = restrict_to(m, v);
  const int k = static_cast<int>(a.size());
  EigenDecomposition out;
  if (k == 0) {
    out.residual = {Rational(1)};
    out.residual_space = Subspace(v.ambient_dim());
    return out;
  }
  RatPoly cp = charpoly(a);
  RootSplit split = rational_roots(cp, detail::numeric_eigenvalues(a));
  for (const auto& [lambda, mult] : split.roots) {
    DenseMat s = a;
    for (int i = 0; i < k; ++i) s[i][i] -= lambda;
    out.eigen.push_back({lambda, lift(kernel(SparseMat::from_dense(s)), v)});
  }
  out.residual = split.residual;
  if (split.residual.size() > 1)
    out.residual_space = lift(kernel(SparseMat::from_dense(poly_of_matrix(split.residual, a))), v);
  else
    out.residual_space = Subspace(v.ambient_dim());
  return out;
}

inline std::string poly_to_string(const RatPoly& p) {
  std::string s;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) {
    if (sgn(p[i]) == 0) continue;
    Rational c = p[i];
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (!s.empty())
      s += neg ? " - " : " + ";
    else if (neg)
      s += "-";
    bool one = c == 1;
    if (!one || i == 0) s += c.get_str();
    if (i > 0) {
      if (!one) s += "*";
      s += "x";
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s.empty() ? "0" : s;
}

}  // namespace bianchi
