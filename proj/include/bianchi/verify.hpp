#pragma once

// Verification checks shared by `bianchi verify` and the acceptance binary.
// Each check carries its own brute-force oracle and reports counts plus the
// first counterexample.

#include <chrono>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bianchi/fourier.hpp"

namespace bianchi::checks {

struct CheckResult {
  std::string name;
  bool ok = true;
  json detail = json::object();
  double seconds = 0;

  void fail(json counterexample) {
    if (ok) detail["counterexample"] = std::move(counterexample);
    ok = false;
  }
};

inline json to_report(const CheckResult& r) {
  return {{"name", r.name}, {"ok", r.ok}, {"seconds", r.seconds}, {"detail", r.detail}};
}

/// Runs body(result) and records the elapsed time.
inline CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = name;
  auto start = std::chrono::steady_clock::now();
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::vector<QuadInt> canonical_up_to(FieldId f, long lo, long hi) {
  std::vector<QuadInt> out;
  for (long m = lo; m <= hi; ++m)
    for (const QuadInt& e : elements_of_norm(f, m))
      if (canonical_associate(e).rep == e) out.push_back(e);
  return out;
}

inline std::vector<QuadInt> all_up_to(FieldId f, long lo, long hi) {
  std::vector<QuadInt> out;
  for (long m = lo; m <= hi; ++m)
    for (const QuadInt& e : elements_of_norm(f, m)) out.push_back(e);
  return out;
}

inline bool is_prime_element(const QuadInt& x) { return !is_unit(x) && divisors_up_to_units(x).size() == 2; }

// ------------------------------------------------------------------ oracles

/// min N(a - q b) over a box of quotients around the exact one.
inline mpz_class brute_min_remainder(const QuadInt& a, const QuadInt& b) {
  auto [xa, xb] = exact_quotient(a, b);
  mpz_class ca = xa.get_num() / xa.get_den(), cb = xb.get_num() / xb.get_den();
  mpz_class best = -1;
  for (long i = -4; i <= 4; ++i)
    for (long j = -4; j <= 4; ++j) {
      mpz_class n = (a - QuadInt(a.field(), ca + i, cb + j) * b).norm();
      if (best < 0 || n < best) best = n;
    }
  return best;
}

inline bool unimodular_mod(const QuadInt& u, const QuadInt& v, const QuadInt& n) {
  QuadInt g = gcd(u.is_zero() ? n : u, n);
  if (!v.is_zero()) g = gcd(g, v);
  return is_unit(g);
}

/// Orbits of primitive columns (a, c) mod n under (a,c) -> (ua + bc, c) and
/// (a,c) -> (ua, uc).
inline int cusp_count_oracle(const Level& level) {
  const QuadInt& n = level.generator();
  ResidueRing R(n);
  const int N = R.size();
  std::vector<int> comp(static_cast<std::size_t>(N) * N, -2);
  for (int a = 0; a < N; ++a)
    for (int c = 0; c < N; ++c)
      if (unimodular_mod(R.element(a), R.element(c), n)) comp[a * N + c] = -1;
  std::vector<int> us;
  for (const QuadInt& u : units(level.field())) us.push_back(R.index(u));
  int count = 0;
  for (int s = 0; s < N * N; ++s) {
    if (comp[s] != -1) continue;
    std::vector<int> stack{s};
    comp[s] = count;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      int a = x / N, c = x % N;
      std::vector<int> next;
      for (int u : us) {
        next.push_back(R.mul(u, a) * N + c);
        next.push_back(R.mul(u, a) * N + R.mul(u, c));
      }
      for (int b = 0; b < N; ++b) next.push_back(R.add(a, R.mul(b, c)) * N + c);
      for (int y : next)
        if (comp[y] == -1) {
          comp[y] = count;
          stack.push_back(y);
        }
    }
    ++count;
  }
  return count;
}

// ------------------------------------------------------------------ checks

inline CheckResult euclid(FieldId f, int pairs, int oracle_pairs, unsigned seed = 1) {
  return timed("euclid d=" + std::to_string(f.d()), [&](CheckResult& r) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> big(-100000, 100000), mid(-1000, 1000), small(-20, 20), tiny(-5, 5);
    int done = 0, agreed = 0;
    while (done < pairs) {
      QuadInt a(f, big(rng), big(rng)), b(f, mid(rng), mid(rng));
      if (b.is_zero()) continue;
      ++done;
      DivResult q = euclid_div(a, b);
      if (a != q.q * b + q.r || mpq_class(norm(q.r)) > f.epsilon() * mpq_class(norm(b)))
        r.fail({{"a", format(a)}, {"b", format(b)}, {"r", format(q.r)}});
    }
    while (agreed < oracle_pairs) {
      QuadInt a(f, small(rng), small(rng)), b(f, tiny(rng), tiny(rng));
      if (b.is_zero()) continue;
      ++agreed;
      if (norm(euclid_div(a, b).r) != brute_min_remainder(a, b))
        r.fail({{"a", format(a)}, {"b", format(b)}, {"oracle", "minimal remainder differs"}});
    }
    r.detail["pairs"] = done;
    r.detail["oracle_pairs"] = agreed;
  });
}

/// |E_n| against brute force over (O/n)^2 and the product formula.
inline CheckResult en_count(FieldId f, long max_norm) {
  return timed("en_count d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int levels = 0;
    for (const QuadInt& n : canonical_up_to(f, 1, max_norm)) {
      Level level(n);
      ResidueRing R(n);
      long brute = 0;
      for (int u = 0; u < R.size(); ++u)
        for (int v = 0; v < R.size(); ++v) brute += unimodular_mod(R.element(u), R.element(v), n);
      long listed = EnSet(level).size();
      mpz_class formula = en_count_formula(level);
      ++levels;
      if (listed != brute || formula != brute)
        r.fail({{"level", format(n)}, {"listed", listed}, {"brute", brute}, {"formula", formula.get_str()}});
    }
    r.detail["levels"] = levels;
  });
}

/// C_Delta telescoping and class count sum N(delta) for every eta (all
/// associates) with N(eta) <= max_norm, both residue conventions. With
/// `corrupt`, the second matrix of the first family with two or more
/// matrices gets b -> b + 1 before verification.
inline CheckResult c_delta(FieldId f, long max_norm, bool corrupt = false) {
  return timed("c_delta d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int families = 0, classes = 0;
    bool corrupted = false;
    for (const QuadInt& eta : all_up_to(f, 1, max_norm))
      for (auto conv : {ResidueConvention::Division, ResidueConvention::LexMax}) {
        HeilbronnFamily fam = generate(eta, conv);
        if (corrupt && !corrupted && fam.matrices.size() >= 2) {
          fam.matrices[1].m.b += QuadInt(f, 1);
          corrupted = true;
        }
        ++families;
        CDeltaCertificate cert = verify_C_Delta(fam);
        classes += static_cast<int>(cert.classes.size());
        long expected = 0;
        for (const QuadInt& d : divisors_up_to_units(eta)) expected += norm(d).get_si();
        for (const auto& c : cert.classes) {
          if (c.ok) continue;
          json members = json::array(), chain = json::array();
          for (int i : c.members) members.push_back(to_json(fam.matrices[i].m));
          for (const auto& [cusp, mult] : c.chain) chain.push_back({format(cusp), mult});
          r.fail({{"eta", format(eta)}, {"class", members}, {"chain", chain}});
        }
        if (static_cast<long>(fam.classes.size()) != expected)
          r.fail({{"eta", format(eta)}, {"classes", fam.classes.size()}, {"expected", expected}});
      }
    r.detail["families"] = families;
    r.detail["classes"] = classes;
  });
}

inline CheckResult heilbronn_invariants(FieldId f, long max_norm, long prime_norm) {
  return timed("heilbronn_invariants d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int matrices = 0, primes = 0;
    for (const QuadInt& eta : all_up_to(f, 1, max_norm)) {
      HeilbronnFamily fam = generate(eta);
      if (fam.collisions != 0) r.fail({{"eta", format(eta)}, {"collisions", fam.collisions}});
      for (const auto& h : fam.matrices) {
        ++matrices;
        if (h.m.det() != eta || !(norm(h.m.a) > norm(h.m.b)) || !(norm(h.m.d) > norm(h.m.c)))
          r.fail({{"eta", format(eta)}, {"matrix", to_json(h.m)}});
      }
    }
    for (const QuadInt& p : canonical_up_to(f, 2, prime_norm)) {
      if (!is_prime_element(p)) continue;
      ++primes;
      if (class_count_prime(p) != norm(p).get_si() + 1)
        r.fail({{"prime", format(p)}, {"classes", class_count_prime(p)}});
    }
    r.detail["matrices"] = matrices;
    r.detail["primes"] = primes;
  });
}

/// hecke_on_manin against the coset-representative oracle on every level
/// with N(n) in [2, level_norm] and coprime eta with N(eta) in [2, eta_norm].
inline CheckResult hecke_oracle_equivalence(FieldId f, long level_norm, long eta_norm) {
  return timed("hecke_oracle d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int pairs = 0;
    for (const QuadInt& n : canonical_up_to(f, 2, level_norm)) {
      SymbolSpace s(Level(n), 2);
      for (const QuadInt& eta : canonical_up_to(f, 2, eta_norm)) {
        if (!coprime_to_level(s, eta)) continue;
        ++pairs;
        if (!(hecke_on_manin(s, eta).matrix == hecke_oracle(s, eta).matrix))
          r.fail({{"level", format(n)}, {"eta", format(eta)}});
      }
    }
    r.detail["pairs"] = pairs;
  });
}

inline CheckResult commutativity(const QuadInt& n, long eta_norm) {
  return timed("commutativity d=" + std::to_string(n.field().d()) + " n=" + format(n), [&](CheckResult& r) {
    SymbolSpace s(Level(n), 2);
    std::vector<HeckeOperator> ops;
    for (const QuadInt& eta : canonical_up_to(n.field(), 2, eta_norm))
      if (coprime_to_level(s, eta) && is_unit(gcd(eta, n))) ops.push_back(hecke_on_manin(s, eta));
    int pairs = 0;
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = i + 1; j < ops.size(); ++j) {
        if (!is_unit(gcd(ops[i].eta, ops[j].eta))) continue;
        ++pairs;
        if (!commute_check(ops[i], ops[j]).ok())
          r.fail({{"eta1", format(ops[i].eta)}, {"eta2", format(ops[j].eta)}});
      }
    r.detail["dim"] = s.dim();
    r.detail["pairs"] = pairs;
  });
}

/// dim M_2 from the relation quotient against dim ker(boundary) plus the
/// oracle cusp count.
inline CheckResult exactness(FieldId f, long max_norm) {
  return timed("exactness d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int levels = 0;
    for (const QuadInt& n : canonical_up_to(f, 1, max_norm)) {
      Level level(n);
      SymbolSpace s(level, 2);
      int cusps = cusp_count_oracle(level);
      int cuspidal = kernel(s.boundary_matrix()).dim();
      ++levels;
      if (s.dim() != cuspidal + cusps - 1)
        r.fail({{"level", format(n)}, {"dim", s.dim()}, {"cuspidal", cuspidal}, {"cusps", cusps}});
    }
    r.detail["levels"] = levels;
  });
}

/// b against mu o del on lifts of every generator; then whether m(ker b)
/// lies in S_2.
inline CheckResult boundary_agreement(FieldId f, long max_norm, bool kernel_clause) {
  return timed("boundary_b d=" + std::to_string(f.d()), [&](CheckResult& r) {
    int generators = 0, kernel_vectors = 0, outside = 0;
    for (const QuadInt& n : canonical_up_to(f, 1, max_norm)) {
      Level level(n);
      SymbolSpace s(level, 2);
      BoundaryTarget t(level, 2);
      for (int g = 0; g < s.num_generators(); ++g) {
        ++generators;
        ManinGen mg = s.generator(g);
        HomPoly P = HomPoly::monomial(f, 0, mg.monomial);
        Mat22 lift = s.en().lift_to_sl2(s.en().point(mg.point));
        if (boundary_b(s, t, {{g, QuadInt(f, 1)}}) != boundary_mu_del(t, P, lift))
          r.fail({{"level", format(n)}, {"generator", g}});
      }
      if (!kernel_clause) continue;
      const Subspace kb = kernel(boundary_b_matrix(s, t));
      for (const SparseVec& x : kb.basis()) {
        ++kernel_vectors;
        if (s.cuspidal().contains(s.project(x))) continue;
        if (outside++ == 0) r.fail({{"level", format(n)}, {"reason", "m(x) not in S_2 for x in ker b"}});
      }
    }
    r.detail["generators"] = generators;
    if (kernel_clause) {
      r.detail["ker_b_vectors"] = kernel_vectors;
      r.detail["ker_b_outside_S"] = outside;
    }
  });
}

/// sum_{M in X_eta} phi|_M(x) = phi(T_eta m(x)) for every eta with
/// N(eta) <= max_norm, every rational eigenfunctional and the given seeds.
inline CheckResult coefficient_identity(const SymbolSpace& s, long max_norm, int seeds) {
  return timed("coefficient_identity n=" + format(s.level().generator()), [&](CheckResult& r) {
    std::vector<QuadInt> etas;
    for (const QuadInt& e : canonical_up_to(s.field(), 2, 12))
      if (coprime_to_level(s, e)) etas.push_back(e);
    EigenTable table = eigensystems(s, etas);
    Subspace kb = kernel(boundary_b_matrix(s, BoundaryTarget(s.level(), 2)));
    int checked = 0, functionals = 0;
    for (const EigenSystem& sys : table.systems) {
      ++functionals;
      DualFunctional phi = eigen_functional(s, sys);
      int used = 0;
      for (const SparseVec& xv : kb.basis()) {
        if (used == seeds) break;
        ++used;
        SeedElement x(s, xv);
        const SparseVec mx = x.image();
        for (const QuadInt& eta : all_up_to(s.field(), 1, max_norm)) {
          HeilbronnFamily fam = cached_family(eta);
          Rational lhs = 0;
          for (const auto& h : fam.matrices) lhs += h.multiplicity * functional_slash(phi, h.m, x);
          Rational rhs = phi(hecke_matrix_from_family(s, fam).apply(mx));
          ++checked;
          if (lhs != rhs) r.fail({{"eta", format(eta)}, {"lhs", lhs.get_str()}, {"rhs", rhs.get_str()}});
        }
      }
    }
    r.detail["cuspidal_dim"] = s.cuspidal_dim();
    r.detail["functionals"] = functionals;
    r.detail["identities"] = checked;
    if (functionals == 0) r.fail({{"reason", "no rational eigensystem on this level"}});
  });
}

inline CheckResult bessel() {
  return timed("bessel", [&](CheckResult& r) {
    // independent high-precision values
    const double k0 = 0.42102443824070833, k1 = 0.60190723019723457;
    double e0 = std::abs(bessel_K(0, 1.0) - k0), e1 = std::abs(bessel_K(1, 1.0) - k1);
    double fd = 0;
    const double h = 1e-5;
    for (double t : {0.5, 1.0, 2.0})
      fd = std::max(fd, std::abs((bessel_K(0, t + h) - bessel_K(0, t - h)) / (2 * h) + bessel_K(1, t)));
    r.detail["K0(1) error"] = e0;
    r.detail["K1(1) error"] = e1;
    r.detail["K0' + K1 residual"] = fd;
    if (e0 > 1e-10 || e1 > 1e-10 || fd > 1e-6) r.fail({{"reason", "Bessel tolerance exceeded"}});
  });
}

/// Translations and one generic gamma in Gamma_1(n) at the given points:
/// translations against `tolerance`, the generic gamma against the budget.
inline CheckResult automorphy(const FourierTable& translations_table, const FourierTable& generic_table,
                              const Mat22& generic, const std::vector<H3Point>& points, double tolerance) {
  return timed("automorphy n=" + format(translations_table.level), [&](CheckResult& r) {
    const FieldId f = translations_table.field;
    const QuadInt one(f, 1), zero(f, 0);
    const QuadInt& n = translations_table.level;
    double worst_translation = 0, worst_generic = 0, worst_budget = 0;
    json generic_rows = json::array();
    for (const H3Point& w : points) {
      for (const QuadInt& b : {n, one, QuadInt::omega(f)}) {
        AutomorphyCheck c = automorphy_residual(translations_table, Mat22{one, b, zero, one}, w);
        worst_translation = std::max(worst_translation, c.residual);
        if (c.residual >= tolerance)
          r.fail({{"gamma", format(Mat22{one, b, zero, one})}, {"residual", c.residual}});
      }
      AutomorphyCheck c = automorphy_residual(generic_table, generic, w);
      worst_generic = std::max(worst_generic, c.residual);
      worst_budget = std::max(worst_budget, c.budget);
      generic_rows.push_back({{"z", {w.z.real(), w.z.imag()}}, {"t", w.t}, {"t_image", c.image.t},
                              {"residual", c.residual}, {"budget", c.budget}});
      if (!c.ok()) r.fail({{"gamma", format(generic)}, {"residual", c.residual}, {"budget", c.budget}});
    }
    r.detail["translation_bound"] = translations_table.norm_bound;
    r.detail["generic_bound"] = generic_table.norm_bound;
    r.detail["generic_gamma"] = format(generic);
    r.detail["worst_translation_residual"] = worst_translation;
    r.detail["worst_generic_residual"] = worst_generic;
    r.detail["generic"] = generic_rows;
  });
}

}  // namespace bianchi::checks
