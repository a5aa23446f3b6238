#pragma once

// Heilbronn-Merel families X_eta: determinant-eta matrices from continued
// fraction chains, their right SL2(O)-coset classes, and the telescoping
// certificate for condition C_Delta.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bianchi/json_io.hpp"
#include "bianchi/matrix.hpp"

namespace bianchi {

struct HBMatrix {
  Mat22 m;
  QuadInt delta;  ///< chain seed
  QuadInt beta;
  int step = 1;   ///< M_step of the chain
  int multiplicity = 1;
};

struct HeilbronnFamily {
  QuadInt eta;
  ResidueConvention convention = ResidueConvention::Division;
  std::vector<HBMatrix> matrices;
  std::vector<std::vector<int>> classes;  ///< indices into matrices
  int collisions = 0;                     ///< repeated matrices merged into multiplicities
};

/// M and M' lie in the same right coset M SL2(O) iff adj(M') M / eta is integral.
inline bool same_right_coset(const Mat22& m, const Mat22& m2, const QuadInt& eta) {
  Mat22 p = shimura_tilde(m2) * m;
  return divides(eta, p.a) && divides(eta, p.b) && divides(eta, p.c) && divides(eta, p.d);
}

/// Hermite form of the coset M SL2(O): M g = [[eta/h, y], [0, h]] with h the
/// canonical gcd of the bottom row; (h, y mod eta/h) determines the coset.
inline std::pair<QuadInt, QuadInt> right_coset_key(const Mat22& m, const QuadInt& eta) {
  Bezout b = xgcd(m.c, m.d);
  Associate h = canonical_associate(b.g);
  QuadInt u = unit_inverse(h.unit);
  QuadInt y = m.a * b.s * u + m.b * b.t * u;
  return {h.rep, euclid_div(y, exact_div(eta, h.rep)).r};
}

inline std::vector<std::vector<int>> coset_classes(const std::vector<HBMatrix>& ms, const QuadInt& eta) {
  std::vector<std::vector<int>> out;
  std::map<std::pair<QuadInt, QuadInt>, int> slot;
  for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
    auto [it, fresh] = slot.emplace(right_coset_key(ms[i].m, eta), static_cast<int>(out.size()));
    if (fresh) out.emplace_back();
    out[it->second].push_back(i);
  }
  return out;
}

namespace detail {
inline void check_hb(const Mat22& m, const QuadInt& eta) {
  if (m.det() != eta) throw std::logic_error("Heilbronn matrix " + format(m) + " has det != eta");
  if (!(norm(m.a) > norm(m.b)) || !(norm(m.d) > norm(m.c)))
    throw std::logic_error("Heilbronn matrix " + format(m) + " breaks the norm inequalities");
}
}  // namespace detail

inline HeilbronnFamily generate(const QuadInt& eta,
                                ResidueConvention conv = ResidueConvention::Division) {
  if (eta.is_zero()) throw std::invalid_argument("eta must be nonzero");
  const FieldId f = eta.field();
  const mpq_class eps = f.epsilon();
  HeilbronnFamily fam;
  fam.eta = eta;
  fam.convention = conv;
  std::map<Mat22, int> seen;
  auto emit = [&](const Mat22& m, const QuadInt& delta, const QuadInt& beta, int step) {
    detail::check_hb(m, eta);
    auto [it, fresh] = seen.emplace(m, static_cast<int>(fam.matrices.size()));
    if (!fresh) {
      ++fam.matrices[it->second].multiplicity;
      ++fam.collisions;
      return;
    }
    fam.matrices.push_back({m, delta, beta, step, 1});
  };
  for (const QuadInt& delta : divisors_up_to_units(eta)) {
    const QuadInt cofactor = exact_div(eta, delta);
    for (const QuadInt& beta : residues_below(delta, conv)) {
      QuadInt x0 = delta, x1 = beta, y0(f, 0), y1 = cofactor;
      int step = 1;
      emit({x0, x1, y0, y1}, delta, beta, step);
      while (!x1.is_zero()) {
        QuadInt q = euclid_div(x0, x1).q;
        QuadInt x2 = x1 * q - x0, y2 = y1 * q - y0;
        if (mpq_class(norm(x2)) > eps * mpq_class(norm(x1)))
          throw std::logic_error("chain remainder exceeds the Euclidean bound");
        x0 = std::move(x1);
        x1 = std::move(x2);
        y0 = std::move(y1);
        y1 = std::move(y2);
        emit({x0, x1, y0, y1}, delta, beta, ++step);
      }
    }
  }
  fam.classes = coset_classes(fam.matrices, eta);
  return fam;
}

using CuspChain = std::map<Cusp, long>;

struct ClassCertificate {
  std::vector<int> members;
  CuspChain chain;  ///< sum of u_M ([M oo] - [M 0])
  bool ok = false;
};

struct CDeltaCertificate {
  bool ok = true;
  std::vector<ClassCertificate> classes;
};

inline CDeltaCertificate verify_C_Delta(const HeilbronnFamily& fam) {
  const FieldId f = fam.eta.field();
  CuspChain target{{Cusp::infinity(f), 1}, {Cusp::of(QuadInt(f, 0)), -1}};
  CDeltaCertificate cert;
  for (const auto& cls : fam.classes) {
    ClassCertificate c;
    c.members = cls;
    for (int i : cls) {
      const HBMatrix& h = fam.matrices[i];
      c.chain[Cusp(h.m.a, h.m.c)] += h.multiplicity;
      c.chain[Cusp(h.m.b, h.m.d)] -= h.multiplicity;
    }
    std::erase_if(c.chain, [](const auto& e) { return e.second == 0; });
    c.ok = c.chain == target;
    cert.ok = cert.ok && c.ok;
    cert.classes.push_back(std::move(c));
  }
  return cert;
}

/// Number of coset classes in X_pi; N(pi) + 1 for a prime pi.
inline int class_count_prime(const QuadInt& pi) {
  if (is_unit(pi) || pi.is_zero() || divisors_up_to_units(pi).size() != 2)
    throw std::invalid_argument(format(pi) + " is not prime");
  return static_cast<int>(generate(pi).classes.size());
}

// ------------------------------------------------------------------ caching

inline json to_json(const HeilbronnFamily& fam) {
  json ms = json::array();
  for (const auto& h : fam.matrices)
    ms.push_back({{"m", to_json(h.m)},
                  {"delta", format(h.delta)},
                  {"beta", format(h.beta)},
                  {"step", h.step},
                  {"multiplicity", h.multiplicity}});
  return json{{"d", fam.eta.field().d()},
              {"eta", format(fam.eta)},
              {"convention", fam.convention == ResidueConvention::Division ? "division" : "lexmax"},
              {"collisions", fam.collisions},
              {"matrices", ms},
              {"classes", fam.classes}};
}

inline HeilbronnFamily family_from_json(const json& j) {
  FieldId f(j.at("d").get<int>());
  HeilbronnFamily fam;
  fam.eta = parse_quadint(f, j.at("eta").get<std::string>());
  fam.convention = j.at("convention").get<std::string>() == "division" ? ResidueConvention::Division
                                                                       : ResidueConvention::LexMax;
  fam.collisions = j.at("collisions").get<int>();
  for (const auto& m : j.at("matrices"))
    fam.matrices.push_back({mat22_from_json(f, m.at("m")), parse_quadint(f, m.at("delta").get<std::string>()),
                            parse_quadint(f, m.at("beta").get<std::string>()), m.at("step").get<int>(),
                            m.at("multiplicity").get<int>()});
  fam.classes = j.at("classes").get<std::vector<std::vector<int>>>();
  return fam;
}

inline bool operator==(const HBMatrix& x, const HBMatrix& y) {
  return x.m == y.m && x.delta == y.delta && x.beta == y.beta && x.step == y.step &&
         x.multiplicity == y.multiplicity;
}
inline bool operator==(const HeilbronnFamily& x, const HeilbronnFamily& y) {
  return x.eta == y.eta && x.convention == y.convention && x.matrices == y.matrices &&
         x.classes == y.classes && x.collisions == y.collisions;
}

/// Directory named by BIANCHI_CACHE_DIR, or empty when caching is off.
inline std::filesystem::path cache_dir() {
  const char* env = std::getenv("BIANCHI_CACHE_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path();
}

/// generate() through the on-disk cache when one is configured.
inline HeilbronnFamily cached_family(const QuadInt& eta,
                                     ResidueConvention conv = ResidueConvention::Division) {
  std::filesystem::path dir = cache_dir();
  if (dir.empty()) return generate(eta, conv);
  std::string name = "hb_d" + std::to_string(eta.field().d()) + "_" + format(eta) +
                     (conv == ResidueConvention::Division ? "" : "_lexmax") + ".json";
  std::filesystem::path file = dir / name;
  if (std::filesystem::exists(file)) {
    std::ifstream in(file);
    try {
      return family_from_json(json::parse(in));
    } catch (const std::exception&) {
      // unreadable cache entries are regenerated
    }
  }
  HeilbronnFamily fam = generate(eta, conv);
  std::filesystem::create_directories(dir);
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << to_json(fam).dump();
  }
  std::filesystem::rename(tmp, file);
  return fam;
}

}  // namespace bianchi
