#pragma once

// JSON encodings shared by the cache and the command-line tool.

#include <nlohmann/json.hpp>

#include "bianchi/linalg.hpp"
#include "bianchi/matrix.hpp"

namespace bianchi {

using json = nlohmann::ordered_json;

/// {"d":1,"a":"3","b":"-2"}
inline json to_json(const QuadInt& x) {
  return json{{"d", x.field().d()}, {"a", x.a().get_str()}, {"b", x.b().get_str()}};
}

inline QuadInt quadint_from_json(const json& j) {
  FieldId f(j.at("d").get<int>());
  return QuadInt(f, mpz_class(j.at("a").get<std::string>()), mpz_class(j.at("b").get<std::string>()));
}

/// Compact form "a+bw" for matrices.
inline json to_json(const Mat22& m) {
  return json::array({json::array({format(m.a), format(m.b)}), json::array({format(m.c), format(m.d)})});
}

inline Mat22 mat22_from_json(FieldId f, const json& j) {
  auto e = [&](int r, int c) { return parse_quadint(f, j.at(r).at(c).get<std::string>()); };
  return {e(0, 0), e(0, 1), e(1, 0), e(1, 1)};
}

inline std::string rational_string(const Rational& q) { return q.get_str(); }

/// {"rows":r,"cols":c,"entries":[[i,j,"p/q"],...]}
inline json to_json(const SparseMat& m) {
  json entries = json::array();
  for (const auto& [i, j, x] : m.triples()) entries.push_back(json::array({i, j, rational_string(x)}));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

inline SparseMat sparse_from_json(const json& j) {
  std::vector<std::tuple<int, int, Rational>> t;
  for (const auto& e : j.at("entries")) {
    Rational q(e.at(2).get<std::string>());
    q.canonicalize();
    t.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), q);
  }
  return SparseMat::from_triples(j.at("rows").get<int>(), j.at("cols").get<int>(), t);
}

inline json to_json(const SparseVec& v) {
  json out = json::array();
  for (const auto& [i, x] : v.entries()) out.push_back(json::array({i, rational_string(x)}));
  return out;
}

}  // namespace bianchi
