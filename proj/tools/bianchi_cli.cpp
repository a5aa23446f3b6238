// bianchi: command-line front end for spaces, Heilbronn-Merel families, Hecke
// operators, eigensystems, Fourier tables and the verification suite.
//
// Exit codes: 0 success, 2 bad input or failed precondition, 3 failed
// verification or internal error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bianchi/verify.hpp"

using namespace bianchi;

namespace {

constexpr int kBadInput = 2;
constexpr int kVerifyFailed = 3;

/// A failed verification; the report is still written.
struct VerificationFailure {
  json report;
};

struct Output {
  std::string path;
  int indent = 2;

  void write(const json& j) const {
    std::string text = j.dump(indent < 0 ? -1 : indent) + "\n";
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
    out << text;
  }
};

/// "2+1w", or the long form "d=1,n=2+1w" whose d must match.
QuadInt parse_level(FieldId f, const std::string& text) {
  std::string gen = text;
  if (text.find("n=") != std::string::npos) {
    std::stringstream in(text);
    std::string part;
    gen.clear();
    while (std::getline(in, part, ',')) {
      if (part.rfind("n=", 0) == 0) {
        gen = part.substr(2);
      } else if (part.rfind("d=", 0) == 0) {
        if (part.substr(2) != std::to_string(f.d()))
          throw std::invalid_argument("level '" + text + "' is for another field than --d " + std::to_string(f.d()));
      } else {
        throw std::invalid_argument("malformed level '" + text + "'");
      }
    }
  }
  QuadInt n = parse_quadint(f, gen);
  if (n.is_zero()) throw std::invalid_argument("the level must be nonzero");
  return n;
}

/// "0.1+0.2i", "-0.3i", "2", "1e-2-3i".
Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty complex number");
  auto number = [&](const std::string& part, bool imaginary) {
    if (imaginary && (part.empty() || part == "+")) return 1.0;
    if (imaginary && part == "-") return -1.0;
    std::size_t used = 0;
    double v = std::stod(part, &used);
    if (used != part.size()) throw std::invalid_argument("malformed complex number '" + text + "'");
    return v;
  };
  try {
    if (s.back() != 'i') return {number(s, false), 0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = 1; i < s.size(); ++i)
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
    if (split == std::string::npos) return {0, number(s, true)};
    return {number(s.substr(0, split), false), number(s.substr(split), true)};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed complex number '" + text + "'");
  }
}

Mat22 parse_matrix(FieldId f, const std::string& text) {
  std::vector<QuadInt> e;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) e.push_back(parse_quadint(f, part));
  if (e.size() != 4) throw std::invalid_argument("a matrix is given as \"a,b,c,d\"");
  return {e[0], e[1], e[2], e[3]};
}

ResidueConvention parse_convention(const std::string& text) {
  if (text == "division") return ResidueConvention::Division;
  if (text == "lexmax") return ResidueConvention::LexMax;
  throw std::invalid_argument("convention must be division or lexmax");
}

FourierTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  return fourier_table_from_json(json::parse(in));
}

json complex_json(const Complex& z) { return {z.real(), z.imag()}; }

std::vector<QuadInt> coprime_etas(const SymbolSpace& s, long bound) {
  std::vector<QuadInt> out;
  for (const QuadInt& e : checks::canonical_up_to(s.field(), 2, bound))
    if (coprime_to_level(s, e)) out.push_back(e);
  return out;
}

json eigen_json(const EigenTable& t) {
  json systems = json::array(), residual = json::array();
  for (const auto& s : t.systems) {
    json ev = json::array();
    for (const auto& [eta, lambda] : s.eigenvalues) ev.push_back({{"eta", format(eta)}, {"lambda", lambda.get_str()}});
    systems.push_back({{"label", s.label}, {"dim", s.space.dim()}, {"eigenvalues", ev}});
  }
  for (const auto& r : t.residual)
    residual.push_back({{"eta", format(r.eta)}, {"factor", poly_to_string(r.factor)}, {"dim", r.dim}});
  return {{"systems", systems}, {"residual", residual}};
}

// ---------------------------------------------------------------- commands

struct Common {
  int d = 1;
  std::string level = "1";
  int weight = 2;
};

json cmd_space(const Common& c) {
  FieldId f(c.d);
  Level level(parse_level(f, c.level));
  SymbolSpace s(level, c.weight);
  const auto& en = s.en();
  json gens = json::array();
  for (int g = 0; g < s.num_generators(); ++g) {
    ManinGen mg = s.generator(g);
    const EnPoint& p = en.point(mg.point);
    gens.push_back({{"u", format(en.ring().element(p.u))}, {"v", format(en.ring().element(p.v))}, {"monomial", mg.monomial}});
  }
  return {{"d", c.d},
          {"level", format(level.generator())},
          {"weight", c.weight},
          {"En", s.en().size()},
          {"generators", s.num_generators()},
          {"dim", s.dim()},
          {"cuspidal_dim", s.cuspidal_dim()},
          {"cusps", s.cusp_class_count()},
          {"basis_columns", s.basis_columns()},
          {"generator_list", gens},
          {"relation_matrix", to_json(s.relation_matrix())}};
}

json cmd_heilbronn(int d, const std::string& eta_text, const std::string& conv, bool verify, bool corrupt) {
  FieldId f(d);
  QuadInt eta = parse_quadint(f, eta_text);
  HeilbronnFamily fam = cached_family(eta, parse_convention(conv));
  if (corrupt && !fam.matrices.empty()) fam.matrices.back().m.b += QuadInt(f, 1);
  json out = to_json(fam);
  out["matrix_count"] = fam.matrices.size();
  out["class_count"] = fam.classes.size();
  if (!verify) return out;
  CDeltaCertificate cert = verify_C_Delta(fam);
  json failures = json::array();
  for (const auto& cls : cert.classes) {
    if (cls.ok) continue;
    json members = json::array(), chain = json::array();
    for (int i : cls.members) members.push_back(to_json(fam.matrices[i].m));
    for (const auto& [cusp, mult] : cls.chain) chain.push_back({format(cusp), mult});
    failures.push_back({{"class", members}, {"chain", chain}});
  }
  out["C_Delta"] = {{"ok", cert.ok}, {"failures", failures}};
  if (!cert.ok) throw VerificationFailure{out};
  return out;
}

json cmd_hecke(const Common& c, const std::vector<std::string>& etas, const std::vector<std::string>& others,
               bool oracle) {
  FieldId f(c.d);
  SymbolSpace s(Level(parse_level(f, c.level)), c.weight);
  json ops = json::array();
  bool ok = true;
  std::vector<HeckeOperator> partners;
  for (const std::string& text : others) partners.push_back(hecke_on_manin(s, parse_quadint(f, text)));
  std::vector<QuadInt> parsed;
  for (const std::string& text : etas) parsed.push_back(parse_quadint(f, text));
  for (const QuadInt& eta : parsed) {
    HeckeOperator op = hecke_on_manin(s, eta);
    json entry = {{"eta", format(eta)}, {"matrix", to_json(op.matrix)}, {"cuspidal_matrix", to_json(op.cuspidal_matrix)}};
    if (oracle) {
      bool equal = op.matrix == hecke_oracle(s, eta).matrix;
      entry["oracle_equal"] = equal;
      ok = ok && equal;
    }
    if (!partners.empty()) {
      json commutes = json::array();
      for (const HeckeOperator& other : partners) {
        CommuteCertificate cert = commute_check(op, other);
        commutes.push_back({{"eta", format(other.eta)}, {"full", cert.full}, {"cuspidal", cert.cuspidal}});
        ok = ok && cert.full && cert.cuspidal;
      }
      entry["commutes_with"] = commutes;
    }
    ops.push_back(entry);
  }
  json out = {{"d", c.d},
              {"level", format(s.level().generator())},
              {"weight", c.weight},
              {"dim", s.dim()},
              {"basis_columns", s.basis_columns()},
              {"operators", ops},
              {"eigenvalues", eigen_json(eigensystems(s, parsed))}};
  if (!ok) throw VerificationFailure{out};
  return out;
}

json cmd_eigen(const Common& c, long bound) {
  FieldId f(c.d);
  SymbolSpace s(Level(parse_level(f, c.level)), c.weight);
  json out = eigen_json(eigensystems(s, coprime_etas(s, bound)));
  out["d"] = c.d;
  out["level"] = format(s.level().generator());
  out["cuspidal_dim"] = s.cuspidal_dim();
  return out;
}

json cmd_fourier(const Common& c, long bound, long eigen_bound, const std::string& label, const std::string& method) {
  FieldId f(c.d);
  if (c.weight != 2) throw std::invalid_argument("Fourier tables are weight 2 only");
  SymbolSpace s(Level(parse_level(f, c.level)), 2);
  EigenTable t = eigensystems(s, coprime_etas(s, eigen_bound));
  const EigenSystem* sys = nullptr;
  for (const auto& x : t.systems)
    if (label.empty() || x.label == label) {
      sys = &x;
      break;
    }
  if (!sys) throw std::invalid_argument("no rational eigensystem" + (label.empty() ? "" : " labelled " + label));
  DualFunctional phi = eigen_functional(s, *sys);
  SeedElement x = find_seed(phi);
  FourierTable table;
  if (method == "direct")
    table = fourier_coefficients(phi, x, bound);
  else if (method == "multiplicative")
    table = multiplicative_coefficients(phi, x, bound);
  else
    throw std::invalid_argument("method must be direct or multiplicative");
  json out = to_json(table);
  out["system"] = sys->label;
  return out;
}

json cmd_eval(const std::string& path, const std::string& z, double t) {
  FourierTable table = read_table(path);
  SeriesValue v = eval_series(table, make_point(parse_complex(z), t));
  return {{"z", complex_json(parse_complex(z))},
          {"t", t},
          {"value", {complex_json(v.value[0]), complex_json(v.value[1]), complex_json(v.value[2])}},
          {"tail", v.tail},
          {"roundoff", v.roundoff}};
}

json cmd_verify_automorphy(const std::string& path, const std::string& gamma, const std::string& z, double t) {
  FourierTable table = read_table(path);
  Mat22 g = parse_matrix(table.field, gamma);
  AutomorphyCheck c = automorphy_residual(table, g, make_point(parse_complex(z), t));
  json out = {{"gamma", format(g)},
              {"t_image", c.image.t},
              {"residual", c.residual},
              {"budget", c.budget},
              {"ok", c.ok()}};
  if (!c.ok()) throw VerificationFailure{out};
  return out;
}

json cmd_verify(std::vector<int> fields, bool quick, bool corrupt) {
  if (fields.empty()) fields = {1};
  std::vector<checks::CheckResult> results;
  const long scale = quick ? 1 : 2;
  for (int d : fields) {
    FieldId f(d);
    results.push_back(checks::euclid(f, quick ? 500 : 2000, quick ? 50 : 200));
    results.push_back(checks::en_count(f, 10 * scale));
    results.push_back(checks::c_delta(f, 5 * scale, corrupt));
    results.push_back(checks::heilbronn_invariants(f, 5 * scale, 10 * scale));
    results.push_back(checks::hecke_oracle_equivalence(f, 3 * scale, 3 * scale));
    results.push_back(checks::commutativity(QuadInt(f, 3), quick ? 9 : 13));
    results.push_back(checks::exactness(f, 5 * scale));
    results.push_back(checks::boundary_agreement(f, 5 * scale, false));
  }
  results.push_back(checks::bessel());
  bool with_eleven = std::find(fields.begin(), fields.end(), 11) != fields.end();
  if (with_eleven && !quick) {
    SymbolSpace s(Level(QuadInt(FieldId(11), 1, -2)), 2);
    results.push_back(checks::coefficient_identity(s, 10, 1));
    EigenTable t = eigensystems(s, coprime_etas(s, 12));
    DualFunctional phi = eigen_functional(s, t.systems.at(0));
    SeedElement x = find_seed(phi);
    FourierTable table = fourier_coefficients(phi, x, 60);
    const FieldId f(11);
    const QuadInt n = s.level().generator(), one(f, 1);
    Mat22 g{one + QuadInt::omega(f) * n, QuadInt::omega(f), n, one};
    results.push_back(checks::automorphy(table, table, g, {{Complex(0.05, 0.1), 1.2}, {Complex(-0.2, 0.3), 0.9}}, 1e-6));
  }
  json list = json::array();
  bool ok = true;
  for (const auto& r : results) {
    list.push_back(checks::to_report(r));
    ok = ok && r.ok;
  }
  json out = {{"ok", ok}, {"quick", quick}, {"fields", fields}, {"checks", list}};
  if (!ok) throw VerificationFailure{out};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bianchi modular symbols: spaces, Heilbronn-Merel families, Hecke operators, Fourier tables"};
  app.require_subcommand(1);
  app.fallthrough();
  Output output;
  std::string cache;
  app.add_option("--json-indent", output.indent, "JSON indentation; negative for one line")->capture_default_str();
  app.add_option("--out", output.path, "write JSON here instead of stdout");
  app.add_option("--cache-dir", cache, "Heilbronn family cache (default: $BIANCHI_CACHE_DIR)");

  auto add_common = [](CLI::App* sub, Common& c, bool with_level) {
    sub->add_option("--d", c.d, "field Q(sqrt(-d)), d in {1,2,3,7,11}")->required();
    if (with_level) sub->add_option("--level", c.level, "level generator, e.g. \"2+1w\"")->required();
    sub->add_option("--weight", c.weight, "weight k >= 2")->capture_default_str();
  };

  Common space_args;
  auto* space = app.add_subcommand("space", "dimensions of M_k and S_k");
  add_common(space, space_args, true);

  int hb_d = 1;
  std::string hb_eta, hb_conv = "division";
  bool hb_verify = false, hb_corrupt = false;
  auto* heil = app.add_subcommand("heilbronn", "Heilbronn-Merel family X_eta");
  heil->add_option("--d", hb_d)->required();
  heil->add_option("--eta", hb_eta)->required();
  heil->add_option("--convention", hb_conv, "division or lexmax")->capture_default_str();
  heil->add_flag("--verify", hb_verify, "check condition C_Delta");
  heil->add_flag("--inject-corrupt", hb_corrupt, "test mode: corrupt one matrix before verifying");

  Common hecke_args;
  std::vector<std::string> hecke_etas;
  bool hecke_oracle_flag = false;
  auto* hecke = app.add_subcommand("hecke", "Hecke matrices T_eta");
  add_common(hecke, hecke_args, true);
  hecke->add_option("--eta", hecke_etas, "one or more eta coprime to the level")->required();
  std::vector<std::string> hecke_partners;
  hecke->add_flag("--oracle", hecke_oracle_flag, "compare with coset representatives");
  hecke->add_option("--commute-with", hecke_partners, "check commutation with these T_eta");

  Common eigen_args;
  long eigen_bound = 20;
  auto* eigen = app.add_subcommand("eigen", "rational eigensystems on S_k");
  add_common(eigen, eigen_args, true);
  eigen->add_option("--norm-bound", eigen_bound, "use T_eta for N(eta) up to this")->capture_default_str();

  Common fourier_args;
  long fourier_bound = 200, fourier_eigen_bound = 30;
  std::string fourier_system, fourier_method = "direct";
  auto* fourier = app.add_subcommand("fourier", "Fourier coefficient table of an eigenform");
  add_common(fourier, fourier_args, true);
  fourier->add_option("--norm-bound", fourier_bound)->capture_default_str();
  fourier->add_option("--eigen-bound", fourier_eigen_bound, "N(eta) bound for the eigensystem")->capture_default_str();
  fourier->add_option("--system", fourier_system, "eigensystem label (default: first)");
  fourier->add_option("--method", fourier_method, "direct or multiplicative")->capture_default_str();

  std::string eval_table, eval_z = "0";
  double eval_t = 1;
  auto* eval = app.add_subcommand("eval", "evaluate a table at (z, t)");
  eval->add_option("--table", eval_table)->required();
  eval->add_option("--z", eval_z)->capture_default_str();
  eval->add_option("--t", eval_t)->capture_default_str();

  std::vector<int> verify_fields;
  bool verify_quick = false, verify_corrupt = false;
  auto* verify = app.add_subcommand("verify", "verification suite");
  verify->add_option("--d", verify_fields, "fields to check (default 1)");
  verify->add_flag("--quick", verify_quick, "smaller ranges");
  verify->add_flag("--inject-corrupt", verify_corrupt, "test mode: corrupt one Heilbronn matrix");

  std::string va_table, va_gamma, va_z = "0";
  double va_t = 1;
  auto* va = app.add_subcommand("verify-automorphy", "automorphy residual of a table");
  va->add_option("--table", va_table)->required();
  va->add_option("--gamma", va_gamma, "\"a,b,c,d\" in Gamma_1(n)")->required();
  va->add_option("--z", va_z)->capture_default_str();
  va->add_option("--t", va_t)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }
  if (!cache.empty()) setenv("BIANCHI_CACHE_DIR", cache.c_str(), 1);

  try {
    json out;
    if (*space) out = cmd_space(space_args);
    else if (*heil) out = cmd_heilbronn(hb_d, hb_eta, hb_conv, hb_verify, hb_corrupt);
    else if (*hecke) out = cmd_hecke(hecke_args, hecke_etas, hecke_partners, hecke_oracle_flag);
    else if (*eigen) out = cmd_eigen(eigen_args, eigen_bound);
    else if (*fourier) out = cmd_fourier(fourier_args, fourier_bound, fourier_eigen_bound, fourier_system, fourier_method);
    else if (*eval) out = cmd_eval(eval_table, eval_z, eval_t);
    else if (*verify) out = cmd_verify(verify_fields, verify_quick, verify_corrupt);
    else if (*va) out = cmd_verify_automorphy(va_table, va_gamma, va_z, va_t);
    output.write(out);
    return 0;
  } catch (const VerificationFailure& v) {
    output.write(v.report);
    std::cerr << "bianchi: verification failed\n";
    return kVerifyFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bianchi: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::domain_error& e) {
    std::cerr << "bianchi: " << e.what() << "\n";
    return kBadInput;
  } catch (const json::exception& e) {
    std::cerr << "bianchi: bad JSON input: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "bianchi: internal error: " << e.what() << "\n";
    return kVerifyFailed;
  }
}
