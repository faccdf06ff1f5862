// Command line front end: compute self-closeness numbers of product spaces,
// verify emitted certificates, and run the brute-force ring laboratories.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "selfclose/selfclose.hpp"

namespace {

using namespace selfclose;

struct CommonOpts {
  std::string table_path;
  std::vector<std::string> atomic_decls;
  std::vector<std::string> no_retract_decls;
  bool json = false;
  bool pivot_search = false;
  bool require_exact = false;
  i64 max_order = 64;
};

SphereTable load_table(const std::string& flag_path) {
  if (!flag_path.empty()) return SphereTable::from_file(flag_path);
  if (const char* env = std::getenv("SELFCLOSE_SPHERE_TABLE"))
    if (*env) return SphereTable::from_file(env);
  return SphereTable::builtin();
}

Declarations parse_declarations(const CommonOpts& opts) {
  Declarations decls;
  for (const auto& spec : opts.atomic_decls) {
    auto c1 = spec.find(':');
    auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      fail("--declare-atomic expects name:dim:module, got '" + spec + "'");
    std::string name = spec.substr(0, c1);
    std::string dim_text = spec.substr(c1 + 1, c2 - c1 - 1);
    int dim = 0;
    try {
      size_t used = 0;
      dim = std::stoi(dim_text, &used);
      if (used != dim_text.size()) throw std::invalid_argument(dim_text);
    } catch (const std::exception&) {
      fail("--declare-atomic: bad dimension '" + dim_text + "'");
    }
    decls.declare_atomic(name, dim, parse_group(spec.substr(c2 + 1)));
  }
  for (const auto& spec : opts.no_retract_decls) {
    auto comma = spec.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == spec.size())
      fail("--no-retract expects a,b, got '" + spec + "'");
    decls.declare_no_retract(spec.substr(0, comma), spec.substr(comma + 1));
  }
  return decls;
}

std::string trim_dump(const json& data) {
  if (data.is_null()) return "";
  std::string d = data.dump();
  if (d.size() > 96) d = d.substr(0, 93) + "...";
  return " " + d;
}

void print_certificate(const Certificate& c, int depth) {
  std::string pad(2 * depth, ' ');
  std::cout << pad << c.rule_id << " (level " << c.level << ", " << c.anchor << ")\n";
  std::cout << pad << "  conclusion: " << c.conclusion << "\n";
  for (const auto& p : c.premises) {
    std::cout << pad << "  - " << p.fact << trim_dump(p.data) << "\n";
    for (const auto& sub : p.sub) print_certificate(sub, depth + 2);
  }
}

int run_ne(const CommonOpts& opts, const std::string& expr) {
  Declarations decls = parse_declarations(opts);
  Catalog cat{load_table(opts.table_path), decls, {}};
  if (opts.max_order > cat.bounds.hom_cap) cat.bounds.hom_cap = opts.max_order;
  std::vector<Factor> factors = parse_product(expr, decls);
  EngineOptions eopts;
  eopts.pivot_search = opts.pivot_search;
  EngineResult r = compute_ne(cat, factors, eopts);
  if (opts.json) {
    std::cout << envelope_to_json(expr, decls, r).dump(2) << "\n";
  } else {
    std::cout << "expression: " << product_to_string(factors) << "\n";
    std::cout << "status: " << to_string(r.status) << "\n";
    std::cout << "value: " << r.value << "\n";
    if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
    if (r.certificate) {
      std::cout << "certificate:\n";
      print_certificate(*r.certificate, 1);
    }
  }
  if (opts.require_exact && r.status != NeStatus::exact) return 2;
  return 0;
}

int run_verify(const CommonOpts& opts, const std::string& path) {
  std::string text;
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  Envelope env = envelope_from_json(json::parse(text));
  Catalog cat{load_table(opts.table_path), env.decls, {}};
  if (opts.max_order > cat.bounds.hom_cap) cat.bounds.hom_cap = opts.max_order;
  std::vector<Factor> factors = parse_product(env.expression, env.decls);
  VerifyOutcome out = verify_result(cat, factors, env.status, env.value,
                                    env.certificate ? &*env.certificate : nullptr);
  if (!out.ok) {
    std::cout << "verification failed: " << out.error << "\n";
    return 3;
  }
  std::cout << "verified: " << env.expression << " " << to_string(env.status) << " "
            << env.value << "\n";
  return 0;
}

int finish_lab(const LabReport& rep, bool as_json) {
  if (as_json) {
    json counts = json::object();
    for (const auto& [k, v] : rep.counts) counts[k] = v;
    json out{{"lab", rep.name}, {"ok", rep.ok}, {"counts", counts}};
    if (!rep.detail.empty()) out["detail"] = rep.detail;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << lab_to_string(rep) << "\n";
  }
  return rep.ok ? 0 : 3;
}

int run_lab(const CommonOpts& opts, const std::string& which,
            const std::vector<std::string>& group_args) {
  RingBounds bounds;
  bounds.group_bound = opts.max_order;
  std::vector<FgAbGroup> groups;
  for (const auto& g : group_args) groups.push_back(parse_group(g));
  if (which == "qr") {
    EndRing ring = enumerate_end(groups.at(0), bounds);
    return finish_lab(check_quasi_regular_and_nc(ring), opts.json);
  }
  if (which == "nj")
    return finish_lab(check_nj_equivalence(groups.at(0), bounds), opts.json);
  if (which == "bcm")
    return finish_lab(check_bcm(groups.at(0), groups.at(1), opts.max_order), opts.json);
  return finish_lab(check_lu(groups, opts.max_order), opts.json);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-closeness numbers of finite products of catalogued spaces"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", opts.json, "emit machine-readable JSON");
    sub->add_option("--table", opts.table_path,
                    "sphere table file (overrides SELFCLOSE_SPHERE_TABLE)");
    sub->add_option("--max-order", opts.max_order,
                    "group order bound for brute-force enumeration");
  };

  std::string expr;
  CLI::App* ne = app.add_subcommand("ne", "compute the self-closeness number");
  ne->add_option("expression", expr, "product expression, e.g. \"S^2 x S^5\"")
      ->required();
  add_common(ne);
  ne->add_flag("--pivot-search", opts.pivot_search,
               "also try grouped pivots when splitting");
  ne->add_flag("--require-exact", opts.require_exact,
               "exit with status 2 unless the result is exact");
  ne->add_option("--declare-atomic", opts.atomic_decls,
                 "declare an atomic factor as name:dim:module (repeatable)");
  ne->add_option("--no-retract", opts.no_retract_decls,
                 "declare a non-retraction pair as a,b (repeatable)");

  std::string cert_path;
  CLI::App* verify = app.add_subcommand("verify", "check a result envelope");
  verify->add_option("certificate", cert_path, "envelope file, or - for stdin")
      ->required();
  add_common(verify);

  CLI::App* lab = app.add_subcommand("lab", "brute-force endomorphism ring checks");
  lab->require_subcommand(1);
  std::vector<std::string> lab_groups;
  std::string lab_kind;
  for (const auto& [name, help, min_args, max_args] :
       {std::tuple<const char*, const char*, int, int>{
            "qr", "quasi-regularity and nilpotent/unit commutation", 1, 1},
        {"nj", "radical criterion against the enumerated radical", 1, 1},
        {"bcm", "block-diagonal behaviour of automorphisms of a sum", 2, 2},
        {"lu", "triangular factorization of reducible automorphisms", 2, -1}}) {
    CLI::App* sub = lab->add_subcommand(name, help);
    sub->add_option("group", lab_groups, "group literal, e.g. Z/2+Z/4")
        ->required()
        ->expected(min_args, max_args);
    add_common(sub);
    sub->callback([&lab_kind, name = std::string(name)] { lab_kind = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ne->parsed()) return run_ne(opts, expr);
    if (verify->parsed()) return run_verify(opts, cert_path);
    return run_lab(opts, lab_kind, lab_groups);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
