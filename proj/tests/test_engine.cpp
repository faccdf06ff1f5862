#include "test_support.hpp"

using namespace ts;

namespace {

EngineResult run(const std::string& expr, const Declarations& decls = {},
                 bool pivot_search = false) {
  Catalog c{SphereTable::builtin(), decls, {}};
  EngineOptions opts;
  opts.pivot_search = pivot_search;
  return compute_ne(c, parse_product(expr, decls), opts);
}

// rule id of the splitting certificate hanging off the product wrapper
std::string split_rule(const EngineResult& r) {
  REQUIRE(r.certificate);
  REQUIRE(r.certificate->rule_id == "R-PRODUCT");
  const Premise& p = r.certificate->premises.back();
  REQUIRE(p.fact == "reducible-at-level");
  REQUIRE(p.sub.size() == 1);
  return p.sub[0].rule_id;
}

VerifyOutcome verify_expr(const std::string& expr, const EngineResult& r,
                          const Declarations& decls = {}) {
  Catalog c{SphereTable::builtin(), decls, {}};
  return verify_result(c, parse_product(expr, decls), r.status, r.value,
                       r.certificate ? &*r.certificate : nullptr);
}

json envelope_of(const std::string& expr, const Declarations& decls = {}) {
  return envelope_to_json(expr, decls, run(expr, decls));
}

VerifyOutcome verify_envelope(const json& j) {
  Envelope e = envelope_from_json(j);
  Catalog c{SphereTable::builtin(), e.decls, {}};
  return verify_result(c, parse_product(e.expression, e.decls), e.status, e.value,
                       e.certificate ? &*e.certificate : nullptr);
}

void expect_exact(const std::string& expr, int value, const std::string& rule) {
  EngineResult r = run(expr);
  INFO(expr);
  CHECK(r.status == NeStatus::exact);
  CHECK(r.value == value);
  CHECK(split_rule(r) == rule);
  VerifyOutcome v = verify_expr(expr, r);
  INFO(v.error);
  CHECK(v.ok);
}

}  // namespace

TEST_CASE("products splitting by eliminating factors in turn") {
  expect_exact("S^2 x S^5 x S^7", 7, "R1");
  expect_exact("L(5,3) x L(7,5)", 7, "R1");
  expect_exact("S^1 x S^4", 4, "R1");
}

TEST_CASE("single-homotopy factors merge by degree") {
  expect_exact("K(Z/2,3) x K(Z/3,3) x K(Z,5)", 5, "R-EM-MERGE");
  expect_exact("K(Z/5,3) x K(Z/5,3)", 3, "R-EM-MERGE");
}

TEST_CASE("projective pairs") {
  expect_exact("CP^2 x CP^3", 2, "R-PROJ");
  expect_exact("HP^2 x HP^3", 4, "R-PROJ");
  expect_exact("RP^2 x RP^5", 5, "R-PROJ");
}

TEST_CASE("lens pairs sharing a fundamental group prime") {
  expect_exact("L(3,3) x L(5,3)", 5, "R-LENS");
}

TEST_CASE("single-homology pivot with recursion") {
  expect_exact("M(Z/2,2) x M(Z,4) x M(Z/12,7)", 7, "R-MOORE");
}

TEST_CASE("coprime homotopy in every degree") {
  expect_exact("M(Z/4,2) x K(Z/2,2)", 2, "R2");
}

TEST_CASE("pivot rule with a ring condition") {
  EngineResult r = run("K(Z/9,5) x K(Z/3+Z/27,5) x S^2");
  CHECK(r.status == NeStatus::exact);
  CHECK(r.value == 5);
  CHECK(split_rule(r) == "R3");
  const Certificate& c = r.certificate->premises.back().sub[0];
  const Premise* pivot = nullptr;
  for (const auto& p : c.premises)
    if (p.fact == "pivot-self-closeness") pivot = &p;
  REQUIRE(pivot);
  CHECK(pivot->data.at("indices") == json::array({2}));  // the sphere leads
  bool used_subgroup = false;
  for (const auto& p : c.premises)
    if (p.fact == "ring-condition" && p.data.at("option") == "subgroup")
      used_subgroup = true;
  CHECK(used_subgroup);
  CHECK(verify_expr("K(Z/9,5) x K(Z/3+Z/27,5) x S^2", r).ok);

  EngineResult grouped = run("K(Z/9,5) x K(Z/3+Z/27,5) x S^2", {}, true);
  CHECK(grouped.status == NeStatus::exact);
  CHECK(grouped.value == 5);
  CHECK(verify_expr("K(Z/9,5) x K(Z/3+Z/27,5) x S^2", grouped).ok);
}

TEST_CASE("declared atomic factors") {
  Declarations decls;
  decls.declare_atomic("a", 3, G("Z/8"));
  decls.declare_atomic("b", 5, G("Z/27"));
  decls.declare_no_retract("a", "b");
  EngineResult r = run("atomic:a x atomic:b", decls);
  CHECK(r.status == NeStatus::exact);
  CHECK(r.value == 5);
  CHECK(split_rule(r) == "R-ATOMIC");
  CHECK(verify_expr("atomic:a x atomic:b", r, decls).ok);

  // without the declared pair the rule must not fire
  Declarations bare;
  bare.declare_atomic("a", 3, G("Z/8"));
  bare.declare_atomic("b", 5, G("Z/27"));
  EngineResult stuck = run("atomic:a x atomic:b", bare);
  CHECK(stuck.status == NeStatus::lower_bound);
}

TEST_CASE("honest lower bounds") {
  for (const char* expr : {"S^2 x S^2", "S^3 x K(Z,3)", "S^4 x S^4"}) {
    EngineResult r = run(expr);
    INFO(expr);
    CHECK(r.status == NeStatus::lower_bound);
    CHECK_FALSE(r.certificate);
    CHECK(r.note.find("no splitting rule") != std::string::npos);
    CHECK(verify_expr(expr, r).ok);
  }
  CHECK(run("S^2 x S^2").value == 2);
  CHECK(run("S^3 x K(Z,3)").value == 3);
}

TEST_CASE("single factors") {
  EngineResult r = run("HP^3");
  CHECK(r.status == NeStatus::exact);
  CHECK(r.value == 4);
  REQUIRE(r.certificate);
  CHECK(r.certificate->rule_id == "R-SINGLE");
  CHECK(verify_expr("HP^3", r).ok);
}

TEST_CASE("status and value are permutation invariant") {
  auto base = run("S^2 x S^5 x S^7");
  for (const char* p : {"S^5 x S^2 x S^7", "S^7 x S^5 x S^2", "S^5 x S^7 x S^2"}) {
    auto r = run(p);
    CHECK(r.status == base.status);
    CHECK(r.value == base.value);
    CHECK(verify_expr(p, r).ok);
  }
  auto mixed = run("M(Z/12,7) x M(Z/2,2) x M(Z,4)");
  CHECK(mixed.status == NeStatus::exact);
  CHECK(mixed.value == 7);
  CHECK(verify_expr("M(Z/12,7) x M(Z/2,2) x M(Z,4)", mixed).ok);
}

TEST_CASE("adding an eliminable factor preserves splitting") {
  // monotonicity of the elimination rule: S^7 dominates the extra S^5
  CHECK(run("S^2 x S^7").status == NeStatus::exact);
  CHECK(run("S^2 x S^5 x S^7").status == NeStatus::exact);
  CHECK(run("L(5,3) x L(7,5)").status == NeStatus::exact);
  CHECK(run("S^1 x L(5,3) x L(7,5)").status == NeStatus::exact);
}

TEST_CASE("certificates survive the JSON round trip") {
  for (const char* expr :
       {"S^2 x S^5 x S^7", "K(Z/2,3) x K(Z/3,3) x K(Z,5)", "CP^2 x CP^3",
        "M(Z/2,2) x M(Z,4) x M(Z/12,7)", "K(Z/9,5) x K(Z/3+Z/27,5) x S^2", "HP^3"}) {
    EngineResult r = run(expr);
    REQUIRE(r.certificate);
    json j;
    to_json(j, *r.certificate);
    Certificate back = certificate_from_json(j);
    json j2;
    to_json(j2, back);
    CHECK(j == j2);
  }
  json env = envelope_of("S^2 x S^5 x S^7");
  Envelope e = envelope_from_json(env);
  CHECK(e.expression == "S^2 x S^5 x S^7");
  CHECK(e.status == NeStatus::exact);
  CHECK(e.value == 7);
  REQUIRE(e.certificate);
  CHECK(verify_envelope(env).ok);

  // plain-string conclusions are accepted on input
  json alt = env;
  alt["certificate"]["conclusion"] = "the product's self-closeness equals the level";
  CHECK(verify_envelope(alt).ok);
}

TEST_CASE("tampered certificates are rejected with a named premise") {
  json good = envelope_of("S^2 x S^5 x S^7");
  REQUIRE(verify_envelope(good).ok);

  SECTION("wrong value") {
    json bad = good;
    bad["value"] = 8;
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
    CHECK(v.error.find("value") != std::string::npos);
  }
  SECTION("lower bound carrying a certificate") {
    json bad = good;
    bad["status"] = "LOWER_BOUND";
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
    CHECK(v.error.find("certificate") != std::string::npos);
  }
  SECTION("exact without a certificate") {
    json bad = good;
    bad["certificate"] = nullptr;
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
  }
  SECTION("certificate level mismatch") {
    json bad = good;
    bad["certificate"]["level"] = 6;
    CHECK_FALSE(verify_envelope(bad).ok);
  }
  SECTION("forged splitting rule id") {
    json bad = good;
    bad["certificate"]["premises"][4]["sub"][0]["rule_id"] = "R2";
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
  }
  SECTION("forged elimination reason") {
    json bad = good;
    auto& reasons =
        bad["certificate"]["premises"][4]["sub"][0]["premises"][0]["data"]
           ["targets"][0]["reasons"];
    reasons[1]["reason"] = "zero-source";
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
    CHECK(v.error.find("does not re-derive") != std::string::npos);
  }
  SECTION("dropped premise") {
    json bad = good;
    auto& prems = bad["certificate"]["premises"][4]["sub"][0]["premises"];
    prems.erase(prems.size() - 1);
    CHECK_FALSE(verify_envelope(bad).ok);
  }
  SECTION("out-of-range pivot index") {
    json r3 = envelope_of("K(Z/9,5) x K(Z/3+Z/27,5) x S^2");
    REQUIRE(verify_envelope(r3).ok);
    json bad = r3;
    for (auto& p : bad["certificate"]["premises"][4]["sub"][0]["premises"])
      if (p["fact"] == "pivot-self-closeness") p["data"]["indices"] = {9};
    VerifyOutcome v = verify_envelope(bad);
    CHECK_FALSE(v.ok);
    CHECK(v.error.find("pivot") != std::string::npos);
  }
}

TEST_CASE("truncation rule certificates verify") {
  // the degree-compatible splitting rules fire first, so exercise the
  // truncation rule and its verifier directly
  Catalog c = cat();
  auto factors = parse_product("K(Z/4,3) x K(Z/2,2)");
  auto cert = rule_em_truncation(c, factors, 3);
  REQUIRE(cert);
  CHECK(cert->rule_id == "R-EM-TRUNC");

  Certificate top;
  top.rule_id = "R-PRODUCT";
  top.level = 3;
  top.anchor = "reducible-at-max-level";
  for (size_t i = 0; i < factors.size(); ++i)
    top.premises.push_back({"factor-self-closeness", "catalogued-value",
                            json{{"factor", space_to_string(factors[i])},
                                 {"index", i},
                                 {"value", self_closeness(factors[i])}},
                            {}});
  top.premises.push_back(
      {"max-lower-bound", "diagonal-self-maps", json{{"value", 3}}, {}});
  top.premises.push_back(
      {"reducible-at-level", "componentwise-splitting", json::object(), {*cert}});
  top.conclusion = "the product's self-closeness equals the level";
  VerifyOutcome v = verify_result(c, factors, NeStatus::exact, 3, &top);
  INFO(v.error);
  CHECK(v.ok);
}

TEST_CASE("product-level triviality and distance helpers") {
  Catalog c = cat();
  std::vector<Factor> spheres = {F("S^5"), F("S^7")};
  std::vector<Factor> low = {F("S^2")};
  CHECK(product_maps_trivial(c, low, spheres, 2) == "zero-target");
  CHECK(product_maps_trivial(c, spheres, low, 2) == "zero-source");
  CHECK(product_maps_trivial(c, low, spheres, 5) == "hom-vanishing");
  CHECK(product_maps_trivial(c, low, spheres, 6) == "factorwise-vanishing");
  CHECK_FALSE(product_maps_trivial(c, low, low, 2));

  std::vector<Factor> moore = {F("M(Z/2,2)"), F("M(Z,4)")};
  std::vector<Factor> top = {F("M(Z/12,7)")};
  CHECK(product_distance_at(c, top, moore, 7) == "factorwise-vanishing");
  CHECK(product_distance_at(c, {F("K(Z/2,3)")}, {F("K(Z/4,3)")}, 3) ==
        "nilpotent-composites");
  CHECK_FALSE(product_distance_at(c, low, low, 2));
}
