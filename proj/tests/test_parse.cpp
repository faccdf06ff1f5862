#include "test_support.hpp"

using namespace ts;

TEST_CASE("products of catalogued spaces") {
  auto fs = parse_product("S^2 x S^5");
  REQUIRE(fs.size() == 2);
  CHECK(fs[0] == F("S^2"));
  CHECK(fs[1] == F("S^5"));

  fs = parse_product("K(Z+Z/6, 4) x M(Z/2, 2)");
  REQUIRE(fs.size() == 2);
  CHECK(fs[0].space.kind == SpaceKind::eilenberg_maclane);
  CHECK(fs[0].space.group == G("Z+Z/6"));
  CHECK(fs[0].space.dim == 4);
  CHECK(fs[1].space.kind == SpaceKind::moore);
  CHECK(fs[1].space.group == G("Z/2"));

  // whitespace is insignificant inside factors
  CHECK(parse_product(" K( Z + Z/6 ,4)  x  M(Z/2,2) ") == fs);
  CHECK(parse_product("RP^3 x CP^2 x HP^4 x L(7,11)").size() == 4);
}

TEST_CASE("the separator must stand alone") {
  // an unspaced x glues onto the neighboring factor and fails there
  CHECK_THROWS_AS(parse_product("S^2xS^5"), ParseError);
  try {
    parse_product("S^2xS^5");
  } catch (const ParseError& e) {
    CHECK(e.pos == 3);  // the glued-on x, not the start of the factor
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_product("K(Z/2,3)x K(Z,5)"), ParseError);
  CHECK_THROWS_AS(parse_product("S^2 x x S^5"), ParseError);
  CHECK_THROWS_AS(parse_product("x S^2"), ParseError);
  CHECK_THROWS_AS(parse_product("S^2 x"), ParseError);
  CHECK_THROWS_AS(parse_product(""), ParseError);
}

TEST_CASE("domain errors carry positions") {
  auto pos_of = [](const std::string& text) -> size_t {
    try {
      parse_product(text);
    } catch (const ParseError& e) {
      return e.pos;
    }
    FAIL("expected a parse error for " + text);
    return size_t(-1);
  };
  CHECK_THROWS_AS(parse_product("L(4,3)"), ParseError);   // even total dimension
  CHECK_THROWS_AS(parse_product("L(5,6)"), ParseError);   // composite order
  CHECK_THROWS_AS(parse_product("L(1,3)"), ParseError);   // too low
  CHECK_THROWS_AS(parse_product("RP^1"), ParseError);
  CHECK_THROWS_AS(parse_product("S^0"), ParseError);
  CHECK_THROWS_AS(parse_product("M(0,3)"), ParseError);   // trivial homology
  CHECK_THROWS_AS(parse_product("M(Z/2,1)"), ParseError);
  CHECK_THROWS_AS(parse_product("K(Z/5,0)"), ParseError);
  CHECK_THROWS_AS(parse_product("T^2"), ParseError);
  CHECK(pos_of("S^2 x L(4,3)") == 6);
  CHECK(pos_of("S^2 x T^2") == 6);
}

TEST_CASE("structural errors") {
  CHECK_THROWS_AS(parse_product("K(Z/2,3"), ParseError);    // unbalanced open
  CHECK_THROWS_AS(parse_product("K(Z/2,3))"), ParseError);  // unbalanced close
  CHECK_THROWS_AS(parse_product("S^2 x  x S^3"), ParseError);
  CHECK_THROWS_AS(parse_product("M(Z/2)"), ParseError);     // missing degree
  CHECK_THROWS_AS(parse_product("S^"), ParseError);
  CHECK_THROWS_AS(parse_product("S^2b"), ParseError);
  CHECK_THROWS_AS(parse_product("atomic:ghost"), ParseError);  // undeclared
}

TEST_CASE("printing and reparsing is stable") {
  Declarations decls;
  decls.declare_atomic("w", 6, G("Z/8"));
  for (const char* expr :
       {"S^2 x S^5 x S^7", "K(Z+Z/6,4) x M(Z/2,2)", "L(5,3) x L(7,5)",
        "RP^2 x CP^3 x HP^2", "atomic:w x S^3"}) {
    auto fs = parse_product(expr, decls);
    CHECK(parse_product(product_to_string(fs), decls) == fs);
  }
}
