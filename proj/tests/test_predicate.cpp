#include "doctest.h"
#include "popproto/predicate.hpp"

using namespace popproto;

TEST_SUITE("predicate") {

TEST_CASE("parsing and evaluation") {
  const auto p = Predicate::parse("2*x - 3*y + 1 > 0");
  REQUIRE(p.atoms().size() == 1);
  CHECK(p.atoms()[0].coeffs.at("x") == 2);
  CHECK(p.atoms()[0].coeffs.at("y") == -3);
  CHECK(p.atoms()[0].constant == 1);
  CHECK(p({{"x", 1}, {"y", 1}}) == false);
  CHECK(p({{"x", 2}, {"y", 1}}) == true);
  CHECK(p({{"x", 1}}) == true);
  CHECK(p.variables() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("conjunctions and comparisons") {
  for (const char* text : {"x >= 1 && y <= 2", "x>=1 and y<=2", "x >= 1 ∧ y <= 2"}) {
    const auto p = Predicate::parse(text);
    CHECK(p.atoms().size() == 2);
    CHECK(p({{"x", 1}, {"y", 2}}));
    CHECK_FALSE(p({{"x", 0}, {"y", 2}}));
    CHECK_FALSE(p({{"x", 1}, {"y", 3}}));
  }
  CHECK(Predicate::parse("x == 3")({{"x", 3}}));
  CHECK_FALSE(Predicate::parse("x < 3")({{"x", 3}}));
  CHECK(Predicate::parse("x1 >= x2")({{"x1", 2}, {"x2", 2}}));
  CHECK(Predicate::parse("3 <= x")({{"x", 3}}));
}

TEST_CASE("syntax errors") {
  for (const char* bad : {"", "x >", "x >= 1 &&", "x = 1", "2 * * x > 0", "x >= 1 || y >= 1"}) {
    CHECK_THROWS_AS(Predicate::parse(bad), InvalidInput);
  }
}

TEST_CASE("input ranges") {
  const auto r = parse_ranges("x=1..2,y=0..1");
  REQUIRE(r.size() == 2);
  const auto in = enumerate_inputs(r);
  REQUIRE(in.size() == 4);
  CHECK(in[0] == std::map<std::string, Count>{{"x", 1}, {"y", 0}});
  CHECK(in[1] == std::map<std::string, Count>{{"x", 1}, {"y", 1}});
  CHECK(in[3] == std::map<std::string, Count>{{"x", 2}, {"y", 1}});
  CHECK(enumerate_inputs(parse_ranges("x=4")).size() == 1);
  CHECK_THROWS_AS(parse_ranges("x=5..1"), InvalidInput);
  CHECK_THROWS_AS(parse_ranges("x=a..3"), InvalidInput);
  CHECK(parse_assignment("x=3,y=1") == std::map<std::string, Count>{{"x", 3}, {"y", 1}});
  CHECK_THROWS_AS(parse_assignment("x"), InvalidInput);
}

}  // TEST_SUITE
