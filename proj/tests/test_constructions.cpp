#include "doctest.h"
#include "oracles.hpp"
#include "popproto/analysis.hpp"
#include "popproto/compile.hpp"
#include "popproto/constructions.hpp"
#include "popproto/sim.hpp"

using namespace popproto;

TEST_SUITE("constructions") {

TEST_CASE("bit helpers") {
  CHECK(size_of(0) == 0);
  CHECK(size_of(1) == 1);
  CHECK(size_of(13) == 4);
  CHECK(size_of(16) == 5);
  CHECK(bits_of(13) == std::vector<unsigned>{0, 2, 3});
  CHECK(bits_of(0).empty());
}

TEST_CASE("standard flock") {
  const Protocol p = flock_standard(3);
  CHECK(p.num_states() == 4);
  CHECK(p.max_arity() == 2);
  CHECK(p.initial() == std::vector<StateId>{p.id("1")});
  CHECK_THROWS_AS(flock_standard(0), InvalidInput);
}

TEST_CASE("binary flock state sets") {
  auto names = [](std::uint64_t n) { return flock_binary(n).names(); };
  CHECK(names(13) == std::vector<std::string>{"0", "1", "13", "16", "2", "4", "8"});
  CHECK(names(8) == std::vector<std::string>{"0", "1", "2", "4", "8"});
  CHECK(names(1) == std::vector<std::string>{"1"});
  CHECK(flock_binary(1).transitions().empty());
  CHECK(flock_binary(13).max_arity() == 3);
  CHECK(flock_binary(8).max_arity() == 2);
  CHECK(flock_binary(13).meta().at("certificate").at("states_bound") == 19);
}

TEST_CASE("binary flock lowered sizes stay within the bound") {
  for (std::uint64_t n = 1; n <= 300; ++n) {
    const Protocol p = flock_binary(n);
    const std::size_t lowered = lowered_state_count(p);
    CHECK(lowered == flock_binary_lowered_states(n));
    CHECK(lowered <= flock_binary_bound(n));
    if (n <= 40) CHECK(to_2way(p).num_states() == lowered);
  }
  CHECK(flock_binary_lowered_states(13) == 10);
  CHECK(flock_binary_bound(13) == 19);
}

TEST_CASE("binary flock computes x >= n") {
  for (std::uint64_t n : {1, 2, 3, 4, 5, 6, 7}) {
    const Protocol p = flock_binary(n);
    for (Count x = 1; x <= n + 2; ++x) {
      const int want = x >= n ? 1 : 0;
      CHECK(oracle::decide(p, oracle::initial(p, {{"1", static_cast<long>(x)}})) == want);
    }
  }
}

TEST_CASE("binary flock value is conserved until n appears") {
  const Protocol p = flock_binary(11);
  CounterRng rng(3);
  Multiset c = p.initial_configuration(NamedInput{{"1", 9}});
  for (int i = 0; i < 2000; ++i) {
    c = step_random(p, c, rng).configuration;
    CHECK(flock_value(p, c) == 9);
  }
}

TEST_CASE("majority with leaders") {
  const Protocol p = majority_leaders(3);
  CHECK(p.leaders() == p.configuration({{"y", 3}}));
  for (long x = 0; x <= 6; ++x) {
    CHECK(oracle::decide(p, oracle::initial(p, {{"x", x}})) == (x >= 3 ? 1 : 0));
  }
}

TEST_CASE("representations") {
  CHECK(rep_single(5, 3) == NamedInput{{"p0", 1}, {"p2", 1}});
  CHECK(rep_single(-6, 3) == NamedInput{{"m1", 1}, {"m2", 1}});
  CHECK(rep_single(0, 3) == NamedInput{{"z-", 1}});
  CHECK_THROWS_AS(rep_single(8, 3), InvalidInput);
  CHECK(rep_row(3, 2, 4) == NamedInput{{"p0.2.0", 1}, {"p1.2.0", 1}});
  CHECK(rep_row(-4, 1, 4) == NamedInput{{"m2.1", 1}});
  CHECK(rep_row(0, 1, 4) == NamedInput{{"z0", 1}});
}

TEST_CASE("linear inequality") {
  const Protocol p = linear_inequality({2, -3}, 1);
  CHECK(linear_exponent({2, -3}, 1) == 2);
  CHECK(p.leaders().size() == 11);
  CHECK(p.meta().at("variables") == nlohmann::json{{"x1", "x1"}, {"x2", "x2"}});

  SUBCASE("x > y on a grid, frozen from the oracle") {
    const Protocol q = linear_inequality({1, -1}, 0);
    for (long x = 0; x <= 3; ++x) {
      for (long y = 0; y <= 3; ++y) {
        CHECK(oracle::decide(q, oracle::initial(q, {{"x1", x}, {"x2", y}})) == (x > y ? 1 : 0));
      }
    }
  }
  SUBCASE("value and agents are conserved") {
    const RowValuation val(p);
    CounterRng rng(11);
    Multiset c = p.initial_configuration(NamedInput{{"x1", 3}, {"x2", 2}});
    const auto v0 = val.value(0, c);
    CHECK(v0 == 2 * 3 - 3 * 2 + 1);
    for (int i = 0; i < 3000; ++i) {
      const Count before = val.variable_agents(c);
      c = step_random(p, c, rng).configuration;
      CHECK(val.value(0, c) == v0);
      CHECK(val.variable_agents(c) <= before);
    }
  }
  CHECK_THROWS_AS(linear_inequality({}, 0), InvalidInput);
  CHECK_THROWS_AS(linear_inequality({std::int64_t{1} << 41}, 0), InvalidInput);
}

TEST_CASE("linear systems") {
  const LinearSystemParams one{{{2, -3}}, {1}};
  CHECK(one.b_max() == 3);
  CHECK(one.exponent() == 1 + 2);
  const LinearSystemParams id{{{1, 0}, {0, 1}}, {0, 0}};
  CHECK(id.exponent() == 3 + 1);

  const Protocol p = linear_system(id);
  CHECK(p.max_arity() == 3);
  CHECK(p.leaders().size() == 5 * 2 * 4 + 1 + 2);
  const auto& cert = p.meta().at("certificate");
  CHECK(cert.at("states").get<std::size_t>() <= cert.at("states_bound").get<std::size_t>());
  CHECK(cert.at("leaders").get<std::size_t>() <= cert.at("leaders_bound").get<std::size_t>());

  SUBCASE("row values are conserved") {
    const RowValuation val(p);
    REQUIRE(val.rows() == 2);
    CounterRng rng(5);
    Multiset c = p.initial_configuration(NamedInput{{"x1", 2}, {"x2", 1}});
    CHECK(val.value(0, c) == 2);
    CHECK(val.value(1, c) == 1);
    for (int i = 0; i < 3000; ++i) {
      c = step_random(p, c, rng).configuration;
      CHECK(val.value(0, c) == 2);
      CHECK(val.value(1, c) == 1);
    }
  }
  CHECK_THROWS_AS(linear_system({{}, {}}), InvalidInput);
  CHECK_THROWS_AS(linear_system({{{1, 2}, {3}}, {0, 0}}), InvalidInput);
}

TEST_CASE("size bounds over a parameter sweep") {
  for (std::size_t m = 1; m <= 3; ++m) {
    for (std::size_t k = 1; k <= 3; ++k) {
      for (std::int64_t b : {1, 2, 7}) {
        LinearSystemParams sys;
        sys.A.assign(m, std::vector<std::int64_t>(k, b));
        sys.c.assign(m, -b);
        const Protocol p = linear_system(sys);
        CHECK(p.num_states() <= linear_system_state_bound(sys));
        CHECK(p.leaders().size() <= linear_system_leader_bound(sys));
      }
    }
  }
}

}  // TEST_SUITE
