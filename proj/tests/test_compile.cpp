#include "doctest.h"
#include "oracles.hpp"
#include "popproto/analysis.hpp"
#include "popproto/compile.hpp"
#include "popproto/constructions.hpp"

using namespace popproto;

namespace {

Protocol three_way_swap() {
  ProtocolBuilder b;
  b.state("a", 0).state("b", 1).initial("a");
  b.transition({"a", "a", "a"}, {"b", "b", "b"});
  return b.build();
}

}  // namespace

TEST_SUITE("compile") {

TEST_CASE("gadget shape") {
  const Protocol p = three_way_swap();
  const Protocol p2 = to_2way(p);
  CHECK(p2.max_arity() == 2);
  CHECK(p2.num_states() == 2 + 3);
  CHECK(lowered_state_count(p) == 5);
  CHECK(gadget_state_bound(p) == 2 + 9);
  // forth_1 and its inverse, success, back_1.
  CHECK(p2.transitions().size() == 4);
  CHECK_NOTHROW(p2.transition({"a", "a"}, {"0.d1", "0.a2"}));
  CHECK_NOTHROW(p2.transition({"0.d1", "0.a2"}, {"a", "a"}));
  CHECK_NOTHROW(p2.transition({"0.a2", "a"}, {"0.b2", "b"}));
  CHECK_NOTHROW(p2.transition({"0.d1", "0.b2"}, {"b", "b"}));
  CHECK(p2.output(p2.id("0.d1")) == 0);
  CHECK(p2.output(p2.id("0.b2")) == 1);
  CHECK(p2.initial() == std::vector<StateId>{p2.id("a")});

  const auto& low = p2.meta().at("lowering");
  CHECK(low.at("original_states") == 2);
  CHECK(low.at("gadget_states") == 3);
}

TEST_CASE("two-way protocols pass through") {
  const Protocol p = flock_standard(3);
  CHECK(to_2way(p) == [&] {
    Protocol q = p;
    q.mutable_meta() = to_2way(p).meta();
    return q;
  }());
  CHECK(lowered_state_count(p) == p.num_states());
}

TEST_CASE("name collisions get a prefix") {
  ProtocolBuilder b;
  b.state("a", 0).state("b", 1).state("0.d1", 0).initial("a");
  b.transition({"a", "a", "a"}, {"b", "b", "b"});
  const Protocol p2 = to_2way(b.build());
  CHECK(p2.find("_0.d1").has_value());
  CHECK(p2.num_states() == 3 + 3);
}

TEST_CASE("lowering a five-way transition") {
  ProtocolBuilder b;
  b.state("q", 0).state("r", 1).initial("q");
  b.transition({"q", "q", "q", "q", "q"}, {"r", "r", "r", "r", "r"});
  const Protocol p = b.build();
  const Protocol p2 = to_2way(p);
  CHECK(p2.num_states() == 2 + 3 * 3);
  CHECK(gadget_state_bound(p) == 2 + 15);
  // 3 forth, 3 inverses, success, 3 back.
  CHECK(p2.transitions().size() == 10);
}

TEST_CASE("lowered decisions match the oracle") {
  // Frozen from the oracle on the lowered aaa -> bbb protocol: populations
  // 1 and 2 stay in a, 3 converts, 4 and 5 can strand a partial gadget.
  const Protocol p2 = to_2way(three_way_swap());
  const std::vector<int> expected{0, 0, 1, 2, 2, 1};
  for (Count n = 1; n <= 6; ++n) {
    const auto c0 = p2.initial_configuration(NamedInput{{"a", n}});
    CHECK(static_cast<int>(decide_output(p2, c0)) == expected[n - 1]);
    CHECK(oracle::decide(p2, {{"a", static_cast<long>(n)}}) == expected[n - 1]);
  }
  CHECK_FALSE(coverable(p2, p2.configuration({{"a", 2}}), {p2.id("b")}));
}

TEST_CASE("lowered binary flock") {
  const Protocol p = flock_binary(7);
  const Protocol p2 = to_2way(p);
  CHECK(p2.num_states() == 9);
  CHECK(p2.num_states() == flock_binary_lowered_states(7));
  CHECK(p2.max_arity() == 2);
  for (Count x = 1; x <= 9; ++x) {
    const auto d = decide_output(p2, p2.initial_configuration(NamedInput{{"1", x}}));
    CHECK(d == (x >= 7 ? Decision::one : Decision::zero));
    CHECK(oracle::decide(p2, {{"1", static_cast<long>(x)}}) == (x >= 7 ? 1 : 0));
  }
}

TEST_CASE("simulation check") {
  std::vector<NamedInput> domain;
  for (Count x = 1; x <= 6; ++x) domain.push_back({{"1", x}});
  const Protocol p = flock_binary(7);
  const auto r = check_simulation(p, to_2way(p), domain);
  CHECK(r.holds);
  CHECK_FALSE(r.inconclusive);
  REQUIRE(r.entries.size() == 6);
  for (const auto& e : r.entries) {
    CHECK(e.reach_preserved);
    CHECK(e.gadgets_drain);
    CHECK(e.lowered_nodes >= e.nodes);
  }

  SUBCASE("a wrong lowering is caught") {
    // Drop the backward transitions: committed agents get stuck.
    const Protocol p2 = to_2way(p);
    ProtocolBuilder b;
    for (const auto& s : p2.names()) b.state(s, p2.output(p2.id(s)));
    b.initial("1");
    for (const auto& t : p2.transitions()) {
      std::vector<std::string> pre, post;
      for (auto s : t.pre()) pre.push_back(p2.name(s));
      for (auto s : t.post()) post.push_back(p2.name(s));
      if (pre[0].find(".b") != std::string::npos || pre[1].find(".b") != std::string::npos) continue;
      b.transition(pre, post);
    }
    const auto broken = check_simulation(p, b.build(), {{{"1", 7}}, {{"1", 8}}});
    CHECK_FALSE(broken.holds);
  }
  SUBCASE("node limit") {
    const auto lim = check_simulation(p, to_2way(p), domain, 3);
    CHECK(lim.inconclusive);
  }
}

TEST_CASE("translate") {
  const Protocol p = flock_binary(7);
  const Protocol p2 = to_2way(p);
  const Multiset c = p.configuration({{"1", 2}, {"4", 1}});
  CHECK(p2.format(translate(p, p2, c)) == p.format(c));
  const auto gadget = std::find_if(p2.names().begin(), p2.names().end(),
                                   [](const std::string& n) { return n.find(".d1") != std::string::npos; });
  REQUIRE(gadget != p2.names().end());
  CHECK_THROWS_AS(translate(p2, p, p2.configuration({{*gadget, 1}})), InvalidInput);
}

}  // TEST_SUITE
