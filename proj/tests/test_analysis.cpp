#include "doctest.h"
#include "oracles.hpp"
#include "popproto/analysis.hpp"
#include "popproto/constructions.hpp"

using namespace popproto;

namespace {

ReachabilityGraph graph_for(const Protocol& p, Count x) {
  return explore(p, p.initial_configuration(NamedInput{{"1", x}}));
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("reachability from two agents in the binary flock for 3") {
  const Protocol p = flock_binary(3);
  const auto g = graph_for(p, 2);
  CHECK(g.num_nodes() == 2);
  CHECK(g.configuration(g.root()) == p.configuration({{"1", 2}}));
  CHECK(g.find(p.configuration({{"0", 1}, {"2", 1}})).has_value());
  CHECK_FALSE(g.find(p.configuration({{"3", 1}, {"0", 1}})).has_value());
  CHECK(decide_output(p, g.configuration(0)) == Decision::zero);
}

TEST_CASE("node counts agree with the oracle") {
  for (std::uint64_t n : {2, 3, 5, 6}) {
    const Protocol p = flock_binary(n);
    for (Count x = 1; x <= 7; ++x) {
      const auto c0 = p.initial_configuration(NamedInput{{"1", x}});
      CHECK(explore(p, c0).num_nodes() == oracle::count_nodes(p, oracle::initial(p, {{"1", x}})));
    }
  }
  const Protocol lin = linear_inequality({1, -1}, 0);
  const auto c0 = lin.initial_configuration(NamedInput{{"x1", 3}, {"x2", 2}});
  CHECK(explore(lin, c0).num_nodes() == 280);
}

TEST_CASE("node limit") {
  const Protocol p = flock_standard(4);
  const auto c0 = p.initial_configuration(NamedInput{{"1", 8}});
  const std::size_t full = explore(p, c0).num_nodes();
  try {
    explore(p, c0, full - 1);
    FAIL("limit not enforced");
  } catch (const NodeLimitExceeded& e) {
    CHECK(e.limit() == full - 1);
    CHECK(e.partial().num_nodes() <= full - 1);
  }
}

TEST_CASE("paths reproduce the configurations they end in") {
  const Protocol p = flock_binary(5);
  const auto g = graph_for(p, 6);
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    Multiset c = g.configuration(g.root());
    for (auto t : g.path_to(n)) c = p.fire(p.transitions()[t], c);
    CHECK(c == g.configuration(n));
  }
}

TEST_CASE("terminal components of a bistable protocol") {
  // a, b -> a, a and a, b -> b, b: two absorbing consensuses.
  ProtocolBuilder b;
  b.state("a", 0).state("b", 1).initial("a").initial("b");
  b.transition({"a", "b"}, {"a", "a"}).transition({"a", "b"}, {"b", "b"});
  const Protocol p = b.build();
  const auto g = explore(p, p.configuration({{"a", 2}, {"b", 2}}));
  const auto scc = strongly_connected_components(g);
  CHECK(g.num_nodes() == 5);
  // The three mixed configurations form one component.
  CHECK(scc.count == 3);
  CHECK(scc.terminal_count() == 2);
  const auto outs = terminal_outputs(p, g, scc);
  CHECK(std::count(outs.begin(), outs.end(), Decision::zero) == 1);
  CHECK(std::count(outs.begin(), outs.end(), Decision::one) == 1);
  CHECK(analyze_output(p, g).decision == Decision::ill_specified);
  CHECK(oracle::decide(p, {{"a", 2}, {"b", 2}}) == 2);
}

TEST_CASE("decisions agree with the oracle") {
  // Frozen from the oracle: flock_binary(3) on x = 1..6.
  const Protocol fb = flock_binary(3);
  const std::vector<int> fb_expected{0, 0, 1, 1, 1, 1};
  // flock_standard(4) on x = 1..8.
  const Protocol fs = flock_standard(4);
  const std::vector<int> fs_expected{0, 0, 0, 1, 1, 1, 1, 1};
  for (Count x = 1; x <= 8; ++x) {
    if (x <= 6) {
      CHECK(static_cast<int>(decide_output(fb, fb.initial_configuration(NamedInput{{"1", x}}))) ==
            fb_expected[x - 1]);
      CHECK(oracle::decide(fb, oracle::initial(fb, {{"1", static_cast<long>(x)}})) == fb_expected[x - 1]);
    }
    CHECK(static_cast<int>(decide_output(fs, fs.initial_configuration(NamedInput{{"1", x}}))) ==
          fs_expected[x - 1]);
  }
  const Protocol maj = majority_leaders(2);
  const std::vector<int> maj_expected{0, 1, 1, 1, 1};  // x = 1..5
  for (Count x = 1; x <= 5; ++x) {
    CHECK(static_cast<int>(decide_output(maj, maj.initial_configuration(NamedInput{{"x", x}}))) ==
          maj_expected[x - 1]);
  }
  CHECK(decide_output(maj, maj.initial_configuration(NamedInput{{"x", 0}})) == Decision::zero);
}

TEST_CASE("coverability") {
  const Protocol p = flock_standard(3);
  CHECK_FALSE(coverable(p, p.configuration({{"1", 2}}), {p.id("3")}));
  CHECK(coverable(p, p.configuration({{"1", 3}}), {p.id("3")}));
  CHECK(oracle::coverable(p, {{"1", 3}}, {"3"}));
  CHECK_FALSE(oracle::coverable(p, {{"1", 2}}, {"3"}));
}

TEST_CASE("predicate verification") {
  const Protocol p = flock_binary(3);
  std::vector<NamedInput> domain;
  for (Count x = 1; x <= 6; ++x) domain.push_back({{"1", x}});

  const auto good = verify_predicate(p, [](const NamedInput& in) { return in.at("1") >= 3; }, domain);
  CHECK(good.verdict == Verdict::pass);
  CHECK(good.entries.size() == 6);

  const auto bad = verify_predicate(p, [](const NamedInput& in) { return in.at("1") >= 4; }, domain);
  CHECK(bad.verdict == Verdict::fail);
  const auto wrong = std::find_if(bad.entries.begin(), bad.entries.end(), [](const auto& e) { return !e.ok(); });
  REQUIRE(wrong != bad.entries.end());
  CHECK(wrong->input.at("1") == 3);
  CHECK_FALSE(wrong->counterexample.empty());
  CHECK(wrong->counterexample_end.find('3') != std::string::npos);

  SUBCASE("node limit makes the report inconclusive") {
    const auto r = verify_predicate(p, [](const NamedInput& in) { return in.at("1") >= 3; }, domain, 2);
    CHECK(r.verdict == Verdict::inconclusive);
  }
  SUBCASE("a failure outranks an inconclusive entry") {
    const std::size_t n3 = explore(p, p.initial_configuration(NamedInput{{"1", 3}})).num_nodes();
    const std::size_t n6 = explore(p, p.initial_configuration(NamedInput{{"1", 6}})).num_nodes();
    REQUIRE(n6 > n3);
    const auto r = verify_predicate(p, [](const NamedInput& in) { return in.at("1") >= 4; }, domain, n3);
    CHECK(r.entries.back().decided == std::nullopt);
    CHECK(r.verdict == Verdict::fail);
  }
  SUBCASE("reports are deterministic") {
    CHECK(good.to_csv() == verify_predicate(p, [](const NamedInput& in) { return in.at("1") >= 3; }, domain).to_csv());
    CHECK(good.to_csv().rfind("input,expected,decided,nodes,sccs,terminal_sccs\n", 0) == 0);
    CHECK(good.to_json().at("verdict") == "pass");
  }
}

TEST_CASE("1-awareness") {
  const Protocol p = flock_binary(5);
  std::vector<NamedInput> domain;
  for (Count x = 1; x <= 7; ++x) domain.push_back({{"1", x}});
  const auto r = check_1aware(p, {p.id("5")}, domain);
  CHECK(r.holds);
  CHECK(r.cover_iff_one_holds);
  for (const auto& e : r.entries) CHECK(e.q1_touched == (e.input.at("1") >= 5));

  CHECK_THROWS_AS(check_1aware(p, {p.id("1")}, domain), InvalidInput);

  SUBCASE("a set that is not absorbing fails") {
    const auto r2 = check_1aware(p, {p.id("4")}, domain);
    CHECK_FALSE(r2.holds);
  }
}

}  // TEST_SUITE
