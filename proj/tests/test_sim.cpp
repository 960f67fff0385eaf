#include <set>

#include "doctest.h"
#include "popproto/constructions.hpp"
#include "popproto/sim.hpp"

using namespace popproto;

TEST_SUITE("sim") {

TEST_CASE("counter rng is a pure function of seed and counter") {
  CounterRng a(42), b(42), c(43);
  std::vector<std::uint64_t> xs;
  for (int i = 0; i < 100; ++i) {
    xs.push_back(a.next());
    CHECK(xs.back() == b.next());
  }
  CHECK(c.next() != xs.front());
  CHECK(std::set<std::uint64_t>(xs.begin(), xs.end()).size() == xs.size());
  CHECK(a.counter() == 100);
  CounterRng d(42);
  CHECK(d.next() == splitmix64(splitmix64(42) + 0x9e3779b97f4a7c15ULL));
  CHECK(derive_seed(9, 0) == 9);
  CHECK(derive_seed(9, 2) == 9 + 2 * 0x9e3779b97f4a7c15ULL);
}

TEST_CASE("bounded draws stay in range and cover it") {
  CounterRng r(1);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = r.below(7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("random steps preserve the population") {
  const Protocol p = flock_binary(13);
  CounterRng rng(8);
  Multiset c = p.initial_configuration(NamedInput{{"1", 10}});
  std::size_t fired = 0;
  for (int i = 0; i < 5000; ++i) {
    const Step s = step_random(p, c, rng);
    if (s.transition) {
      ++fired;
      CHECK(s.configuration == p.fire(p.transitions()[*s.transition], c));
    } else {
      CHECK(s.configuration == c);
    }
    c = s.configuration;
    CHECK(c.size() == 10);
  }
  CHECK(fired > 0);
}

TEST_CASE("runs stabilize to the right output") {
  RunOptions opts;
  opts.seed = 5;
  const Protocol p = flock_binary(8);
  const auto yes = run(p, p.initial_configuration(NamedInput{{"1", 20}}), opts);
  CHECK(yes.status == RunStatus::stabilized_one);
  CHECK(yes.final_configuration.size() == 20);
  const auto no = run(p, p.initial_configuration(NamedInput{{"1", 5}}), opts);
  CHECK(no.status == RunStatus::stabilized_zero);
  CHECK(to_string(no.status) == "stabilized-0");

  SUBCASE("a terminal configuration is decided at once") {
    const Protocol q = flock_binary(1);
    const auto r = run(q, q.initial_configuration(NamedInput{{"1", 3}}), opts);
    CHECK(r.status == RunStatus::stabilized_one);
    CHECK(r.steps == 0);
  }
  SUBCASE("a tiny step budget leaves the run undecided") {
    RunOptions tight = opts;
    tight.max_steps = 2;
    const auto r = run(p, p.initial_configuration(NamedInput{{"1", 20}}), tight);
    CHECK(r.status == RunStatus::undecided);
  }
  SUBCASE("runs are reproducible") {
    const auto again = run(p, p.initial_configuration(NamedInput{{"1", 20}}), opts);
    CHECK(again.steps == yes.steps);
    CHECK(again.final_configuration == yes.final_configuration);
  }
}

TEST_CASE("estimates do not depend on the thread count") {
  const Protocol p = majority_leaders(3);
  std::vector<NamedInput> inputs;
  for (Count x = 1; x <= 5; ++x) inputs.push_back({{"x", x}});
  EstimateOptions one;
  one.trials = 20;
  one.run.seed = 77;
  one.threads = 1;
  EstimateOptions many = one;
  many.threads = 4;
  const auto a = estimate(p, inputs, one);
  const auto b = estimate(p, inputs, many);
  CHECK(runs_csv(a) == runs_csv(b));
  CHECK(statistics_csv(a) == statistics_csv(b));
  for (const auto& s : a) {
    CHECK(s.undecided == 0);
    CHECK((s.input.at("x") >= 3 ? s.stabilized_one : s.stabilized_zero) == 20);
    CHECK(s.runs.front().seed == 77);
  }
  CHECK(statistics_csv(a).rfind("input,trials,frac_stabilized_0,frac_stabilized_1,frac_undecided,mean_steps,median_steps\n", 0) == 0);
}

}  // TEST_SUITE
