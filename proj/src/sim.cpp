#include "popproto/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "popproto/analysis.hpp"

namespace popproto {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

double falling(Count c, Count m) {
  double r = 1.0;
  for (Count i = 0; i < m; ++i) {
    if (c < i + 1) return 0.0;
    r *= static_cast<double>(c - i);
  }
  return r;
}

/// Per-protocol tables for weighted transition sampling.
class Sampler {
 public:
  explicit Sampler(const Protocol& p) : protocol_(p) {
    std::map<std::vector<StateId>, std::size_t> same_prelist;
    for (const auto& t : p.transitions()) ++same_prelist[t.pre()];
    std::vector<bool> arity_seen;
    for (const auto& t : p.transitions()) {
      std::vector<std::pair<StateId, Count>> need(t.pre_multiset().entries().begin(),
                                                  t.pre_multiset().entries().end());
      need_.push_back(std::move(need));
      std::map<StateId, std::int64_t> d;
      for (const auto& [s, n] : t.pre_multiset().entries()) d[s] -= static_cast<std::int64_t>(n);
      for (const auto& [s, n] : t.post_multiset().entries()) d[s] += static_cast<std::int64_t>(n);
      std::vector<std::pair<StateId, std::int64_t>> delta;
      for (const auto& [s, v] : d) {
        if (v != 0) delta.emplace_back(s, v);
      }
      delta_.push_back(std::move(delta));
      inv_mult_.push_back(1.0 / static_cast<double>(same_prelist[t.pre()]));
      if (arity_seen.size() <= t.arity()) arity_seen.resize(t.arity() + 1, false);
      arity_seen[t.arity()] = true;
    }
    for (std::size_t a = 0; a < arity_seen.size(); ++a) {
      if (arity_seen[a]) arities_.push_back(a);
    }
  }

  /// Total number of ordered tuples of distinct agents over all arities.
  double tuple_mass(Count population) const {
    double z = 0;
    for (auto a : arities_) z += falling(population, a);
    return z;
  }

  double fill_weights(const std::vector<Count>& c, std::vector<double>& w) const {
    w.resize(need_.size());
    double total = 0;
    for (std::size_t i = 0; i < need_.size(); ++i) {
      double x = inv_mult_[i];
      for (const auto& [s, m] : need_[i]) {
        x *= falling(c[s], m);
        if (x == 0) break;
      }
      w[i] = x;
      total += x;
    }
    return total;
  }

  std::uint32_t pick(const std::vector<double>& w, double u) const {
    std::uint32_t last = 0;
    for (std::uint32_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0) continue;
      last = i;
      if (u < w[i]) return i;
      u -= w[i];
    }
    return last;
  }

  void apply(std::uint32_t t, std::vector<Count>& c) const {
    for (const auto& [s, d] : delta_[t]) {
      c[s] = static_cast<Count>(static_cast<std::int64_t>(c[s]) + d);
    }
  }

  Output consensus(const std::vector<Count>& c) const {
    int seen = -1;
    for (StateId s = 0; s < c.size(); ++s) {
      if (c[s] == 0) continue;
      int o = protocol_.output(s);
      if (seen >= 0 && seen != o) return Output::none;
      seen = o;
    }
    return seen < 0 ? Output::none : static_cast<Output>(seen);
  }

  /// Over-approximates the states reachable from the support of c.
  bool support_closure_within(const std::vector<Count>& c, int b) const {
    std::vector<bool> in(c.size(), false);
    for (StateId s = 0; s < c.size(); ++s) in[s] = c[s] > 0;
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& t : protocol_.transitions()) {
        bool fires = std::all_of(t.pre().begin(), t.pre().end(), [&](StateId s) { return in[s]; });
        if (!fires) continue;
        for (StateId s : t.post()) {
          if (!in[s]) {
            in[s] = true;
            grew = true;
          }
        }
      }
    }
    for (StateId s = 0; s < c.size(); ++s) {
      if (in[s] && protocol_.output(s) != b) return false;
    }
    return true;
  }

  bool certified_stable(const std::vector<Count>& c, int b, std::size_t node_budget) const {
    if (support_closure_within(c, b)) return true;
    try {
      const auto g = explore(protocol_, Multiset::from_dense<Count>(c), node_budget);
      const Output want = static_cast<Output>(b);
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (protocol_.consensus_output(g.configuration(v)) != want) return false;
      }
      return true;
    } catch (const NodeLimitExceeded&) {
      return false;
    }
  }

 private:
  const Protocol& protocol_;
  std::vector<std::vector<std::pair<StateId, Count>>> need_;
  std::vector<std::vector<std::pair<StateId, std::int64_t>>> delta_;
  std::vector<double> inv_mult_;
  std::vector<std::size_t> arities_;
};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return seed + index * kGamma; }

CounterRng::CounterRng(std::uint64_t seed) : seed_(seed), key_(splitmix64(seed)) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return splitmix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::stabilized_zero:
      return "stabilized-0";
    case RunStatus::stabilized_one:
      return "stabilized-1";
    case RunStatus::undecided:
      return "undecided";
  }
  return "undecided";
}

Step step_random(const Protocol& p, const Multiset& c, CounterRng& rng) {
  const Sampler sampler(p);
  auto dense = c.to_dense(p.num_states());
  std::vector<double> w;
  const double total = sampler.fill_weights(dense, w);
  const double z = sampler.tuple_mass(c.size());
  const double u = rng.uniform() * z;
  if (z == 0 || u >= total) return {std::nullopt, c};
  const auto t = sampler.pick(w, u);
  sampler.apply(t, dense);
  return {t, Multiset::from_dense<Count>(dense)};
}

RunOutcome run(const Protocol& p, const Multiset& c0, const RunOptions& options) {
  if (options.window == 0) throw InvalidInput("window must be at least 1");
  const Sampler sampler(p);
  CounterRng rng(options.seed);
  std::vector<Count> c = c0.to_dense(p.num_states());
  const double z = sampler.tuple_mass(c0.size());
  std::vector<double> w;

  RunOutcome out;
  out.seed = options.seed;
  std::uint64_t streak = 0;
  Output streak_value = Output::none;

  auto finish = [&](RunStatus s) {
    out.status = s;
    out.final_configuration = Multiset::from_dense<Count>(c);
    return out;
  };

  while (true) {
    const double total = sampler.fill_weights(c, w);
    if (total <= 0) {
      // Only silent interactions remain: the configuration is terminal.
      switch (sampler.consensus(c)) {
        case Output::zero:
          return finish(RunStatus::stabilized_zero);
        case Output::one:
          return finish(RunStatus::stabilized_one);
        case Output::none:
          return finish(RunStatus::undecided);
      }
    }
    if (out.steps >= options.max_steps) return finish(RunStatus::undecided);

    const double prob = std::min(1.0, total / z);
    std::uint64_t silent = 0;
    if (prob < 1.0) {
      const double g = std::floor(std::log1p(-rng.uniform()) / std::log1p(-prob));
      silent = g >= static_cast<double>(options.max_steps) ? options.max_steps
                                                            : static_cast<std::uint64_t>(g);
    }
    if (silent >= options.max_steps - out.steps) {
      out.steps = options.max_steps;
      return finish(RunStatus::undecided);
    }
    out.steps += silent + 1;

    const auto t = sampler.pick(w, rng.uniform() * total);
    sampler.apply(t, c);
    ++out.nonsilent_steps;
    if (out.trace.size() < options.trace_limit) out.trace.push_back(t);

    const Output o = sampler.consensus(c);
    if (o != Output::none && o == streak_value) {
      ++streak;
    } else {
      streak_value = o;
      streak = o == Output::none ? 0 : 1;
    }
    if (streak >= options.window) {
      const int b = static_cast<int>(streak_value);
      if (sampler.certified_stable(c, b, options.check_nodes)) {
        return finish(b == 1 ? RunStatus::stabilized_one : RunStatus::stabilized_zero);
      }
      streak = 0;
    }
  }
}

std::vector<InputStatistics> estimate(const Protocol& p, const std::vector<NamedInput>& inputs,
                                      const EstimateOptions& options) {
  if (options.trials == 0) throw InvalidInput("trials must be at least 1");
  std::vector<InputStatistics> stats(inputs.size());
  std::vector<Multiset> starts;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    stats[i].input = inputs[i];
    stats[i].runs.resize(options.trials);
    starts.push_back(p.initial_configuration(inputs[i]));
  }

  const std::size_t jobs = inputs.size() * options.trials;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t i = j / options.trials;
      const std::uint64_t trial = j % options.trials;
      RunOptions ro = options.run;
      ro.seed = derive_seed(options.run.seed, trial);
      stats[i].runs[trial] = run(p, starts[i], ro);
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }

  for (auto& s : stats) {
    std::vector<double> steps;
    for (const auto& r : s.runs) {
      switch (r.status) {
        case RunStatus::stabilized_zero:
          ++s.stabilized_zero;
          steps.push_back(static_cast<double>(r.steps));
          break;
        case RunStatus::stabilized_one:
          ++s.stabilized_one;
          steps.push_back(static_cast<double>(r.steps));
          break;
        case RunStatus::undecided:
          ++s.undecided;
          break;
      }
    }
    if (!steps.empty()) {
      s.mean_steps = std::accumulate(steps.begin(), steps.end(), 0.0) / static_cast<double>(steps.size());
      std::sort(steps.begin(), steps.end());
      const std::size_t m = steps.size() / 2;
      s.median_steps = steps.size() % 2 ? steps[m] : (steps[m - 1] + steps[m]) / 2;
    }
  }
  return stats;
}

std::string runs_csv(const std::vector<InputStatistics>& stats) {
  std::ostringstream os;
  os << "input,trial,seed,status,steps\n";
  for (const auto& s : stats) {
    for (std::size_t t = 0; t < s.runs.size(); ++t) {
      const auto& r = s.runs[t];
      os << format_input(s.input) << ',' << t << ',' << r.seed << ',' << to_string(r.status) << ','
         << r.steps << '\n';
    }
  }
  return os.str();
}

std::string statistics_csv(const std::vector<InputStatistics>& stats) {
  std::ostringstream os;
  os.precision(10);
  os << "input,trials,frac_stabilized_0,frac_stabilized_1,frac_undecided,mean_steps,median_steps\n";
  for (const auto& s : stats) {
    const double n = static_cast<double>(s.runs.size());
    os << format_input(s.input) << ',' << s.runs.size() << ',' << s.stabilized_zero / n << ','
       << s.stabilized_one / n << ',' << s.undecided / n << ',' << s.mean_steps << ','
       << s.median_steps << '\n';
  }
  return os.str();
}

}  // namespace popproto
