#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "popproto/protocol.hpp"

namespace popproto {

/// Counter-based 64-bit generator. Output number c (c = 1, 2, ...) is
/// mix(mix(seed) + c * 0x9e3779b97f4a7c15), where mix is the SplitMix64
/// finalizer. The whole stream is a pure function of (seed, c).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform();
  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);
  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of trial `index` under a base seed: seed + index * 0x9e3779b97f4a7c15.
/// Trial 0 uses the base seed itself.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct Step {
  /// Index of the fired transition, or nullopt for a silent interaction.
  std::optional<std::uint32_t> transition;
  Multiset configuration;
};

/// One scheduler step. An ordered tuple of distinct agents is drawn uniformly
/// among all tuples whose length is an arity occurring in the protocol; the
/// tuple fires one of the transitions whose ordered pre-list it matches,
/// chosen uniformly, and is silent if none matches.
Step step_random(const Protocol& p, const Multiset& c, CounterRng& rng);

enum class RunStatus : std::uint8_t { stabilized_zero, stabilized_one, undecided };
std::string_view to_string(RunStatus s);

struct RunOptions {
  std::uint64_t max_steps = 10'000'000;
  std::uint64_t window = 1000;
  std::uint64_t seed = 0;
  /// Node budget of the exhaustive stability check.
  std::size_t check_nodes = 20'000;
  /// Keep at most this many fired transition indices.
  std::size_t trace_limit = 0;
};

struct RunOutcome {
  RunStatus status = RunStatus::undecided;
  std::uint64_t steps = 0;  // including silent interactions
  std::uint64_t nonsilent_steps = 0;
  std::uint64_t seed = 0;
  Multiset final_configuration;
  std::vector<std::uint32_t> trace;
};

/// Simulates until a stable consensus is certified or max_steps elapse.
///
/// A run is declared stabilized-b once the last `window` non-silent steps all
/// produced b-consensus configurations and the current configuration is shown
/// stable: either the states reachable from its support by any transition
/// sequence all output b, or an exhaustive search of at most `check_nodes`
/// configurations finds only b-consensus ones. A configuration in which no
/// non-silent transition is enabled is decided immediately. Silent steps are
/// skipped in bulk with a geometric draw, which is equal in distribution to
/// calling step_random repeatedly.
RunOutcome run(const Protocol& p, const Multiset& c0, const RunOptions& options);

struct InputStatistics {
  NamedInput input;
  std::vector<RunOutcome> runs;  // one per trial, trial order
  std::size_t stabilized_zero = 0;
  std::size_t stabilized_one = 0;
  std::size_t undecided = 0;
  double mean_steps = 0;    // over stabilized runs
  double median_steps = 0;  // over stabilized runs
};

struct EstimateOptions {
  std::uint64_t trials = 1;
  RunOptions run;  // run.seed is the base seed
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Runs `trials` simulations per input. Trial t uses derive_seed(seed, t);
/// results do not depend on the thread count.
std::vector<InputStatistics> estimate(const Protocol& p, const std::vector<NamedInput>& inputs,
                                      const EstimateOptions& options);

/// Columns: input, trial, seed, status, steps.
std::string runs_csv(const std::vector<InputStatistics>& stats);
/// Columns: input, trials, frac_stabilized_0, frac_stabilized_1, frac_undecided,
/// mean_steps, median_steps. Fractions are of trials; steps are over stabilized runs.
std::string statistics_csv(const std::vector<InputStatistics>& stats);

}  // namespace popproto
