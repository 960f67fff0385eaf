#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "popproto/analysis.hpp"
#include "popproto/protocol.hpp"

namespace popproto {

/// A word over the alphabet; letter order is irrelevant to the semantics.
using Word = std::vector<std::string>;

struct Production {
  Word l;
  Word r;
};

/// Finite presentation of a commutative semigroup with designated letters.
struct SemigroupPresentation {
  std::string name;
  std::vector<std::string> alphabet;
  std::vector<Production> productions;
  std::string s, f, c;
  std::optional<std::string> b;

  /// MalformedProtocol on unknown letters, a production with both sides
  /// empty, or a production whose reverse (as multisets) is missing.
  void validate() const;
  std::size_t max_length() const;
};

/// True iff l and r are equal as multisets (e.g. ab -> ba).
bool is_commutativity(const Production& p);

/// Accepts "l"/"r" as strings (one letter per character, or letters
/// separated by spaces) or as arrays of letter names.
SemigroupPresentation presentation_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SemigroupPresentation& sp);
SemigroupPresentation read_presentation(const std::filesystem::path& path);

/// Presentations shipped with the tool: "double2" (s <-> f b b) and
/// "tower" (s <-> a a, a <-> b b, b b b b <-> f). InvalidInput otherwise.
SemigroupPresentation bundled_presentation(std::string_view name);
std::vector<std::string> bundled_presentation_names();

/// Name of the padding state: "x", or "x'" (with more primes) if taken.
std::string padding_state(const SemigroupPresentation& sp);

/// Pads both sides with `x` to length max(|l|, |r|, 2).
std::pair<Word, Word> pad(const Production& p, const std::string& x);

/// Q = A + {x}; T1 = pad(p) for every production that is not a
/// commutativity; T2 = {f, q -> f, f}; I = {x}; L = <c, s>; O(f) = 1.
Protocol from_semigroup(const SemigroupPresentation& sp);

/// Indices (into p.transitions()) of the padded productions of p.
std::vector<std::uint32_t> t1_transitions(const SemigroupPresentation& sp, const Protocol& p);

/// Letter multiset of a word, as a sorted (letter, count) list.
std::vector<std::pair<std::string, Count>> letter_counts(const Word& w);

struct Derivation {
  Word alpha;
  std::vector<std::size_t> steps;  // production indices
  Word beta;
};

/// All derivations of at most `max_steps` productions from `start`, one per
/// (end word, step count) pair, found by breadth-first rewriting. Words are
/// kept sorted so equal multisets coincide.
std::vector<Derivation> enumerate_derivations(const SemigroupPresentation& sp, const Word& start,
                                              std::size_t max_steps);

/// C_{alpha,m}: m agents in x plus one agent per letter occurrence.
Multiset semigroup_configuration(const Protocol& p, const std::string& x, const Word& alpha,
                                 Count m);

struct SemigroupSimulationReport {
  bool holds = true;
  std::size_t forward_checked = 0;   // (derivation, m) pairs replayed in the protocol
  std::size_t backward_checked = 0;  // protocol steps mapped back to productions
  std::string witness;
};

/// Forward direction: every derivation alpha -> beta of k steps replays as
/// pad(p1)..pad(pk) from C_{alpha,m} to some C_{beta,m'} for each m in
/// m_values with m >= (a - 1) k, a the largest padded arity. Backward
/// direction: along `walks` seeded random T1-walks of `walk_length` steps
/// from each C_{alpha,m}, every fired pad(p) is a production step on the
/// letter multisets.
SemigroupSimulationReport check_semigroup_simulation(const SemigroupPresentation& sp, const Protocol& p,
                                             const std::vector<Derivation>& derivations,
                                             const std::vector<Count>& m_values,
                                             std::size_t walks = 4, std::size_t walk_length = 32,
                                             std::uint64_t seed = 0);

/// Every T1 edge of the reachability graph from c0 lies inside an SCC of the
/// T1-restricted graph, i.e. T1-reachability is symmetric.
bool t1_reachability_symmetric(const SemigroupPresentation& sp, const Protocol& p,
                               const Multiset& c0, std::size_t node_limit = kDefaultNodeLimit);

/// Smallest x in [0, max_x] for which f is derivable from s c x^x under the
/// padding budget of the protocol, by direct rewriting of letter multisets;
/// nullopt if none.
std::optional<Count> rewriting_threshold(const SemigroupPresentation& sp, Count max_x);

/// State count after lowering for a presentation with `letters` letters and
/// `productions` padded productions all of arity `arity`, using the per-
/// transition bound 3i: letters + 1 + 3 * arity * productions.
std::size_t semigroup_lowered_bound(std::size_t letters, std::size_t productions, std::size_t arity);

/// The same bound for the parameters of the double-exponential family:
/// 14n + 10 letters and 20n + 8 productions of arity 5.
std::size_t doubly_exponential_family_bound(std::size_t n);

}  // namespace popproto
