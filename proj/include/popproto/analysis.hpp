#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "popproto/protocol.hpp"

namespace popproto {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr std::size_t kDefaultNodeLimit = 5'000'000;

/// Explicit graph of the configurations reachable from a root. Node 0 is the
/// root and nodes are numbered in breadth-first discovery order. Edges carry
/// the index of the (non-silent) transition that produced them.
class ReachabilityGraph {
 public:
  struct Edge {
    NodeId target;
    std::uint32_t transition;
  };

  std::size_t num_nodes() const { return parent_.size(); }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_edges() const { return edges_.size(); }
  NodeId root() const { return 0; }

  std::span<const std::uint32_t> counts(NodeId n) const {
    return {pool_.data() + static_cast<std::size_t>(n) * num_states_, num_states_};
  }
  Multiset configuration(NodeId n) const;
  /// Outgoing edges; empty for nodes left unexpanded by a truncated search.
  std::span<const Edge> successors(NodeId n) const;
  bool expanded(NodeId n) const { return n + 1 < offsets_.size(); }

  /// Breadth-first tree parent and the transition used to reach `n`.
  NodeId parent(NodeId n) const { return parent_[n]; }
  /// Shortest transition sequence (indices into the protocol) from the root.
  std::vector<std::uint32_t> path_to(NodeId n) const;
  std::optional<NodeId> find(const Multiset& c) const;

 private:
  friend class GraphExplorer;
  std::size_t num_states_ = 0;
  std::vector<std::uint32_t> pool_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Edge> edges_;
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> parent_label_;
};

/// Raised when exploration would exceed the node limit; carries what was built.
class NodeLimitExceeded : public Error {
 public:
  NodeLimitExceeded(std::size_t limit, std::shared_ptr<const ReachabilityGraph> partial);
  std::size_t limit() const { return limit_; }
  const ReachabilityGraph& partial() const { return *partial_; }

 private:
  std::size_t limit_;
  std::shared_ptr<const ReachabilityGraph> partial_;
};

/// All configurations reachable from c0 through non-silent transitions.
ReachabilityGraph explore(const Protocol& p, const Multiset& c0,
                          std::size_t node_limit = kDefaultNodeLimit);

/// Same, restricted to the transitions whose index satisfies `allowed`.
ReachabilityGraph explore_restricted(const Protocol& p, const Multiset& c0,
                                     const std::function<bool(std::uint32_t)>& allowed,
                                     std::size_t node_limit = kDefaultNodeLimit);

struct SccDecomposition {
  std::vector<std::uint32_t> component;  // per node
  std::size_t count = 0;
  std::vector<bool> terminal;  // per component: no edge leaves it
  std::size_t terminal_count() const;
};

/// Iterative Tarjan decomposition; components numbered in completion order.
SccDecomposition strongly_connected_components(const ReachabilityGraph& g);

enum class Decision : std::uint8_t { zero = 0, one = 1, ill_specified = 2 };
std::string_view to_string(Decision d);

struct OutputAnalysis {
  Decision decision = Decision::ill_specified;
  std::size_t nodes = 0;
  std::size_t sccs = 0;
  std::size_t terminal_sccs = 0;
};

/// Output of every fair execution from c0: b iff every terminal SCC consists
/// of b-consensus configurations only.
Decision decide_output(const Protocol& p, const Multiset& c0,
                       std::size_t node_limit = kDefaultNodeLimit);
OutputAnalysis analyze_output(const Protocol& p, const ReachabilityGraph& g);

/// Decision per terminal SCC of g, in component order (zero, one or
/// ill_specified for a component with a non-consensus or mixed node).
std::vector<Decision> terminal_outputs(const Protocol& p, const ReachabilityGraph& g,
                                       const SccDecomposition& scc);

/// Some reachable configuration has an agent in one of `targets`.
bool coverable(const Protocol& p, const Multiset& c0, const std::vector<StateId>& targets,
               std::size_t node_limit = kDefaultNodeLimit);

using InputPredicate = std::function<bool(const NamedInput&)>;

enum class Verdict : std::uint8_t { pass, fail, inconclusive };
std::string_view to_string(Verdict v);

struct VerificationEntry {
  NamedInput input;
  bool expected = false;
  /// nullopt when the node limit was hit.
  std::optional<Decision> decided;
  std::size_t nodes = 0;
  std::size_t sccs = 0;
  std::size_t terminal_sccs = 0;
  /// For a wrong or ill-specified entry: a shortest execution from the
  /// initial configuration into an offending terminal SCC.
  std::vector<std::string> counterexample;
  std::string counterexample_end;

  bool ok() const {
    return decided && *decided != Decision::ill_specified &&
           (*decided == Decision::one) == expected;
  }
};

struct VerificationReport {
  std::vector<VerificationEntry> entries;
  Verdict verdict = Verdict::pass;
  std::size_t node_limit = kDefaultNodeLimit;

  nlohmann::json to_json() const;
  /// Columns: input, expected, decided, nodes, sccs, terminal_sccs.
  std::string to_csv() const;
};

/// A definite failure outranks an inconclusive entry; any entry over the
/// node limit otherwise makes the report inconclusive.
VerificationReport verify_predicate(const Protocol& p, const InputPredicate& expected,
                                    const std::vector<NamedInput>& domain,
                                    std::size_t node_limit = kDefaultNodeLimit);

struct OneAwareEntry {
  NamedInput input;
  Decision decision = Decision::ill_specified;
  bool q1_touched = false;          // some reachable configuration covers Q1
  bool terminal_inside_q1 = false;  // every terminal configuration lies in Q1
  bool ok = false;
  bool cover_iff_one = false;  // decision == one  <=>  Q1 coverable
  std::string note;
};

struct OneAwareReport {
  bool holds = true;
  bool cover_iff_one_holds = true;
  std::vector<OneAwareEntry> entries;
};

/// 1-awareness of `q1` on the given inputs. InvalidInput if q1 meets the
/// initial states or the support of the leaders.
OneAwareReport check_1aware(const Protocol& p, const std::vector<StateId>& q1,
                            const std::vector<NamedInput>& domain,
                            std::size_t node_limit = kDefaultNodeLimit);

std::string format_input(const NamedInput& input);

}  // namespace popproto
