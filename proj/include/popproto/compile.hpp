#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popproto/analysis.hpp"
#include "popproto/protocol.hpp"

namespace popproto {

/// State bound of the k-way to 2-way lowering: |Q| + sum over transitions of
/// arity i >= 3 of 3i.
std::size_t gadget_state_bound(std::size_t states, const std::map<std::size_t, std::size_t>& by_arity);
std::size_t gadget_state_bound(const Protocol& p);

/// Transitions per arity.
std::map<std::size_t, std::size_t> arity_histogram(const Protocol& p);

/// Exact state count of to_2way(p) without building it: each transition of
/// arity i >= 3 contributes 3(i - 2) gadget states.
std::size_t lowered_state_count(const Protocol& p);

/// Replaces every transition of arity i >= 3 by a gadget of 2-way
/// transitions. For t = q1..qi -> r1..ri the gadget has states d1..d(i-2),
/// a2..a(i-1), b2..b(i-1), named "<t>.d<j>" etc. where <t> is the index of t
/// in p.transitions(), and the transitions
///
///   forth_1:   q1, q2         -> d1, a2
///   forth_l:   a_l, q_(l+1)   -> d_l, a_(l+1)      2 <= l <= i-2
///   inverses of all forth transitions
///   success:   a_(i-1), q_i   -> b_(i-1), r_i
///   back_l:    d_l, b_(l+1)   -> b_l, r_(l+1)      2 <= l <= i-2
///   back_1:    d1, b2         -> r1, r2
///
/// O(d_j) = O(a_j) = O(q_j) and O(b_j) = O(r_j). I and L are unchanged.
/// The result's meta carries a "lowering" certificate.
Protocol to_2way(const Protocol& p);

/// Configuration of `to` holding the agents of `c` (a configuration of
/// `from`) in the states of the same names. InvalidInput if a name is missing.
Multiset translate(const Protocol& from, const Protocol& to, const Multiset& c);

struct SimulationCheckEntry {
  NamedInput input;
  std::size_t nodes = 0;          // configurations of p
  std::size_t lowered_nodes = 0;  // configurations of p2
  bool reach_preserved = true;
  bool gadgets_drain = true;
  std::string witness;  // empty when both properties hold
};

struct SimulationCheckReport {
  bool holds = true;
  bool inconclusive = false;  // some input exceeded the node limit
  std::vector<SimulationCheckEntry> entries;
};

/// Checks that p2 simulates p on the given inputs: for Q-configurations C,
/// C' reachable from the initial configuration, C ->* C' in p iff in p2
/// (reach_preserved), and every configuration reachable in p2 can reach one
/// without gadget states (gadgets_drain).
SimulationCheckReport check_simulation(const Protocol& p, const Protocol& p2,
                                       const std::vector<NamedInput>& domain,
                                       std::size_t node_limit = kDefaultNodeLimit);

}  // namespace popproto
