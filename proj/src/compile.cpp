#include "popproto/compile.hpp"

#include <deque>
#include <set>
#include <unordered_map>

namespace popproto {

std::map<std::size_t, std::size_t> arity_histogram(const Protocol& p) {
  std::map<std::size_t, std::size_t> h;
  for (const auto& t : p.transitions()) ++h[t.arity()];
  return h;
}

std::size_t gadget_state_bound(std::size_t states, const std::map<std::size_t, std::size_t>& by_arity) {
  std::size_t bound = states;
  for (const auto& [arity, count] : by_arity) {
    if (arity >= 3) bound += 3 * arity * count;
  }
  return bound;
}

std::size_t gadget_state_bound(const Protocol& p) { return gadget_state_bound(p.num_states(), arity_histogram(p)); }

std::size_t lowered_state_count(const Protocol& p) {
  std::size_t n = p.num_states();
  for (const auto& t : p.transitions()) {
    if (t.arity() >= 3) n += 3 * (t.arity() - 2);
  }
  return n;
}

namespace {

std::string gadget_prefix(const Protocol& p, std::size_t index, std::size_t arity) {
  std::string prefix = std::to_string(index);
  auto clashes = [&](const std::string& pre) {
    for (std::size_t j = 1; j < arity; ++j) {
      for (const char* kind : {".d", ".a", ".b"}) {
        if (p.find(pre + kind + std::to_string(j))) return true;
      }
    }
    return false;
  };
  while (clashes(prefix)) prefix.insert(prefix.begin(), '_');
  return prefix;
}

}  // namespace

Protocol to_2way(const Protocol& p) {
  ProtocolBuilder b;
  for (StateId s = 0; s < p.num_states(); ++s) b.state(p.name(s), p.output(s));
  for (StateId s : p.initial()) b.initial(p.name(s));
  for (const auto& [s, n] : p.leaders().entries()) b.leader(p.name(s), n);

  std::size_t gadget_states = 0;
  std::size_t lowered = 0;
  for (std::size_t ti = 0; ti < p.transitions().size(); ++ti) {
    const Transition& t = p.transitions()[ti];
    auto q = [&](std::size_t j) { return p.name(t.pre()[j - 1]); };
    auto r = [&](std::size_t j) { return p.name(t.post()[j - 1]); };
    const std::size_t k = t.arity();
    if (k == 2) {
      b.transition({q(1), q(2)}, {r(1), r(2)});
      continue;
    }
    ++lowered;
    const std::string pre = gadget_prefix(p, ti, k);
    auto d = [&](std::size_t j) { return pre + ".d" + std::to_string(j); };
    auto a = [&](std::size_t j) { return pre + ".a" + std::to_string(j); };
    auto bk = [&](std::size_t j) { return pre + ".b" + std::to_string(j); };
    for (std::size_t j = 1; j <= k - 2; ++j) b.state(d(j), p.output(t.pre()[j - 1]));
    for (std::size_t j = 2; j <= k - 1; ++j) {
      b.state(a(j), p.output(t.pre()[j - 1]));
      b.state(bk(j), p.output(t.post()[j - 1]));
    }
    gadget_states += 3 * (k - 2);

    b.transition({q(1), q(2)}, {d(1), a(2)});
    b.transition({d(1), a(2)}, {q(1), q(2)});
    for (std::size_t l = 2; l <= k - 2; ++l) {
      b.transition({a(l), q(l + 1)}, {d(l), a(l + 1)});
      b.transition({d(l), a(l + 1)}, {a(l), q(l + 1)});
    }
    b.transition({a(k - 1), q(k)}, {bk(k - 1), r(k)});
    for (std::size_t l = k - 2; l >= 2; --l) b.transition({d(l), bk(l + 1)}, {bk(l), r(l + 1)});
    b.transition({d(1), bk(2)}, {r(1), r(2)});
  }

  b.meta() = p.meta();
  b.meta()["lowering"] = {
      {"original_states", p.num_states()},
      {"gadget_states", gadget_states},
      {"states", p.num_states() + gadget_states},
      {"lowered_transitions", lowered},
      {"gadget_state_bound", gadget_state_bound(p)},
  };
  return b.build();
}

Multiset translate(const Protocol& from, const Protocol& to, const Multiset& c) {
  Multiset out;
  for (const auto& [s, n] : c.entries()) out.add(to.id(from.name(s)), n);
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

/// For every SCC of g, the set of marked nodes (indexed by `mark`) reachable
/// from it. `mark[v]` is the bit index of node v or kNoNode.
std::vector<Bits> reachable_marks(const ReachabilityGraph& g, const SccDecomposition& scc,
                                  const std::vector<NodeId>& mark, std::size_t bits) {
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::vector<NodeId>> members(scc.count);
  for (NodeId v = 0; v < g.num_nodes(); ++v) members[scc.component[v]].push_back(v);
  std::vector<Bits> reach(scc.count, Bits(words, 0));
  // Tarjan completes a component after every component it reaches.
  for (std::size_t c = 0; c < scc.count; ++c) {
    Bits& r = reach[c];
    for (NodeId v : members[c]) {
      if (mark[v] != kNoNode) r[mark[v] / 64] |= std::uint64_t{1} << (mark[v] % 64);
      for (const auto& e : g.successors(v)) {
        const auto tc = scc.component[e.target];
        if (tc == c) continue;
        for (std::size_t w = 0; w < words; ++w) r[w] |= reach[tc][w];
      }
    }
  }
  return reach;
}

}  // namespace

SimulationCheckReport check_simulation(const Protocol& p, const Protocol& p2,
                                       const std::vector<NamedInput>& domain,
                                       std::size_t node_limit) {
  SimulationCheckReport report;
  std::vector<bool> in_q(p2.num_states(), false);
  for (StateId s = 0; s < p2.num_states(); ++s) in_q[s] = p.find(p2.name(s)).has_value();

  for (const auto& input : domain) {
    SimulationCheckEntry entry;
    entry.input = input;
    std::optional<ReachabilityGraph> g1, g2;
    try {
      const Multiset c0 = p.initial_configuration(input);
      g1.emplace(explore(p, c0, node_limit));
      g2.emplace(explore(p2, translate(p, p2, c0), node_limit));
    } catch (const NodeLimitExceeded&) {
      report.inconclusive = true;
      entry.witness = "node limit exceeded";
      report.entries.push_back(std::move(entry));
      continue;
    }
    entry.nodes = g1->num_nodes();
    entry.lowered_nodes = g2->num_nodes();

    std::unordered_map<Multiset, NodeId> index1;
    for (NodeId v = 0; v < g1->num_nodes(); ++v) index1.emplace(g1->configuration(v), v);

    std::vector<bool> gadget_free(g2->num_nodes(), true);
    for (NodeId v = 0; v < g2->num_nodes(); ++v) {
      const auto cnt = g2->counts(v);
      for (StateId s = 0; s < cnt.size(); ++s) {
        if (cnt[s] != 0 && !in_q[s]) {
          gadget_free[v] = false;
          break;
        }
      }
    }

    // Q-configurations of p2, mapped to nodes of p's graph.
    std::vector<NodeId> mark2(g2->num_nodes(), kNoNode);
    std::vector<NodeId> image(g1->num_nodes(), kNoNode);
    std::size_t q_nodes = 0;
    for (NodeId v = 0; v < g2->num_nodes(); ++v) {
      if (!gadget_free[v]) continue;
      ++q_nodes;
      const Multiset c = translate(p2, p, g2->configuration(v));
      auto it = index1.find(c);
      if (it == index1.end()) {
        entry.reach_preserved = false;
        entry.witness = "lowered protocol reaches " + p.format(c) + ", which the original does not";
        break;
      }
      mark2[v] = it->second;
      image[it->second] = v;
    }
    if (entry.reach_preserved && q_nodes != g1->num_nodes()) {
      for (NodeId u = 0; u < g1->num_nodes(); ++u) {
        if (image[u] == kNoNode) {
          entry.reach_preserved = false;
          entry.witness = "original reaches " + p.format(g1->configuration(u)) +
                          ", which the lowered protocol does not";
          break;
        }
      }
    }

    if (entry.reach_preserved) {
      std::vector<NodeId> mark1(g1->num_nodes());
      for (NodeId u = 0; u < g1->num_nodes(); ++u) mark1[u] = u;
      const auto scc1 = strongly_connected_components(*g1);
      const auto scc2 = strongly_connected_components(*g2);
      const auto r1 = reachable_marks(*g1, scc1, mark1, g1->num_nodes());
      const auto r2 = reachable_marks(*g2, scc2, mark2, g1->num_nodes());
      for (NodeId u = 0; u < g1->num_nodes() && entry.reach_preserved; ++u) {
        const auto& a = r1[scc1.component[u]];
        const auto& b = r2[scc2.component[image[u]]];
        if (a != b) {
          entry.reach_preserved = false;
          entry.witness = "reachability from " + p.format(g1->configuration(u)) + " differs";
        }
      }
    }

    // Property 5: backward search from the Q-configurations of p2.
    std::vector<std::vector<NodeId>> preds(g2->num_nodes());
    for (NodeId v = 0; v < g2->num_nodes(); ++v) {
      for (const auto& e : g2->successors(v)) preds[e.target].push_back(v);
    }
    std::vector<bool> seen(g2->num_nodes(), false);
    std::deque<NodeId> queue;
    for (NodeId v = 0; v < g2->num_nodes(); ++v) {
      if (gadget_free[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      for (NodeId u : preds[v]) {
        if (!seen[u]) {
          seen[u] = true;
          queue.push_back(u);
        }
      }
    }
    for (NodeId v = 0; v < g2->num_nodes(); ++v) {
      if (!seen[v]) {
        entry.gadgets_drain = false;
        if (entry.witness.empty()) {
          entry.witness = p2.format(g2->configuration(v)) + " cannot reach a gadget-free configuration";
        }
        break;
      }
    }

    if (!entry.reach_preserved || !entry.gadgets_drain) report.holds = false;
    report.entries.push_back(std::move(entry));
  }
  if (report.inconclusive && report.holds) report.holds = false;
  return report;
}

}  // namespace popproto
