#include "popproto/analysis.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <sstream>
#include <unordered_set>

namespace popproto {

namespace {

struct CompiledTransition {
  std::vector<std::pair<StateId, std::uint32_t>> need;     // pre-multiset
  std::vector<std::pair<StateId, std::int64_t>> delta;    // post - pre, non-zero
};

std::vector<CompiledTransition> compile_transitions(const Protocol& p) {
  std::vector<CompiledTransition> out;
  out.reserve(p.transitions().size());
  for (const auto& t : p.transitions()) {
    CompiledTransition ct;
    for (const auto& [s, n] : t.pre_multiset().entries()) {
      ct.need.emplace_back(s, static_cast<std::uint32_t>(n));
    }
    std::vector<std::int64_t> d(p.num_states(), 0);
    for (const auto& [s, n] : t.pre_multiset().entries()) d[s] -= static_cast<std::int64_t>(n);
    for (const auto& [s, n] : t.post_multiset().entries()) d[s] += static_cast<std::int64_t>(n);
    for (StateId s = 0; s < d.size(); ++s) {
      if (d[s] != 0) ct.delta.emplace_back(s, d[s]);
    }
    out.push_back(std::move(ct));
  }
  return out;
}

}  // namespace

Multiset ReachabilityGraph::configuration(NodeId n) const {
  return Multiset::from_dense(counts(n));
}

std::span<const ReachabilityGraph::Edge> ReachabilityGraph::successors(NodeId n) const {
  if (!expanded(n)) return {};
  return {edges_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]};
}

std::vector<std::uint32_t> ReachabilityGraph::path_to(NodeId n) const {
  std::vector<std::uint32_t> path;
  while (n != root()) {
    path.push_back(parent_label_[n]);
    n = parent_[n];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<NodeId> ReachabilityGraph::find(const Multiset& c) const {
  std::vector<std::uint32_t> dense(num_states_, 0);
  for (const auto& [s, k] : c.entries()) {
    if (s >= num_states_) return std::nullopt;
    dense[s] = static_cast<std::uint32_t>(k);
  }
  for (NodeId n = 0; n < num_nodes(); ++n) {
    auto row = counts(n);
    if (std::equal(row.begin(), row.end(), dense.begin())) return n;
  }
  return std::nullopt;
}

NodeLimitExceeded::NodeLimitExceeded(std::size_t limit,
                                     std::shared_ptr<const ReachabilityGraph> partial)
    : Error("exploration exceeded the node limit of " + std::to_string(limit)),
      limit_(limit),
      partial_(std::move(partial)) {}

/// Breadth-first construction of a ReachabilityGraph.
class GraphExplorer {
 public:
  GraphExplorer(const Protocol& p, std::function<bool(std::uint32_t)> allowed,
                std::size_t limit)
      : compiled_(compile_transitions(p)),
        allowed_(std::move(allowed)),
        limit_(limit),
        index_(64, Hash{&graph_}, Equal{&graph_}) {
    graph_.num_states_ = p.num_states();
  }

  /// Explores until exhaustion, or until `stop` accepts a node (then returns
  /// that node; the graph is left partially expanded).
  std::optional<NodeId> run(const Multiset& c0,
                            const std::function<bool(std::span<const std::uint32_t>)>& stop) {
    const std::size_t q = graph_.num_states_;
    if (c0.empty()) throw EmptyPopulation("exploration needs a non-empty configuration");
    if (c0.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw std::overflow_error("population too large for exploration");
    }
    graph_.pool_.assign(q, 0);
    for (const auto& [s, n] : c0.entries()) {
      if (s >= q) throw InvalidInput("configuration mentions a state outside the protocol");
      graph_.pool_[s] = static_cast<std::uint32_t>(n);
    }
    graph_.parent_.push_back(kNoNode);
    graph_.parent_label_.push_back(0);
    index_.insert(0);
    if (stop && stop(graph_.counts(0))) return NodeId{0};

    std::vector<std::uint32_t> scratch(q);
    for (NodeId u = 0; u < graph_.num_nodes(); ++u) {
      for (std::uint32_t ti = 0; ti < compiled_.size(); ++ti) {
        if (allowed_ && !allowed_(ti)) continue;
        const auto& ct = compiled_[ti];
        const std::uint32_t* row = graph_.pool_.data() + static_cast<std::size_t>(u) * q;
        bool ok = true;
        for (const auto& [s, n] : ct.need) {
          if (row[s] < n) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        std::memcpy(scratch.data(), row, q * sizeof(std::uint32_t));
        for (const auto& [s, d] : ct.delta) {
          scratch[s] = static_cast<std::uint32_t>(static_cast<std::int64_t>(scratch[s]) + d);
        }
        // Tentatively append the successor so the index can hash it in place.
        const NodeId candidate = static_cast<NodeId>(graph_.num_nodes());
        graph_.pool_.insert(graph_.pool_.end(), scratch.begin(), scratch.end());
        graph_.parent_.push_back(u);
        graph_.parent_label_.push_back(ti);
        auto [it, inserted] = index_.insert(candidate);
        if (!inserted) {
          graph_.pool_.resize(graph_.pool_.size() - q);
          graph_.parent_.pop_back();
          graph_.parent_label_.pop_back();
        } else if (graph_.num_nodes() > limit_) {
          index_.erase(candidate);
          graph_.pool_.resize(graph_.pool_.size() - q);
          graph_.parent_.pop_back();
          graph_.parent_label_.pop_back();
          throw NodeLimitExceeded(limit_, std::make_shared<ReachabilityGraph>(std::move(graph_)));
        }
        graph_.edges_.push_back({*it, ti});
        if (inserted && stop && stop(graph_.counts(candidate))) {
          graph_.offsets_.push_back(graph_.edges_.size());
          return candidate;
        }
      }
      graph_.offsets_.push_back(graph_.edges_.size());
    }
    return std::nullopt;
  }

  ReachabilityGraph take() { return std::move(graph_); }

 private:
  struct Hash {
    const ReachabilityGraph* g;
    std::size_t operator()(NodeId n) const {
      auto row = g->counts(n);
      std::size_t h = 0x9e3779b97f4a7c15ULL;
      for (std::uint32_t v : row) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };
  struct Equal {
    const ReachabilityGraph* g;
    bool operator()(NodeId a, NodeId b) const {
      auto x = g->counts(a);
      auto y = g->counts(b);
      return std::equal(x.begin(), x.end(), y.begin());
    }
  };

  std::vector<CompiledTransition> compiled_;
  std::function<bool(std::uint32_t)> allowed_;
  std::size_t limit_;
  ReachabilityGraph graph_;
  std::unordered_set<NodeId, Hash, Equal> index_;
};

ReachabilityGraph explore(const Protocol& p, const Multiset& c0, std::size_t node_limit) {
  return explore_restricted(p, c0, nullptr, node_limit);
}

ReachabilityGraph explore_restricted(const Protocol& p, const Multiset& c0,
                                     const std::function<bool(std::uint32_t)>& allowed,
                                     std::size_t node_limit) {
  GraphExplorer ex(p, allowed, node_limit);
  ex.run(c0, nullptr);
  return ex.take();
}

std::size_t SccDecomposition::terminal_count() const {
  return static_cast<std::size_t>(std::count(terminal.begin(), terminal.end(), true));
}

SccDecomposition strongly_connected_components(const ReachabilityGraph& g) {
  const std::size_t n = g.num_nodes();
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  SccDecomposition out;
  out.component.assign(n, 0);

  struct Frame {
    NodeId node;
    std::size_t next_edge;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;

  for (NodeId start = 0; start < n; ++start) {
    if (index[start] != kUnvisited) continue;
    call.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto succ = g.successors(f.node);
      if (f.next_edge < succ.size()) {
        NodeId w = succ[f.next_edge++].target;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
        continue;
      }
      const NodeId v = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[v]);
      if (low[v] == index[v]) {
        const auto id = static_cast<std::uint32_t>(out.count++);
        NodeId w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component[w] = id;
        } while (w != v);
      }
    }
  }

  out.terminal.assign(out.count, true);
  for (NodeId v = 0; v < n; ++v) {
    for (const auto& e : g.successors(v)) {
      if (out.component[e.target] != out.component[v]) out.terminal[out.component[v]] = false;
    }
  }
  return out;
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::zero:
      return "0";
    case Decision::one:
      return "1";
    case Decision::ill_specified:
      return "ill-specified";
  }
  return "ill-specified";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Decision> terminal_outputs(const Protocol& p, const ReachabilityGraph& g,
                                       const SccDecomposition& scc) {
  // Per component: 0/1 while consistent, 2 once mixed or non-consensus, 3 unseen.
  std::vector<std::uint8_t> state(scc.count, 3);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto c = scc.component[v];
    if (!scc.terminal[c] || state[c] == 2) continue;
    Output o = p.consensus_output(g.configuration(v));
    std::uint8_t val = o == Output::none ? 2 : static_cast<std::uint8_t>(o);
    state[c] = (state[c] == 3 || state[c] == val) ? val : 2;
  }
  std::vector<Decision> out;
  for (std::size_t c = 0; c < scc.count; ++c) {
    if (!scc.terminal[c]) continue;
    out.push_back(static_cast<Decision>(state[c] == 3 ? 2 : state[c]));
  }
  return out;
}

OutputAnalysis analyze_output(const Protocol& p, const ReachabilityGraph& g) {
  const auto scc = strongly_connected_components(g);
  OutputAnalysis a;
  a.nodes = g.num_nodes();
  a.sccs = scc.count;
  a.terminal_sccs = scc.terminal_count();
  std::optional<Decision> agreed;
  for (Decision d : terminal_outputs(p, g, scc)) {
    if (d == Decision::ill_specified || (agreed && *agreed != d)) {
      agreed = Decision::ill_specified;
      break;
    }
    agreed = d;
  }
  a.decision = agreed.value_or(Decision::ill_specified);
  return a;
}

Decision decide_output(const Protocol& p, const Multiset& c0, std::size_t node_limit) {
  return analyze_output(p, explore(p, c0, node_limit)).decision;
}

bool coverable(const Protocol& p, const Multiset& c0, const std::vector<StateId>& targets,
               std::size_t node_limit) {
  for (StateId s : targets) {
    if (s >= p.num_states()) throw InvalidInput("target state outside the protocol");
  }
  GraphExplorer ex(p, nullptr, node_limit);
  auto hit = ex.run(c0, [&](std::span<const std::uint32_t> row) {
    return std::any_of(targets.begin(), targets.end(), [&](StateId s) { return row[s] > 0; });
  });
  return hit.has_value();
}

std::string format_input(const NamedInput& input) {
  std::string out;
  for (const auto& [name, n] : input) {
    if (!out.empty()) out += ';';
    out += name + "=" + std::to_string(n);
  }
  return out;
}

VerificationReport verify_predicate(const Protocol& p, const InputPredicate& expected,
                                    const std::vector<NamedInput>& domain,
                                    std::size_t node_limit) {
  if (domain.empty()) throw InvalidInput("verification domain is empty");
  VerificationReport report;
  report.node_limit = node_limit;
  bool failed = false, limited = false;
  for (const auto& input : domain) {
    VerificationEntry e;
    e.input = input;
    e.expected = expected(input);
    const Multiset c0 = p.initial_configuration(input);
    try {
      const ReachabilityGraph g = explore(p, c0, node_limit);
      const auto scc = strongly_connected_components(g);
      const auto a = analyze_output(p, g);
      e.decided = a.decision;
      e.nodes = a.nodes;
      e.sccs = a.sccs;
      e.terminal_sccs = a.terminal_sccs;
      if (!e.ok()) {
        // First node of a terminal SCC holding a configuration whose output
        // is not the expected one.
        const Output want = e.expected ? Output::one : Output::zero;
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
          if (!scc.terminal[scc.component[v]]) continue;
          if (p.consensus_output(g.configuration(v)) == want) continue;
          for (auto ti : g.path_to(v)) e.counterexample.push_back(p.format(p.transitions()[ti]));
          e.counterexample_end = p.format(g.configuration(v));
          break;
        }
      }
    } catch (const NodeLimitExceeded& ex) {
      e.decided.reset();
      e.nodes = ex.partial().num_nodes();
    }
    if (!e.decided) {
      limited = true;
    } else if (!e.ok()) {
      failed = true;
    }
    report.entries.push_back(std::move(e));
  }
  report.verdict = failed ? Verdict::fail : limited ? Verdict::inconclusive : Verdict::pass;
  return report;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json doc;
  doc["verdict"] = std::string(to_string(verdict));
  doc["node_limit"] = node_limit;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json j;
    j["input"] = e.input;
    j["expected"] = e.expected ? 1 : 0;
    j["decided"] = e.decided ? std::string(to_string(*e.decided)) : "limit";
    j["nodes"] = e.nodes;
    j["sccs"] = e.sccs;
    j["terminal_sccs"] = e.terminal_sccs;
    j["ok"] = e.ok();
    if (!e.counterexample_end.empty()) {
      j["counterexample"] = {{"transitions", e.counterexample}, {"reaches", e.counterexample_end}};
    }
    arr.push_back(std::move(j));
  }
  doc["entries"] = std::move(arr);
  return doc;
}

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "input,expected,decided,nodes,sccs,terminal_sccs\n";
  for (const auto& e : entries) {
    os << format_input(e.input) << ',' << (e.expected ? 1 : 0) << ','
       << (e.decided ? to_string(*e.decided) : "limit") << ',' << e.nodes << ',' << e.sccs << ','
       << e.terminal_sccs << '\n';
  }
  return os.str();
}

OneAwareReport check_1aware(const Protocol& p, const std::vector<StateId>& q1,
                            const std::vector<NamedInput>& domain, std::size_t node_limit) {
  std::vector<bool> in_q1(p.num_states(), false);
  for (StateId s : q1) {
    if (s >= p.num_states()) throw InvalidInput("Q1 state outside the protocol");
    if (p.is_initial(s) || p.leaders()[s] > 0) {
      throw InvalidInput("Q1 must avoid initial states and leader states ('" + p.name(s) + "')");
    }
    in_q1[s] = true;
  }
  OneAwareReport report;
  for (const auto& input : domain) {
    OneAwareEntry e;
    e.input = input;
    const ReachabilityGraph g = explore(p, p.initial_configuration(input), node_limit);
    const auto scc = strongly_connected_components(g);
    e.decision = analyze_output(p, g).decision;
    e.terminal_inside_q1 = true;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto row = g.counts(v);
      bool any_in = false, all_in = true;
      for (StateId s = 0; s < row.size(); ++s) {
        if (row[s] == 0) continue;
        if (in_q1[s]) {
          any_in = true;
        } else {
          all_in = false;
        }
      }
      e.q1_touched = e.q1_touched || any_in;
      if (scc.terminal[scc.component[v]] && !all_in) e.terminal_inside_q1 = false;
    }
    switch (e.decision) {
      case Decision::zero:
        e.ok = !e.q1_touched;
        if (!e.ok) e.note = "a 0-execution covers Q1";
        break;
      case Decision::one:
        e.ok = e.terminal_inside_q1;
        if (!e.ok) e.note = "a terminal configuration has agents outside Q1";
        break;
      case Decision::ill_specified:
        e.ok = false;
        e.note = "ill-specified";
        break;
    }
    e.cover_iff_one = (e.decision == Decision::one) == e.q1_touched;
    report.holds = report.holds && e.ok;
    report.cover_iff_one_holds = report.cover_iff_one_holds && e.cover_iff_one;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace popproto
