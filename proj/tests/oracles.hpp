#pragma once

// Reference implementations used to cross-check the library. They share no
// code with it beyond reading a protocol's states, transitions and outputs:
// configurations are name -> count maps, firing and reachability are written
// out naively, and bottom components are found from explicit reach sets.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "popproto/protocol.hpp"

namespace oracle {

using Config = std::map<std::string, long>;

struct Rule {
  std::vector<std::string> pre;
  std::vector<std::string> post;
};

inline std::vector<Rule> rules_of(const popproto::Protocol& p) {
  std::vector<Rule> rules;
  for (const auto& t : p.transitions()) {
    Rule r;
    for (auto s : t.pre()) r.pre.push_back(p.name(s));
    for (auto s : t.post()) r.post.push_back(p.name(s));
    rules.push_back(r);
  }
  return rules;
}

inline bool fire(const Rule& r, const Config& c, Config& out) {
  out = c;
  for (const auto& s : r.pre) {
    auto it = out.find(s);
    if (it == out.end() || it->second == 0) return false;
    if (--it->second == 0) out.erase(it);
  }
  for (const auto& s : r.post) ++out[s];
  return out != c;
}

struct Graph {
  std::vector<Config> nodes;
  std::vector<std::set<int>> succ;
};

inline Graph explore(const std::vector<Rule>& rules, const Config& root, std::size_t limit = 2'000'000) {
  Graph g;
  std::map<Config, int> index;
  g.nodes.push_back(root);
  g.succ.emplace_back();
  index[root] = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (const auto& r : rules) {
      Config next;
      if (!fire(r, g.nodes[i], next)) continue;
      auto [it, fresh] = index.emplace(next, static_cast<int>(g.nodes.size()));
      if (fresh) {
        if (g.nodes.size() >= limit) throw std::runtime_error("oracle limit");
        g.nodes.push_back(next);
        g.succ.emplace_back();
      }
      g.succ[i].insert(it->second);
    }
  }
  return g;
}

inline std::vector<std::vector<bool>> reach_sets(const Graph& g) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) {
    std::deque<int> q{static_cast<int>(u)};
    reach[u][u] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : g.succ[v]) {
        if (!reach[u][w]) {
          reach[u][w] = true;
          q.push_back(w);
        }
      }
    }
  }
  return reach;
}

/// 0/1 consensus, 2 for none.
inline int consensus(const popproto::Protocol& p, const Config& c) {
  int seen = -1;
  for (const auto& [s, n] : c) {
    if (n == 0) continue;
    const int o = p.output(p.id(s));
    if (seen >= 0 && seen != o) return 2;
    seen = o;
  }
  return seen < 0 ? 2 : seen;
}

/// Output of every fair execution from root: 0, 1, or 2 if ill-specified.
inline int decide(const popproto::Protocol& p, const Config& root) {
  const Graph g = explore(rules_of(p), root);
  const auto reach = reach_sets(g);
  std::set<int> outputs;
  for (std::size_t u = 0; u < g.nodes.size(); ++u) {
    bool bottom = true;
    for (std::size_t v = 0; v < g.nodes.size() && bottom; ++v) {
      if (reach[u][v] && !reach[v][u]) bottom = false;
    }
    if (bottom) outputs.insert(consensus(p, g.nodes[u]));
  }
  return outputs.size() == 1 ? *outputs.begin() : 2;
}

inline Config initial(const popproto::Protocol& p, const std::map<std::string, long>& input) {
  Config c;
  for (const auto& [s, n] : input) {
    if (n > 0) c[s] += n;
  }
  for (const auto& [s, n] : p.leaders().entries()) c[p.name(s)] += static_cast<long>(n);
  return c;
}

inline std::size_t count_nodes(const popproto::Protocol& p, const Config& root) {
  return explore(rules_of(p), root).nodes.size();
}

inline bool coverable(const popproto::Protocol& p, const Config& root, const std::set<std::string>& targets) {
  const Graph g = explore(rules_of(p), root);
  for (const auto& c : g.nodes) {
    for (const auto& [s, n] : c) {
      if (n > 0 && targets.contains(s)) return true;
    }
  }
  return false;
}

/// Commutative rewriting over single-character letters. Words are sorted
/// strings; `budget` is the number of free padding agents. A production
/// l -> r with L = max(|l|, |r|, 2) borrows L - |l| free agents and returns
/// L - |r|.
struct Rewriting {
  std::vector<std::pair<std::string, std::string>> productions;

  static std::string norm(std::string w) {
    std::sort(w.begin(), w.end());
    return w;
  }

  bool derivable(const std::string& start, char target, long population) const {
    std::set<std::string> seen;
    std::vector<std::string> todo{norm(start)};
    seen.insert(todo.back());
    while (!todo.empty()) {
      std::string w = todo.back();
      todo.pop_back();
      if (w.find(target) != std::string::npos) return true;
      const long free = population - static_cast<long>(w.size());
      for (const auto& [l, r] : productions) {
        if (norm(l) == norm(r)) continue;
        const long len = std::max<long>({static_cast<long>(l.size()), static_cast<long>(r.size()), 2});
        if (free < len - static_cast<long>(l.size())) continue;
        std::string rest = w;
        bool ok = true;
        for (char ch : l) {
          auto k = rest.find(ch);
          if (k == std::string::npos) {
            ok = false;
            break;
          }
          rest.erase(k, 1);
        }
        if (!ok) continue;
        std::string next = norm(rest + r);
        if (seen.insert(next).second) todo.push_back(next);
      }
    }
    return false;
  }

  /// Smallest number of padding agents for which s c derives f.
  long threshold(char s, char c, char f, long max_x) const {
    for (long x = 0; x <= max_x; ++x) {
      if (derivable(std::string{s, c}, f, x + 2)) return x;
    }
    return -1;
  }
};

}  // namespace oracle
