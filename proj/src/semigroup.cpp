#include "popproto/semigroup.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "popproto/io.hpp"
#include "popproto/sim.hpp"

namespace popproto {

using nlohmann::json;

namespace {

Word sorted(Word w) {
  std::sort(w.begin(), w.end());
  return w;
}

std::string join(const Word& w) {
  std::string out;
  for (const auto& a : w) out += (out.empty() ? "" : " ") + a;
  return out.empty() ? "<empty>" : out;
}

/// Removes the letters of `l` from the sorted word `w`; false if missing.
bool remove_all(Word& w, const Word& l) {
  for (const auto& a : l) {
    auto it = std::lower_bound(w.begin(), w.end(), a);
    if (it == w.end() || *it != a) return false;
    w.erase(it);
  }
  return true;
}

Word apply(Word w, const Production& p) {
  remove_all(w, p.l);
  w.insert(w.end(), p.r.begin(), p.r.end());
  return sorted(std::move(w));
}

bool applicable(const Word& w, const Production& p) {
  Word copy = w;
  return remove_all(copy, sorted(p.l));
}

Word parse_word(const json& v, const std::vector<std::string>& alphabet) {
  if (v.is_array()) return v.get<Word>();
  const auto text = v.get<std::string>();
  Word w;
  if (text.find(' ') != std::string::npos) {
    std::istringstream in(text);
    for (std::string tok; in >> tok;) w.push_back(tok);
    return w;
  }
  const bool single_chars =
      std::all_of(alphabet.begin(), alphabet.end(), [](const auto& a) { return a.size() == 1; });
  if (!single_chars && !text.empty()) return {text};
  for (char ch : text) w.emplace_back(1, ch);
  return w;
}

}  // namespace

std::vector<std::pair<std::string, Count>> letter_counts(const Word& w) {
  std::map<std::string, Count> m;
  for (const auto& a : w) ++m[a];
  return {m.begin(), m.end()};
}

bool is_commutativity(const Production& p) { return letter_counts(p.l) == letter_counts(p.r); }

void SemigroupPresentation::validate() const {
  std::set<std::string> letters(alphabet.begin(), alphabet.end());
  if (letters.size() != alphabet.size()) throw MalformedProtocol("duplicate letter in alphabet");
  auto known = [&](const std::string& a, const std::string& what) {
    if (!letters.contains(a)) throw MalformedProtocol(what + " '" + a + "' is not in the alphabet");
  };
  known(s, "letter s");
  known(f, "letter f");
  known(c, "letter c");
  if (b) known(*b, "letter b");
  std::set<std::pair<std::vector<std::pair<std::string, Count>>, std::vector<std::pair<std::string, Count>>>>
      rules;
  for (const auto& p : productions) {
    if (p.l.empty() && p.r.empty()) throw MalformedProtocol("production with both sides empty");
    for (const auto& a : p.l) known(a, "letter");
    for (const auto& a : p.r) known(a, "letter");
    rules.emplace(letter_counts(p.l), letter_counts(p.r));
  }
  for (const auto& p : productions) {
    if (!rules.contains({letter_counts(p.r), letter_counts(p.l)})) {
      throw MalformedProtocol("presentation is not reversible: missing " + join(p.r) + " -> " +
                              join(p.l));
    }
  }
}

std::size_t SemigroupPresentation::max_length() const {
  std::size_t m = 0;
  for (const auto& p : productions) m = std::max({m, p.l.size(), p.r.size()});
  return m;
}

SemigroupPresentation presentation_from_json(const json& doc) {
  try {
    SemigroupPresentation sp;
    sp.name = doc.value("name", std::string{});
    sp.alphabet = doc.at("alphabet").get<std::vector<std::string>>();
    for (const auto& p : doc.at("productions")) {
      sp.productions.push_back({parse_word(p.at("l"), sp.alphabet), parse_word(p.at("r"), sp.alphabet)});
    }
    sp.s = doc.at("s").get<std::string>();
    sp.f = doc.at("f").get<std::string>();
    sp.c = doc.at("c").get<std::string>();
    if (doc.contains("b")) sp.b = doc.at("b").get<std::string>();
    sp.validate();
    return sp;
  } catch (const json::exception& e) {
    throw MalformedProtocol(std::string("presentation document: ") + e.what());
  }
}

json to_json(const SemigroupPresentation& sp) {
  json prods = json::array();
  for (const auto& p : sp.productions) prods.push_back({{"l", p.l}, {"r", p.r}});
  json doc = {{"alphabet", sp.alphabet}, {"productions", prods}, {"s", sp.s}, {"f", sp.f}, {"c", sp.c}};
  if (!sp.name.empty()) doc["name"] = sp.name;
  if (sp.b) doc["b"] = *sp.b;
  return doc;
}

SemigroupPresentation read_presentation(const std::filesystem::path& path) {
  return presentation_from_json(read_json(path));
}

namespace {

const std::map<std::string, std::string, std::less<>>& bundled() {
  static const std::map<std::string, std::string, std::less<>> docs = {
      {"double2", R"({"name": "double2", "alphabet": ["s", "f", "b", "c"], "s": "s", "f": "f", "c": "c", "b": "b",
                     "productions": [{"l": "s", "r": "fbb"}, {"l": "fbb", "r": "s"}]})"},
      {"tower", R"({"name": "tower", "alphabet": ["s", "a", "b", "f", "c"], "s": "s", "f": "f", "c": "c",
                   "productions": [{"l": "s", "r": "aa"}, {"l": "aa", "r": "s"},
                                   {"l": "a", "r": "bb"}, {"l": "bb", "r": "a"},
                                   {"l": "bbbb", "r": "f"}, {"l": "f", "r": "bbbb"}]})"},
  };
  return docs;
}

}  // namespace

SemigroupPresentation bundled_presentation(std::string_view name) {
  auto it = bundled().find(name);
  if (it == bundled().end()) throw InvalidInput("unknown presentation '" + std::string(name) + "'");
  return presentation_from_json(json::parse(it->second));
}

std::vector<std::string> bundled_presentation_names() {
  std::vector<std::string> out;
  for (const auto& [name, doc] : bundled()) out.push_back(name);
  return out;
}

std::string padding_state(const SemigroupPresentation& sp) {
  std::string x = "x";
  while (std::find(sp.alphabet.begin(), sp.alphabet.end(), x) != sp.alphabet.end()) x += "'";
  return x;
}

std::pair<Word, Word> pad(const Production& p, const std::string& x) {
  const std::size_t len = std::max({p.l.size(), p.r.size(), std::size_t{2}});
  Word l = p.l, r = p.r;
  l.resize(len, x);
  r.resize(len, x);
  return {l, r};
}

Protocol from_semigroup(const SemigroupPresentation& sp) {
  sp.validate();
  const std::string x = padding_state(sp);
  ProtocolBuilder b;
  for (const auto& a : sp.alphabet) b.state(a, a == sp.f ? 1 : 0);
  b.state(x, 0);
  std::map<std::size_t, std::size_t> by_arity;
  std::size_t dropped = 0;
  for (const auto& p : sp.productions) {
    if (is_commutativity(p)) {
      ++dropped;
      continue;
    }
    auto [l, r] = pad(p, x);
    ++by_arity[l.size()];
    b.transition(std::move(l), std::move(r));
  }
  for (const auto& a : sp.alphabet) b.transition({sp.f, a}, {sp.f, sp.f});
  b.transition({sp.f, x}, {sp.f, sp.f});
  b.initial(x);
  b.leader(sp.c);
  b.leader(sp.s);

  std::size_t lowered = sp.alphabet.size() + 1;
  std::size_t bound = sp.alphabet.size() + 1;
  json arities = json::object();
  for (const auto& [arity, count] : by_arity) {
    arities[std::to_string(arity)] = count;
    if (arity >= 3) {
      lowered += 3 * (arity - 2) * count;
      bound += 3 * arity * count;
    }
  }
  b.meta() = {
      {"construction", "semigroup"},
      {"params", {{"presentation", sp.name}, {"letters", sp.alphabet.size()}, {"productions", sp.productions.size()}}},
      {"variables", {{"x", x}}},
      {"certificate",
       {{"states", sp.alphabet.size() + 1},
        {"leaders", 2},
        {"padded_productions_by_arity", arities},
        {"commutativity_dropped", dropped},
        {"lowered_states", lowered},
        {"lowered_states_bound", bound}}},
  };
  return b.build();
}

std::vector<std::uint32_t> t1_transitions(const SemigroupPresentation& sp, const Protocol& p) {
  const std::string x = padding_state(sp);
  std::set<std::pair<Multiset, Multiset>> padded;
  for (const auto& prod : sp.productions) {
    if (is_commutativity(prod)) continue;
    auto [l, r] = pad(prod, x);
    const Transition t = p.transition(l, r);
    padded.emplace(t.pre_multiset(), t.post_multiset());
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < p.transitions().size(); ++i) {
    const auto& t = p.transitions()[i];
    if (padded.contains({t.pre_multiset(), t.post_multiset()})) out.push_back(i);
  }
  return out;
}

std::vector<Derivation> enumerate_derivations(const SemigroupPresentation& sp, const Word& start,
                                              std::size_t max_steps) {
  std::vector<Derivation> out;
  std::map<Word, Derivation> level;
  const Word s0 = sorted(start);
  level[s0] = {s0, {}, s0};
  out.push_back(level[s0]);
  for (std::size_t k = 1; k <= max_steps; ++k) {
    std::map<Word, Derivation> next;
    for (const auto& [w, d] : level) {
      for (std::size_t i = 0; i < sp.productions.size(); ++i) {
        const auto& p = sp.productions[i];
        if (is_commutativity(p) || !applicable(w, p)) continue;
        Word w2 = apply(w, p);
        if (next.contains(w2)) continue;
        Derivation d2 = d;
        d2.steps.push_back(i);
        d2.beta = w2;
        next.emplace(std::move(w2), std::move(d2));
      }
    }
    for (const auto& [w, d] : next) out.push_back(d);
    level = std::move(next);
  }
  return out;
}

Multiset semigroup_configuration(const Protocol& p, const std::string& x, const Word& alpha, Count m) {
  Multiset c;
  if (m > 0) c.add(p.id(x), m);
  for (const auto& a : alpha) c.add(p.id(a));
  return c;
}

SemigroupSimulationReport check_semigroup_simulation(const SemigroupPresentation& sp, const Protocol& p,
                                             const std::vector<Derivation>& derivations,
                                             const std::vector<Count>& m_values, std::size_t walks,
                                             std::size_t walk_length, std::uint64_t seed) {
  SemigroupSimulationReport rep;
  const std::string x = padding_state(sp);
  std::size_t arity = 2;
  for (const auto& prod : sp.productions) arity = std::max(arity, pad(prod, x).first.size());

  std::vector<Transition> padded;
  for (const auto& prod : sp.productions) {
    auto [l, r] = pad(prod, x);
    padded.push_back(p.transition(l, r));
  }

  // Letters of a configuration, as a sorted word.
  auto letters = [&](const Multiset& c) {
    Word w;
    for (const auto& [s, n] : c.entries()) {
      if (p.name(s) == x) continue;
      w.insert(w.end(), n, p.name(s));
    }
    return w;
  };

  for (const auto& d : derivations) {
    const Count need = static_cast<Count>((arity - 1) * d.steps.size());
    for (Count m : m_values) {
      if (m < need) continue;
      Multiset c = semigroup_configuration(p, x, d.alpha, m);
      for (std::size_t i : d.steps) {
        if (!p.enabled(padded[i], c)) {
          rep.holds = false;
          rep.witness = "pad of production " + std::to_string(i) + " disabled while replaying from " +
                        join(d.alpha) + " with m = " + std::to_string(m);
          return rep;
        }
        c = p.fire(padded[i], c);
      }
      if (letters(c) != sorted(d.beta)) {
        rep.holds = false;
        rep.witness = "replay of a derivation from " + join(d.alpha) + " ends at " + join(letters(c)) +
                      " instead of " + join(d.beta);
        return rep;
      }
      ++rep.forward_checked;
    }
  }

  // Backward direction: map protocol steps to productions.
  const auto t1 = t1_transitions(sp, p);
  std::map<std::uint32_t, std::vector<std::size_t>> producers;
  for (std::uint32_t ti : t1) {
    for (std::size_t i = 0; i < padded.size(); ++i) {
      if (!is_commutativity(sp.productions[i]) && padded[i].same_effect(p.transitions()[ti])) {
        producers[ti].push_back(i);
      }
    }
  }
  std::set<Word> starts;
  for (const auto& d : derivations) starts.insert(sorted(d.alpha));
  std::uint64_t walk_index = 0;
  for (const auto& alpha : starts) {
    for (Count m : m_values) {
      for (std::size_t w = 0; w < walks; ++w) {
        CounterRng rng(derive_seed(seed, walk_index++));
        Multiset c = semigroup_configuration(p, x, alpha, m);
        for (std::size_t step = 0; step < walk_length; ++step) {
          std::vector<std::uint32_t> enabled;
          for (std::uint32_t ti : t1) {
            if (p.enabled(p.transitions()[ti], c)) enabled.push_back(ti);
          }
          if (enabled.empty()) break;
          const std::uint32_t ti = enabled[rng.below(enabled.size())];
          const Word before = letters(c);
          c = p.fire(p.transitions()[ti], c);
          const Word after = letters(c);
          bool matched = false;
          for (std::size_t i : producers[ti]) {
            if (applicable(before, sp.productions[i]) && apply(before, sp.productions[i]) == after) {
              matched = true;
              break;
            }
          }
          if (!matched) {
            rep.holds = false;
            rep.witness = "protocol step " + p.format(p.transitions()[ti]) + " from letters " +
                          join(before) + " is not a production step";
            return rep;
          }
          ++rep.backward_checked;
        }
      }
    }
  }
  return rep;
}

bool t1_reachability_symmetric(const SemigroupPresentation& sp, const Protocol& p, const Multiset& c0,
                               std::size_t node_limit) {
  const auto t1 = t1_transitions(sp, p);
  std::vector<bool> allowed(p.transitions().size(), false);
  for (auto i : t1) allowed[i] = true;
  const auto g = explore_restricted(p, c0, [&](std::uint32_t i) { return allowed[i]; }, node_limit);
  const auto scc = strongly_connected_components(g);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    for (const auto& e : g.successors(v)) {
      if (scc.component[v] != scc.component[e.target]) return false;
    }
  }
  return true;
}

std::optional<Count> rewriting_threshold(const SemigroupPresentation& sp, Count max_x) {
  struct Rule {
    Word l;
    Word r;
    std::size_t x_needed;
  };
  std::vector<Rule> rules;
  for (const auto& p : sp.productions) {
    if (is_commutativity(p)) continue;
    const std::size_t len = std::max({p.l.size(), p.r.size(), std::size_t{2}});
    rules.push_back({sorted(p.l), p.r, len - p.l.size()});
  }
  for (Count xs = 0; xs <= max_x; ++xs) {
    const std::size_t population = static_cast<std::size_t>(xs) + 2;
    const Word start = sorted({sp.s, sp.c});
    std::set<Word> seen{start};
    std::vector<Word> stack{start};
    bool found = false;
    while (!stack.empty() && !found) {
      Word w = std::move(stack.back());
      stack.pop_back();
      if (std::find(w.begin(), w.end(), sp.f) != w.end()) {
        found = true;
        break;
      }
      const std::size_t free_x = population - w.size();
      for (const auto& rule : rules) {
        if (free_x < rule.x_needed) continue;
        Word w2 = w;
        if (!remove_all(w2, rule.l)) continue;
        w2.insert(w2.end(), rule.r.begin(), rule.r.end());
        std::sort(w2.begin(), w2.end());
        if (seen.insert(w2).second) stack.push_back(std::move(w2));
      }
    }
    if (found) return xs;
  }
  return std::nullopt;
}

std::size_t semigroup_lowered_bound(std::size_t letters, std::size_t productions, std::size_t arity) {
  return letters + 1 + 3 * arity * productions;
}

std::size_t doubly_exponential_family_bound(std::size_t n) {
  return semigroup_lowered_bound(14 * n + 10, 20 * n + 8, 5);
}

}  // namespace popproto
