#include "popproto/protocol.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace popproto {

std::string_view to_string(Output o) {
  switch (o) {
    case Output::zero:
      return "0";
    case Output::one:
      return "1";
    case Output::none:
      return "none";
  }
  return "none";
}

Transition::Transition(std::vector<StateId> pre, std::vector<StateId> post)
    : pre_(std::move(pre)), post_(std::move(post)) {
  if (pre_.size() != post_.size()) {
    throw MalformedTransition("transition pre and post lists differ in length");
  }
  if (pre_.size() < 2) {
    throw MalformedTransition("transition arity must be at least 2");
  }
  pre_m_ = Multiset::of(pre_);
  post_m_ = Multiset::of(post_);
}

std::optional<StateId> Protocol::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StateId Protocol::id(std::string_view name) const {
  auto s = find(name);
  if (!s) throw InvalidInput("unknown state '" + std::string(name) + "'");
  return *s;
}

bool Protocol::is_initial(StateId s) const {
  return std::binary_search(initial_.begin(), initial_.end(), s);
}

std::size_t Protocol::max_arity() const {
  std::size_t k = 2;
  for (const auto& t : transitions_) k = std::max(k, t.arity());
  return k;
}

Transition Protocol::transition(const std::vector<std::string>& pre,
                                const std::vector<std::string>& post) const {
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<StateId> ids;
    ids.reserve(names.size());
    for (const auto& n : names) {
      auto s = find(n);
      if (!s) throw MalformedTransition("transition mentions unknown state '" + n + "'");
      ids.push_back(*s);
    }
    return ids;
  };
  return Transition(resolve(pre), resolve(post));
}

Multiset Protocol::configuration(const NamedInput& counts) const {
  Multiset c;
  for (const auto& [name, n] : counts) c.add(id(name), n);
  return c;
}

void Protocol::check_transition(const Transition& t) const {
  for (StateId s : t.pre()) {
    if (s >= num_states()) throw MalformedTransition("transition state outside the protocol");
  }
  for (StateId s : t.post()) {
    if (s >= num_states()) throw MalformedTransition("transition state outside the protocol");
  }
}

bool Protocol::enabled(const Transition& t, const Multiset& c) const {
  check_transition(t);
  return t.pre_multiset().included_in(c);
}

Multiset Protocol::fire(const Transition& t, const Multiset& c) const {
  if (!enabled(t, c)) throw DisabledTransition("transition " + format(t) + " is not enabled");
  return (c - t.pre_multiset()) + t.post_multiset();
}

Multiset Protocol::initial_configuration(const Multiset& input) const {
  for (const auto& [s, n] : input.entries()) {
    if (s >= num_states() || !is_initial(s)) {
      throw InvalidInput("input state is not initial");
    }
  }
  Multiset c = input + leaders_;
  if (c.empty()) throw EmptyPopulation("initial configuration would be empty");
  return c;
}

Multiset Protocol::initial_configuration(const NamedInput& input) const {
  Multiset d;
  for (const auto& [name, n] : input) {
    auto s = find(name);
    if (!s || !is_initial(*s)) throw InvalidInput("'" + name + "' is not an initial state");
    d.add(*s, n);
  }
  return initial_configuration(d);
}

Output Protocol::consensus_output(const Multiset& c) const {
  std::optional<int> seen;
  for (const auto& [s, n] : c.entries()) {
    int o = outputs_.at(s);
    if (seen && *seen != o) return Output::none;
    seen = o;
  }
  if (!seen) return Output::none;
  return *seen == 1 ? Output::one : Output::zero;
}

std::string Protocol::format(const Multiset& c) const {
  std::ostringstream os;
  os << '<';
  bool first = true;
  for (const auto& [s, n] : c.entries()) {
    if (!first) os << ", ";
    first = false;
    if (n != 1) os << n << '*';
    os << (s < num_states() ? names_[s] : "?" + std::to_string(s));
  }
  os << '>';
  return os.str();
}

std::string Protocol::format(const Transition& t) const {
  auto join = [&](const std::vector<StateId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out += ", ";
      out += ids[i] < num_states() ? names_[ids[i]] : "?" + std::to_string(ids[i]);
    }
    return out;
  };
  return join(t.pre()) + " -> " + join(t.post());
}

bool Protocol::operator==(const Protocol& other) const {
  return names_ == other.names_ && transitions_ == other.transitions_ &&
         initial_ == other.initial_ && leaders_ == other.leaders_ &&
         outputs_ == other.outputs_ && meta_ == other.meta_;
}

ProtocolBuilder& ProtocolBuilder::state(const std::string& name, int output) {
  if (output != 0 && output != 1) {
    throw MalformedProtocol("output of '" + name + "' must be 0 or 1");
  }
  auto [it, inserted] = outputs_.emplace(name, output);
  if (!inserted && it->second != output) {
    throw MalformedProtocol("state '" + name + "' declared with two outputs");
  }
  return *this;
}

ProtocolBuilder& ProtocolBuilder::transition(std::vector<std::string> pre,
                                             std::vector<std::string> post) {
  transitions_.emplace_back(std::move(pre), std::move(post));
  return *this;
}

ProtocolBuilder& ProtocolBuilder::initial(const std::string& name) {
  initial_.push_back(name);
  return *this;
}

ProtocolBuilder& ProtocolBuilder::leader(const std::string& name, Count n) {
  leaders_[name] += n;
  return *this;
}

Protocol ProtocolBuilder::build() const {
  if (outputs_.empty()) throw MalformedProtocol("protocol has no states");
  Protocol p;
  // std::map iterates in lexicographic order, which fixes the id assignment.
  for (const auto& [name, out] : outputs_) {
    p.index_.emplace(name, static_cast<StateId>(p.names_.size()));
    p.names_.push_back(name);
    p.outputs_.push_back(static_cast<std::uint8_t>(out));
  }
  auto resolve = [&](const std::string& n) {
    auto it = p.index_.find(n);
    if (it == p.index_.end()) throw MalformedProtocol("undeclared state '" + n + "'");
    return it->second;
  };

  std::vector<Transition> ts;
  for (const auto& [pre, post] : transitions_) {
    if (pre.size() != post.size()) {
      throw MalformedProtocol("transition pre and post lists differ in length");
    }
    if (pre.size() < 2) throw MalformedProtocol("transition arity must be at least 2");
    std::vector<StateId> a, b;
    for (const auto& n : pre) a.push_back(resolve(n));
    for (const auto& n : post) b.push_back(resolve(n));
    Transition t(std::move(a), std::move(b));
    if (!t.silent()) ts.push_back(std::move(t));
  }
  std::sort(ts.begin(), ts.end(), [](const Transition& x, const Transition& y) {
    return std::tie(x.pre(), x.post()) < std::tie(y.pre(), y.post());
  });
  // Keep the first (smallest) representative of every multiset effect.
  std::set<std::pair<Multiset, Multiset>> seen;
  for (auto& t : ts) {
    if (seen.emplace(t.pre_multiset(), t.post_multiset()).second) {
      p.transitions_.push_back(std::move(t));
    }
  }

  std::set<StateId> init;
  for (const auto& n : initial_) init.insert(resolve(n));
  p.initial_.assign(init.begin(), init.end());
  for (const auto& [n, k] : leaders_) p.leaders_.add(resolve(n), k);
  p.meta_ = meta_;
  return p;
}

}  // namespace popproto
