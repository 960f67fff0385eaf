#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "popproto/multiset.hpp"

namespace popproto {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTransition : public Error {
 public:
  using Error::Error;
};

class MalformedProtocol : public Error {
 public:
  using Error::Error;
};

class DisabledTransition : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class EmptyPopulation : public Error {
 public:
  using Error::Error;
};

/// Consensus output of a configuration; `none` means no consensus.
enum class Output : std::uint8_t { zero = 0, one = 1, none = 2 };

std::string_view to_string(Output o);

/// p_1, ..., p_i -> q_1, ..., q_i with 2 <= i. Ordered lists are kept for
/// interchange and gadget construction; all semantics use the multisets.
class Transition {
 public:
  Transition(std::vector<StateId> pre, std::vector<StateId> post);

  const std::vector<StateId>& pre() const { return pre_; }
  const std::vector<StateId>& post() const { return post_; }
  const Multiset& pre_multiset() const { return pre_m_; }
  const Multiset& post_multiset() const { return post_m_; }
  std::size_t arity() const { return pre_.size(); }
  bool silent() const { return pre_m_ == post_m_; }

  /// Same pre- and post-multisets.
  bool same_effect(const Transition& other) const {
    return pre_m_ == other.pre_m_ && post_m_ == other.post_m_;
  }
  bool operator==(const Transition& other) const {
    return pre_ == other.pre_ && post_ == other.post_;
  }

 private:
  std::vector<StateId> pre_;
  std::vector<StateId> post_;
  Multiset pre_m_;
  Multiset post_m_;
};

using NamedInput = std::map<std::string, Count>;

/// A k-way population protocol (Q, T, I, L, O).
///
/// State ids are dense and follow the lexicographic order of the state names,
/// so a protocol has exactly one in-memory form for a given set of names.
/// Silent transitions are never stored: any tuple of agents without an
/// explicit transition interacts silently. Transitions with identical pre-
/// and post-multisets are deduplicated.
class Protocol {
 public:
  std::size_t num_states() const { return names_.size(); }
  const std::string& name(StateId s) const { return names_.at(s); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<StateId> find(std::string_view name) const;
  /// Throws InvalidInput for an unknown name.
  StateId id(std::string_view name) const;

  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<StateId>& initial() const { return initial_; }
  bool is_initial(StateId s) const;
  const Multiset& leaders() const { return leaders_; }
  int output(StateId s) const { return outputs_.at(s); }
  const std::vector<std::uint8_t>& outputs() const { return outputs_; }
  const nlohmann::json& meta() const { return meta_; }
  nlohmann::json& mutable_meta() { return meta_; }
  std::size_t max_arity() const;

  /// Resolves a transition given by state names; MalformedTransition on an
  /// unknown state or arity mismatch.
  Transition transition(const std::vector<std::string>& pre,
                        const std::vector<std::string>& post) const;
  /// Configuration from a name -> count map (zero counts ignored).
  Multiset configuration(const NamedInput& counts) const;

  /// True iff prem(t) <= c. MalformedTransition if t mentions a state outside Q.
  bool enabled(const Transition& t, const Multiset& c) const;
  /// (c - prem(t)) + postm(t). DisabledTransition if t is not enabled.
  Multiset fire(const Transition& t, const Multiset& c) const;
  /// D + L for an input D over I. InvalidInput if D leaves I,
  /// EmptyPopulation if the result is empty.
  Multiset initial_configuration(const Multiset& input) const;
  Multiset initial_configuration(const NamedInput& input) const;
  Output consensus_output(const Multiset& c) const;

  /// Human-readable rendering like "<2*a, b>".
  std::string format(const Multiset& c) const;
  std::string format(const Transition& t) const;

  bool operator==(const Protocol& other) const;

 private:
  friend class ProtocolBuilder;
  void check_transition(const Transition& t) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> index_;
  std::vector<Transition> transitions_;
  std::vector<StateId> initial_;
  Multiset leaders_;
  std::vector<std::uint8_t> outputs_;
  nlohmann::json meta_ = nlohmann::json::object();
};

/// Collects a protocol by state names. `build()` validates, interns the
/// names, drops silent transitions and deduplicates the rest.
class ProtocolBuilder {
 public:
  ProtocolBuilder& state(const std::string& name, int output);
  ProtocolBuilder& transition(std::vector<std::string> pre, std::vector<std::string> post);
  ProtocolBuilder& initial(const std::string& name);
  ProtocolBuilder& leader(const std::string& name, Count n = 1);
  nlohmann::json& meta() { return meta_; }
  bool has_state(const std::string& name) const { return outputs_.contains(name); }

  /// MalformedProtocol on undeclared states, bad outputs or bad arities.
  Protocol build() const;

 private:
  std::map<std::string, int> outputs_;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> transitions_;
  std::vector<std::string> initial_;
  std::map<std::string, Count> leaders_;
  nlohmann::json meta_ = nlohmann::json::object();
};

}  // namespace popproto
