#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace popproto {

using StateId = std::uint32_t;
using Count = std::uint64_t;

/// A finite multiset of states, stored as (state, count) pairs sorted by
/// state with no zero entries. Two multisets are equal iff their entries are.
class Multiset {
 public:
  using Entry = std::pair<StateId, Count>;

  Multiset() = default;
  Multiset(std::initializer_list<Entry> entries);

  /// Multiset of the listed states, one occurrence per element.
  static Multiset of(std::span<const StateId> states);
  /// Builds from a dense count vector indexed by state id.
  template <typename C>
  static Multiset from_dense(std::span<const C> counts) {
    Multiset m;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] != 0) {
        m.entries_.emplace_back(static_cast<StateId>(i), static_cast<Count>(counts[i]));
      }
    }
    return m;
  }

  Count operator[](StateId s) const;
  /// Sum of counts.
  Count size() const;
  bool empty() const { return entries_.empty(); }
  std::vector<StateId> support() const;
  std::span<const Entry> entries() const { return entries_; }

  /// Adds `n` occurrences of `s`; throws std::overflow_error on wrap-around.
  void add(StateId s, Count n = 1);
  /// Removes up to `n` occurrences of `s` (truncating at zero).
  void remove(StateId s, Count n = 1);

  /// Componentwise sum.
  Multiset operator+(const Multiset& other) const;
  /// Truncated componentwise difference: max(M(e) - M'(e), 0).
  Multiset operator-(const Multiset& other) const;
  /// M <= M' iff M(e) <= M'(e) for every e.
  bool included_in(const Multiset& other) const;

  bool operator==(const Multiset& other) const = default;
  /// Lexicographic order on the entry list; used for canonical sorting only.
  bool operator<(const Multiset& other) const { return entries_ < other.entries_; }

  std::vector<Count> to_dense(std::size_t num_states) const;
  std::size_t hash() const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace popproto

template <>
struct std::hash<popproto::Multiset> {
  std::size_t operator()(const popproto::Multiset& m) const noexcept { return m.hash(); }
};
