#include "popproto/multiset.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace popproto {

namespace {

Count checked_add(Count a, Count b) {
  if (a > std::numeric_limits<Count>::max() - b) {
    throw std::overflow_error("multiset count overflow");
  }
  return a + b;
}

}  // namespace

Multiset::Multiset(std::initializer_list<Entry> entries) {
  for (const auto& [s, n] : entries) add(s, n);
}

Multiset Multiset::of(std::span<const StateId> states) {
  Multiset m;
  for (StateId s : states) m.add(s, 1);
  return m;
}

Count Multiset::operator[](StateId s) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, StateId id) { return e.first < id; });
  return (it != entries_.end() && it->first == s) ? it->second : 0;
}

Count Multiset::size() const {
  Count total = 0;
  for (const auto& e : entries_) total = checked_add(total, e.second);
  return total;
}

std::vector<StateId> Multiset::support() const {
  std::vector<StateId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.first);
  return out;
}

void Multiset::add(StateId s, Count n) {
  if (n == 0) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, StateId id) { return e.first < id; });
  if (it != entries_.end() && it->first == s) {
    it->second = checked_add(it->second, n);
  } else {
    entries_.insert(it, Entry{s, n});
  }
}

void Multiset::remove(StateId s, Count n) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                             [](const Entry& e, StateId id) { return e.first < id; });
  if (it == entries_.end() || it->first != s) return;
  if (it->second <= n) {
    entries_.erase(it);
  } else {
    it->second -= n;
  }
}

Multiset Multiset::operator+(const Multiset& other) const {
  Multiset out;
  out.entries_.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      out.entries_.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      out.entries_.push_back(*b++);
    } else {
      out.entries_.emplace_back(a->first, checked_add(a->second, b->second));
      ++a;
      ++b;
    }
  }
  return out;
}

Multiset Multiset::operator-(const Multiset& other) const {
  Multiset out;
  out.entries_.reserve(entries_.size());
  auto b = other.entries_.begin();
  for (const auto& [s, n] : entries_) {
    while (b != other.entries_.end() && b->first < s) ++b;
    Count sub = (b != other.entries_.end() && b->first == s) ? b->second : 0;
    if (n > sub) out.entries_.emplace_back(s, n - sub);
  }
  return out;
}

bool Multiset::included_in(const Multiset& other) const {
  auto b = other.entries_.begin();
  for (const auto& [s, n] : entries_) {
    while (b != other.entries_.end() && b->first < s) ++b;
    if (b == other.entries_.end() || b->first != s || b->second < n) return false;
  }
  return true;
}

std::vector<Count> Multiset::to_dense(std::size_t num_states) const {
  std::vector<Count> out(num_states, 0);
  for (const auto& [s, n] : entries_) {
    if (s >= num_states) throw std::out_of_range("multiset state outside domain");
    out[s] = n;
  }
  return out;
}

std::size_t Multiset::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& [s, n] : entries_) {
    h ^= (static_cast<std::size_t>(s) << 32) ^ static_cast<std::size_t>(n);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return h;
}

}  // namespace popproto
