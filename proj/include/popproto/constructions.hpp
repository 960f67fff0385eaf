#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popproto/protocol.hpp"

namespace popproto {

/// floor(log2 n) + 1 for n >= 1; size(0) = 0.
unsigned size_of(std::uint64_t n);
/// Positions of the 1-bits of n, ascending: bits(13) = {0, 2, 3}.
std::vector<unsigned> bits_of(std::uint64_t n);

/// States "0".."n", transitions a, b -> 0, min(a + b, n) for a, b < n and
/// a, n -> n, n. Computes x >= n with input state "1".
Protocol flock_standard(std::uint64_t n);

/// States named by their decimal value: "0", the powers of two up to
/// 2^size(n), and n. Doubling transitions and their reverses, one transition
/// collecting the bits of n into n, and n attracting every other state.
/// For n = 2^j the top power is n itself and nothing above it is kept; for
/// n = 1 the only state is "1".
Protocol flock_binary(std::uint64_t n);

/// Exact state count of to_2way(flock_binary(n)).
std::size_t flock_binary_lowered_states(std::uint64_t n);
/// 4 floor(log2 n) + 7.
std::size_t flock_binary_bound(std::uint64_t n);

/// States x, y, xb, yb with n leaders in y; computes x >= n.
Protocol majority_leaders(Count n);

/// Computes sum a_i x_i + c > 0. States x1..xk, p0..pn (+2^i), m0..mn
/// (-2^i), "z+" and "z-" (the reservoir); n = size(max(|a_i|, |c|, 1)).
Protocol linear_inequality(const std::vector<std::int64_t>& a, std::int64_t c);

/// The top exponent used by linear_inequality.
unsigned linear_exponent(const std::vector<std::int64_t>& a, std::int64_t c);

/// Integer matrix with m rows and k columns, and an m-vector c.
struct LinearSystemParams {
  std::vector<std::vector<std::int64_t>> A;
  std::vector<std::int64_t> c;

  std::size_t m() const { return A.size(); }
  std::size_t k() const { return A.empty() ? 0 : A.front().size(); }
  /// max(1, |A_ij|, |c_i|).
  std::uint64_t b_max() const;
  /// Top exponent of the construction: ceil(log2(2 m^2)) + size(b_max).
  unsigned exponent() const;
  /// size(b_max), the parameter of the state and leader bounds.
  unsigned n() const { return size_of(b_max()); }
  /// InvalidInput for m = 0, k = 0 or ragged rows.
  void validate() const;
};

/// Computes A x + c > 0 row-wise. States x1..xk, p<i>.<j>.<alpha>,
/// m<i>.<j>, z0, z1 with rows j counted from 1.
Protocol linear_system(const LinearSystemParams& sys);

/// 27 (log2 m + n)(m + k) and 14 m (log2 m + n), rounded down.
std::size_t linear_system_state_bound(const LinearSystemParams& sys);
std::size_t linear_system_leader_bound(const LinearSystemParams& sys);

/// rep(z) over the states of linear_inequality with top exponent n:
/// p<i> for the bits of z > 0, m<i> for the bits of -z, "z-" for 0.
/// InvalidInput if |z| >= 2^n.
NamedInput rep_single(std::int64_t z, unsigned n);
/// rep_j(z) over the states of linear_system (row j from 1); rep_j(0) = z0.
NamedInput rep_row(std::int64_t z, std::size_t j, unsigned n);

/// Per-row value functions of a linear_inequality or linear_system
/// protocol, recovered from its meta. val_i sums the signed powers of row i
/// and A_ij per agent in x_j; val_i^+ and val_i^- restrict to the powers.
class RowValuation {
 public:
  explicit RowValuation(const Protocol& p);

  std::size_t rows() const { return plus_.size(); }
  std::int64_t value(std::size_t row, const Multiset& c) const;
  std::int64_t positive(std::size_t row, const Multiset& c) const;
  std::int64_t negative(std::size_t row, const Multiset& c) const;
  /// Agents in the variable states.
  Count variable_agents(const Multiset& c) const;

 private:
  std::vector<std::vector<std::int64_t>> plus_;   // [row][state]
  std::vector<std::vector<std::int64_t>> minus_;  // [row][state]
  std::vector<std::vector<std::int64_t>> x_;      // [row][state]
  std::vector<bool> variable_;
};

/// val of a flock_binary configuration: sum of state values times counts.
std::uint64_t flock_value(const Protocol& p, const Multiset& c);

}  // namespace popproto
