#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "popproto/protocol.hpp"

namespace popproto {

/// One linear comparison  sum coeffs[v] * v + constant  OP  0.
struct LinearAtom {
  enum class Op : std::uint8_t { ge, gt, le, lt, eq };
  std::map<std::string, std::int64_t> coeffs;
  std::int64_t constant = 0;
  Op op = Op::ge;

  bool eval(const std::map<std::string, std::int64_t>& values) const;
};

/// Conjunction of linear atoms over named integer variables, e.g.
/// "x >= 3", "2*x - 3*y > 0 && y >= 1". Conjunction is written "∧", "&&"
/// or "and"; comparisons are >=, >, <=, <, ==. Unmentioned variables count 0.
class Predicate {
 public:
  /// InvalidInput on a syntax error.
  static Predicate parse(std::string_view text);

  bool operator()(const std::map<std::string, std::int64_t>& values) const;
  const std::vector<LinearAtom>& atoms() const { return atoms_; }
  std::vector<std::string> variables() const;
  const std::string& text() const { return text_; }

 private:
  std::vector<LinearAtom> atoms_;
  std::string text_;
};

struct InputRange {
  std::string variable;
  Count lo = 0;
  Count hi = 0;
};

/// "x=1..6,y=0..3" or "x=4"; InvalidInput on a syntax error or lo > hi.
std::vector<InputRange> parse_ranges(std::string_view text);

/// Cartesian product of the ranges, last variable fastest.
std::vector<std::map<std::string, Count>> enumerate_inputs(const std::vector<InputRange>& ranges);

/// "x=3,y=1" style single input; every variable gets one value.
std::map<std::string, Count> parse_assignment(std::string_view text);

}  // namespace popproto
