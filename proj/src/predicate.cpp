#include "popproto/predicate.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace popproto {

bool LinearAtom::eval(const std::map<std::string, std::int64_t>& values) const {
  std::int64_t s = constant;
  for (const auto& [v, a] : coeffs) {
    auto it = values.find(v);
    if (it != values.end()) s += a * it->second;
  }
  switch (op) {
    case Op::ge:
      return s >= 0;
    case Op::gt:
      return s > 0;
    case Op::le:
      return s <= 0;
    case Op::lt:
      return s < 0;
    case Op::eq:
      return s == 0;
  }
  return false;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<LinearAtom> conjunction() {
    std::vector<LinearAtom> atoms{atom()};
    while (conjunct()) atoms.push_back(atom());
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(text_.substr(pos_)) + "'");
    return atoms;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InvalidInput("predicate \"" + std::string(text_) + "\": " + why);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool conjunct() {
    if (eat("&&") || eat("∧")) return true;
    skip();
    if (text_.substr(pos_, 3) == "and" &&
        (pos_ + 3 == text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 3])))) {
      pos_ += 3;
      return true;
    }
    return false;
  }

  std::optional<std::int64_t> number() {
    skip();
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec == std::errc::result_out_of_range) fail("number out of range");
    if (ec != std::errc{}) return std::nullopt;
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  std::optional<std::string> identifier() {
    skip();
    const std::size_t start = pos_;
    auto ok = [&](std::size_t i, bool first) {
      const auto ch = static_cast<unsigned char>(text_[i]);
      return std::isalpha(ch) || ch == '_' || (!first && (std::isdigit(ch) || ch == '.' || ch == '\''));
    };
    if (pos_ < text_.size() && ok(pos_, true)) {
      ++pos_;
      while (pos_ < text_.size() && ok(pos_, false)) ++pos_;
      return std::string(text_.substr(start, pos_ - start));
    }
    return std::nullopt;
  }

  // sum of [int [*]] ident | int terms, accumulated with `sign` into the atom.
  void linear(LinearAtom& atom, std::int64_t sign) {
    bool first = true;
    while (true) {
      std::int64_t s = 1;
      if (eat("+")) {
      } else if (eat("-")) {
        s = -1;
      } else if (!first) {
        return;
      }
      first = false;
      auto coef = number();
      if (coef) {
        // "2*x" and "2x" scale a variable; "2 x" does not parse as one term.
        const bool adjacent = pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]));
        if (eat("*") || adjacent) {
          auto id = identifier();
          if (!id) fail("expected a variable after the coefficient");
          atom.coeffs[*id] += sign * s * *coef;
        } else {
          atom.constant += sign * s * *coef;
        }
      } else if (auto id = identifier()) {
        atom.coeffs[*id] += sign * s;
      } else {
        fail("expected a term at position " + std::to_string(pos_));
      }
    }
  }

  LinearAtom atom() {
    LinearAtom a;
    linear(a, 1);
    if (eat(">=")) {
      a.op = LinearAtom::Op::ge;
    } else if (eat("<=")) {
      a.op = LinearAtom::Op::le;
    } else if (eat("==")) {
      a.op = LinearAtom::Op::eq;
    } else if (eat(">")) {
      a.op = LinearAtom::Op::gt;
    } else if (eat("<")) {
      a.op = LinearAtom::Op::lt;
    } else {
      fail("expected a comparison at position " + std::to_string(pos_));
    }
    linear(a, -1);
    return a;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Count parse_count(std::string_view s, std::string_view context) {
  Count v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidInput("bad number '" + std::string(s) + "' in \"" + std::string(context) + "\"");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto k = s.find(sep);
    out.push_back(s.substr(0, k));
    if (k == std::string_view::npos) break;
    s.remove_prefix(k + 1);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Predicate Predicate::parse(std::string_view text) {
  Predicate p;
  p.text_ = std::string(text);
  p.atoms_ = Parser(text).conjunction();
  return p;
}

bool Predicate::operator()(const std::map<std::string, std::int64_t>& values) const {
  for (const auto& a : atoms_) {
    if (!a.eval(values)) return false;
  }
  return true;
}

std::vector<std::string> Predicate::variables() const {
  std::set<std::string> vs;
  for (const auto& a : atoms_) {
    for (const auto& [v, c] : a.coeffs) vs.insert(v);
  }
  return {vs.begin(), vs.end()};
}

std::vector<InputRange> parse_ranges(std::string_view text) {
  std::vector<InputRange> out;
  if (trim(text).empty()) throw InvalidInput("empty input range");
  for (auto part : split(text, ',')) {
    part = trim(part);
    const auto eq = part.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw InvalidInput("input range \"" + std::string(part) + "\" is not var=lo..hi");
    }
    InputRange r;
    r.variable = std::string(trim(part.substr(0, eq)));
    const auto rhs = trim(part.substr(eq + 1));
    const auto dots = rhs.find("..");
    if (dots == std::string_view::npos) {
      r.lo = r.hi = parse_count(rhs, text);
    } else {
      r.lo = parse_count(trim(rhs.substr(0, dots)), text);
      r.hi = parse_count(trim(rhs.substr(dots + 2)), text);
    }
    if (r.lo > r.hi) throw InvalidInput("empty input range for " + r.variable);
    for (const auto& other : out) {
      if (other.variable == r.variable) throw InvalidInput("variable " + r.variable + " given twice");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::map<std::string, Count>> enumerate_inputs(const std::vector<InputRange>& ranges) {
  std::vector<std::map<std::string, Count>> out{{}};
  for (const auto& r : ranges) {
    std::vector<std::map<std::string, Count>> next;
    for (const auto& partial : out) {
      for (Count v = r.lo;; ++v) {
        auto m = partial;
        m[r.variable] = v;
        next.push_back(std::move(m));
        if (v == r.hi) break;
      }
    }
    out = std::move(next);
  }
  return out;
}

std::map<std::string, Count> parse_assignment(std::string_view text) {
  std::map<std::string, Count> out;
  for (const auto& r : parse_ranges(text)) {
    if (r.lo != r.hi) throw InvalidInput("expected a single value for " + r.variable);
    out[r.variable] = r.lo;
  }
  return out;
}

}  // namespace popproto
