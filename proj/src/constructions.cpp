#include "popproto/constructions.hpp"

#include <bit>
#include <charconv>
#include <cmath>

#include "popproto/compile.hpp"

namespace popproto {

using nlohmann::json;

unsigned size_of(std::uint64_t n) { return static_cast<unsigned>(std::bit_width(n)); }

std::vector<unsigned> bits_of(std::uint64_t n) {
  std::vector<unsigned> out;
  for (unsigned i = 0; n != 0; ++i, n >>= 1) {
    if (n & 1) out.push_back(i);
  }
  return out;
}

namespace {

std::string dec(std::uint64_t v) { return std::to_string(v); }

// Magnitudes beyond this are rejected so that 2^(n+1) and sums stay in range.
constexpr std::uint64_t kMaxMagnitude = std::uint64_t{1} << 40;

std::uint64_t magnitude(std::int64_t z) {
  if (z == INT64_MIN) throw InvalidInput("coefficient out of range");
  const auto m = static_cast<std::uint64_t>(z < 0 ? -z : z);
  if (m > kMaxMagnitude) throw InvalidInput("coefficient out of range: " + std::to_string(z));
  return m;
}

json certificate(const Protocol& p, std::size_t states_bound, std::size_t leaders_bound) {
  return {
      {"states", p.num_states()},
      {"leaders", p.leaders().size()},
      {"max_arity", p.max_arity()},
      {"lowered_states", lowered_state_count(p)},
      {"states_bound", states_bound},
      {"leaders_bound", leaders_bound},
  };
}

Protocol with_certificate(const ProtocolBuilder& b, std::size_t states_bound, std::size_t leaders_bound) {
  Protocol p = b.build();
  p.mutable_meta()["certificate"] = certificate(p, states_bound, leaders_bound);
  return p;
}

json variable_map(std::size_t k) {
  json v = json::object();
  for (std::size_t j = 1; j <= k; ++j) v["x" + std::to_string(j)] = "x" + std::to_string(j);
  return v;
}

/// Adds x, r^(|rep| - 1) -> rep, padded to x, r -> rep, r when |rep| = 1.
void add_conversion(ProtocolBuilder& b, const std::string& x, const std::vector<std::string>& rep,
                    const std::string& r) {
  std::vector<std::string> pre{x};
  std::vector<std::string> post = rep;
  if (rep.size() == 1) {
    pre.push_back(r);
    post.push_back(r);
  } else {
    pre.insert(pre.end(), rep.size() - 1, r);
  }
  b.transition(std::move(pre), std::move(post));
}

std::vector<std::string> expand(const NamedInput& m) {
  std::vector<std::string> out;
  for (const auto& [name, n] : m) out.insert(out.end(), n, name);
  return out;
}

}  // namespace

Protocol flock_standard(std::uint64_t n) {
  if (n == 0) throw InvalidInput("flock_standard needs n >= 1");
  if (n > 4096) throw InvalidInput("flock_standard: n too large for an explicit protocol");
  ProtocolBuilder b;
  for (std::uint64_t q = 0; q <= n; ++q) b.state(dec(q), q == n ? 1 : 0);
  for (std::uint64_t a = 0; a < n; ++a) {
    for (std::uint64_t c = 0; c < n; ++c) b.transition({dec(a), dec(c)}, {"0", dec(std::min(a + c, n))});
  }
  for (std::uint64_t a = 0; a <= n; ++a) b.transition({dec(a), dec(n)}, {dec(n), dec(n)});
  b.initial("1");
  b.meta() = {{"construction", "flock-standard"},
              {"params", {{"n", n}}},
              {"variables", {{"x", "1"}}}};
  return with_certificate(b, n + 1, 0);
}

Protocol flock_binary(std::uint64_t n) {
  if (n == 0) throw InvalidInput("flock_binary needs n >= 1");
  if (n > kMaxMagnitude) throw InvalidInput("flock_binary: n too large");
  ProtocolBuilder b;
  b.meta() = {{"construction", "flock-binary"},
              {"params", {{"n", n}}},
              {"variables", {{"x", "1"}}}};
  if (n == 1) {
    b.state("1", 1).initial("1");
    return with_certificate(b, 1, 0);
  }
  const unsigned sz = size_of(n);
  const bool power = std::has_single_bit(n);
  const unsigned top = power ? sz - 1 : sz;
  const std::string N = dec(n);

  b.state("0", 0);
  for (unsigned i = 0; i <= top; ++i) b.state(dec(std::uint64_t{1} << i), (std::uint64_t{1} << i) == n);
  if (!power) b.state(N, 1);
  for (unsigned i = 0; i < top; ++i) {
    const std::string lo = dec(std::uint64_t{1} << i), hi = dec(std::uint64_t{1} << (i + 1));
    b.transition({lo, lo}, {hi, "0"});
    b.transition({hi, "0"}, {lo, lo});
  }
  if (!power) {
    std::vector<std::string> pre, post{N};
    for (unsigned i : bits_of(n)) pre.push_back(dec(std::uint64_t{1} << i));
    post.resize(pre.size(), "0");
    b.transition(std::move(pre), std::move(post));
  }
  b.transition({N, "0"}, {N, N});
  for (unsigned i = 0; i <= top; ++i) b.transition({N, dec(std::uint64_t{1} << i)}, {N, N});

  b.initial("1");
  return with_certificate(b, flock_binary_bound(n), 0);
}

std::size_t flock_binary_lowered_states(std::uint64_t n) {
  if (n == 1) return 1;
  const std::size_t sz = size_of(n);
  if (std::has_single_bit(n)) return sz + 1;
  const std::size_t nb = bits_of(n).size();
  return sz + 3 + (nb >= 3 ? 3 * (nb - 2) : 0);
}

std::size_t flock_binary_bound(std::uint64_t n) { return 4 * (size_of(n) - 1) + 7; }

Protocol majority_leaders(Count n) {
  if (n == 0) throw InvalidInput("majority_leaders needs n >= 1");
  ProtocolBuilder b;
  b.state("x", 1).state("xb", 1).state("y", 0).state("yb", 0);
  b.transition({"x", "y"}, {"xb", "yb"});
  b.transition({"x", "yb"}, {"x", "xb"});
  b.transition({"y", "xb"}, {"y", "yb"});
  b.transition({"xb", "yb"}, {"xb", "xb"});
  b.initial("x").leader("y", n);
  b.meta() = {{"construction", "majority"}, {"params", {{"n", n}}}, {"variables", {{"x", "x"}}}};
  return with_certificate(b, 4, n);
}

unsigned linear_exponent(const std::vector<std::int64_t>& a, std::int64_t c) {
  std::uint64_t mx = std::max<std::uint64_t>(1, magnitude(c));
  for (auto v : a) mx = std::max(mx, magnitude(v));
  return size_of(mx);
}

NamedInput rep_single(std::int64_t z, unsigned n) {
  const auto mag = magnitude(z);
  if (n < 63 && mag >= (std::uint64_t{1} << n)) {
    throw InvalidInput("rep: |" + std::to_string(z) + "| >= 2^" + std::to_string(n));
  }
  NamedInput out;
  if (z == 0) {
    out["z-"] = 1;
    return out;
  }
  for (unsigned i : bits_of(mag)) out[(z > 0 ? "p" : "m") + std::to_string(i)] = 1;
  return out;
}

NamedInput rep_row(std::int64_t z, std::size_t j, unsigned n) {
  const auto mag = magnitude(z);
  if (n < 63 && mag >= (std::uint64_t{1} << n)) {
    throw InvalidInput("rep: |" + std::to_string(z) + "| >= 2^" + std::to_string(n));
  }
  NamedInput out;
  if (z == 0) {
    out["z0"] = 1;
    return out;
  }
  const std::string row = "." + std::to_string(j);
  for (unsigned i : bits_of(mag)) {
    out[(z > 0 ? "p" : "m") + std::to_string(i) + row + (z > 0 ? ".0" : "")] = 1;
  }
  return out;
}

Protocol linear_inequality(const std::vector<std::int64_t>& a, std::int64_t c) {
  if (a.empty()) throw InvalidInput("linear_inequality needs at least one coefficient");
  const unsigned n = linear_exponent(a, c);
  const std::size_t k = a.size();
  auto p = [](unsigned i) { return "p" + std::to_string(i); };
  auto m = [](unsigned i) { return "m" + std::to_string(i); };
  const std::vector<std::string> reservoir{"z+", "z-"};

  ProtocolBuilder b;
  for (std::size_t j = 1; j <= k; ++j) b.state("x" + std::to_string(j), 0).initial("x" + std::to_string(j));
  for (unsigned i = 0; i <= n; ++i) b.state(p(i), 1).state(m(i), 0);
  b.state("z+", 1).state("z-", 0);

  for (std::size_t j = 0; j < k; ++j) {
    const auto rep = expand(rep_single(a[j], n));
    for (const auto& r : reservoir) add_conversion(b, "x" + std::to_string(j + 1), rep, r);
  }
  for (unsigned i = 0; i <= n; ++i) b.transition({p(i), m(i)}, {"z+", "z-"});
  for (unsigned i = 0; i < n; ++i) {
    b.transition({p(i), p(i)}, {p(i + 1), "z+"});
    b.transition({m(i), m(i)}, {m(i + 1), "z-"});
    for (const auto& r : reservoir) {
      b.transition({p(i + 1), r}, {p(i), p(i)});
      b.transition({m(i + 1), r}, {m(i), m(i)});
    }
  }
  for (unsigned i = 0; i <= n; ++i) {
    b.transition({p(i), "z-"}, {p(i), "z+"});
    b.transition({m(i), "z+"}, {m(i), "z-"});
  }
  b.transition({"z-", "z+"}, {"z-", "z-"});

  for (const auto& [name, cnt] : rep_single(c, n)) b.leader(name, cnt);
  b.leader("z-", 4 * n + 2);

  std::uint64_t b_max = 1;
  for (auto v : a) b_max = std::max(b_max, magnitude(v));
  b_max = std::max(b_max, magnitude(c));
  b.meta() = {{"construction", "linear"},
              {"params", {{"a", a}, {"c", c}}},
              {"n", n},
              {"b_max", b_max},
              {"variables", variable_map(k)}};
  return with_certificate(b, 10 * k * n, 5 * n + 2);
}

std::uint64_t LinearSystemParams::b_max() const {
  std::uint64_t mx = 1;
  for (const auto& row : A) {
    for (auto v : row) mx = std::max(mx, magnitude(v));
  }
  for (auto v : c) mx = std::max(mx, magnitude(v));
  return mx;
}

unsigned LinearSystemParams::exponent() const {
  const std::uint64_t two_m2 = 2 * static_cast<std::uint64_t>(m()) * m();
  return static_cast<unsigned>(std::bit_width(two_m2 - 1)) + n();  // ceil(log2(2 m^2))
}

void LinearSystemParams::validate() const {
  if (m() == 0) throw InvalidInput("linear_system needs at least one row");
  if (k() == 0) throw InvalidInput("linear_system needs at least one variable");
  if (c.size() != m()) throw InvalidInput("linear_system: c must have one entry per row");
  for (const auto& row : A) {
    if (row.size() != k()) throw InvalidInput("linear_system: ragged matrix");
  }
  (void)b_max();
}

Protocol linear_system(const LinearSystemParams& sys) {
  sys.validate();
  const std::size_t m = sys.m(), k = sys.k();
  const unsigned l = sys.exponent();
  auto P = [](unsigned i, std::size_t j, int alpha) {
    return "p" + std::to_string(i) + "." + std::to_string(j) + "." + std::to_string(alpha);
  };
  auto M = [](unsigned i, std::size_t j) { return "m" + std::to_string(i) + "." + std::to_string(j); };
  auto Z = [](int alpha) { return alpha ? std::string("z1") : std::string("z0"); };

  ProtocolBuilder b;
  for (std::size_t j = 1; j <= k; ++j) b.state("x" + std::to_string(j), 0).initial("x" + std::to_string(j));
  for (std::size_t j = 1; j <= m; ++j) {
    for (unsigned i = 0; i <= l; ++i) b.state(P(i, j, 0), 0).state(P(i, j, 1), 1).state(M(i, j), 0);
  }
  b.state("z0", 0).state("z1", 1);

  for (std::size_t j = 1; j <= m; ++j) {
    for (unsigned i = 0; i < l; ++i) {
      for (int al = 0; al <= 1; ++al) {
        for (int be = 0; be <= 1; ++be) {
          b.transition({P(i, j, al), P(i, j, be)}, {P(i + 1, j, al & be), Z(al & be)});
          b.transition({P(i + 1, j, al), Z(be)}, {P(i, j, al & be), P(i, j, al & be)});
        }
        b.transition({M(i + 1, j), Z(al)}, {M(i, j), M(i, j)});
      }
      b.transition({M(i, j), M(i, j)}, {M(i + 1, j), "z0"});
    }
    for (unsigned i = 0; i <= l; ++i) {
      for (int al = 0; al <= 1; ++al) b.transition({P(i, j, al), M(i, j)}, {Z(al), "z0"});
      b.transition({"z0", P(i, j, 1)}, {"z0", P(i, j, 0)});
      b.transition({M(i, j), "z1"}, {M(i, j), "z0"});
      b.transition({"z1", P(i, j, 0)}, {"z1", P(i, j, 1)});
    }
  }
  b.transition({"z0", "z1"}, {"z0", "z0"});
  {
    std::vector<std::string> pre, post;
    for (std::size_t j = 1; j <= m; ++j) {
      pre.push_back(P(0, j, 0));
      post.push_back(P(0, j, 1));
    }
    pre.push_back("z0");
    post.push_back("z1");
    b.transition(std::move(pre), std::move(post));
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::vector<std::string> rep;
    for (std::size_t j = 1; j <= m; ++j) {
      const auto part = expand(rep_row(sys.A[j - 1][col], j, l));
      rep.insert(rep.end(), part.begin(), part.end());
    }
    for (int al = 0; al <= 1; ++al) add_conversion(b, "x" + std::to_string(col + 1), rep, Z(al));
  }

  for (std::size_t j = 1; j <= m; ++j) {
    for (const auto& [name, cnt] : rep_row(sys.c[j - 1], j, l)) b.leader(name, cnt);
  }
  b.leader("z0", 5 * m * l + 1);

  b.meta() = {{"construction", "system"},
              {"params", {{"A", sys.A}, {"c", sys.c}}},
              {"m", m},
              {"k", k},
              {"n", sys.n()},
              {"exponent", l},
              {"b_max", sys.b_max()},
              {"variables", variable_map(k)}};
  return with_certificate(b, linear_system_state_bound(sys), linear_system_leader_bound(sys));
}

std::size_t linear_system_state_bound(const LinearSystemParams& sys) {
  const double lg = std::log2(static_cast<double>(sys.m()));
  return static_cast<std::size_t>(std::floor(27.0 * (lg + sys.n()) * static_cast<double>(sys.m() + sys.k())));
}

std::size_t linear_system_leader_bound(const LinearSystemParams& sys) {
  const double lg = std::log2(static_cast<double>(sys.m()));
  return static_cast<std::size_t>(std::floor(14.0 * static_cast<double>(sys.m()) * (lg + sys.n())));
}

RowValuation::RowValuation(const Protocol& p) {
  const auto& meta = p.meta();
  const std::string kind = meta.value("construction", std::string{});
  const std::size_t ns = p.num_states();
  variable_.assign(ns, false);
  auto set = [&](std::vector<std::vector<std::int64_t>>& table, std::size_t row, const std::string& name,
                 std::int64_t v) {
    if (auto s = p.find(name)) table[row][*s] = v;
  };
  std::vector<std::vector<std::int64_t>> A;
  unsigned exp = 0;
  if (kind == "linear") {
    A = {meta.at("params").at("a").get<std::vector<std::int64_t>>()};
    exp = meta.at("n").get<unsigned>();
  } else if (kind == "system") {
    A = meta.at("params").at("A").get<std::vector<std::vector<std::int64_t>>>();
    exp = meta.at("exponent").get<unsigned>();
  } else {
    throw InvalidInput("no row values for construction '" + kind + "'");
  }
  const std::size_t rows = A.size();
  plus_.assign(rows, std::vector<std::int64_t>(ns, 0));
  minus_ = plus_;
  x_ = plus_;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < A[r].size(); ++j) {
      const std::string xn = "x" + std::to_string(j + 1);
      set(x_, r, xn, A[r][j]);
      if (auto s = p.find(xn)) variable_[*s] = true;
    }
    for (unsigned i = 0; i <= exp; ++i) {
      const auto v = std::int64_t{1} << i;
      if (kind == "linear") {
        set(plus_, r, "p" + std::to_string(i), v);
        set(minus_, r, "m" + std::to_string(i), -v);
      } else {
        const std::string row = "." + std::to_string(r + 1);
        set(plus_, r, "p" + std::to_string(i) + row + ".0", v);
        set(plus_, r, "p" + std::to_string(i) + row + ".1", v);
        set(minus_, r, "m" + std::to_string(i) + row, -v);
      }
    }
  }
}

namespace {
std::int64_t dot(const std::vector<std::int64_t>& w, const Multiset& c) {
  std::int64_t s = 0;
  for (const auto& [q, n] : c.entries()) s += w[q] * static_cast<std::int64_t>(n);
  return s;
}
}  // namespace

std::int64_t RowValuation::positive(std::size_t row, const Multiset& c) const { return dot(plus_[row], c); }
std::int64_t RowValuation::negative(std::size_t row, const Multiset& c) const { return dot(minus_[row], c); }
std::int64_t RowValuation::value(std::size_t row, const Multiset& c) const {
  return positive(row, c) + negative(row, c) + dot(x_[row], c);
}

Count RowValuation::variable_agents(const Multiset& c) const {
  Count n = 0;
  for (const auto& [q, k] : c.entries()) {
    if (variable_[q]) n += k;
  }
  return n;
}

std::uint64_t flock_value(const Protocol& p, const Multiset& c) {
  std::uint64_t total = 0;
  for (const auto& [q, n] : c.entries()) {
    const auto& name = p.name(q);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), v);
    if (ec != std::errc{} || ptr != name.data() + name.size()) {
      throw InvalidInput("state '" + name + "' has no numeric value");
    }
    total += v * n;
  }
  return total;
}

}  // namespace popproto
