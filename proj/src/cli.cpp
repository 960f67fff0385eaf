#include "popproto/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "popproto/analysis.hpp"
#include "popproto/compile.hpp"
#include "popproto/constructions.hpp"
#include "popproto/io.hpp"
#include "popproto/predicate.hpp"
#include "popproto/semigroup.hpp"
#include "popproto/sim.hpp"

namespace popproto {

using nlohmann::json;

namespace {

std::vector<std::int64_t> parse_ints(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidInput("bad integer list \"" + text + "\"");
    }
  }
  if (out.empty()) throw InvalidInput("empty integer list");
  return out;
}

std::vector<std::vector<std::int64_t>> parse_matrix(const std::string& text) {
  std::vector<std::vector<std::int64_t>> rows;
  std::stringstream in(text);
  for (std::string row; std::getline(in, row, ';');) rows.push_back(parse_ints(row));
  if (rows.empty()) throw InvalidInput("empty matrix");
  return rows;
}

SemigroupPresentation load_presentation(const std::string& source) {
  if (std::filesystem::exists(source)) return read_presentation(source);
  return bundled_presentation(source);
}

/// Input variable -> state name, from meta "variables" or the initial states.
std::map<std::string, std::string> variable_states(const Protocol& p) {
  std::map<std::string, std::string> vars;
  if (p.meta().contains("variables")) {
    for (const auto& [v, s] : p.meta().at("variables").items()) vars[v] = s.get<std::string>();
  } else {
    for (StateId s : p.initial()) vars[p.name(s)] = p.name(s);
  }
  return vars;
}

NamedInput to_state_input(const std::map<std::string, std::string>& vars,
                          const std::map<std::string, Count>& values) {
  NamedInput out;
  for (const auto& [v, n] : values) {
    auto it = vars.find(v);
    if (it == vars.end()) throw InvalidInput("unknown input variable '" + v + "'");
    if (n > 0) out[it->second] += n;
  }
  return out;
}

/// Var-named inputs and their state-named counterparts, skipping empty populations.
struct Domain {
  std::vector<std::map<std::string, Count>> by_variable;
  std::vector<NamedInput> by_state;
};

Domain build_domain(const Protocol& p, const std::string& ranges) {
  const auto vars = variable_states(p);
  Domain d;
  for (auto& values : enumerate_inputs(parse_ranges(ranges))) {
    NamedInput in = to_state_input(vars, values);
    Count total = p.leaders().size();
    for (const auto& [s, n] : in) total += n;
    if (total == 0) continue;
    d.by_state.push_back(std::move(in));
    d.by_variable.push_back(std::move(values));
  }
  if (d.by_state.empty()) throw InvalidInput("input domain is empty");
  return d;
}

NamedInput as_named(const std::map<std::string, Count>& values) { return {values.begin(), values.end()}; }

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

void print_certificate(const Protocol& p, std::ostream& out) {
  const auto& meta = p.meta();
  out << "construction: " << meta.value("construction", std::string("unknown")) << '\n';
  out << "states: " << p.num_states() << '\n';
  out << "leaders: " << p.leaders().size() << '\n';
  out << "max arity: " << p.max_arity() << '\n';
  out << "states after lowering: " << lowered_state_count(p) << " (gadget bound "
      << gadget_state_bound(p) << ")\n";
  if (meta.contains("certificate")) {
    const auto& c = meta.at("certificate");
    if (c.contains("states_bound")) out << "construction state bound: " << c.at("states_bound") << '\n';
    if (c.contains("leaders_bound")) out << "construction leader bound: " << c.at("leaders_bound") << '\n';
  }
}

struct BuildOptions {
  std::string family;
  std::uint64_t n = 0;
  std::string a, c, A, presentation = "double2", out;
};

Protocol build_family(const BuildOptions& o) {
  if (o.family == "flock-standard") return flock_standard(o.n);
  if (o.family == "flock-binary") return flock_binary(o.n);
  if (o.family == "majority") return majority_leaders(o.n);
  if (o.family == "linear") {
    if (o.a.empty()) throw InvalidInput("linear needs --a");
    const auto c = parse_ints(o.c.empty() ? "0" : o.c);
    if (c.size() != 1) throw InvalidInput("linear needs a single --c");
    return linear_inequality(parse_ints(o.a), c.front());
  }
  if (o.family == "system") {
    if (o.A.empty()) throw InvalidInput("system needs --A");
    LinearSystemParams sys;
    sys.A = parse_matrix(o.A);
    sys.c = o.c.empty() ? std::vector<std::int64_t>(sys.A.size(), 0) : parse_ints(o.c);
    return linear_system(sys);
  }
  if (o.family == "semigroup") return from_semigroup(load_presentation(o.presentation));
  throw InvalidInput("unknown family '" + o.family + "'");
}

void print_info(const Protocol& p, std::ostream& out) {
  const auto hist = arity_histogram(p);
  const std::size_t k = p.max_arity();
  out << p.num_states() << " states, ";
  if (k <= 2) {
    out << "2-way only";
  } else {
    out << k << "-way";
  }
  out << ", " << p.leaders().size() << " leaders\n";
  out << "transitions: " << p.transitions().size();
  for (const auto& [arity, count] : hist) out << " (" << arity << "-way: " << count << ")";
  out << '\n';
  out << "initial:";
  for (StateId s : p.initial()) out << ' ' << p.name(s);
  out << '\n';
  out << "leaders: " << (p.leaders().empty() ? "none" : p.format(p.leaders())) << '\n';
  for (int b : {1, 0}) {
    out << "output " << b << ":";
    for (StateId s = 0; s < p.num_states(); ++s) {
      if (p.output(s) == b) out << ' ' << p.name(s);
    }
    out << '\n';
  }
  const auto& meta = p.meta();
  if (meta.contains("construction")) out << "construction: " << meta.at("construction").get<std::string>() << '\n';
  if (meta.contains("params")) out << "params: " << meta.at("params").dump() << '\n';
  if (meta.contains("lowering")) {
    const auto& l = meta.at("lowering");
    out << "gadget states: " << l.at("gadget_states") << " (from " << l.at("original_states")
        << " states, bound " << l.at("gadget_state_bound") << ")\n";
  }
}

}  // namespace

Protocol load_protocol(const std::string& source) {
  if (std::filesystem::exists(source)) return read_protocol(source);
  static const std::regex shorthand(R"(^\s*([a-z0-9-]+)\s*\(\s*([^)]*?)\s*\)\s*$)");
  std::smatch m;
  if (!std::regex_match(source, m, shorthand)) {
    throw InvalidInput("'" + source + "' is neither a file nor a protocol shorthand");
  }
  const std::string family = m[1];
  const std::string arg = m[2];
  if (family == "semigroup") return from_semigroup(load_presentation(arg));
  const auto v = parse_ints(arg);
  if (v.size() != 1 || v[0] < 1) throw InvalidInput("'" + source + "': expected one positive integer");
  const auto n = static_cast<std::uint64_t>(v[0]);
  if (family == "flock-standard") return flock_standard(n);
  if (family == "flock-binary") return flock_binary(n);
  if (family == "majority") return majority_leaders(n);
  throw InvalidInput("unknown protocol shorthand '" + family + "'");
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Succinct population protocols: build, lower, verify and simulate", "popproto"};
  app.require_subcommand(1);

  BuildOptions bo;
  auto* build = app.add_subcommand("build", "Construct a protocol family");
  build->add_option("family", bo.family, "flock-standard | flock-binary | majority | linear | system | semigroup")
      ->required();
  build->add_option("--n", bo.n, "Threshold n");
  build->add_option("--a", bo.a, "Coefficients, e.g. 1,-1");
  build->add_option("--c", bo.c, "Constant (linear) or constant vector (system)");
  build->add_option("--A", bo.A, "Matrix rows separated by ';', e.g. \"1,0;0,1\"");
  build->add_option("--presentation", bo.presentation, "Presentation file or bundled name");
  build->add_option("-o,--out", bo.out, "Output protocol file (default: stdout)");

  std::string in_path, out_path;
  auto* compile = app.add_subcommand("compile", "Lower a k-way protocol to a 2-way protocol");
  compile->add_option("input", in_path, "Protocol file or shorthand")->required();
  compile->add_option("-o,--out", out_path, "Output protocol file (default: stdout)");

  std::string predicate, ranges, report_path, csv_path;
  std::size_t node_limit = kDefaultNodeLimit;
  auto* check = app.add_subcommand("check", "Verify a predicate exhaustively on a range of inputs");
  check->add_option("protocol", in_path, "Protocol file or shorthand")->required();
  check->add_option("--predicate", predicate, "e.g. \"x>=3\"")->required();
  check->add_option("--inputs", ranges, "e.g. x=1..6,y=0..3")->required();
  check->add_option("--node-limit", node_limit, "Configurations per input");
  check->add_option("--report", report_path, "JSON report file");
  check->add_option("--csv", csv_path, "CSV report file");

  std::string single_input;
  EstimateOptions eo;
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("protocol", in_path, "Protocol file or shorthand")->required();
    auto* one = sub->add_option("--input", single_input, "Single input, e.g. x=20");
    auto* many = sub->add_option("--inputs", ranges, "Input ranges, e.g. x=1..6");
    one->excludes(many);
    sub->add_option("--seed", eo.run.seed, "Base seed");
    sub->add_option("--max-steps", eo.run.max_steps, "Step budget per run");
    sub->add_option("--window", eo.run.window, "Non-silent consensus steps before a stability check");
    sub->add_option("--check-nodes", eo.run.check_nodes, "Node budget of the stability check");
    sub->add_option("--trials", eo.trials, "Runs per input");
    sub->add_option("--threads", eo.threads, "Worker threads (0: all cores)");
    sub->add_option("--csv", csv_path, "Output CSV file (default: stdout)");
  };
  auto* run = app.add_subcommand("run", "Simulate random fair executions; one CSV row per run");
  add_sim(run);
  auto* stats = app.add_subcommand("stats", "Simulate and tabulate outcome frequencies per input");
  add_sim(stats);

  auto* info = app.add_subcommand("info", "Summarize a protocol");
  info->add_option("protocol", in_path, "Protocol file or shorthand")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) {
      const Protocol p = build_family(bo);
      if (bo.out.empty()) {
        out << dump(to_json(p));
      } else {
        write_protocol(p, bo.out);
        print_certificate(p, out);
      }
      return kExitOk;
    }
    if (compile->parsed()) {
      const Protocol p = load_protocol(in_path);
      const Protocol p2 = to_2way(p);
      if (out_path.empty()) {
        out << dump(to_json(p2));
      } else {
        write_protocol(p2, out_path);
        out << "states: " << p.num_states() << " -> " << p2.num_states() << " (gadget bound "
            << gadget_state_bound(p) << ")\n";
        out << "transitions: " << p.transitions().size() << " -> " << p2.transitions().size() << '\n';
      }
      return kExitOk;
    }
    if (check->parsed()) {
      const Protocol p = load_protocol(in_path);
      const Predicate pred = Predicate::parse(predicate);
      const Domain d = build_domain(p, ranges);
      std::map<NamedInput, bool> expected;
      for (std::size_t i = 0; i < d.by_state.size(); ++i) {
        std::map<std::string, std::int64_t> values;
        for (const auto& [v, n] : d.by_variable[i]) values[v] = static_cast<std::int64_t>(n);
        expected[d.by_state[i]] = pred(values);
      }
      VerificationReport rep = verify_predicate(
          p, [&](const NamedInput& in) { return expected.at(in); }, d.by_state, node_limit);
      for (std::size_t i = 0; i < rep.entries.size(); ++i) rep.entries[i].input = as_named(d.by_variable[i]);

      json doc = rep.to_json();
      doc["predicate"] = predicate;
      if (!report_path.empty()) write_text(report_path, dump(doc));
      if (!csv_path.empty()) write_text(csv_path, rep.to_csv());

      std::size_t bad = 0, limit = 0;
      for (const auto& e : rep.entries) {
        if (!e.decided) {
          ++limit;
        } else if (!e.ok()) {
          ++bad;
        }
      }
      out << "checked " << rep.entries.size() << " inputs against \"" << predicate
          << "\": " << to_string(rep.verdict) << '\n';
      if (bad) out << bad << " wrong or ill-specified\n";
      if (limit) out << limit << " over the node limit of " << node_limit << '\n';
      for (const auto& e : rep.entries) {
        if (!e.decided || e.ok()) continue;
        out << "counterexample: " << format_input(e.input) << " expected " << (e.expected ? 1 : 0)
            << ", decided " << to_string(*e.decided) << '\n';
        if (!e.counterexample_end.empty()) {
          out << "  execution:";
          for (const auto& t : e.counterexample) out << " [" << t << ']';
          out << "\n  reaches " << e.counterexample_end << '\n';
        }
      }
      switch (rep.verdict) {
        case Verdict::pass:
          return kExitOk;
        case Verdict::fail:
          return kExitFail;
        case Verdict::inconclusive:
          return kExitInconclusive;
      }
    }
    if (run->parsed() || stats->parsed()) {
      const Protocol p = load_protocol(in_path);
      Domain d;
      if (!single_input.empty()) {
        d.by_variable.push_back(parse_assignment(single_input));
        d.by_state.push_back(to_state_input(variable_states(p), d.by_variable.back()));
      } else if (!ranges.empty()) {
        d = build_domain(p, ranges);
      } else {
        throw InvalidInput("give --input or --inputs");
      }
      auto table = estimate(p, d.by_state, eo);
      for (std::size_t i = 0; i < table.size(); ++i) table[i].input = as_named(d.by_variable[i]);
      emit(run->parsed() ? runs_csv(table) : statistics_csv(table), csv_path, out);
      return kExitOk;
    }
    if (info->parsed()) {
      print_info(load_protocol(in_path), out);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace popproto
