#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "popproto/analysis.hpp"
#include "popproto/cli.hpp"
#include "popproto/compile.hpp"
#include "popproto/constructions.hpp"
#include "popproto/io.hpp"
#include "popproto/predicate.hpp"
#include "popproto/semigroup.hpp"
#include "popproto/sim.hpp"

namespace py = pybind11;
using namespace popproto;

namespace {

std::map<std::string, Count> named(const Protocol& p, const NamedInput& values) {
  // Variables map to states through meta "variables" when present.
  if (!p.meta().contains("variables")) return values;
  const auto& vars = p.meta().at("variables");
  NamedInput out;
  for (const auto& [v, n] : values) {
    const std::string state = vars.contains(v) ? vars.at(v).get<std::string>() : v;
    if (n) out[state] += n;
  }
  return out;
}

std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> transitions(const Protocol& p) {
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> out;
  for (const auto& t : p.transitions()) {
    std::vector<std::string> pre, post;
    for (auto s : t.pre()) pre.push_back(p.name(s));
    for (auto s : t.post()) post.push_back(p.name(s));
    out.emplace_back(std::move(pre), std::move(post));
  }
  return out;
}

std::map<std::string, Count> leaders(const Protocol& p) {
  std::map<std::string, Count> out;
  for (const auto& [s, n] : p.leaders().entries()) out[p.name(s)] = n;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bindings for the popproto C++ library";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<MalformedProtocol>(m, "MalformedProtocol", PyExc_ValueError);

  py::class_<Protocol>(m, "Protocol")
      .def_static("from_json", [](const std::string& text) { return protocol_from_json(nlohmann::json::parse(text)); })
      .def("to_json", [](const Protocol& p) { return dump(to_json(p)); })
      .def_property_readonly("states", &Protocol::names)
      .def_property_readonly("num_states", &Protocol::num_states)
      .def_property_readonly("max_arity", &Protocol::max_arity)
      .def_property_readonly("leaders", &leaders)
      .def_property_readonly("transitions", &transitions)
      .def_property_readonly("meta", [](const Protocol& p) { return p.meta().dump(); })
      .def("output", [](const Protocol& p, const std::string& s) { return p.output(p.id(s)); })
      .def("__eq__", &Protocol::operator==)
      .def("__repr__", [](const Protocol& p) {
        return "<Protocol " + std::to_string(p.num_states()) + " states, " + std::to_string(p.transitions().size()) +
               " transitions>";
      });

  m.def("flock_standard", &flock_standard, py::arg("n"));
  m.def("flock_binary", &flock_binary, py::arg("n"));
  m.def("majority_leaders", &majority_leaders, py::arg("n"));
  m.def("linear_inequality", &linear_inequality, py::arg("a"), py::arg("c"));
  m.def(
      "linear_system",
      [](std::vector<std::vector<std::int64_t>> A, std::vector<std::int64_t> c) { return linear_system({A, c}); },
      py::arg("A"), py::arg("c"));
  m.def(
      "from_semigroup",
      [](const std::string& source) {
        if (!source.empty() && source.front() == '{') {
          return from_semigroup(presentation_from_json(nlohmann::json::parse(source)));
        }
        return from_semigroup(bundled_presentation(source));
      },
      py::arg("presentation"), "Bundled presentation name or a presentation JSON document");
  m.def("to_2way", &to_2way, py::arg("protocol"));
  m.def("lowered_state_count", &lowered_state_count, py::arg("protocol"));

  m.def(
      "decide",
      [](const Protocol& p, const NamedInput& input, std::size_t node_limit) {
        return std::string(to_string(decide_output(p, p.initial_configuration(named(p, input)), node_limit)));
      },
      py::arg("protocol"), py::arg("input"), py::arg("node_limit") = kDefaultNodeLimit,
      "Output of every fair execution: \"0\", \"1\" or \"ill-specified\"");

  m.def(
      "verify",
      [](const Protocol& p, const std::string& predicate, const std::string& inputs, std::size_t node_limit) {
        const Predicate pred = Predicate::parse(predicate);
        std::vector<NamedInput> domain;
        std::map<NamedInput, bool> expected;
        for (const auto& values : enumerate_inputs(parse_ranges(inputs))) {
          NamedInput in = named(p, values);
          Count total = p.leaders().size();
          for (const auto& [s, n] : in) total += n;
          if (total == 0) continue;
          std::map<std::string, std::int64_t> v;
          for (const auto& [name, n] : values) v[name] = static_cast<std::int64_t>(n);
          expected[in] = pred(v);
          domain.push_back(std::move(in));
        }
        const auto rep =
            verify_predicate(p, [&](const NamedInput& in) { return expected.at(in); }, domain, node_limit);
        return std::string(to_string(rep.verdict));
      },
      py::arg("protocol"), py::arg("predicate"), py::arg("inputs"), py::arg("node_limit") = kDefaultNodeLimit,
      "Exhaustive check on a range such as \"x=1..6\": \"pass\", \"fail\" or \"inconclusive\"");

  m.def(
      "simulate",
      [](const Protocol& p, const NamedInput& input, std::uint64_t trials, std::uint64_t seed,
         std::uint64_t max_steps) {
        EstimateOptions o;
        o.trials = trials;
        o.run.seed = seed;
        o.run.max_steps = max_steps;
        const auto stats = estimate(p, {named(p, input)}, o);
        std::vector<std::pair<std::string, std::uint64_t>> out;
        for (const auto& r : stats.front().runs) out.emplace_back(std::string(to_string(r.status)), r.steps);
        return out;
      },
      py::arg("protocol"), py::arg("input"), py::arg("trials") = 1, py::arg("seed") = 0,
      py::arg("max_steps") = 10'000'000, "(status, steps) per trial");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr)");
}
