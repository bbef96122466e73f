#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "plcsynth/bench.hpp"
#include "plcsynth/cli.hpp"
#include "plcsynth/engine.hpp"
#include "plcsynth/lang.hpp"
#include "plcsynth/spec.hpp"

namespace py = pybind11;
using namespace plcsynth;

namespace {

Lang lang_arg(const std::string &text) {
  if (text == "st" || text == "ST")
    return Lang::ST;
  if (text == "il" || text == "IL")
    return Lang::IL;
  throw py::value_error("language must be 'st' or 'il', not '" + text + "'");
}

std::string lang_name(Lang l) { return l == Lang::ST ? "st" : "il"; }

Assignment to_assignment(const std::map<std::string, bool> &m) {
  Assignment a;
  for (const auto &[k, v] : m)
    a.set(Identifier(k), v);
  return a;
}

std::map<std::string, bool> from_assignment(const Assignment &a) {
  std::map<std::string, bool> m;
  for (const auto &[k, v] : a)
    m.emplace(k.str(), v);
  return m;
}

SynthConfig config(std::uint64_t seed, int max_slots = 31, bool per_output = true) {
  SynthConfig c;
  c.seed = seed;
  c.max_slots = max_slots;
  c.per_output = per_output;
  return c;
}

py::dict result_dict(const SynthesisResult &r) {
  py::dict d;
  d["block"] = r.block;
  d["iterations"] = r.iterations;
  d["counterexamples_used"] = r.counterexamples_used;
  d["slots_used"] = r.slots_used;
  d["synthesis_calls"] = r.synthesis_calls();
  d["nodes_changed"] = r.nodes_changed;
  d["wall_time_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
  return d;
}

// None when verified, else the rendered counterexample.
py::object verdict(const VerifyResult &r) {
  if (r.is_verified())
    return py::none();
  return py::str(format_counterexample(r.counterexample()));
}

} // namespace

PYBIND11_MODULE(_plcsynth, m) {
  m.doc() = "Synthesis, verification and repair of PLC function blocks";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error);
  py::register_exception<SchemaError>(m, "SchemaError", error);
  py::register_exception<TypeError>(m, "BlockTypeError", error);
  py::register_exception<Unsatisfiable>(m, "Unsatisfiable", error);
  py::register_exception<SizeBoundExceeded>(m, "SizeBoundExceeded", error);
  py::register_exception<InsufficientSamples>(m, "InsufficientSamples", error);

  py::class_<Block>(m, "Block")
      .def_static("parse", [](const std::string &text, const std::string &lang) {
        return parse_block(text, lang_arg(lang));
      }, py::arg("text"), py::arg("lang") = "st")
      .def_static("load", [](const std::string &path) { return load_block(path); })
      .def("emit", [](const Block &b, const std::string &lang) { return emit(b, lang_arg(lang)); },
           py::arg("lang") = "st")
      .def_property_readonly("name", [](const Block &b) { return b.name.str(); })
      .def_property_readonly("lang", [](const Block &b) { return lang_name(b.lang); })
      .def_property_readonly("inputs", [](const Block &b) {
        std::vector<std::string> v;
        for (const auto &n : b.interface.inputs()) v.push_back(n.str());
        return v;
      })
      .def_property_readonly("outputs", [](const Block &b) {
        std::vector<std::string> v;
        for (const auto &n : b.interface.outputs()) v.push_back(n.str());
        return v;
      })
      .def_property_readonly("size", [](const Block &b) { return operator_count(b); })
      .def("simulate", [](const Block &b, const std::vector<std::map<std::string, bool>> &trace,
                          const std::map<std::string, bool> &init) {
        std::vector<Assignment> in;
        for (const auto &c : trace) in.push_back(to_assignment(c));
        Assignment s0 = init.empty() ? default_state(b.interface) : to_assignment(init);
        std::vector<std::map<std::string, bool>> out;
        for (const auto &c : simulate(b, in, s0).cycles) out.push_back(from_assignment(c.outputs));
        return out;
      }, py::arg("inputs"), py::arg("init") = std::map<std::string, bool>{})
      .def("__eq__", [](const Block &a, const Block &b) { return a == b; })
      .def("__repr__", [](const Block &b) { return "<Block " + b.name.str() + " (" + lang_name(b.lang) + ")>"; });

  py::class_<ConstraintList>(m, "ConstraintList")
      .def_static("parse", &parse_constraints_xml, py::arg("xml"))
      .def_static("load", [](const std::string &path) { return load_constraints(path); })
      .def("to_xml", &format_constraints_xml)
      .def_property_readonly("block_name", [](const ConstraintList &l) { return l.block_name.str(); })
      .def("__len__", [](const ConstraintList &l) { return l.constraints.size(); })
      .def("conflicts", [](const ConstraintList &l) {
        std::vector<std::tuple<std::size_t, std::size_t, std::string, std::map<std::string, bool>>> out;
        for (const auto &c : check_consistency(l).conflicts)
          out.emplace_back(c.first, c.second, c.output.str(), from_assignment(c.witness));
        return out;
      }, "Pairs of truth-table rows that disagree, as (first, second, output, witness).");

  m.def("synthesize", [](const ConstraintList &l, std::uint64_t seed, int max_slots, bool joint) {
    return result_dict(synthesize(l, config(seed, max_slots, !joint)));
  }, py::arg("constraints"), py::arg("seed") = 0, py::arg("max_slots") = 31, py::arg("joint") = false);

  m.def("verify", [](const Block &b, const ConstraintList &l, int cycles, bool symbolic_init) {
    SynthConfig c;
    c.unwind_cycles = cycles;
    c.symbolic_init = symbolic_init;
    return verdict(verify(b, compile_spec(l), c));
  }, py::arg("block"), py::arg("constraints"), py::arg("cycles") = 1, py::arg("symbolic_init") = false,
     "None when the block meets the constraints, otherwise the counterexample text.");

  m.def("repair", [](const Block &b, const ConstraintList &l, std::uint64_t seed) {
    return result_dict(repair(b, compile_spec(l), config(seed)));
  }, py::arg("block"), py::arg("constraints"), py::arg("seed") = 0);

  m.def("simplify", [](const Block &b, std::uint64_t seed) { return result_dict(simplify(b, config(seed))); },
        py::arg("block"), py::arg("seed") = 0);

  m.def("extend", [](const Block &b, const ConstraintList &extra, std::uint64_t seed) {
    return result_dict(extend(b, extra, config(seed)));
  }, py::arg("block"), py::arg("constraints"), py::arg("seed") = 0);

  m.def("translate", [](const Block &b, const std::string &lang) { return translate(b, lang_arg(lang)); },
        py::arg("block"), py::arg("lang"));

  m.def("equivalent", [](const Block &a, const Block &b, int cycles) {
    SynthConfig c;
    c.unwind_cycles = cycles;
    return verdict(equivalent(a, b, c));
  }, py::arg("a"), py::arg("b"), py::arg("cycles") = 1);

  m.def("stats", [](const std::vector<double> &samples_ms) {
    std::vector<Millis> xs(samples_ms.begin(), samples_ms.end());
    BenchStats s = stats(xs);
    return std::make_pair(s.mean.count(), s.stddev.count());
  }, py::arg("samples_ms"), "(mean, sample standard deviation) in milliseconds.");

  m.def("bench", [](const std::string &scenario, int repeat, std::uint64_t seed) {
    auto s = parse_scenario(scenario);
    if (!s)
      throw py::value_error("unknown scenario '" + scenario + "'");
    BenchReport r = bench_run(*s, repeat, config(seed));
    py::dict d;
    std::vector<double> times;
    for (const auto &rep : r.repeats) times.push_back(rep.time.count());
    d["times_ms"] = times;
    d["mean_ms"] = r.stats.mean.count();
    d["stddev_ms"] = r.stats.stddev.count();
    d["synthesis_calls"] = r.repeats.front().synthesis_calls;
    d["block"] = r.last_block;
    return d;
  }, py::arg("scenario"), py::arg("repeat") = 10, py::arg("seed") = 0);

  m.def("run", [](const std::vector<std::string> &args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run a command-line subcommand; returns (exit code, stdout, stderr).");
}
