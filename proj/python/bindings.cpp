#include "accelbmc/frontend.hpp"
#include "accelbmc/oracle.hpp"
#include "accelbmc/pipeline.hpp"
#include "accelbmc/trace_automata.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace accelbmc;

namespace {

std::vector<std::string> edge_texts(const Cfa& cfa)
{
  std::vector<std::string> out;
  for (const auto& e : cfa.edges()) {
    out.push_back(to_string(e.stmt));
  }
  return out;
}

// Verdict plus counterexample as a JSON string; the Python side decodes it.
std::string check(const Cfa& cfa, int unwind, double timeout)
{
  BmcOptions opts;
  if (timeout > 0) {
    opts.solver.deadline = std::chrono::steady_clock::now() +
                           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(timeout));
  }
  Verdict v = check_safety(cfa, unwind, opts);
  nlohmann::json j;
  j["verdict"] = to_string(v.kind);
  j["bound"] = v.bound;
  j["cnf"] = {{"vars", v.cnf_vars}, {"clauses", v.cnf_clauses}};
  j["counterexample"] = nullptr;
  if (v.cex) {
    nlohmann::json steps = nlohmann::json::array();
    for (std::size_t k = 0; k < v.cex->edges.size(); ++k) {
      nlohmann::json state = nlohmann::json::object();
      for (const auto& [name, value] : v.cex->states[k]) {
        state[name] = static_cast<std::uint64_t>(value);
      }
      steps.push_back({{"edge", v.cex->edges[k]},
                       {"stmt", to_string(cfa.edge(v.cex->edges[k]).stmt)},
                       {"state", state}});
    }
    j["counterexample"] = {{"steps", steps}};
  }
  return j.dump();
}

} // namespace

PYBIND11_MODULE(_accelbmc, m)
{
  m.doc() = "Bounded model checking with loop acceleration and trace automata";

  static py::exception<ParseError> parse_error(m, "ParseError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const ParseError& e) {
      parse_error(e.what());
    } catch (const StateSpaceTooLarge& e) {
      PyErr_SetString(PyExc_OverflowError, e.what());
    }
  });

  py::class_<Cfa>(m, "Cfa")
      .def_property_readonly("num_vertices", &Cfa::num_vertices)
      .def_property_readonly("num_edges", [](const Cfa& c) { return c.edges().size(); })
      .def_property_readonly("variables",
                             [](const Cfa& c) {
                               std::vector<std::string> out;
                               for (const auto& d : c.vars()) {
                                 out.push_back(d.name);
                               }
                               return out;
                             })
      .def_property_readonly("error_vertices", &Cfa::error_vertices)
      .def("edges", &edge_texts)
      .def("dot", [](const Cfa& c, const std::string& name) { return dump_dot(c, name); },
           py::arg("name") = "cfa");

  py::class_<AcceleratedCfa>(m, "AcceleratedCfa")
      .def_readonly("cfa", &AcceleratedCfa::cfa)
      .def_readonly("notes", &AcceleratedCfa::report)
      .def_readonly("warnings", &AcceleratedCfa::warnings)
      .def_property_readonly("num_accelerators",
                             [](const AcceleratedCfa& a) { return a.accels.size(); })
      .def("accelerator",
           [](const AcceleratedCfa& a, std::size_t k) {
             std::vector<std::string> out;
             for (const auto& s : a.accels.at(k).stmts) {
               out.push_back(to_string(s));
             }
             return out;
           });

  py::class_<InstrumentedCfa>(m, "RestrictedCfa")
      .def_readonly("cfa", &InstrumentedCfa::cfa)
      .def_readonly("state_variable", &InstrumentedCfa::g)
      .def_property_readonly("dfa_states",
                             [](const InstrumentedCfa& r) { return r.dfa.num_states(); });

  m.def(
      "parse",
      [](const std::string& text, std::optional<unsigned> width) {
        return lower(parse(SourceProgram{text, "<string>"}, width));
      },
      py::arg("text"), py::arg("width") = py::none(), "Parse and lower a program to its CFA.");
  m.def(
      "load",
      [](const std::string& path, std::optional<unsigned> width) {
        return lower(parse(read_source(path), width));
      },
      py::arg("path"), py::arg("width") = py::none());
  m.def("accelerate", &accelerate_cfa, py::arg("cfa"), py::arg("max_loop_paths") = 8);
  m.def(
      "restrict",
      [](const AcceleratedCfa& acc) {
        return inline_automaton(acc, determinize(build_restriction_nfa(acc)));
      },
      py::arg("accelerated"));
  m.def("check_json", &check, py::arg("cfa"), py::arg("unwind"), py::arg("timeout") = 30.0);
  m.def(
      "oracle",
      [](const Cfa& cfa) {
        Reachability r(cfa);
        Diameter d = exact_diameter(cfa);
        py::dict out;
        out["reachable"] = r.num_reachable();
        out["error_reachable"] = r.error_reachable();
        out["diameter_edges"] = d.edges;
        out["diameter_weighted"] = d.weighted;
        return out;
      },
      py::arg("cfa"));
  m.def(
      "run_json",
      [](const std::string& path, const std::string& mode, std::optional<int> unwind,
         std::optional<unsigned> width, double timeout) {
        RunConfig cfg;
        auto md = parse_mode(mode);
        if (!md) {
          throw py::value_error("unknown mode: " + mode);
        }
        cfg.mode = *md;
        cfg.unwind = unwind;
        cfg.width = width;
        cfg.timeout = timeout;
        py::gil_scoped_release release;
        return to_json(run(cfg, path)).dump();
      },
      py::arg("path"), py::arg("mode") = "accel-ta", py::arg("unwind") = py::none(),
      py::arg("width") = py::none(), py::arg("timeout") = 30.0);
}
