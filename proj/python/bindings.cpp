// Python bindings. Vertex sets cross the boundary as lists of names and
// matrices as numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "causalcat/dag.hpp"
#include "causalcat/diagram.hpp"
#include "causalcat/docalc.hpp"
#include "causalcat/effects.hpp"
#include "causalcat/errors.hpp"
#include "causalcat/io.hpp"
#include "causalcat/semantics.hpp"
#include "causalcat/treks.hpp"
#include "causalcat/verify.hpp"

namespace py = pybind11;
using namespace causalcat;

namespace {

using Names = std::vector<std::string>;

struct PyDag {
  DagPtr dag;
};

struct PyModel {
  std::shared_ptr<const CbnModel> model;
};

VertexSet set_of(const PyDag& d, const Names& names) {
  VertexSet s;
  for (const auto& n : names) {
    const Vertex v = d.dag->vertex(n);
    if (s.contains(v)) throw NotSingular("vertex " + n + " listed twice");
    s.insert(v);
  }
  return s;
}

Names names_of(const Dag& dag, const Word& w) {
  Names out;
  for (Vertex v : w) out.push_back(dag.name(v));
  return out;
}

Names names_of(const Dag& dag, VertexSet s) { return names_of(dag, sorted_word(s)); }

PyDag make_dag(Names vertices, const std::vector<std::pair<std::string, std::string>>& edges) {
  return {std::make_shared<const Dag>(build_dag(std::move(vertices), edges))};
}

}  // namespace

PYBIND11_MODULE(_causalcat, m) {
  m.doc() = "Causal effects, trek separation and the do-calculus over DAGs";

  py::register_exception<Error>(m, "CausalcatError", PyExc_ValueError);

  py::class_<PyDag>(m, "Dag")
      .def(py::init(&make_dag), py::arg("vertices"), py::arg("edges") = std::vector<std::pair<std::string, std::string>>{})
      .def_static("from_json", [](const std::string& text) { return PyDag{std::make_shared<const Dag>(parse_dag_json(text))}; })
      .def("to_json", [](const PyDag& d) { return dag_to_json(*d.dag); })
      .def_property_readonly("vertices", [](const PyDag& d) { return d.dag->names(); })
      .def_property_readonly("edges",
                             [](const PyDag& d) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& [a, b] : d.dag->edges()) out.emplace_back(d.dag->name(a), d.dag->name(b));
                               return out;
                             })
      .def("parents", [](const PyDag& d, const std::string& v) { return names_of(*d.dag, d.dag->parents(d.dag->vertex(v))); })
      .def("ancestors", [](const PyDag& d, const std::string& v) { return names_of(*d.dag, ancestors(*d.dag, d.dag->vertex(v))); })
      .def("__len__", [](const PyDag& d) { return d.dag->size(); })
      .def("__eq__", [](const PyDag& a, const PyDag& b) { return *a.dag == *b.dag; })
      .def("__repr__", [](const PyDag& d) { return "Dag(" + dag_to_json(*d.dag) + ")"; });

  auto separation = [&](const char* name, bool (*pred)(const Dag&, VertexSet, VertexSet, VertexSet), const char* doc) {
    m.def(
        name,
        [pred](const PyDag& d, const Names& x, const Names& y, const Names& z) {
          return pred(*d.dag, set_of(d, x), set_of(d, y), set_of(d, z));
        },
        py::arg("dag"), py::arg("x"), py::arg("y"), py::arg("given") = Names{}, doc);
  };
  separation("t_separated", &t_separated, "Every proper trek between x and y meets `given`.");
  separation("forward_t_separated", &forward_t_separated, "Every proper forward trek from x to y meets `given`.");
  separation("backward_t_separated", &backward_t_separated, "Every proper backward trek from x to y meets `given`.");
  separation("d_separated", &d_separated, "Classical d-separation.");

  py::class_<Morphism>(m, "Morphism")
      .def_property_readonly("dom", [](const Morphism& f) { return names_of(f.dag(), f.dom()); })
      .def_property_readonly("cod", [](const Morphism& f) { return names_of(f.dag(), f.cod()); })
      .def("serialize", &Morphism::serialize)
      .def("to_dot", [](const Morphism& f) { return to_dot(f.diagram()); })
      .def("to_json", [](const Morphism& f) { return to_json(f.diagram()); })
      .def("to_text", [](const Morphism& f) { return to_text(f.diagram()); })
      .def("__eq__", [](const Morphism& a, const Morphism& b) { return a == b; })
      .def("__repr__", [](const Morphism& f) { return "<Morphism " + f.serialize() + ">"; });

  m.def(
      "causal_effect",
      [](const PyDag& d, const Names& outcome, const Names& treatment) {
        return causal_effect(d.dag, d.dag->word_of(outcome), d.dag->word_of(treatment));
      },
      py::arg("dag"), py::arg("outcome"), py::arg("treatment") = Names{}, "The causal effect [outcome||treatment] in normal form.");
  m.def(
      "marginal", [](const Morphism& f, const Names& drop) { return marginal(f, f.dag().word_of(drop)); }, py::arg("f"),
      py::arg("drop"));
  m.def("compose", py::overload_cast<const Morphism&, const Morphism&>(&compose), "g after f");
  m.def("tensor", py::overload_cast<const Morphism&, const Morphism&>(&tensor));

  auto syntactic = [&](const char* name, bool (*pred)(DagPtr, VertexSet, VertexSet, VertexSet)) {
    m.def(
        name,
        [pred](const PyDag& d, const Names& u, const Names& v, const Names& w) {
          return pred(d.dag, set_of(d, u), set_of(d, v), set_of(d, w));
        },
        py::arg("dag"), py::arg("u"), py::arg("v"), py::arg("w"));
  };
  syntactic("decomposable_over", &decomposable_over);
  syntactic("screened_off", &screened_off);
  syntactic("cond_independent", &cond_independent);
  m.def("connected_in_effect", [](const PyDag& d, const std::string& v, const std::string& w) {
    return connected_in_effect(d.dag, d.dag->vertex(v), d.dag->vertex(w));
  });

  py::class_<PyModel>(m, "Model")
      .def_static(
          "from_json", [](const PyDag& d, const std::string& text) { return PyModel{std::make_shared<const CbnModel>(parse_model_json(d.dag, text))}; })
      .def_static(
          "random",
          [](const PyDag& d, int card, std::uint64_t seed) {
            return PyModel{std::make_shared<const CbnModel>(random_positive_model(d.dag, card, seed))};
          },
          py::arg("dag"), py::arg("card") = 2, py::arg("seed") = 0)
      .def("to_json", [](const PyModel& p) { return model_to_json(*p.model); })
      .def("kernel", [](const PyModel& p, const std::string& v) { return StochMatrix(p.model->kernel(p.model->dag().vertex(v))); })
      .def_property_readonly("card", [](const PyModel& p) { return p.model->card(); });

  m.def(
      "interventional",
      [](const PyModel& p, const Names& outcome, const Names& treatment) {
        const Dag& dag = p.model->dag();
        return interventional_matrix(*p.model, sorted_word(dag.set_of(outcome)), sorted_word(dag.set_of(treatment)));
      },
      py::arg("model"), py::arg("outcome"), py::arg("do") = Names{},
      "P(outcome | do(treatment)) by truncated factorization; one column per treatment state.");
  m.def(
      "evaluate", [](const PyModel& p, const Morphism& f) { return eval_finstoch(*p.model, f); }, py::arg("model"),
      py::arg("f"), "Stochastic matrix of a morphism under the model.");

  m.def(
      "rule_applicable",
      [](const PyDag& d, int rule, const Names& x, const Names& y, const Names& z) {
        return rule_applicable(*d.dag, {rule, set_of(d, x), set_of(d, y), set_of(d, z)});
      },
      py::arg("dag"), py::arg("rule"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "pearl_rule_applicable",
      [](const PyDag& d, int rule, const Names& x, const Names& y, const Names& z) {
        return pearl_rule_applicable_w_empty(*d.dag, {rule, set_of(d, x), set_of(d, y), set_of(d, z)});
      },
      py::arg("dag"), py::arg("rule"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "rule_gap",
      [](const PyModel& p, int rule, const Names& x, const Names& y, const Names& z) {
        const Dag& dag = p.model->dag();
        return verify_rule_semantics(*p.model, {rule, dag.set_of(x), dag.set_of(y), dag.set_of(z)});
      },
      py::arg("model"), py::arg("rule"), py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "local_markov_gap", [](const PyModel& p, const std::string& v) { return local_markov_gap(*p.model, p.model->dag().vertex(v)); },
      py::arg("model"), py::arg("vertex"));

  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name, std::size_t max_vertices, std::size_t models, std::size_t fuzz_diagrams, std::uint64_t seed) {
        VerifyConfig cfg;
        cfg.max_vertices = max_vertices;
        cfg.probe_max_vertices = std::min(cfg.probe_max_vertices, max_vertices);
        cfg.models = models;
        cfg.fuzz_diagrams = fuzz_diagrams;
        cfg.seed = seed;
        py::list out;
        for (const SuiteResult& r : run_suite(name, cfg)) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["checks"] = r.checks;
          d["failures"] = r.failures;
          d["summary"] = r.summary;
          d["examples"] = r.examples;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("name"), py::arg("max_vertices") = 4, py::arg("models") = 20, py::arg("fuzz_diagrams") = 100,
      py::arg("seed") = 7);
}
