#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "late/bench.hpp"
#include "late/canonical.hpp"
#include "late/earley.hpp"
#include "late/grammar.hpp"
#include "late/late.hpp"
#include "late/oracle.hpp"
#include "late/parallel.hpp"

namespace py = pybind11;
using namespace late;

namespace {

EngineKind engine_arg(const std::string& name) {
  auto e = engine_from_name(name);
  if (!e) throw std::invalid_argument("unknown engine '" + name + "'");
  return *e;
}

QueuePolicy policy_arg(const std::string& name) {
  if (name == "fifo") return QueuePolicy::Fifo;
  if (name == "lifo") return QueuePolicy::Lifo;
  if (name == "random") return QueuePolicy::Random;
  throw std::invalid_argument("unknown queue policy '" + name + "'");
}

CanonicalChart run_engine(const Grammar& g, const std::string& sentence,
                          const std::string& engine, unsigned workers,
                          const std::string& policy, std::uint64_t seed) {
  Sentence w = tokenize(sentence, g);
  switch (engine_arg(engine)) {
    case EngineKind::Earley:
      return canonicalize_earley(earley_parse(g, w));
    case EngineKind::LateSerial:
      return canonicalize_late(late_parse(g, w, policy_arg(policy), seed));
    case EngineKind::LateParallel:
      return canonicalize_late(
          late_parse_parallel(g, w, {workers, policy_arg(policy), seed}));
  }
  throw std::logic_error("bad engine");
}

}  // namespace

PYBIND11_MODULE(pylate, m) {
  m.doc() = "Context-free recognition: classic Earley, the order-independent late "
            "engine, and a parallel late engine.";

  py::register_exception<GrammarError>(m, "GrammarError", PyExc_ValueError);
  py::register_exception<TokenError>(m, "TokenError", PyExc_ValueError);
  py::register_exception<EngineRejection>(m, "EngineRejection", PyExc_RuntimeError);
  py::register_exception<OracleLimit>(m, "OracleLimit", PyExc_RuntimeError);
  py::register_exception<BenchError>(m, "BenchError", PyExc_ValueError);

  py::class_<Grammar>(m, "Grammar")
      .def_static("parse", &Grammar::parse, py::arg("text"),
                  "Parse the grammar text format (one `LHS -> sym sym | ...` per line, "
                  "EPSILON keyword, # comments; start symbol START).")
      .def_property_readonly("rule_count", [](const Grammar& g) { return g.rules().size(); })
      .def_property_readonly("terminals",
                             [](const Grammar& g) {
                               std::vector<std::string> names;
                               for (SymbolId t : g.terminals()) names.push_back(g.name(t));
                               return names;
                             })
      .def_property_readonly("nonterminals",
                             [](const Grammar& g) {
                               std::vector<std::string> names;
                               for (SymbolId t : g.nonterminals()) names.push_back(g.name(t));
                               return names;
                             })
      .def_property_readonly("has_epsilon_rules", &Grammar::has_epsilon_rules)
      .def("rule_text", &Grammar::rule_text, py::arg("index"))
      .def("to_text", &Grammar::to_text)
      .def("replicate", [](const Grammar& g, std::uint32_t m) {
        return replicate_nonterminals(g, m);
      }, py::arg("m"), "Replace each non-START nonterminal by m identical copies.")
      .def("wrap_wildcard", [](const Grammar& g) { return wrap_wildcard(g); },
           "Wrap so START matches the original language surrounded by terminals.")
      .def("epsilon_rule_texts", [](const Grammar& g) {
        std::vector<std::string> out;
        for (std::uint32_t i : validate_for_earley(g).epsilon_rules) {
          out.push_back(g.rule_text(i));
        }
        return out;
      }, "Rules the classic Earley engine rejects (empty when it accepts).");

  m.def(
      "recognize",
      [](const Grammar& g, const std::string& sentence, const std::string& engine,
         unsigned workers, const std::string& policy, std::uint64_t seed) {
        CanonicalChart c = run_engine(g, sentence, engine, workers, policy, seed);
        Sentence w = tokenize(sentence, g);
        for (const CanonicalItem& it : c.items) {
          const Rule& r = g.rules()[it.rule];
          if (r.lhs == g.start() && it.dot == r.rhs.size() && it.origin == 0 &&
              it.k == w.size()) {
            return true;
          }
        }
        return false;
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("engine") = "late",
      py::arg("workers") = 2, py::arg("policy") = "fifo", py::arg("seed") = 0);

  m.def(
      "chart_dump",
      [](const Grammar& g, const std::string& sentence, const std::string& engine,
         unsigned workers, const std::string& policy, std::uint64_t seed) {
        return dump(run_engine(g, sentence, engine, workers, policy, seed), g);
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("engine") = "late",
      py::arg("workers") = 2, py::arg("policy") = "fifo", py::arg("seed") = 0,
      "Canonical chart dump; byte-identical across engines for the same input.");

  m.def(
      "chart_items",
      [](const Grammar& g, const std::string& sentence, const std::string& engine,
         unsigned workers, const std::string& policy, std::uint64_t seed) {
        return run_engine(g, sentence, engine, workers, policy, seed).size();
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("engine") = "late",
      py::arg("workers") = 2, py::arg("policy") = "fifo", py::arg("seed") = 0);

  m.def(
      "brute_force_recognize",
      [](const Grammar& g, const std::string& sentence, std::size_t max_len) {
        return brute_force_recognize(g, tokenize(sentence, g), {max_len});
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("max_len") = 10,
      "Derivation-enumeration oracle, independent of the chart engines.");

  m.def("compute_speedup", &compute_speedup, py::arg("t_a"), py::arg("t_b"));
  m.def("compute_efficiency", &compute_efficiency, py::arg("chart_items"),
        py::arg("processors"), py::arg("seconds"));
  m.def("physical_cores", &physical_cores);

  m.def(
      "measure_runtime",
      [](const Grammar& g, const std::string& sentence, const std::string& engine,
         unsigned workers) {
        BenchConfig cfg;
        cfg.workers = workers;
        BenchResult r = measure_runtime(engine_arg(engine), g, tokenize(sentence, g), cfg);
        py::dict d;
        d["engine"] = r.engine;
        d["workers"] = r.workers;
        d["trials"] = r.trials;
        d["total_s"] = r.total_s;
        d["mean_s"] = r.mean_s;
        d["chart_items"] = r.chart_items;
        return d;
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("engine") = "late",
      py::arg("workers") = 1);

  m.def(
      "find_weak_scaling_prefix",
      [](const Grammar& g, const std::string& sentence, std::size_t target) {
        Sentence w = tokenize(sentence, g);
        WeakScalingPrefix p = find_weak_scaling_prefix(g, w, target);
        return py::make_tuple(w.prefix(p.length).to_text(g), p.chart_items);
      },
      py::arg("grammar"), py::arg("sentence"), py::arg("target"),
      "Returns (prefix_text, chart_items) closest to target (ties -> shorter).");
}
