// Python bindings for the concept-synthesis engine core.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "folsynth/completion.hpp"
#include "folsynth/evaluate.hpp"
#include "folsynth/generate.hpp"
#include "folsynth/harness.hpp"
#include "folsynth/pool.hpp"
#include "folsynth/semantics.hpp"

namespace py = pybind11;
using namespace folsynth;

namespace {

std::vector<int> extension_list(const Formula& f, const World& w) {
  return extension_elements(extension(f, w));
}

py::object ec_valid_tuple(const Formula& f, const PartialWorld& pw) {
  EcVerdict v = ec_valid_world(f, pw);
  if (!v.valid) return py::make_tuple(false, py::none());
  py::list witness;
  for (auto b : *v.witness) witness.append(static_cast<bool>(b));
  return py::make_tuple(true, witness);
}

} // namespace

PYBIND11_MODULE(_folsynth, m) {
  m.doc() = "finite-structure first-order concept-synthesis engine";

  py::register_exception<ParseError>(m, "FormulaParseError");
  py::register_exception<FormatError>(m, "FormatError");
  py::register_exception<GenerationExhausted>(m, "GenerationExhausted");
  py::register_exception<SamplingExhausted>(m, "SamplingExhausted");
  py::register_exception<ResourceLimitError>(m, "ResourceLimitError");
  py::register_exception<InsufficientPool>(m, "InsufficientPool");
  py::register_exception<InsufficientData>(m, "InsufficientData");

  py::class_<FormulaNode, std::shared_ptr<FormulaNode>>(m, "Formula")
      .def("__str__", [](const Formula& f) { return print(f); })
      .def("__repr__", [](const Formula& f) { return "Formula(" + print(f) + ")"; })
      .def("__eq__", [](const Formula& a, const Formula& b) {
        return b && structurally_equal(a, b);
      })
      .def("__hash__", [](const Formula& f) {
        return py::hash(py::str(print(f)));
      });

  m.def("parse", &parse, py::arg("text"));
  m.def("print_formula", &print, py::arg("formula"));
  m.def("ast_size", &ast_size);
  m.def("quantifier_depth", &quantifier_depth);
  m.def("classify_family",
        [](const Formula& f) { return family_name(classify_family(f)); });
  m.def("is_lift_hard", &is_lift_hard);
  m.def("uses_equality", &uses_equality);
  m.def("proper_subformulas", &proper_subformulas);
  m.def("subfamily_key", &subfamily_key);

  py::class_<SamplingParams>(m, "SamplingParams")
      .def(py::init<>())
      .def_readwrite("p_unary", &SamplingParams::p_unary)
      .def_readwrite("balance_lo", &SamplingParams::balance_lo)
      .def_readwrite("balance_hi", &SamplingParams::balance_hi)
      .def_readwrite("out_degree", &SamplingParams::out_degree)
      .def_readwrite("domain_lo", &SamplingParams::domain_lo)
      .def_readwrite("domain_hi", &SamplingParams::domain_hi);

  py::class_<World>(m, "World")
      .def_readonly("n", &World::n)
      .def("unary", &World::unary)
      .def("binary", &World::binary)
      .def("target", [](const World& w) {
        std::vector<int> out;
        for (int i = 0; i < w.n; ++i) {
          if (w.target[i]) out.push_back(i);
        }
        return out;
      });

  py::class_<PartialWorld>(m, "PartialWorld")
      .def_readonly("n", &PartialWorld::n)
      .def("unknown_atoms", [](const PartialWorld& pw) {
        py::list out;
        for (const GroundAtom& a : pw.unknown_atoms()) {
          if (a.b < 0) {
            out.append(py::make_tuple(std::string(1, a.pred), a.a));
          } else {
            out.append(py::make_tuple(std::string(1, a.pred), a.a, a.b));
          }
        }
        return out;
      })
      .def("fully_known", &PartialWorld::fully_known)
      .def("complete_all", &PartialWorld::complete_all);

  m.def("sample_world", &sample_world, py::arg("params"), py::arg("gold"),
        py::arg("seed"));
  m.def("mask_unknowns", &mask_unknowns, py::arg("world"), py::arg("rate"),
        py::arg("eligible_r"), py::arg("eligible_s"), py::arg("seed"));

  m.def("evaluate", &evaluate, py::arg("formula"), py::arg("world"), py::arg("element"));
  m.def("extension", &extension_list);
  m.def("matches", &matches);
  m.def("solves_fullobs", [](const Formula& f, const std::vector<World>& ws) {
    return solves_fullobs(f, ws);
  });
  m.def("solves_ci",
        [](const Formula& f, const std::vector<World>& yes, const std::vector<World>& no) {
          return solves_ci(f, yes, no);
        });
  m.def("error_profile", [](const Formula& f, const World& w) {
    ErrorProfile ep = error_profile(f, w);
    py::dict d;
    d["false_positives"] = ep.false_positives;
    d["false_negatives"] = ep.false_negatives;
    d["fp_rate"] = ep.fp_rate;
    d["fn_rate"] = ep.fn_rate;
    return d;
  });

  m.def("ec_valid_world", &ec_valid_tuple, py::arg("formula"), py::arg("world"));
  m.def("ec_valid_instance",
        [](const Formula& f, const std::vector<PartialWorld>& ws) {
          return ec_valid_instance(f, ws);
        });
  m.def("min_mismatch",
        [](const Formula& f, const PartialWorld& pw) { return min_mismatch(f, pw); });
  m.def("grounded_dimacs", [](const Formula& f, const PartialWorld& pw) {
    std::ostringstream os;
    write_dimacs(os, f, pw);
    return os.str();
  });

  py::class_<Template>(m, "Template")
      .def_readonly("formula", &Template::formula)
      .def_readonly("text", &Template::text)
      .def_readonly("qd", &Template::qd)
      .def_readonly("ast", &Template::ast)
      .def_readonly("lift_hard", &Template::lift_hard)
      .def_readonly("subfamily", &Template::subfamily)
      .def_property_readonly(
          "family", [](const Template& t) { return family_name(t.family); })
      .def("__repr__", [](const Template& t) { return "Template(" + t.text + ")"; });

  m.def("make_template", &make_template);
  m.def("builtin_templates", [] { return builtin_templates(); });
  m.def("shortcut_templates", [] { return shortcut_templates(); });
  m.def("mutate", &mutate, py::arg("gold"), py::arg("seed"), py::arg("cap") = 128);

  py::class_<FrozenPool>(m, "FrozenPool")
      .def_property_readonly("tier1", [](const FrozenPool& p) { return p.tier1; })
      .def_property_readonly("tier2", [](const FrozenPool& p) { return p.tier2; })
      .def_property_readonly("tier3", [](const FrozenPool& p) { return p.tier3; })
      .def("__len__", [](const FrozenPool& p) { return p.size(); })
      .def("manifest", [](const FrozenPool& p) {
        std::ostringstream os;
        write_pool_manifest(os, p);
        return os.str();
      });

  m.def(
      "build_frozen_pool",
      [](const std::vector<Template>& golds, std::uint64_t seed) {
        return build_frozen_pool(golds, seed);
      },
      py::arg("golds"), py::arg("seed"));

  py::class_<InstanceWorld>(m, "InstanceWorld")
      .def_property_readonly("role",
                             [](const InstanceWorld& iw) { return role_name(iw.role); })
      .def_readonly("world", &InstanceWorld::world)
      .def("full", &InstanceWorld::full);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_property_readonly("task",
                             [](const ProblemInstance& i) { return task_name(i.task); })
      .def_readonly("band", &ProblemInstance::band)
      .def_readonly("id", &ProblemInstance::id)
      .def_readonly("seed", &ProblemInstance::seed)
      .def_readonly("gold", &ProblemInstance::gold)
      .def_readonly("worlds", &ProblemInstance::worlds)
      .def("survivors", [](const ProblemInstance& i) {
        return i.diagnostics.survivors_after_yes;
      })
      .def("to_json", &serialize_instance)
      .def("__repr__",
           [](const ProblemInstance& i) { return "ProblemInstance(" + i.id + ")"; });

  m.def("instance_from_json",
        [](const std::string& text) { return deserialize_instance(text); });

  m.def("bands", [] {
    py::list out;
    for (const BandConfig& b : builtin_bands()) {
      py::dict d;
      d["task"] = task_name(b.task);
      d["band"] = b.name;
      d["domain"] = py::make_tuple(b.domain_lo, b.domain_hi);
      d["k"] = b.k;
      d["gold_qd"] = b.gold_qd;
      d["lift_fraction"] = b.lift_fraction;
      out.append(d);
    }
    return out;
  });

  m.def(
      "generate_corpus",
      [](const std::string& task, const std::string& band, int count, std::uint64_t seed) {
        GenerationResult res =
            generate_corpus(find_band(task_from_name(task), band), count, seed);
        return py::make_tuple(res.instances, res.failure_counts);
      },
      py::arg("task"), py::arg("band"), py::arg("count"), py::arg("seed"));

  m.def(
      "gen_holdout",
      [](const ProblemInstance& inst, std::uint64_t seed) {
        HoldoutSet h = gen_holdout(inst, seed);
        return h.worlds;
      },
      py::arg("instance"), py::arg("seed"));

  m.def("render_prompt", &render_prompt);

  py::class_<Prediction>(m, "Prediction")
      .def_readonly("instance_id", &Prediction::instance_id)
      .def_readonly("model", &Prediction::model)
      .def_readonly("raw_text", &Prediction::raw_text)
      .def_property_readonly(
          "status", [](const Prediction& p) { return pred_status_name(p.status); })
      .def_property_readonly("formula", [](const Prediction& p) -> py::object {
        if (p.status != PredStatus::Ok) return py::none();
        return py::cast(p.formula);
      })
      .def_readonly("description", &Prediction::description);

  m.def("extract_formula", [](const std::string& raw) { return extract_formula(raw); });

  m.def(
      "baseline_solve",
      [](const ProblemInstance& inst, const FrozenPool& pool) {
        return baseline_solve(inst, baseline_candidates(pool));
      },
      py::arg("instance"), py::arg("pool"));

  m.def(
      "evaluate_prediction",
      [](const ProblemInstance& inst, const Prediction& p) {
        return serialize_record(evaluate_prediction(inst, p));
      },
      py::arg("instance"), py::arg("prediction"),
      "Returns the eval record as a JSON document string.");

  m.def(
      "holdout_rate",
      [](const ProblemInstance& inst, const Formula& f,
         const std::vector<InstanceWorld>& holdout) {
        HoldoutOutcome out = holdout_generalization(inst, f, holdout);
        py::dict d;
        d["rate"] = out.rate;
        d["yes_rate"] = out.yes_rate;
        d["no_rate"] = out.no_rate;
        return d;
      },
      py::arg("instance"), py::arg("formula"), py::arg("holdout_worlds"));
}
