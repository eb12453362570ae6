#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcmpbs/harness.hpp"
#include "mcmpbs/report.hpp"
#include "mcmpbs/solver.hpp"

namespace py = pybind11;
using namespace mcmpbs;

namespace {

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

EncodingConfig make_config(int variant, int ops, bool right_shifts, const std::map<std::string, bool>& improvements) {
  EncodingConfig c;
  c.variant = variant_from_int(variant);
  c.ops = ops;
  c.right_shifts = right_shifts;
  for (const auto& [name, on] : improvements) {
    if (!c.improvements.set(name, on)) throw std::invalid_argument("unknown improvement '" + name + "'");
  }
  return c;
}

McmInstance instance(const std::vector<int64_t>& raw) { return normalize_targets(raw); }

}  // namespace

PYBIND11_MODULE(mcmpbs, m) {
  m.doc() = "Exact multiple constant multiplication through pseudo-Boolean satisfiability";

  py::register_exception<McmError>(m, "McmError", PyExc_RuntimeError);

  py::class_<McmInstance>(m, "Instance")
      .def_readonly("targets", &McmInstance::targets)
      .def_readonly("width", &McmInstance::width)
      .def("__repr__", [](const McmInstance& i) {
        std::string s = "Instance(targets=[";
        for (size_t k = 0; k < i.targets.size(); ++k) s += (k ? ", " : "") + std::to_string(i.targets[k]);
        return s + "], width=" + std::to_string(i.width) + ")";
      });

  m.def("normalize", &instance, py::arg("targets"));
  m.def(
      "csd_upper_bound", [](const std::vector<int64_t>& t) { return recoding_upper_bound(instance(t), Recoding::Csd); }, py::arg("targets"));
  m.def(
      "binary_upper_bound", [](const std::vector<int64_t>& t) { return recoding_upper_bound(instance(t), Recoding::Binary); },
      py::arg("targets"));
  m.def(
      "apply_a_operation",
      [](uint64_t u, uint64_t v, int l1, int l2, int r, bool subtract) {
        return apply_a_operation(u, v, {l1, l2, r, subtract});
      },
      py::arg("u"), py::arg("v"), py::arg("l1") = 0, py::arg("l2") = 0, py::arg("r") = 0, py::arg("subtract") = false);

  m.def(
      "verify",
      [](const std::vector<int64_t>& t, const std::string& graph_text) {
        const VerifyReport r = verify_solution(instance(t), parse_graph(graph_text));
        return py::make_tuple(r.ok, r.diagnostics);
      },
      py::arg("targets"), py::arg("graph"), "Checks a graph given in the text format; returns (ok, diagnostics).");

  m.def(
      "encode",
      [](const std::vector<int64_t>& t, int ops, int variant, bool right_shifts,
         const std::map<std::string, bool>& improvements, bool annotate) {
        const EncodeResult r = encode_mcm(instance(t), make_config(variant, ops, right_shifts, improvements));
        OpbOptions o;
        o.annotations = annotate;
        py::dict d;
        d["variables"] = r.formula.var_count();
        d["constraints"] = r.formula.constraints().size();
        d["trivial"] = std::string(to_string(r.trivial_verdict));
        d["opb"] = r.trivial_verdict == TrivialVerdict::None ? emit_opb(r.formula, o) : std::string();
        if (r.trivial_witness) d["witness"] = format_graph(*r.trivial_witness);
        return d;
      },
      py::arg("targets"), py::arg("ops"), py::arg("variant") = 3, py::arg("right_shifts") = false,
      py::arg("improvements") = std::map<std::string, bool>{}, py::arg("annotate") = false);

  m.def(
      "predict_size",
      [](int ops, int width, int variant) {
        const SizeEstimate s = predict_size(ops, width, variant_from_int(variant));
        return py::make_tuple(s.variables, s.constraints);
      },
      py::arg("ops"), py::arg("width"), py::arg("variant") = 3, "Returns (variables, constraints).");

  m.def(
      "optimize",
      [](const std::vector<int64_t>& t, int variant, const std::vector<std::string>& backends, double timeout,
         std::optional<int> upper_bound, bool right_shifts) {
        OptimizeOptions o;
        o.config = make_config(variant, 1, right_shifts, {});
        o.backends.clear();
        for (const auto& b : backends) o.backends.push_back(Backend::parse(b));
        o.per_level_timeout = timeout;
        o.upper_bound = upper_bound;
        OptimizationReport r;
        {
          py::gil_scoped_release release;
          r = optimal_mcm(instance(t), o);
        }
        py::object d = to_python(to_json(r));
        d["graph_text"] = format_graph(r.graph);
        return d;
      },
      py::arg("targets"), py::arg("variant") = 3, py::arg("backends") = std::vector<std::string>{"internal"},
      py::arg("timeout") = 300.0, py::arg("upper_bound") = std::nullopt, py::arg("right_shifts") = false);

  m.def(
      "bench",
      [](const std::vector<std::pair<std::string, std::string>>& instances, const std::vector<std::string>& backends,
         double timeout, int variant, int jobs) {
        std::vector<BenchInstance> list;
        for (const auto& [id, text] : instances) list.push_back({id, parse_instance(text)});
        BenchOptions o;
        o.config.variant = variant_from_int(variant);
        o.backends.clear();
        for (const auto& b : backends) o.backends.push_back(Backend::parse(b));
        o.timeout = timeout;
        o.jobs = jobs;
        BenchReport r;
        {
          py::gil_scoped_release release;
          r = run_bench(list, o);
        }
        return to_python(to_json(r));
      },
      py::arg("instances"), py::arg("backends") = std::vector<std::string>{"internal"}, py::arg("timeout") = 300.0,
      py::arg("variant") = 3, py::arg("jobs") = 1,
      "Runs (id, instance text) pairs; every text needs a '# ops:' line.");

  m.def(
      "solve_opb",
      [](const std::string& text, const std::string& backend, double timeout) {
        const PbFormula f = parse_opb(text);
        SolveOutcome o;
        {
          py::gil_scoped_release release;
          o = solve(f, Backend::parse(backend), timeout);
        }
        py::dict d;
        d["status"] = std::string(to_string(o.status));
        if (o.model) d["model"] = o.model->values();
        return d;
      },
      py::arg("opb"), py::arg("backend") = "internal", py::arg("timeout") = 0.0);

  m.def(
      "gen_fir",
      [](int bits, int taps, uint64_t seed) { return format_instance(generate_fir({bits, taps, seed})); },
      py::arg("bits") = 10, py::arg("taps") = 14, py::arg("seed") = 1, "Instance text with generator metadata.");
}
