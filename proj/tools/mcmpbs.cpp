#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcmpbs/encoder.hpp"
#include "mcmpbs/harness.hpp"
#include "mcmpbs/optimizer.hpp"
#include "mcmpbs/report.hpp"

using namespace mcmpbs;

namespace {

struct EncodingFlags {
  int encoding = 3;
  int ops = 0;
  bool right_shifts = false;
  bool no_improvements = false;
  std::vector<std::string> improvements;

  void attach(CLI::App* app, bool with_ops) {
    app->add_option("--encoding", encoding, "encoding variant")->check(CLI::Range(1, 3));
    if (with_ops) app->add_option("--ops", ops, "number of A-operations (default: '# ops:' in the instance)");
    app->add_flag("--right-shifts", right_shifts, "allow right-shifted operation results");
    app->add_flag("--no-improvements", no_improvements, "disable every improvement");
    app->add_option("--improvement", improvements, "NAME=on|off (names: " + join_names() + ")");
  }

  static std::string join_names() {
    std::string s;
    for (const auto& n : Improvements::names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }

  EncodingConfig config() const {
    EncodingConfig c;
    c.variant = variant_from_int(encoding);
    c.right_shifts = right_shifts;
    if (no_improvements) c.improvements = Improvements::none();
    for (const std::string& spec : improvements) {
      const size_t eq = spec.find('=');
      const std::string name = spec.substr(0, eq);
      const std::string value = eq == std::string::npos ? "on" : spec.substr(eq + 1);
      if (value != "on" && value != "off") throw McmError("bad --improvement value '" + spec + "'");
      if (!c.improvements.set(name, value == "on")) throw McmError("unknown improvement '" + name + "'");
    }
    return c;
  }
};

std::vector<Backend> parse_backends(const std::vector<std::string>& specs) {
  std::vector<Backend> out;
  for (const auto& s : specs) out.push_back(Backend::parse(s));
  if (out.empty()) out.push_back(Backend{});
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw McmError("cannot write " + path);
  out << text;
}

int resolve_ops(int flag, const InstanceFile& f) {
  if (flag > 0) return flag;
  if (f.ops && *f.ops > 0) return *f.ops;
  throw McmError("number of operations unknown: pass --ops or add '# ops: K' to the instance");
}

int cmd_encode(const std::string& path, const EncodingFlags& flags, const std::string& out_path, bool as_json,
               bool annotate, bool split) {
  InstanceFile f = load_instance(path);
  if (f.instance.empty()) {
    std::cout << "cost 0, nothing to encode\n";
    return 0;
  }
  EncodingConfig cfg = flags.config();
  cfg.ops = resolve_ops(flags.ops, f);
  cfg.annotate = annotate;
  EncodeResult r = encode_mcm(f.instance, cfg);
  json stats = stats_json(r);
  if (r.trivial_verdict != TrivialVerdict::None) {
    if (as_json) {
      std::cout << stats.dump(2) << "\n";
    } else {
      std::cout << "trivially " << to_string(r.trivial_verdict) << " at " << cfg.ops << " ops; no formula written\n";
      if (r.trivial_witness) std::cout << format_graph(*r.trivial_witness);
    }
    return 0;
  }
  OpbOptions opb;
  opb.annotations = annotate;
  opb.split_equalities = split;
  const std::string text = emit_opb(r.formula, opb);
  stats["file_bytes"] = text.size();
  std::ostream& report = out_path.empty() ? std::cerr : std::cout;
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  if (as_json) {
    report << stats.dump(2) << "\n";
  } else {
    char mb[32];
    std::snprintf(mb, sizeof mb, "%.2f", static_cast<double>(text.size()) / 1e6);
    report << "constraints: " << r.formula.constraints().size() << "\nvariables: " << r.formula.var_count()
           << "\nfile size: " << mb << " MB\n";
  }
  return 0;
}

int cmd_optimize(const std::string& path, const EncodingFlags& flags, const std::vector<std::string>& backends,
                 double timeout, int upper_bound, const std::string& out_path) {
  InstanceFile f = load_instance(path);
  OptimizeOptions o;
  o.config = flags.config();
  o.backends = parse_backends(backends);
  o.per_level_timeout = timeout;
  if (upper_bound > 0) o.upper_bound = upper_bound;
  OptimizationReport r = optimal_mcm(f.instance, o);
  const VerifyReport v = verify_solution(f.instance, r.graph);
  if (!v.ok) throw McmError("internal error: reported graph does not verify");
  const std::string text = to_json(r).dump(2) + "\n";
  if (!out_path.empty()) write_text(out_path, text);
  std::cout << text;
  return r.proven ? 0 : 2;
}

int cmd_verify(const std::string& inst_path, const std::string& graph_path) {
  InstanceFile f = load_instance(inst_path);
  AdderGraph g = load_graph(graph_path);
  const VerifyReport v = verify_solution(f.instance, g);
  if (v.ok) {
    std::cout << "PASS (" << g.cost() << " operations)\n";
    return 0;
  }
  std::cout << "FAIL\n";
  for (const auto& d : v.diagnostics) std::cout << "  " << d << "\n";
  return 1;
}

int cmd_bench(const std::string& dir, const EncodingFlags& flags, const std::vector<std::string>& backends,
              double timeout, int jobs, const std::string& out_path, bool as_json) {
  BenchOptions o;
  o.config = flags.config();
  o.backends = parse_backends(backends);
  o.timeout = timeout;
  o.jobs = jobs;
  BenchReport r = run_bench(load_bench_dir(dir), o);
  const std::string j = to_json(r).dump(2) + "\n";
  if (!out_path.empty()) write_text(out_path, j);
  std::cout << (as_json ? j : render_table(r));
  return 0;
}

int cmd_gen_fir(const FirGenSpec& spec, bool companion, const std::string& out_path) {
  InstanceFile f = generate_fir(spec);
  if (!companion) {
    const std::string text = format_instance(f);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      write_text(out_path, text);
    }
    return 0;
  }
  if (out_path.empty()) throw McmError("--companion needs --out PREFIX");
  auto [sat, below] = companion_tests(f);
  const std::string a = out_path + "-ops" + std::to_string(*sat.ops) + ".txt";
  const std::string b = out_path + "-ops" + std::to_string(*below.ops) + ".txt";
  write_text(a, format_instance(sat));
  write_text(b, format_instance(below));
  std::cout << a << "\n" << b << "\n";
  return 0;
}

int cmd_stats(const std::string& path, const EncodingFlags& flags, bool as_json) {
  InstanceFile f = load_instance(path);
  if (f.instance.empty()) {
    std::cout << "cost 0, nothing to encode\n";
    return 0;
  }
  json rows = json::array();
  EncodingConfig base = flags.config();
  base.ops = resolve_ops(flags.ops, f);
  for (int v = 1; v <= 3; ++v) {
    EncodingConfig cfg = base;
    cfg.variant = variant_from_int(v);
    const SizeEstimate s = predict_size(plan_encoding(f.instance, cfg));
    rows.push_back({{"variant", v}, {"variables", s.variables}, {"constraints", s.constraints}});
  }
  json out = {{"targets", f.instance.targets},
              {"width", f.instance.width},
              {"ops", base.ops},
              {"csd_upper_bound", csd_upper_bound(f.instance)},
              {"binary_upper_bound", binary_upper_bound(f.instance)},
              {"trivial", std::string(to_string(preprocess_trivial(f.instance, base).verdict))},
              {"sizes", rows}};
  if (as_json) {
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "targets:";
  for (uint64_t t : f.instance.targets) std::cout << " " << t;
  std::cout << "\nwidth: " << f.instance.width << "\nops: " << base.ops << "\nupper bound (CSD / binary): "
            << out["csd_upper_bound"] << " / " << out["binary_upper_bound"] << "\ntrivial: " << out["trivial"].get<std::string>()
            << "\n";
  for (const auto& r : rows) {
    std::cout << "encoding " << r["variant"] << ": " << r["constraints"] << " constraints, " << r["variables"]
              << " variables\n";
  }
  return 0;
}

int cmd_solve(const std::string& path, const std::string& backend, double timeout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw McmError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  PbFormula f = parse_opb(ss.str());
  SolveOutcome o = solve(f, Backend::parse(backend), timeout);
  std::cout << format_solver_output(o.status, o.model ? &*o.model : nullptr);
  return o.status == SolveStatus::Sat ? 10 : o.status == SolveStatus::Unsat ? 20 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal multiple constant multiplication through pseudo-Boolean satisfiability"};
  app.require_subcommand(1);

  EncodingFlags flags;
  std::string instance, graph, out_path, dir, backend_one = "internal";
  std::vector<std::string> backends;
  double timeout = 300;
  int upper_bound = 0, jobs = 1;
  bool as_json = false, annotate = false, split = false, companion = false;
  FirGenSpec fir;

  auto* enc = app.add_subcommand("encode", "write the OPB decision formula for K operations");
  enc->add_option("instance", instance, "instance file")->required();
  flags.attach(enc, true);
  enc->add_option("--out", out_path, "OPB output path (stdout when absent)");
  enc->add_flag("--json", as_json, "print statistics as JSON");
  enc->add_flag("--annotate", annotate, "add comment lines naming each block");
  enc->add_flag("--split-equalities", split, "write '=' rows as two '>=' rows");

  auto* opt = app.add_subcommand("optimize", "find the minimum number of operations");
  opt->add_option("instance", instance, "instance file")->required();
  flags.attach(opt, false);
  opt->add_option("--backend", backends, "internal, dpll, external or a command template with {opb}");
  opt->add_option("--timeout", timeout, "seconds per level");
  opt->add_option("--upper-bound", upper_bound, "starting bound (default: CSD recoding)");
  opt->add_option("--out", out_path, "also write the JSON report here");
  opt->add_flag("--json", as_json, "JSON output (always on)");

  auto* ver = app.add_subcommand("verify", "check an adder graph against an instance");
  ver->add_option("instance", instance, "instance file")->required();
  ver->add_option("graph", graph, "graph file")->required();

  auto* bench = app.add_subcommand("bench", "run every instance of a directory on the backends");
  bench->add_option("dir", dir, "directory of instance files with '# ops:' lines")->required();
  flags.attach(bench, false);
  bench->add_option("--backend", backends, "backend (repeatable)");
  bench->add_option("--timeout", timeout, "seconds per run");
  bench->add_option("--jobs", jobs, "instances run in parallel");
  bench->add_option("--out", out_path, "JSON report path");
  bench->add_flag("--json", as_json, "print JSON instead of the table");

  auto* gen = app.add_subcommand("gen-fir", "generate a random FIR coefficient instance");
  gen->add_option("--bits", fir.bits, "coefficient width");
  gen->add_option("--taps", fir.taps, "number of coefficients");
  gen->add_option("--seed", fir.seed, "random seed");
  gen->add_flag("--companion", companion, "write the SAT / UNSAT decision pair around the upper bound");
  gen->add_option("--out", out_path, "output path (prefix with --companion)");

  auto* st = app.add_subcommand("stats", "predicted formula sizes per encoding");
  st->add_option("instance", instance, "instance file")->required();
  flags.attach(st, true);
  st->add_flag("--json", as_json, "JSON output");

  auto* sol = app.add_subcommand("solve", "decide an OPB file; prints s/v lines");
  sol->add_option("opb", instance, "OPB file")->required();
  sol->add_option("--backend", backend_one, "internal or dpll");
  sol->add_option("--timeout", timeout, "seconds (0: none)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*enc) return cmd_encode(instance, flags, out_path, as_json, annotate, split);
    if (*opt) return cmd_optimize(instance, flags, backends, timeout, upper_bound, out_path);
    if (*ver) return cmd_verify(instance, graph);
    if (*bench) return cmd_bench(dir, flags, backends, timeout, jobs, out_path, as_json);
    if (*gen) return cmd_gen_fir(fir, companion, out_path);
    if (*st) return cmd_stats(instance, flags, as_json);
    if (*sol) return cmd_solve(instance, backend_one, timeout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
