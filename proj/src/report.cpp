#include "mcmpbs/report.hpp"

namespace mcmpbs {

namespace {

SolveStatus status_from(const std::string& s) {
  if (s == "SAT") return SolveStatus::Sat;
  if (s == "UNSAT") return SolveStatus::Unsat;
  if (s == "UNKNOWN") return SolveStatus::Unknown;
  throw McmError("bad status '" + s + "'");
}

TrivialVerdict verdict_from(const std::string& s) {
  if (s == "none") return TrivialVerdict::None;
  if (s == "SAT") return TrivialVerdict::Sat;
  if (s == "UNSAT") return TrivialVerdict::Unsat;
  throw McmError("bad trivial verdict '" + s + "'");
}

}  // namespace

json to_json(const AdderGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"value", n.value},
                     {"lhs", n.lhs},
                     {"rhs", n.rhs},
                     {"l1", n.params.left_shift_1},
                     {"l2", n.params.left_shift_2},
                     {"r", n.params.right_shift},
                     {"subtract", n.params.subtract}});
  }
  return nodes;
}

AdderGraph graph_from_json(const json& j) {
  AdderGraph g;
  for (const auto& n : j) {
    AOperationParams p{n.at("l1").get<int>(), n.at("l2").get<int>(), n.at("r").get<int>(),
                       n.at("subtract").get<bool>()};
    g.add(n.at("value").get<uint64_t>(), n.at("lhs").get<int>(), n.at("rhs").get<int>(), p);
  }
  return g;
}

json to_json(const SolveOutcome& o, bool with_model) {
  json j = {{"status", std::string(to_string(o.status))},
            {"elapsed", o.elapsed},
            {"backend", o.backend},
            {"warnings", o.warnings}};
  if (with_model && o.model) j["model"] = o.model->values();
  return j;
}

SolveOutcome outcome_from_json(const json& j) {
  SolveOutcome o;
  o.status = status_from(j.at("status").get<std::string>());
  o.elapsed = j.at("elapsed").get<double>();
  o.backend = j.at("backend").get<std::string>();
  o.warnings = j.at("warnings").get<std::vector<std::string>>();
  if (j.contains("model")) o.model = Model(j.at("model").get<std::vector<uint8_t>>());
  return o;
}

json to_json(const OptimizationReport& r) {
  json levels = json::array();
  for (const auto& l : r.per_level) levels.push_back({{"ops", l.ops}, {"outcome", to_json(l.outcome)}});
  return {{"optimal_ops", r.optimal_ops},
          {"proven", r.proven},
          {"upper_bound", r.upper_bound},
          {"graph", to_json(r.graph)},
          {"per_level", levels}};
}

OptimizationReport optimization_from_json(const json& j) {
  OptimizationReport r;
  r.optimal_ops = j.at("optimal_ops").get<int>();
  r.proven = j.at("proven").get<bool>();
  r.upper_bound = j.at("upper_bound").get<int>();
  r.graph = graph_from_json(j.at("graph"));
  for (const auto& l : j.at("per_level")) r.per_level.push_back({l.at("ops").get<int>(), outcome_from_json(l.at("outcome"))});
  return r;
}

json to_json(const BenchReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json outcomes = json::array();
    for (const auto& o : rec.outcomes) outcomes.push_back(to_json(o));
    records.push_back({{"id", rec.id},
                       {"variant", rec.variant},
                       {"ops", rec.ops},
                       {"variables", rec.variables},
                       {"constraints", rec.constraints},
                       {"trivial", std::string(to_string(rec.trivial))},
                       {"outcomes", outcomes}});
  }
  json backends = json::array();
  for (const auto& b : r.backends) {
    backends.push_back({{"backend", b.backend}, {"solved", b.solved}, {"average_time", b.average_time}, {"best", b.best}});
  }
  json vbs = json::array();
  for (const auto& v : r.vbs) {
    vbs.push_back({{"id", v.id},
                   {"status", std::string(to_string(v.status))},
                   {"time", v.time ? json(*v.time) : json(nullptr)},
                   {"backend", v.backend}});
  }
  return {{"records", records},
          {"backends", backends},
          {"vbs", vbs},
          {"vbs_solved", r.vbs_solved},
          {"vbs_average_time", r.vbs_average_time}};
}

BenchReport bench_from_json(const json& j) {
  BenchReport r;
  for (const auto& rec : j.at("records")) {
    BenchRecord b;
    b.id = rec.at("id").get<std::string>();
    b.variant = rec.at("variant").get<int>();
    b.ops = rec.at("ops").get<int>();
    b.variables = rec.at("variables").get<uint64_t>();
    b.constraints = rec.at("constraints").get<uint64_t>();
    b.trivial = verdict_from(rec.at("trivial").get<std::string>());
    for (const auto& o : rec.at("outcomes")) b.outcomes.push_back(outcome_from_json(o));
    r.records.push_back(std::move(b));
  }
  for (const auto& b : j.at("backends")) {
    r.backends.push_back({b.at("backend").get<std::string>(), b.at("solved").get<int>(),
                          b.at("average_time").get<double>(), b.at("best").get<int>()});
  }
  for (const auto& v : j.at("vbs")) {
    VbsEntry e;
    e.id = v.at("id").get<std::string>();
    e.status = status_from(v.at("status").get<std::string>());
    if (!v.at("time").is_null()) e.time = v.at("time").get<double>();
    e.backend = v.at("backend").get<std::string>();
    r.vbs.push_back(std::move(e));
  }
  r.vbs_solved = j.at("vbs_solved").get<int>();
  r.vbs_average_time = j.at("vbs_average_time").get<double>();
  return r;
}

json stats_json(const EncodeResult& r) {
  return {{"variant", static_cast<int>(r.config.variant)},
          {"ops", r.config.ops},
          {"width", r.plan.width},
          {"targets", r.instance.targets},
          {"variables", r.formula.var_count()},
          {"constraints", r.formula.constraints().size()},
          {"fixed_ops", r.plan.fixed.cost()},
          {"trivial", std::string(to_string(r.trivial_verdict))}};
}

}  // namespace mcmpbs
