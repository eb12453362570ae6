#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mcmpbs/harness.hpp"
#include "mcmpbs/report.hpp"

using namespace mcmpbs;

namespace {

SolveOutcome outcome(SolveStatus s, double t, std::string backend) {
  SolveOutcome o;
  o.status = s;
  o.elapsed = t;
  o.backend = std::move(backend);
  return o;
}

std::string run(const std::string& cmd, int* code) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  *code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

}  // namespace

TEST(InstanceFiles, ParseSeparatorsAndMetadata) {
  const auto f = parse_instance("# ops: 17\n# source: table\n1701; 709, 1015\n  17 # trailing\n");
  EXPECT_EQ(f.raw, (std::vector<int64_t>{1701, 709, 1015, 17}));
  ASSERT_TRUE(f.ops.has_value());
  EXPECT_EQ(*f.ops, 17);
  EXPECT_EQ(f.metadata.at("source"), "table");
  EXPECT_EQ(f.instance.targets.size(), 4u);
}

TEST(InstanceFiles, RoundTrip) {
  const auto f = parse_instance("# ops: 3\n# seed: 9\n29 43 58\n");
  const auto g = parse_instance(format_instance(f));
  EXPECT_EQ(g.raw, f.raw);
  EXPECT_EQ(g.ops, f.ops);
  EXPECT_EQ(g.metadata, f.metadata);
}

TEST(InstanceFiles, Errors) {
  EXPECT_THROW(parse_instance("12 abc\n"), McmError);
  EXPECT_THROW(parse_instance("# only a comment\n"), McmError);
  EXPECT_THROW(parse_instance("# ops: -2\n5\n"), McmError);
}

TEST(InstanceFiles, FourteenConstantSetAcceptedVerbatim) {
  const auto f = parse_instance("# ops: 17\n1701; 709; 1015; 1269; 1203; 683; 201; 565; 1653; 681; 17; 261; 4621; 3435\n");
  EXPECT_EQ(f.instance.targets.size(), 14u);
  EXPECT_EQ(*f.ops, 17);
}

TEST(GraphFiles, ParseWorkedSolution) {
  const auto g = parse_graph("7 = 1 <<3 - 1 <<0\n29 = 7 <<2 + 1 <<0\n43 = 7 <<1 + 29 <<0\n");
  ASSERT_EQ(g.cost(), 3);
  EXPECT_EQ(g.nodes[2].lhs, 1);
  EXPECT_EQ(g.nodes[2].rhs, 2);
  EXPECT_TRUE(verify_solution(normalize_targets(std::vector<int64_t>{29, 43}), g).ok);
  EXPECT_EQ(parse_graph(format_graph(g)), g);
}

TEST(GraphFiles, RightShiftAndErrors) {
  EXPECT_THROW(parse_graph("# comment\n3 = 5 + 1 >>1\n"), McmError);
  EXPECT_THROW(parse_graph("5 = 1 <<2 * 1\n"), McmError);
  EXPECT_THROW(parse_graph("5 = 3 <<1 - 1\n"), McmError);
  const auto h = parse_graph("5 = 1 <<2 + 1\n3 = 5 + 1 >>1\n");
  EXPECT_EQ(h.nodes[1].params.right_shift, 1);
  EXPECT_EQ(apply_a_operation(5, 1, h.nodes[1].params), 3u);
}

TEST(FirGen, DeterministicAndInRange) {
  const auto a = generate_fir({10, 14, 1});
  const auto b = generate_fir({10, 14, 1});
  EXPECT_EQ(format_instance(a), format_instance(b));
  EXPECT_EQ(a.raw.size(), 14u);
  for (int64_t v : a.raw) {
    EXPECT_GE(v, 1);
    EXPECT_LE(v, 1023);
  }
  EXPECT_NE(format_instance(generate_fir({10, 14, 2})), format_instance(a));
  for (uint64_t seed = 0; seed < 20; ++seed) {
    for (uint64_t t : generate_fir({4, 3, seed}).instance.targets) EXPECT_LT(t, 16u);
  }
  EXPECT_THROW(generate_fir({10, 0, 1}), McmError);
}

TEST(FirGen, CompanionTests) {
  const auto base = generate_fir({10, 6, 3});
  const auto [sat, below] = companion_tests(base);
  const int ub = csd_upper_bound(base.instance);
  EXPECT_EQ(*sat.ops, ub);
  EXPECT_EQ(*below.ops, ub - 1);
  EXPECT_EQ(sat.metadata.at("expect"), "SAT");
}

TEST(Bench, AggregatesRecomputeFromRecords) {
  BenchReport r;
  BenchRecord a{"a", 3, 3, 10, 20, TrivialVerdict::None,
                {outcome(SolveStatus::Sat, 2.0, "x"), outcome(SolveStatus::Sat, 1.0, "y")}};
  BenchRecord b{"b", 3, 3, 10, 20, TrivialVerdict::None,
                {outcome(SolveStatus::Unsat, 0.5, "x"), outcome(SolveStatus::Unknown, 9.0, "y")}};
  BenchRecord c{"c", 3, 3, 10, 20, TrivialVerdict::None,
                {outcome(SolveStatus::Unknown, 9.0, "x"), outcome(SolveStatus::Unknown, 9.0, "y")}};
  BenchRecord d{"d", 3, 2, 0, 0, TrivialVerdict::Sat, {}};
  r.records = {a, b, c, d};
  aggregate(r, {"x", "y"});
  ASSERT_EQ(r.backends.size(), 2u);
  EXPECT_EQ(r.backends[0].solved, 2);
  EXPECT_DOUBLE_EQ(r.backends[0].average_time, 1.25);
  EXPECT_EQ(r.backends[0].best, 1);
  EXPECT_EQ(r.backends[1].solved, 1);
  EXPECT_EQ(r.backends[1].best, 1);
  ASSERT_EQ(r.vbs.size(), 3u);
  EXPECT_DOUBLE_EQ(*r.vbs[0].time, 1.0);
  EXPECT_EQ(r.vbs[0].backend, "y");
  EXPECT_DOUBLE_EQ(*r.vbs[1].time, 0.5);
  EXPECT_EQ(r.vbs[2].status, SolveStatus::Unknown);
  EXPECT_FALSE(r.vbs[2].time.has_value());
  EXPECT_EQ(r.vbs_solved, 2);
  EXPECT_DOUBLE_EQ(r.vbs_average_time, 0.75);
  EXPECT_NE(render_table(r).find("trivial SAT (not run)"), std::string::npos);
}

TEST(Bench, TwoInstancesTwoBackendsAndTrivialSkip) {
  // Small enough for the learning-free backend.
  std::vector<BenchInstance> inst{{"single", parse_instance("# ops: 2\n45\n")},
                                  {"under", parse_instance("# ops: 2\n5 43\n")},
                                  {"easy", parse_instance("# ops: 2\n3 5\n")}};
  BenchOptions o;
  o.backends = {Backend::parse("internal"), Backend::parse("dpll")};
  o.timeout = 60;
  o.jobs = 2;
  const auto r = run_bench(inst, o);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].outcomes.size(), 2u);
  EXPECT_EQ(r.records[1].outcomes.size(), 2u);
  EXPECT_EQ(r.records[2].trivial, TrivialVerdict::Sat);
  EXPECT_TRUE(r.records[2].outcomes.empty());
  EXPECT_EQ(r.records[0].outcomes[0].status, SolveStatus::Sat);
  EXPECT_EQ(r.records[1].outcomes[1].status, SolveStatus::Unsat);
  EXPECT_EQ(r.vbs.size(), 2u);
  // The stored aggregate equals a recomputation.
  BenchReport again = r;
  aggregate(again, {"internal", "dpll"});
  EXPECT_EQ(to_json(again), to_json(r));
}

TEST(Bench, AllTimeoutsGiveUnknownVbs) {
  std::vector<BenchInstance> inst{{"pair", parse_instance("# ops: 3\n29 43\n")}};
  BenchOptions o;
  o.backends = {Backend::parse("sleep 30; echo {opb}")};
  o.timeout = 0.2;
  const auto r = run_bench(inst, o);
  ASSERT_EQ(r.vbs.size(), 1u);
  EXPECT_EQ(r.vbs[0].status, SolveStatus::Unknown);
  EXPECT_EQ(r.vbs_solved, 0);
}

TEST(Bench, LoadDirectoryRequiresOps) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("mcmpbs-bench-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "b.txt") << "# ops: 3\n29 43\n";
  std::ofstream(dir / "a.txt") << "# ops: 2\n3 5\n";
  const auto list = load_bench_dir(dir.string());
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].id, "a");
  std::ofstream(dir / "c.txt") << "29 43\n";
  EXPECT_THROW(load_bench_dir(dir.string()), McmError);
  fs::remove_all(dir);
}

TEST(Json, ReportsRoundTrip) {
  OptimizationReport rep;
  rep.optimal_ops = 3;
  rep.proven = true;
  rep.upper_bound = 6;
  rep.graph = parse_graph("7 = 1 <<3 - 1 <<0\n29 = 7 <<2 + 1 <<0\n43 = 7 <<1 + 29 <<0\n");
  rep.per_level.push_back({5, outcome(SolveStatus::Sat, 0.1, "internal")});
  rep.per_level.push_back({2, outcome(SolveStatus::Unsat, 0.2, "internal")});
  const json j = to_json(rep);
  EXPECT_EQ(to_json(optimization_from_json(j)), j);
  EXPECT_EQ(optimization_from_json(json::parse(j.dump())).graph, rep.graph);

  BenchReport b;
  b.records.push_back({"a", 3, 3, 10, 20, TrivialVerdict::None, {outcome(SolveStatus::Unknown, 1, "x")}});
  aggregate(b, {"x"});
  const json jb = to_json(b);
  EXPECT_TRUE(jb.at("vbs")[0].at("time").is_null());
  EXPECT_EQ(to_json(bench_from_json(json::parse(jb.dump()))), jb);
}

TEST(Cli, EncodeAndVerify) {
  const char* cli = std::getenv("MCMPBS_CLI");
  if (cli == nullptr) GTEST_SKIP() << "command line tool not available";
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("mcmpbs-cli-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ofstream(dir / "pair.txt") << "29 43\n";
  std::ofstream(dir / "empty.txt") << "8 1\n";
  std::ofstream(dir / "good.graph") << "7 = 1 <<3 - 1 <<0\n29 = 7 <<2 + 1 <<0\n43 = 7 <<1 + 29 <<0\n";
  std::ofstream(dir / "bad.graph") << "7 = 1 <<3 - 1 <<0\n29 = 7 <<2 + 1 <<1\n43 = 7 <<1 + 29 <<0\n";
  int code = 0;
  std::string out = run(std::string(cli) + " encode " + (dir / "pair.txt").string() + " --ops 3 --out " +
                            (dir / "pair.opb").string() + " 2>&1",
                        &code);
  EXPECT_EQ(code, 0) << out;
  EXPECT_NE(out.find("constraints"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "pair.opb"));
  out = run(std::string(cli) + " encode " + (dir / "empty.txt").string() + " --ops 1 2>&1", &code);
  EXPECT_NE(out.find("cost 0, nothing to encode"), std::string::npos) << out;
  out = run(std::string(cli) + " verify " + (dir / "pair.txt").string() + " " + (dir / "good.graph").string(), &code);
  EXPECT_EQ(code, 0);
  EXPECT_NE(out.find("PASS"), std::string::npos);
  out = run(std::string(cli) + " verify " + (dir / "pair.txt").string() + " " + (dir / "bad.graph").string(), &code);
  EXPECT_NE(code, 0);
  EXPECT_NE(out.find("FAIL"), std::string::npos);
  EXPECT_NE(out.find("node 2"), std::string::npos) << out;
  out = run(std::string(cli) + " optimize " + (dir / "pair.txt").string(), &code);
  EXPECT_EQ(code, 0);
  const json j = json::parse(out);
  EXPECT_EQ(j.at("optimal_ops"), 3);
  EXPECT_EQ(j.at("proven"), true);
  fs::remove_all(dir);
}
