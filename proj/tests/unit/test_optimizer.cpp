#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>

#include "mcmpbs/optimizer.hpp"
#include "mcmpbs/solver.hpp"
#include "oracles.hpp"

using namespace mcmpbs;

namespace {

McmInstance inst_of(std::vector<int64_t> raw) { return normalize_targets(raw); }

std::string cli_path() {
  const char* p = std::getenv("MCMPBS_CLI");
  return p == nullptr ? std::string() : std::string(p);
}

EncodingConfig bare(int variant, int ops) {
  EncodingConfig c;
  c.variant = variant_from_int(variant);
  c.ops = ops;
  c.improvements = Improvements::none();
  return c;
}

}  // namespace

TEST(Decode, SingleOperation) {
  const auto inst = inst_of({5});
  for (int v = 1; v <= 3; ++v) {
    const auto r = encode_mcm(inst, bare(v, 1));
    ASSERT_EQ(r.trivial_verdict, TrivialVerdict::None);
    const auto s = solve_pb(r.formula);
    ASSERT_EQ(s.status, SolveStatus::Sat);
    const AdderGraph g = decode_solution(r, *s.model);
    ASSERT_EQ(g.cost(), 1);
    EXPECT_EQ(g.nodes[0].value, 5u);
    EXPECT_EQ(g.nodes[0].lhs, 0);
    EXPECT_EQ(g.nodes[0].rhs, 0);
    EXPECT_EQ(apply_a_operation(1, 1, g.nodes[0].params), 5u);
    EXPECT_TRUE(verify_solution(inst, g).ok);
  }
}

TEST(Decode, TamperedModelIsRejected) {
  const auto inst = inst_of({29, 43});
  const auto r = encode_mcm(inst, bare(3, 3));
  const auto s = solve_pb(r.formula);
  ASSERT_EQ(s.status, SolveStatus::Sat);
  Model m = *s.model;
  const VarId bit = r.ops.at(0).value[static_cast<size_t>(inst.width - 1)];
  m.set(bit, !m[bit]);
  try {
    decode_solution(r, m);
    FAIL() << "tampered model decoded";
  } catch (const McmError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("decode failure", 0), 0u) << e.what();
  }
}

TEST(Decode, EveryVariantAndShiftSetting) {
  const auto inst = inst_of({29, 43});
  for (int v = 1; v <= 3; ++v) {
    for (bool rs : {false, true}) {
      EncodingConfig c;
      c.variant = variant_from_int(v);
      c.ops = 3;
      c.right_shifts = rs;
      const auto r = encode_mcm(inst, c);
      const auto s = solve_pb(r.formula);
      ASSERT_EQ(s.status, SolveStatus::Sat) << v << rs;
      const auto g = decode_solution(r, *s.model);
      EXPECT_TRUE(verify_solution(inst, g).ok) << v << rs;
      EXPECT_LE(g.cost(), 3);
    }
  }
}

TEST(Optimize, WorkedPair) {
  OptimizeOptions o;
  o.upper_bound = 6;
  const auto rep = optimal_mcm(inst_of({29, 43}), o);
  EXPECT_EQ(rep.optimal_ops, 3);
  EXPECT_TRUE(rep.proven);
  EXPECT_EQ(rep.upper_bound, 6);
  EXPECT_TRUE(verify_solution(inst_of({29, 43}), rep.graph).ok);
  ASSERT_EQ(rep.per_level.size(), 4u);
  const int levels[] = {5, 4, 3, 2};
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(rep.per_level[i].ops, levels[i]);
    EXPECT_EQ(rep.per_level[i].outcome.status, i < 3 ? SolveStatus::Sat : SolveStatus::Unsat);
  }
}

TEST(Optimize, SingleOperationConstant) {
  for (int64_t c : {3, 7}) {
    const auto rep = optimal_mcm(inst_of({c}));
    EXPECT_EQ(rep.optimal_ops, 1);
    EXPECT_TRUE(rep.proven);
    EXPECT_EQ(rep.graph.cost(), 1);
  }
}

TEST(Optimize, EmptyInstanceCostsNothing) {
  const auto rep = optimal_mcm(inst_of({8, 1}));
  EXPECT_EQ(rep.optimal_ops, 0);
  EXPECT_TRUE(rep.proven);
}

TEST(Optimize, RejectsNonPositiveBound) {
  OptimizeOptions o;
  o.upper_bound = 0;
  EXPECT_THROW(optimal_mcm(inst_of({29}), o), McmError);
}

TEST(Optimize, MatchesSearchOracleOnSmallConstants) {
  for (uint64_t c = 3; c < 64; c += 2) {
    const auto inst = make_instance({c}, bit_length(c) + 1);
    const int expect = *oracle::min_ops({c}, inst.width, 4);
    for (int v = 1; v <= 3; ++v) {
      OptimizeOptions o;
      o.config.variant = variant_from_int(v);
      const auto rep = optimal_mcm(inst, o);
      EXPECT_TRUE(rep.proven);
      EXPECT_EQ(rep.optimal_ops, expect) << c << " v" << v;
      EXPECT_TRUE(verify_solution(inst, rep.graph).ok);
    }
  }
}

TEST(Optimize, LargerSingleton) {
  const auto rep = optimal_mcm(inst_of({33951}));
  EXPECT_EQ(rep.optimal_ops, 4);
  EXPECT_TRUE(rep.proven);
  EXPECT_TRUE(verify_solution(inst_of({33951}), rep.graph).ok);
}

TEST(Optimize, TimeoutStillReturnsValidGraph) {
  OptimizeOptions o;
  o.per_level_timeout = 1e-6;
  const auto rep = optimal_mcm(inst_of({29, 43}), o);
  EXPECT_TRUE(verify_solution(inst_of({29, 43}), rep.graph).ok);
  if (!rep.proven) EXPECT_EQ(rep.per_level.back().outcome.status, SolveStatus::Unknown);
}

TEST(Backends, Parse) {
  EXPECT_EQ(Backend::parse("internal").kind, Backend::Kind::Internal);
  EXPECT_EQ(Backend::parse("cdcl").kind, Backend::Kind::Internal);
  EXPECT_EQ(Backend::parse("dpll").kind, Backend::Kind::Dpll);
  const auto b = Backend::parse("minisat+");
  EXPECT_EQ(b.kind, Backend::Kind::External);
  EXPECT_EQ(b.command, "minisat+ {opb}");
  EXPECT_EQ(Backend::parse("run {opb} --fast").command, "run {opb} --fast");
}

TEST(Backends, ExternalProcess) {
  const std::string cli = cli_path();
  if (cli.empty()) GTEST_SKIP() << "command line tool not available";
  const auto r = encode_mcm(inst_of({29, 43}), bare(3, 3));
  const auto out = solve(r.formula, Backend::parse(cli + " solve {opb}"), 60);
  ASSERT_EQ(out.status, SolveStatus::Sat);
  EXPECT_TRUE(r.formula.satisfied_by(*out.model));
  const auto un = encode_mcm(inst_of({29, 43}), bare(3, 2));
  EXPECT_EQ(solve(un.formula, Backend::parse(cli + " solve {opb}"), 60).status, SolveStatus::Unsat);
}

TEST(Backends, MissingExecutable) {
  const auto r = encode_mcm(inst_of({29, 43}), bare(3, 3));
  EXPECT_THROW(solve(r.formula, Backend::parse("/nonexistent/pb-solver"), 10), McmError);
}

TEST(Backends, ExternalTimeoutKillsProcess) {
  const auto r = encode_mcm(inst_of({29, 43}), bare(3, 3));
  const auto start = std::chrono::steady_clock::now();
  const auto out = solve(r.formula, Backend::parse("sleep 30; echo {opb}"), 0.3);
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(out.status, SolveStatus::Unknown);
  EXPECT_LT(took, 5.0);
}

TEST(Backends, PortfolioReturnsFirstDecisiveAnswer) {
  const auto r = encode_mcm(inst_of({29, 43}), bare(3, 3));
  const std::vector<Backend> backends{Backend::parse("internal"), Backend::parse("sleep 30; echo {opb}")};
  const auto start = std::chrono::steady_clock::now();
  const auto out = solve_portfolio(r.formula, backends, 60);
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(out.status, SolveStatus::Sat);
  EXPECT_EQ(out.backend, "internal");
  EXPECT_LT(took, 10.0);
}
