#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <random>

#include "mcmpbs/solver.hpp"
#include "oracles.hpp"

using namespace mcmpbs;

namespace {

// n + 1 pigeons into n holes as cardinality rows.
PbFormula pigeonhole(int holes) {
  PbFormula f;
  std::vector<std::vector<VarId>> x(static_cast<size_t>(holes + 1));
  for (auto& row : x)
    for (int h = 0; h < holes; ++h) row.push_back(f.new_var());
  for (const auto& row : x) {
    PbConstraint c;
    for (VarId v : row) c.terms.push_back({1, v});
    c.bound = 1;
    f.add_constraint(c);
  }
  for (int h = 0; h < holes; ++h) {
    PbConstraint c;
    for (const auto& row : x) c.terms.push_back({-1, row[static_cast<size_t>(h)]});
    c.bound = -1;
    f.add_constraint(c);
  }
  return f;
}

}  // namespace

TEST(Solver, AgreesWithEnumeration) {
  std::mt19937_64 rng(99);
  int sat = 0, unsat = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const uint32_t vars = 3 + static_cast<uint32_t>(rng() % 14);
    const int rows = 2 + static_cast<int>(rng() % (3 * vars));
    const PbFormula f = oracle::random_formula(rng, vars, rows);
    const bool expect = oracle::enumerate_sat(f).has_value();
    (expect ? sat : unsat)++;
    for (auto mode : {SolverMode::Cdcl, SolverMode::Dpll}) {
      SolverOptions o;
      o.mode = mode;
      const auto r = solve_pb(f, o);
      ASSERT_NE(r.status, SolveStatus::Unknown);
      EXPECT_EQ(r.status == SolveStatus::Sat, expect) << "trial " << trial;
      if (r.model) EXPECT_TRUE(f.satisfied_by(*r.model)) << "trial " << trial;
    }
  }
  // Both outcomes must be well represented for the comparison to mean much.
  EXPECT_GT(sat, 50);
  EXPECT_GT(unsat, 50);
}

TEST(Solver, EmptyFormulaAndEmptyConstraint) {
  PbFormula f;
  f.new_var();
  EXPECT_EQ(solve_pb(f).status, SolveStatus::Sat);
  f.add_constraint({{}, Relation::GreaterEq, 1});
  EXPECT_EQ(solve_pb(f).status, SolveStatus::Unsat);
}

TEST(Solver, SmallPigeonholeIsUnsat) {
  for (auto mode : {SolverMode::Cdcl, SolverMode::Dpll}) {
    SolverOptions o;
    o.mode = mode;
    EXPECT_EQ(solve_pb(pigeonhole(5), o).status, SolveStatus::Unsat);
  }
}

TEST(Solver, TimeoutGivesUnknown) {
  SolverOptions o;
  o.timeout_s = 0.2;
  const auto start = std::chrono::steady_clock::now();
  const auto r = solve_pb(pigeonhole(12), o);
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.status, SolveStatus::Unknown);
  EXPECT_LT(took, 5.0);
}

TEST(Solver, StopFlagGivesUnknown) {
  std::atomic<bool> stop{true};
  SolverOptions o;
  o.stop = &stop;
  EXPECT_EQ(solve_pb(pigeonhole(12), o).status, SolveStatus::Unknown);
}
