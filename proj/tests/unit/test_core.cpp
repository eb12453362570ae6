#include <gtest/gtest.h>

#include <random>

#include "mcmpbs/core.hpp"
#include "oracles.hpp"

using namespace mcmpbs;

namespace {

McmInstance inst_of(std::vector<int64_t> raw) { return normalize_targets(raw); }

AOperationParams op(int l1, int l2, bool sub, int r = 0) { return {l1, l2, r, sub}; }

}  // namespace

TEST(Normalize, WorkedPair) {
  const auto i = inst_of({29, 43});
  EXPECT_EQ(i.targets, (std::vector<uint64_t>{29, 43}));
  EXPECT_EQ(i.width, 7);
}

TEST(Normalize, SignEvenDuplicate) {
  const auto i = inst_of({58, -29, 29});
  EXPECT_EQ(i.targets, (std::vector<uint64_t>{29}));
  EXPECT_EQ(i.width, 6);
}

TEST(Normalize, PowersOfTwoAreFree) {
  const auto i = inst_of({8, 1});
  EXPECT_TRUE(i.empty());
}

TEST(Normalize, EmptyInputRejected) {
  std::vector<int64_t> none;
  EXPECT_THROW(normalize_targets(none), McmError);
}

TEST(Normalize, InvariantsHoldOnRandomInput) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int64_t> d(-5000, 5000);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int64_t> raw(6);
    for (auto& v : raw) v = d(rng);
    const auto i = normalize_targets(raw);
    for (size_t k = 0; k < i.targets.size(); ++k) {
      EXPECT_GE(i.targets[k], 3u);
      EXPECT_EQ(i.targets[k] % 2, 1u);
      if (k > 0) EXPECT_LT(i.targets[k - 1], i.targets[k]);
    }
    if (!i.empty()) {
      EXPECT_EQ(i.width, bit_length(i.max_target()) + 1);
      EXPECT_LT(i.max_target(), uint64_t{1} << (i.width - 1));
    }
  }
}

TEST(AOperation, Examples) {
  EXPECT_EQ(apply_a_operation(1, 1, op(3, 0, true)), 7u);
  EXPECT_EQ(apply_a_operation(7, 1, op(2, 0, false)), 29u);
  EXPECT_EQ(apply_a_operation(5, 3, op(0, 0, false, 3)), 1u);
  EXPECT_EQ(apply_a_operation(5, 1, op(0, 0, false, 1)), 3u);
}

TEST(AOperation, Errors) {
  try {
    apply_a_operation(5, 2, op(0, 0, false, 2));
    FAIL();
  } catch (const McmError& e) {
    EXPECT_STREQ(e.what(), "invalid r");
  }
  try {
    apply_a_operation(2, 1, op(0, 1, true));
    FAIL();
  } catch (const McmError& e) {
    EXPECT_STREQ(e.what(), "degenerate zero");
  }
}

TEST(AOperation, AbsoluteValueOfDifference) { EXPECT_EQ(apply_a_operation(1, 7, op(0, 0, true)), 6u); }

TEST(Verify, WorkedSolution) {
  const auto i = inst_of({29, 43});
  AdderGraph g;
  g.add(7, 0, 0, op(3, 0, true));
  g.add(29, 1, 0, op(2, 0, false));
  g.add(43, 1, 2, op(1, 0, false));
  EXPECT_TRUE(verify_solution(i, g).ok);
}

TEST(Verify, FourOperationSolutionIsValid) {
  const auto i = inst_of({29, 43});
  AdderGraph g;
  g.add(3, 0, 0, op(1, 0, false));
  g.add(29, 0, 1, op(5, 0, true));
  g.add(11, 1, 0, op(2, 0, true));
  g.add(43, 3, 0, op(2, 0, true));
  EXPECT_TRUE(verify_solution(i, g).ok);
  EXPECT_EQ(g.cost(), 4);
}

TEST(Verify, MissingTarget) {
  const auto i = inst_of({29, 43});
  AdderGraph g;
  g.add(7, 0, 0, op(3, 0, true));
  g.add(29, 1, 0, op(2, 0, false));
  const auto r = verify_solution(i, g);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Verify, WrongNodeValueReportsIndex) {
  const auto i = inst_of({29, 43});
  AdderGraph g;
  g.add(7, 0, 0, op(3, 0, true));
  g.add(31, 1, 0, op(2, 0, false));
  g.add(43, 1, 2, op(1, 0, false));
  const auto r = verify_solution(i, g);
  EXPECT_FALSE(r.ok);
  ASSERT_FALSE(r.failing_nodes.empty());
  EXPECT_EQ(r.failing_nodes.front(), 2);
}

TEST(Verify, SingleOperation) {
  const auto i = inst_of({5});
  AdderGraph g;
  g.add(5, 0, 0, op(2, 0, false));
  EXPECT_TRUE(verify_solution(i, g).ok);
}

TEST(Csd, NonAdjacentAndMinimal) {
  for (uint64_t v = 1; v < 4096; ++v) {
    const auto d = to_csd(v);
    EXPECT_EQ(d.value(), static_cast<int64_t>(v));
    for (size_t k = 1; k < d.digits.size(); ++k) EXPECT_FALSE(d.digits[k] != 0 && d.digits[k - 1] != 0) << v;
    EXPECT_EQ(d.nonzero_count(), oracle::min_signed_digit_weight(v)) << v;
  }
}

TEST(Bounds, WorkedPair) {
  const auto i = inst_of({29, 43});
  EXPECT_EQ(binary_upper_bound(i), 6);
  // 29 = 32 - 4 + 1 and 43 = 64 - 16 - 4 - 1 have 3 and 4 signed digits.
  EXPECT_EQ(oracle::min_signed_digit_weight(29) - 1 + oracle::min_signed_digit_weight(43) - 1, 5);
  EXPECT_EQ(csd_upper_bound(i), 5);
}

TEST(Bounds, SingleThree) { EXPECT_EQ(csd_upper_bound(inst_of({3})), 1); }

TEST(Bounds, RecodingWitnessVerifiesWithinBound) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int64_t> d(3, 1 << 14);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int64_t> raw(4);
    for (auto& v : raw) v = d(rng);
    const auto i = normalize_targets(raw);
    if (i.empty()) continue;
    for (auto rec : {Recoding::Binary, Recoding::Csd}) {
      const auto g = recoding_witness(i, rec);
      EXPECT_TRUE(verify_solution(i, g).ok);
      EXPECT_LE(g.cost(), recoding_upper_bound(i, rec));
    }
  }
}

TEST(SingleOperation, MatchesIndependentReachability) {
  const std::vector<uint64_t> ready{1, 7};
  for (uint64_t t = 1; t < 128; ++t) {
    const bool expect = oracle::one_op_reachable(ready, t, 7);
    const auto found = find_single_operation(ready, t, 7, false);
    EXPECT_EQ(found.has_value(), expect) << t;
    if (found) {
      EXPECT_EQ(apply_a_operation(ready[static_cast<size_t>(found->lhs)], ready[static_cast<size_t>(found->rhs)],
                                  found->params),
                t);
    }
  }
}

TEST(BruteForce, WorkedPair) {
  const auto r = brute_force_optimal(inst_of({29, 43}));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->cost, 3);
  EXPECT_TRUE(verify_solution(inst_of({29, 43}), r->graph).ok);
}

TEST(BruteForce, ExceedsMaxOps) {
  OracleOptions o;
  o.max_ops = 1;
  EXPECT_FALSE(brute_force_optimal(inst_of({29, 43}), o).has_value());
}

TEST(BruteForce, AgreesWithIndependentSearch) {
  for (uint64_t c = 3; c < 128; c += 2) {
    const auto i = make_instance({c}, bit_length(c) + 1);
    const auto r = brute_force_optimal(i);
    const auto expect = oracle::min_ops({c}, i.width, 4);
    ASSERT_TRUE(r.has_value()) << c;
    ASSERT_TRUE(expect.has_value()) << c;
    EXPECT_EQ(r->cost, *expect) << c;
    EXPECT_TRUE(verify_solution(i, r->graph).ok) << c;
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<uint64_t> d(1, 31);
  for (int trial = 0; trial < 15; ++trial) {
    const uint64_t a = 2 * d(rng) + 1, b = 2 * d(rng) + 1;
    if (a == b) continue;
    const auto i = normalize_targets(std::vector<int64_t>{static_cast<int64_t>(a), static_cast<int64_t>(b)});
    const auto r = brute_force_optimal(i);
    const auto expect = oracle::min_ops(i.targets, i.width, 4);
    ASSERT_EQ(r.has_value(), expect.has_value());
    if (r) EXPECT_EQ(r->cost, *expect) << a << "," << b;
  }
}

TEST(BruteForce, LimitsEnforced) {
  OracleOptions o;
  o.max_ops = 5;
  EXPECT_THROW(brute_force_optimal(inst_of({3}), o), std::invalid_argument);
  EXPECT_THROW(brute_force_optimal(inst_of({4097})), std::invalid_argument);
}
