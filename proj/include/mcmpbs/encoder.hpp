#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcmpbs/core.hpp"
#include "mcmpbs/gadgets.hpp"
#include "mcmpbs/pb.hpp"

namespace mcmpbs {

/// 1: every candidate gets its own result vector, bound through
///    equate_var_list_to_var. 2: conditional adders/subtractors write into one
///    shared output per operation. 3: as 2 plus one carry/borrow chain shared
///    by all candidates of an operation.
enum class Variant { Fresh = 1, Conditional = 2, SharedChain = 3 };

Variant variant_from_int(int v);

struct Improvements {
  bool nonzero_sub = true;            // 2^i - 2^j candidate never yields zero
  bool skip_odd_target_shift = true;  // bind odd targets without a left shift
  bool trivial_precompute = true;     // pre-place targets reachable in one operation
  bool limit_exactly_rows = true;     // 2^i +/- 2^j candidates only in the first intermediates
  bool start_i_at_2 = true;           // the first operation never equals a target

  static Improvements none() { return {false, false, false, false, false}; }

  /// Sets the flag called `name`; returns false for an unknown name.
  bool set(std::string_view name, bool value);
  static const std::vector<std::string>& names();
};

struct EncodingConfig {
  Variant variant = Variant::SharedChain;
  bool right_shifts = false;
  Improvements improvements;
  int ops = 1;
  bool annotate = false;
};

enum class TrivialVerdict { None, Sat, Unsat };

std::string_view to_string(TrivialVerdict v);

struct PreprocessResult {
  McmInstance reduced;  // targets still needing the solver
  AdderGraph fixed;     // one node per removed target, in removal order
  int consumed = 0;     // operations spent on removed targets
  TrivialVerdict verdict = TrivialVerdict::None;
};

/// Repeatedly removes targets that are one A-operation away from the ready
/// set {1} plus the already removed targets. SAT when every target is removed
/// within cfg.ops; UNSAT when more operations were consumed than allowed or
/// fewer operations remain than targets.
PreprocessResult preprocess_trivial(const McmInstance& inst, const EncodingConfig& cfg);

/// Everything encode_mcm decides before emitting constraints.
struct EncodingPlan {
  int width = 0;
  int ops = 0;
  Variant variant = Variant::SharedChain;
  bool right_shifts = false;
  Improvements improvements;
  AdderGraph fixed;                // pre-placed operations (prefix of M)
  std::vector<uint64_t> targets;   // targets bound by the formula
  int exactly_ops = 0;             // leading free operations that get the 2^i +/- 2^j candidates
  int binding_start = 1;           // first free operation (1-based) considered when binding targets
  TrivialVerdict verdict = TrivialVerdict::None;
  std::optional<AdderGraph> witness;

  int free_ops() const { return ops - fixed.cost(); }
};

EncodingPlan plan_encoding(const McmInstance& inst, const EncodingConfig& cfg);

enum class CandidateKind {
  Exactly2,               // 2^i + 2^j
  PowerDifference,        // 2^i - 2^j
  ShiftPlusPower,         // (M << l) + 2^k
  ShiftMinusPower,        // (M << l) - 2^k
  PowerMinusShift,        // 2^k - (M << l)
  PairSum,                // (Ma << l1) + (Mb << l2)
  PairDifference,         // (Ma << l1) - (Mb << l2)
  PairDifferenceSwapped,  // (Mb << l2) - (Ma << l1)
};

std::string_view to_string(CandidateKind k);

/// One operand of a candidate: either a one-hot power-of-two vector
/// (source_op == 0) or a left-shifted earlier operation.
struct OperandRef {
  int source_op = 0;  // 1-based slot in EncodeResult::ops, 0 for a power of two
  BitVec bits;
  BitVec shift_selectors;  // empty for powers of two
};

struct Candidate {
  CandidateKind kind = CandidateKind::Exactly2;
  VarId selector;
  OperandRef lhs;  // for Exactly2 holds the two-hot vector
  OperandRef rhs;
  BitVec result;
};

struct OpEncoding {
  BitVec value;  // M[i]
  bool fixed = false;
  uint64_t fixed_value = 0;
  BitVec pre_shift;                // value before the right shift stage
  BitVec right_shift_selectors;    // empty without right shifts
  std::vector<Candidate> candidates;
};

struct TargetBinding {
  uint64_t target = 0;
  std::vector<int> ops;  // 1-based slots
  BitVec selectors;
  std::vector<BitVec> shift_selectors;  // empty when bound without shifts
};

struct EncodeResult {
  McmInstance instance;
  EncodingConfig config;
  EncodingPlan plan;
  PbFormula formula;
  std::vector<OpEncoding> ops;  // M
  std::vector<TargetBinding> targets;
  TrivialVerdict trivial_verdict = TrivialVerdict::None;
  std::optional<AdderGraph> trivial_witness;
};

/// Encodes "can the targets be realized with exactly cfg.ops A-operations".
/// When preprocessing settles the question the formula is left empty and
/// trivial_verdict says why.
EncodeResult encode_mcm(const McmInstance& inst, const EncodingConfig& cfg);

struct SizeEstimate {
  uint64_t variables = 0;
  uint64_t constraints = 0;

  friend bool operator==(const SizeEstimate&, const SizeEstimate&) = default;
};

/// Exact size of the formula encode_mcm builds for this plan.
SizeEstimate predict_size(const EncodingPlan& plan);

/// Size for `ops` operations at width `width` with default improvements and
/// one target that is not reachable in a single operation.
SizeEstimate predict_size(int ops, int width, Variant variant);

}  // namespace mcmpbs
