#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcmpbs/pb.hpp"

// Constraint blocks over big-endian bit vectors. Index 0 of a BitVec is the
// most significant bit; carry d[i] feeds result bit i and is computed from
// the operands at bit i + 1.
namespace mcmpbs::gadgets {

enum class ShiftDirection { Left, Right };

/// Carry (or borrow) bits d_1..d_{N-1}.
struct CarryChain {
  std::vector<VarId> carries;
};

/// Which overflow row the conditional adders emit. The printed row
/// `-e - b1 - c1 - d1 >= -2` still forbids b1 = c1 = d1 = 1 when the
/// condition is off; the corrected row `-2e - b1 - c1 - d1 >= -3` is
/// equivalent when the condition holds and vacuous otherwise.
enum class OverflowRow { Corrected, AsPrinted };

/// a <=> XOR(inputs) for 2 or 3 inputs; guarded by `cond` when given.
void encode_xor(PbFormula& f, VarId a, std::span<const VarId> inputs, std::optional<VarId> cond = {});

/// cond => (b <=> c)
void encode_cond_copy(PbFormula& f, VarId cond, VarId b, VarId c);

/// a = b + c with ripple carries and no overflow. With `cond` the block only
/// binds when the condition holds; `shared` reuses an existing carry chain
/// (requires `cond`). Returns the chain used.
CarryChain encode_adder(PbFormula& f, const BitVec& a, const BitVec& b, const BitVec& c,
                        std::optional<VarId> cond = {}, const CarryChain* shared = nullptr,
                        OverflowRow overflow_row = OverflowRow::Corrected);

/// a = b - c with b >= c. Same conventions as encode_adder.
CarryChain encode_subtractor(PbFormula& f, const BitVec& a, const BitVec& b, const BitVec& c,
                             std::optional<VarId> cond = {}, const CarryChain* shared = nullptr);

/// cond => (out = in shifted by `amount`), forbidding shifted-out set bits.
void encode_cond_shift(PbFormula& f, VarId cond, const BitVec& out, const BitVec& in, int amount,
                       ShiftDirection direction);

/// out = in shifted by some amount in [0, N-1]; returns the N fresh one-hot
/// selectors (selector k enables amount k).
BitVec encode_shift(PbFormula& f, const BitVec& out, const BitVec& in, ShiftDirection direction);

struct ShiftResult {
  BitVec value;
  BitVec selectors;
};

/// Allocates the output vector, then encodes encode_shift into it.
ShiftResult shift_fresh(PbFormula& f, const BitVec& in, ShiftDirection direction);

struct Selection {
  BitVec value;
  BitVec selectors;
};

/// Fresh vector equal to some member of `list` (at least one selector true;
/// every true selector's member equals the result).
Selection equate_var_list_to_var(PbFormula& f, std::span<const BitVec> list);

/// Some member of `list` equals `constant`; returns the selectors.
BitVec equate_var_list_to_const(PbFormula& f, std::span<const BitVec> list, uint64_t constant);

/// Fresh vector with exactly `count` bits set.
BitVec exactly(PbFormula& f, size_t width, int count);

/// No bit position set in both vectors (keeps 2^i - 2^j away from zero).
void forbid_common_bits(PbFormula& f, const BitVec& a, const BitVec& b);

/// Forces a vector to a constant through unit constraints.
void fix_value(PbFormula& f, const BitVec& bits, uint64_t value);

/// Closed-form sizes of each block, in emitted variables and constraints.
namespace sizes {

struct Size {
  uint64_t vars = 0;
  uint64_t constraints = 0;

  Size& operator+=(const Size& o) {
    vars += o.vars;
    constraints += o.constraints;
    return *this;
  }
  friend Size operator+(Size a, const Size& b) { return a += b; }
  friend Size operator*(uint64_t k, const Size& s) { return {k * s.vars, k * s.constraints}; }
  friend bool operator==(const Size&, const Size&) = default;
};

/// Adder constraints plus a fresh chain when `fresh_chain`.
Size adder(uint64_t n, bool fresh_chain);
Size subtractor(uint64_t n, bool fresh_chain);
Size shift(uint64_t n, bool fresh_output);
Size exactly(uint64_t n);
Size equate_to_var(uint64_t n, uint64_t list);
Size equate_to_const(uint64_t n, uint64_t list);

}  // namespace sizes

}  // namespace mcmpbs::gadgets
