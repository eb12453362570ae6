#include "mcmpbs/gadgets.hpp"

#include <stdexcept>

#include "mcmpbs/core.hpp"

namespace mcmpbs::gadgets {

namespace {

struct Lin {
  PbConstraint c;

  Lin& operator()(int64_t coef, VarId v) {
    c.terms.push_back({coef, v});
    return *this;
  }
  void geq(PbFormula& f, int64_t bound) {
    c.bound = bound;
    c.relation = Relation::GreaterEq;
    f.add_constraint(std::move(c));
  }
};

void check_width(const BitVec& a, const BitVec& b, const BitVec& c) {
  if (a.width() != b.width() || a.width() != c.width() || a.width() == 0) {
    throw std::invalid_argument("bit vector length mismatch");
  }
}

// Rows of the ripple adder/subtractor that define d_1..d_{N-1}. `sub`
// flips the sign of the c operand.
void carry_rows(PbFormula& f, const BitVec& b, const BitVec& c, const CarryChain& d, std::optional<VarId> cond,
                bool sub) {
  const size_t n = b.width();
  for (size_t i = 0; i + 2 < n; ++i) {
    // d_i from operands i+1 and carry d_{i+1}
    const VarId di = d.carries[i], dn = d.carries[i + 1];
    const VarId bn = b[i + 1], cn = c[i + 1];
    if (!sub) {
      if (cond) {
        Lin{}(-2, *cond)(-2, di)(1, bn)(1, cn)(1, dn).geq(f, -2);
        Lin{}(-2, *cond)(2, di)(-1, bn)(-1, cn)(-1, dn).geq(f, -3);
      } else {
        Lin{}(-2, di)(1, bn)(1, cn)(1, dn).geq(f, 0);
        Lin{}(2, di)(-1, bn)(-1, cn)(-1, dn).geq(f, -1);
      }
    } else {
      if (cond) {
        Lin{}(-2, *cond)(2, di)(1, bn)(-1, cn)(-1, dn).geq(f, -2);
        Lin{}(-2, *cond)(-2, di)(-1, bn)(1, cn)(1, dn).geq(f, -3);
      } else {
        Lin{}(2, di)(1, bn)(-1, cn)(-1, dn).geq(f, 0);
        Lin{}(-2, di)(-1, bn)(1, cn)(1, dn).geq(f, -1);
      }
    }
  }
  if (n < 2) return;
  const VarId dl = d.carries[n - 2], bl = b[n - 1], cl = c[n - 1];
  if (!sub) {
    if (cond) {
      Lin{}(-2, *cond)(-2, dl)(1, bl)(1, cl).geq(f, -2);
      Lin{}(-1, *cond)(1, dl)(-1, bl)(-1, cl).geq(f, -2);
    } else {
      Lin{}(-2, dl)(1, bl)(1, cl).geq(f, 0);
      Lin{}(1, dl)(-1, bl)(-1, cl).geq(f, -1);
    }
  } else {
    if (cond) {
      Lin{}(-2, *cond)(-2, dl)(-1, bl)(1, cl).geq(f, -3);
      Lin{}(-1, *cond)(1, dl)(1, bl)(-1, cl).geq(f, -1);
    } else {
      Lin{}(-2, dl)(-1, bl)(1, cl).geq(f, -1);
      Lin{}(1, dl)(1, bl)(-1, cl).geq(f, 0);
    }
  }
}

void sum_rows(PbFormula& f, const BitVec& a, const BitVec& b, const BitVec& c, const CarryChain& d,
              std::optional<VarId> cond) {
  const size_t n = a.width();
  for (size_t i = 0; i + 1 < n; ++i) {
    const VarId in[3] = {b[i], c[i], d.carries[i]};
    encode_xor(f, a[i], in, cond);
  }
  const VarId last[2] = {b[n - 1], c[n - 1]};
  encode_xor(f, a[n - 1], last, cond);
}

CarryChain chain_for(PbFormula& f, size_t n, std::optional<VarId> cond, const CarryChain* shared) {
  if (shared != nullptr) {
    if (!cond) throw std::invalid_argument("a shared carry chain requires a condition");
    if (shared->carries.size() != n - 1) throw std::invalid_argument("carry chain length mismatch");
    return *shared;
  }
  CarryChain d;
  for (size_t i = 0; i + 1 < n; ++i) d.carries.push_back(f.new_var());
  return d;
}

}  // namespace

void encode_xor(PbFormula& f, VarId a, std::span<const VarId> inputs, std::optional<VarId> cond) {
  // Rows as (sign of a, signs of inputs, bound without condition).
  struct Row {
    int64_t a;
    int64_t s[3];
    int64_t bound;
  };
  static constexpr Row kXor2[] = {
      {-1, {1, 1, 0}, 0}, {-1, {-1, -1, 0}, -2}, {1, {1, -1, 0}, 0}, {1, {-1, 1, 0}, 0}};
  static constexpr Row kXor3[] = {
      {-1, {1, 1, 1}, 0},   {-1, {1, -1, -1}, -2}, {-1, {-1, 1, -1}, -2}, {-1, {-1, -1, 1}, -2},
      {1, {-1, -1, -1}, -2}, {1, {-1, 1, 1}, 0},    {1, {1, -1, 1}, 0},    {1, {1, 1, -1}, 0}};
  std::span<const Row> rows;
  if (inputs.size() == 2) {
    rows = kXor2;
  } else if (inputs.size() == 3) {
    rows = kXor3;
  } else {
    throw std::invalid_argument("XOR takes 2 or 3 inputs");
  }
  for (const Row& r : rows) {
    Lin row;
    if (cond) row(-1, *cond);
    row(r.a, a);
    for (size_t k = 0; k < inputs.size(); ++k) row(r.s[k], inputs[k]);
    row.geq(f, cond ? r.bound - 1 : r.bound);
  }
}

void encode_cond_copy(PbFormula& f, VarId cond, VarId b, VarId c) {
  Lin{}(-1, cond)(-1, b)(1, c).geq(f, -1);
  Lin{}(-1, cond)(1, b)(-1, c).geq(f, -1);
}

CarryChain encode_adder(PbFormula& f, const BitVec& a, const BitVec& b, const BitVec& c, std::optional<VarId> cond,
                        const CarryChain* shared, OverflowRow overflow_row) {
  check_width(a, b, c);
  const size_t n = a.width();
  CarryChain d = chain_for(f, n, cond, shared);
  // Fresh carries are defined unconditionally; shared ones only when enabled.
  carry_rows(f, b, c, d, shared != nullptr ? cond : std::nullopt, false);
  // disallow overflows
  if (n == 1) {
    Lin row;
    if (cond) row(-1, *cond);
    row(-1, b[0])(-1, c[0]).geq(f, cond ? -2 : -1);
  } else if (!cond) {
    Lin{}(-1, b[0])(-1, c[0])(-1, d.carries[0]).geq(f, -1);
  } else if (overflow_row == OverflowRow::AsPrinted) {
    Lin{}(-1, *cond)(-1, b[0])(-1, c[0])(-1, d.carries[0]).geq(f, -2);
  } else {
    Lin{}(-2, *cond)(-1, b[0])(-1, c[0])(-1, d.carries[0]).geq(f, -3);
  }
  sum_rows(f, a, b, c, d, cond);
  return d;
}

CarryChain encode_subtractor(PbFormula& f, const BitVec& a, const BitVec& b, const BitVec& c,
                             std::optional<VarId> cond, const CarryChain* shared) {
  check_width(a, b, c);
  const size_t n = a.width();
  CarryChain d = chain_for(f, n, cond, shared);
  carry_rows(f, b, c, d, shared != nullptr ? cond : std::nullopt, true);
  // disallow underflows
  const int64_t off = cond ? -1 : 0;
  auto guarded = [&]() {
    Lin row;
    if (cond) row(-1, *cond);
    return row;
  };
  guarded()(1, b[0])(-1, c[0]).geq(f, off);
  if (n > 1) {
    guarded()(1, b[0])(-1, d.carries[0]).geq(f, off);
    guarded()(-1, c[0])(-1, d.carries[0]).geq(f, -1 + off);
  }
  sum_rows(f, a, b, c, d, cond);
  return d;
}

void encode_cond_shift(PbFormula& f, VarId cond, const BitVec& out, const BitVec& in, int amount,
                       ShiftDirection direction) {
  const int n = static_cast<int>(out.width());
  if (in.width() != out.width()) throw std::invalid_argument("bit vector length mismatch");
  if (amount < 0 || amount > n - 1) throw std::invalid_argument("shift amount out of range");
  const auto at = [](const BitVec& v, int one_based) { return v[static_cast<size_t>(one_based - 1)]; };
  if (direction == ShiftDirection::Left) {
    // zero out last C bits
    for (int i = n - amount + 1; i <= n; ++i) Lin{}(-1, cond)(-1, at(out, i)).geq(f, -1);
    // copy remaining bits
    for (int i = 1; i <= n - amount; ++i) encode_cond_copy(f, cond, at(out, i), at(in, i + amount));
    // disallow overflows
    for (int i = 1; i <= amount; ++i) Lin{}(-1, cond)(-1, at(in, i)).geq(f, -1);
  } else {
    // zero out first C bits
    for (int i = 1; i <= amount; ++i) Lin{}(-1, cond)(-1, at(out, i)).geq(f, -1);
    for (int i = 1; i <= n - amount; ++i) encode_cond_copy(f, cond, at(out, i + amount), at(in, i));
    for (int i = n - amount + 1; i <= n; ++i) Lin{}(-1, cond)(-1, at(in, i)).geq(f, -1);
  }
}

BitVec encode_shift(PbFormula& f, const BitVec& out, const BitVec& in, ShiftDirection direction) {
  const size_t n = out.width();
  BitVec sel = f.new_bitvec(n);
  PbConstraint one;
  one.relation = Relation::Equal;
  one.bound = 1;
  for (VarId s : sel.bits) one.terms.push_back({1, s});
  f.add_constraint(std::move(one));
  for (size_t k = 0; k < n; ++k) encode_cond_shift(f, sel[k], out, in, static_cast<int>(k), direction);
  return sel;
}

ShiftResult shift_fresh(PbFormula& f, const BitVec& in, ShiftDirection direction) {
  ShiftResult r;
  r.value = f.new_bitvec(in.width());
  r.selectors = encode_shift(f, r.value, in, direction);
  return r;
}

Selection equate_var_list_to_var(PbFormula& f, std::span<const BitVec> list) {
  if (list.empty()) throw std::invalid_argument("empty variable list");
  const size_t n = list.front().width();
  for (const BitVec& v : list) {
    if (v.width() != n) throw std::invalid_argument("bit vector length mismatch");
  }
  Selection s;
  s.value = f.new_bitvec(n);
  s.selectors = f.new_bitvec(list.size());
  PbConstraint any;
  for (VarId x : s.selectors.bits) any.terms.push_back({1, x});
  any.bound = 1;
  f.add_constraint(std::move(any));
  for (size_t j = 0; j < list.size(); ++j) {
    for (size_t i = 0; i < n; ++i) encode_cond_copy(f, s.selectors[j], list[j][i], s.value[i]);
  }
  return s;
}

BitVec equate_var_list_to_const(PbFormula& f, std::span<const BitVec> list, uint64_t constant) {
  if (list.empty()) throw std::invalid_argument("empty variable list");
  const size_t n = list.front().width();
  if (bit_length(constant) > static_cast<int>(n)) throw std::invalid_argument("constant wider than the vectors");
  BitVec sel = f.new_bitvec(list.size());
  PbConstraint any;
  for (VarId x : sel.bits) any.terms.push_back({1, x});
  any.bound = 1;
  f.add_constraint(std::move(any));
  for (size_t j = 0; j < list.size(); ++j) {
    if (list[j].width() != n) throw std::invalid_argument("bit vector length mismatch");
    for (size_t i = 0; i < n; ++i) {
      const bool one = (constant >> (n - 1 - i)) & 1;
      if (one) {
        Lin{}(-1, sel[j])(1, list[j][i]).geq(f, 0);
      } else {
        Lin{}(-1, sel[j])(-1, list[j][i]).geq(f, -1);
      }
    }
  }
  return sel;
}

BitVec exactly(PbFormula& f, size_t width, int count) {
  if (count < 0 || static_cast<size_t>(count) > width) throw std::invalid_argument("exactly() count out of range");
  BitVec v = f.new_bitvec(width);
  PbConstraint c;
  c.relation = Relation::Equal;
  c.bound = count;
  for (VarId b : v.bits) c.terms.push_back({1, b});
  f.add_constraint(std::move(c));
  return v;
}

void forbid_common_bits(PbFormula& f, const BitVec& a, const BitVec& b) {
  if (a.width() != b.width()) throw std::invalid_argument("bit vector length mismatch");
  for (size_t i = 0; i < a.width(); ++i) Lin{}(-1, a[i])(-1, b[i]).geq(f, -1);
}

void fix_value(PbFormula& f, const BitVec& bits, uint64_t value) {
  const size_t n = bits.width();
  if (bit_length(value) > static_cast<int>(n)) throw std::invalid_argument("constant wider than the vector");
  for (size_t i = 0; i < n; ++i) {
    if ((value >> (n - 1 - i)) & 1) {
      Lin{}(1, bits[i]).geq(f, 1);
    } else {
      Lin{}(-1, bits[i]).geq(f, 0);
    }
  }
}

namespace sizes {

Size adder(uint64_t n, bool fresh_chain) {
  const uint64_t cons = n >= 2 ? 10 * n - 5 : 5;
  return {fresh_chain ? n - 1 : 0, cons};
}

Size subtractor(uint64_t n, bool fresh_chain) {
  const uint64_t cons = n >= 2 ? 10 * n - 3 : 5;
  return {fresh_chain ? n - 1 : 0, cons};
}

Size shift(uint64_t n, bool fresh_output) { return {fresh_output ? 2 * n : n, 2 * n * n + 1}; }

Size exactly(uint64_t n) { return {n, 1}; }

Size equate_to_var(uint64_t n, uint64_t list) { return {n + list, 1 + 2 * n * list}; }

Size equate_to_const(uint64_t n, uint64_t list) { return {list, 1 + n * list}; }

}  // namespace sizes

}  // namespace mcmpbs::gadgets
