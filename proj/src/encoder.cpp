#include "mcmpbs/encoder.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcmpbs {

namespace g = gadgets;

Variant variant_from_int(int v) {
  if (v < 1 || v > 3) throw std::invalid_argument("unknown encoding variant " + std::to_string(v));
  return static_cast<Variant>(v);
}

const std::vector<std::string>& Improvements::names() {
  static const std::vector<std::string> n = {"nonzero-sub", "skip-odd-target-shift", "trivial-precompute",
                                             "limit-exactly-rows", "start-i-at-2"};
  return n;
}

bool Improvements::set(std::string_view name, bool value) {
  bool* flags[] = {&nonzero_sub, &skip_odd_target_shift, &trivial_precompute, &limit_exactly_rows, &start_i_at_2};
  const auto& n = names();
  for (size_t i = 0; i < n.size(); ++i) {
    if (n[i] == name) {
      *flags[i] = value;
      return true;
    }
  }
  // numeric aliases 1..5
  if (name.size() == 1 && name[0] >= '1' && name[0] <= '5') {
    *flags[name[0] - '1'] = value;
    return true;
  }
  return false;
}

std::string_view to_string(TrivialVerdict v) {
  switch (v) {
    case TrivialVerdict::None:
      return "none";
    case TrivialVerdict::Sat:
      return "SAT";
    case TrivialVerdict::Unsat:
      return "UNSAT";
  }
  return "none";
}

std::string_view to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::Exactly2:
      return "2^i+2^j";
    case CandidateKind::PowerDifference:
      return "2^i-2^j";
    case CandidateKind::ShiftPlusPower:
      return "M<<l+2^k";
    case CandidateKind::ShiftMinusPower:
      return "M<<l-2^k";
    case CandidateKind::PowerMinusShift:
      return "2^k-M<<l";
    case CandidateKind::PairSum:
      return "Ma<<l1+Mb<<l2";
    case CandidateKind::PairDifference:
      return "Ma<<l1-Mb<<l2";
    case CandidateKind::PairDifferenceSwapped:
      return "Mb<<l2-Ma<<l1";
  }
  return "?";
}

namespace {

void check_config(const McmInstance& inst, const EncodingConfig& cfg) {
  if (inst.empty()) throw std::invalid_argument("nothing to encode: empty target set");
  if (cfg.ops < 1) throw std::invalid_argument("ops must be at least 1");
  if (inst.width < 2 || inst.width > kMaxWidth) throw std::invalid_argument("unsupported width");
}

std::vector<uint64_t> ready_values(const AdderGraph& g) {
  std::vector<uint64_t> r{1};
  for (const auto& n : g.nodes) r.push_back(n.value);
  return r;
}

}  // namespace

PreprocessResult preprocess_trivial(const McmInstance& inst, const EncodingConfig& cfg) {
  check_config(inst, cfg);
  PreprocessResult out;
  std::vector<uint64_t> remaining = inst.targets;
  bool progress = true;
  while (progress && !remaining.empty()) {
    progress = false;
    const std::vector<uint64_t> ready = ready_values(out.fixed);
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      auto op = find_single_operation(ready, *it, inst.width, cfg.right_shifts);
      if (!op) continue;
      out.fixed.add(*it, op->lhs, op->rhs, op->params);
      remaining.erase(it);
      progress = true;
      break;
    }
  }
  out.consumed = out.fixed.cost();
  out.reduced = inst;
  out.reduced.targets = remaining;
  const int budget = cfg.ops - out.consumed;
  if (remaining.empty()) {
    out.verdict = budget >= 0 ? TrivialVerdict::Sat : TrivialVerdict::Unsat;
  } else if (budget < static_cast<int>(remaining.size())) {
    out.verdict = TrivialVerdict::Unsat;
  }
  return out;
}

EncodingPlan plan_encoding(const McmInstance& inst, const EncodingConfig& cfg) {
  check_config(inst, cfg);
  EncodingPlan plan;
  plan.width = inst.width;
  plan.ops = cfg.ops;
  plan.variant = cfg.variant;
  plan.right_shifts = cfg.right_shifts;
  plan.improvements = cfg.improvements;
  const Improvements& imp = cfg.improvements;

  if (imp.trivial_precompute) {
    PreprocessResult pre = preprocess_trivial(inst, cfg);
    plan.verdict = pre.verdict;
    if (pre.verdict == TrivialVerdict::Sat) plan.witness = pre.fixed;
    if (pre.verdict != TrivialVerdict::None) return plan;
    plan.fixed = std::move(pre.fixed);
    plan.targets = std::move(pre.reduced.targets);
  } else {
    plan.targets = inst.targets;
  }

  const int free_ops = plan.free_ops();
  if (imp.trivial_precompute && imp.limit_exactly_rows) {
    const int x = free_ops - static_cast<int>(plan.targets.size());
    // The first operation has nothing but the constant to work with.
    plan.exactly_ops = std::max(x, plan.fixed.cost() == 0 ? 1 : 0);
  } else {
    plan.exactly_ops = free_ops;
  }

  // Slot 1 is skipped only when it is the first free operation.
  plan.binding_start = 1;
  if (imp.start_i_at_2 && plan.fixed.cost() == 0) {
    const std::vector<uint64_t> ready = ready_values(plan.fixed);
    const bool any_single = std::any_of(plan.targets.begin(), plan.targets.end(), [&](uint64_t t) {
      return find_single_operation(ready, t, inst.width, cfg.right_shifts).has_value();
    });
    if (!any_single) plan.binding_start = 2;
  }
  // No operation left to hold the targets.
  if (plan.binding_start > free_ops) plan.verdict = TrivialVerdict::Unsat;
  return plan;
}

namespace {

class Builder {
 public:
  Builder(EncodeResult& r) : r_(r), f_(r.formula), n_(static_cast<size_t>(r.plan.width)) {}

  void run() {
    const EncodingPlan& plan = r_.plan;
    int slot = 0;
    for (const auto& node : plan.fixed.nodes) {
      ++slot;
      label("fixed op " + std::to_string(slot) + " = " + std::to_string(node.value));
      OpEncoding op;
      op.value = f_.new_bitvec(n_);
      op.fixed = true;
      op.fixed_value = node.value;
      op.pre_shift = op.value;
      g::fix_value(f_, op.value, node.value);
      r_.ops.push_back(std::move(op));
    }
    for (int k = 1; k <= plan.free_ops(); ++k) {
      ++slot;
      const bool powers = k <= plan.exactly_ops;
      if (plan.variant == Variant::Fresh) {
        fresh_op(slot, powers);
      } else {
        conditional_op(slot, powers);
      }
    }
    bind_targets();
  }

 private:
  void label(const std::string& s) {
    if (r_.config.annotate) f_.set_annotation(s);
  }

  bool nonzero_sub() const { return r_.plan.improvements.nonzero_sub; }

  OperandRef power(const BitVec& bits) { return OperandRef{0, bits, {}}; }

  OperandRef shifted(int source) {
    g::ShiftResult s = g::shift_fresh(f_, r_.ops[static_cast<size_t>(source - 1)].value, g::ShiftDirection::Left);
    return OperandRef{source, s.value, s.selectors};
  }

  static std::string op_name(int slot) { return "M" + std::to_string(slot); }

  // Variant 1: every candidate owns its operands and result.
  void fresh_op(int slot, bool powers) {
    OpEncoding op;
    const int prior = slot - 1;
    const std::string tag = "op " + std::to_string(slot) + " ";
    auto emit = [&](CandidateKind kind, OperandRef lhs, OperandRef rhs, bool add) {
      Candidate c;
      c.kind = kind;
      c.result = f_.new_bitvec(n_);
      if (add) {
        g::encode_adder(f_, c.result, lhs.bits, rhs.bits);
      } else if (kind == CandidateKind::PairDifferenceSwapped) {
        g::encode_subtractor(f_, c.result, rhs.bits, lhs.bits);
      } else {
        g::encode_subtractor(f_, c.result, lhs.bits, rhs.bits);
      }
      c.lhs = std::move(lhs);
      c.rhs = std::move(rhs);
      op.candidates.push_back(std::move(c));
    };
    if (powers) {
      label(tag + "2^i+2^j");
      Candidate c;
      c.kind = CandidateKind::Exactly2;
      c.result = g::exactly(f_, n_, 2);
      c.lhs = power(c.result);
      op.candidates.push_back(std::move(c));

      label(tag + "2^i-2^j");
      OperandRef a = power(g::exactly(f_, n_, 1));
      OperandRef b = power(g::exactly(f_, n_, 1));
      if (nonzero_sub()) g::forbid_common_bits(f_, a.bits, b.bits);
      emit(CandidateKind::PowerDifference, std::move(a), std::move(b), false);
    }
    for (int o1 = 1; o1 <= prior; ++o1) {
      label(tag + op_name(o1) + "<<l+2^k");
      {
        OperandRef ls = shifted(o1);
        OperandRef e = power(g::exactly(f_, n_, 1));
        emit(CandidateKind::ShiftPlusPower, std::move(ls), std::move(e), true);
      }
      label(tag + op_name(o1) + "<<l-2^k");
      {
        OperandRef ls = shifted(o1);
        OperandRef e = power(g::exactly(f_, n_, 1));
        emit(CandidateKind::ShiftMinusPower, std::move(ls), std::move(e), false);
      }
      label(tag + "2^k-" + op_name(o1) + "<<l");
      {
        OperandRef e = power(g::exactly(f_, n_, 1));
        OperandRef ls = shifted(o1);
        emit(CandidateKind::PowerMinusShift, std::move(e), std::move(ls), false);
      }
      for (int o2 = o1; o2 <= prior; ++o2) {
        const std::string pair = op_name(o1) + "," + op_name(o2);
        label(tag + "sum " + pair);
        {
          OperandRef a = shifted(o1);
          OperandRef b = shifted(o2);
          emit(CandidateKind::PairSum, std::move(a), std::move(b), true);
        }
        label(tag + "difference " + pair);
        {
          OperandRef a = shifted(o1);
          OperandRef b = shifted(o2);
          emit(CandidateKind::PairDifference, std::move(a), std::move(b), false);
        }
        label(tag + "swapped difference " + pair);
        {
          OperandRef b = shifted(o2);
          OperandRef a = shifted(o1);
          emit(CandidateKind::PairDifferenceSwapped, std::move(a), std::move(b), false);
        }
      }
    }
    label(tag + "select");
    std::vector<BitVec> results;
    for (const auto& c : op.candidates) results.push_back(c.result);
    g::Selection sel = g::equate_var_list_to_var(f_, results);
    for (size_t j = 0; j < op.candidates.size(); ++j) op.candidates[j].selector = sel.selectors[j];
    op.pre_shift = sel.value;
    if (r_.plan.right_shifts) {
      label(tag + "right shift");
      g::ShiftResult s = g::shift_fresh(f_, sel.value, g::ShiftDirection::Right);
      op.value = s.value;
      op.right_shift_selectors = s.selectors;
    } else {
      op.value = sel.value;
    }
    r_.ops.push_back(std::move(op));
  }

  // Variants 2 and 3: candidates write into one output under a selector.
  void conditional_op(int slot, bool powers) {
    OpEncoding op;
    const int prior = slot - 1;
    const bool shared_chain = r_.plan.variant == Variant::SharedChain;
    const std::string tag = "op " + std::to_string(slot) + " ";
    label(tag + "value");
    op.value = f_.new_bitvec(n_);
    op.pre_shift = r_.plan.right_shifts ? f_.new_bitvec(n_) : op.value;
    const BitVec& out = op.pre_shift;

    g::CarryChain chain;
    if (shared_chain) chain.carries = f_.new_bitvec(n_ - 1).bits;
    const g::CarryChain* shared = shared_chain ? &chain : nullptr;

    label(tag + "powers of two");
    BitVec e2, e1, e1b;
    if (powers) e2 = g::exactly(f_, n_, 2);
    if (powers || prior > 0) e1 = g::exactly(f_, n_, 1);
    if (powers) {
      e1b = g::exactly(f_, n_, 1);
      if (nonzero_sub()) g::forbid_common_bits(f_, e1, e1b);
    }

    auto candidate = [&](CandidateKind kind, OperandRef lhs, OperandRef rhs) -> Candidate& {
      Candidate c;
      c.kind = kind;
      c.selector = f_.new_var();
      c.result = out;
      c.lhs = std::move(lhs);
      c.rhs = std::move(rhs);
      op.candidates.push_back(std::move(c));
      return op.candidates.back();
    };
    auto add = [&](Candidate& c) { g::encode_adder(f_, out, c.lhs.bits, c.rhs.bits, c.selector, shared); };
    auto sub = [&](Candidate& c) { g::encode_subtractor(f_, out, c.lhs.bits, c.rhs.bits, c.selector, shared); };

    if (powers) {
      label(tag + "2^i+2^j");
      Candidate& c = candidate(CandidateKind::Exactly2, power(e2), {});
      for (size_t i = 0; i < n_; ++i) g::encode_cond_copy(f_, c.selector, e2[i], out[i]);
      label(tag + "2^i-2^j");
      sub(candidate(CandidateKind::PowerDifference, power(e1), power(e1b)));
    }
    for (int o1 = 1; o1 <= prior; ++o1) {
      label(tag + op_name(o1) + "<<l");
      const OperandRef ls1 = shifted(o1);
      label(tag + op_name(o1) + "<<l+2^k");
      add(candidate(CandidateKind::ShiftPlusPower, ls1, power(e1)));
      label(tag + op_name(o1) + "<<l-2^k");
      sub(candidate(CandidateKind::ShiftMinusPower, ls1, power(e1)));
      label(tag + "2^k-" + op_name(o1) + "<<l");
      sub(candidate(CandidateKind::PowerMinusShift, power(e1), ls1));
      for (int o2 = o1; o2 <= prior; ++o2) {
        const std::string pair = op_name(o1) + "," + op_name(o2);
        label(tag + op_name(o2) + "<<l for " + pair);
        const OperandRef ls2 = shifted(o2);
        label(tag + "sum " + pair);
        add(candidate(CandidateKind::PairSum, ls1, ls2));
        label(tag + "difference " + pair);
        sub(candidate(CandidateKind::PairDifference, ls1, ls2));
        label(tag + "swapped difference " + pair);
        {
          Candidate& c = candidate(CandidateKind::PairDifferenceSwapped, ls1, ls2);
          g::encode_subtractor(f_, out, c.rhs.bits, c.lhs.bits, c.selector, shared);
        }
      }
    }
    label(tag + "one candidate");
    PbConstraint one;
    one.relation = Relation::Equal;
    one.bound = 1;
    for (const auto& c : op.candidates) one.terms.push_back({1, c.selector});
    f_.add_constraint(std::move(one));
    if (r_.plan.right_shifts) {
      label(tag + "right shift");
      op.right_shift_selectors = g::encode_shift(f_, op.value, op.pre_shift, g::ShiftDirection::Right);
    }
    r_.ops.push_back(std::move(op));
  }

  void bind_targets() {
    const EncodingPlan& plan = r_.plan;
    const int first = plan.fixed.cost() + plan.binding_start;
    const bool shift = !plan.improvements.skip_odd_target_shift;
    for (uint64_t t : plan.targets) {
      label("target " + std::to_string(t));
      TargetBinding b;
      b.target = t;
      std::vector<BitVec> list;
      for (int s = first; s <= plan.ops; ++s) {
        b.ops.push_back(s);
        if (shift) {
          g::ShiftResult ls = g::shift_fresh(f_, r_.ops[static_cast<size_t>(s - 1)].value, g::ShiftDirection::Left);
          list.push_back(ls.value);
          b.shift_selectors.push_back(ls.selectors);
        } else {
          list.push_back(r_.ops[static_cast<size_t>(s - 1)].value);
        }
      }
      b.selectors = g::equate_var_list_to_const(f_, list, t);
      r_.targets.push_back(std::move(b));
    }
  }

  EncodeResult& r_;
  PbFormula& f_;
  size_t n_;
};

}  // namespace

EncodeResult encode_mcm(const McmInstance& inst, const EncodingConfig& cfg) {
  EncodeResult r;
  r.instance = inst;
  r.config = cfg;
  r.plan = plan_encoding(inst, cfg);
  r.trivial_verdict = r.plan.verdict;
  r.trivial_witness = r.plan.witness;
  if (r.plan.verdict != TrivialVerdict::None) return r;
  Builder(r).run();
  return r;
}

SizeEstimate predict_size(const EncodingPlan& plan) {
  if (plan.verdict != TrivialVerdict::None) return {};
  namespace s = g::sizes;
  const uint64_t n = static_cast<uint64_t>(plan.width);
  const bool rs = plan.right_shifts;
  const bool imp1 = plan.improvements.nonzero_sub;
  s::Size total;
  const s::Size ls = s::shift(n, true);
  const s::Size vec{n, 0};
  const uint64_t fixed = static_cast<uint64_t>(plan.fixed.cost());
  total += fixed * s::Size{n, n};

  for (int k = 1; k <= plan.free_ops(); ++k) {
    const uint64_t p = fixed + static_cast<uint64_t>(k - 1);
    const uint64_t pairs = p * (p + 1) / 2;
    const bool powers = k <= plan.exactly_ops;
    const uint64_t cands = (powers ? 2 : 0) + 3 * p + 3 * pairs;
    if (plan.variant == Variant::Fresh) {
      if (powers) {
        total += s::exactly(n);
        total += 2 * s::exactly(n) + vec + s::subtractor(n, true);
        if (imp1) total.constraints += n;
      }
      total += p * (ls + s::exactly(n) + vec + s::adder(n, true));
      total += 2 * p * (ls + s::exactly(n) + vec + s::subtractor(n, true));
      total += pairs * (2 * ls + vec + s::adder(n, true));
      total += 2 * pairs * (2 * ls + vec + s::subtractor(n, true));
      total += s::equate_to_var(n, cands);
      if (rs) total += ls;
      continue;
    }
    const bool fresh = plan.variant == Variant::Conditional;
    total += vec;
    if (rs) total += vec;
    if (!fresh) total.vars += n - 1;
    if (powers) {
      total += 2 * s::exactly(n);
      if (imp1) total.constraints += n;
    }
    if (powers || p > 0) total += s::exactly(n);
    total.vars += cands;
    if (powers) {
      total.constraints += 2 * n;
      total += s::subtractor(n, fresh);
    }
    total += (p + pairs) * ls;
    total += (p + pairs) * s::adder(n, fresh);
    total += 2 * (p + pairs) * s::subtractor(n, fresh);
    total.constraints += 1;
    if (rs) total += s::shift(n, false);
  }

  const uint64_t list = static_cast<uint64_t>(plan.free_ops() - plan.binding_start + 1);
  for (size_t t = 0; t < plan.targets.size(); ++t) {
    if (!plan.improvements.skip_odd_target_shift) total += list * ls;
    total += s::equate_to_const(n, list);
  }
  return {total.vars, total.constraints};
}

SizeEstimate predict_size(int ops, int width, Variant variant) {
  if (ops < 1) throw std::invalid_argument("ops must be at least 1");
  if (width < 2 || width > kMaxWidth) throw std::invalid_argument("unsupported width");
  EncodingPlan plan;
  plan.width = width;
  plan.ops = ops;
  plan.variant = variant;
  plan.targets = {0};
  plan.exactly_ops = std::max(ops - 1, 1);
  plan.binding_start = 2;
  if (plan.binding_start > ops) plan.verdict = TrivialVerdict::Unsat;
  return predict_size(plan);
}

}  // namespace mcmpbs
