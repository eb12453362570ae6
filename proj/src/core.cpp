#include "mcmpbs/core.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <unordered_set>

namespace mcmpbs {

int bit_length(uint64_t value) { return value == 0 ? 0 : 64 - std::countl_zero(value); }

namespace {

uint64_t magnitude(int64_t v) {
  return v < 0 ? uint64_t{0} - static_cast<uint64_t>(v) : static_cast<uint64_t>(v);
}

bool is_power_of_two(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// b == v << l for some l in [0, max_shift]; returns l or -1.
int shift_between(uint64_t v, uint64_t b, int max_shift) {
  if (v == 0 || b < v || b % v != 0) return -1;
  const uint64_t q = b / v;
  if (!is_power_of_two(q)) return -1;
  const int l = std::countr_zero(q);
  return l <= max_shift ? l : -1;
}

}  // namespace

McmInstance normalize_targets(std::span<const int64_t> raw) {
  if (raw.empty()) throw McmError("empty input");
  McmInstance inst;
  std::set<uint64_t> unique;
  for (int64_t v : raw) {
    uint64_t m = magnitude(v);
    if (m != 0) m >>= std::countr_zero(m);
    inst.sources.push_back({v, m});
    if (m > 1) unique.insert(m);
  }
  inst.targets.assign(unique.begin(), unique.end());
  inst.width = inst.targets.empty() ? 0 : bit_length(inst.targets.back()) + 1;
  if (inst.width > kMaxWidth) throw McmError("target too wide");
  return inst;
}

McmInstance make_instance(std::vector<uint64_t> targets, int width) {
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (width < 1 || width > kMaxWidth) throw std::invalid_argument("width out of range");
  for (uint64_t t : targets) {
    if (t < 3 || t % 2 == 0) throw std::invalid_argument("targets must be odd and >= 3");
    if (bit_length(t) >= width) throw std::invalid_argument("target does not fit width - 1 bits");
  }
  McmInstance inst;
  inst.targets = std::move(targets);
  inst.width = width;
  for (uint64_t t : inst.targets) inst.sources.push_back({static_cast<int64_t>(t), t});
  return inst;
}

uint64_t apply_a_operation(uint64_t u, uint64_t v, const AOperationParams& p) {
  if (p.left_shift_1 < 0 || p.left_shift_2 < 0 || p.right_shift < 0) {
    throw std::invalid_argument("negative shift");
  }
  if (p.left_shift_1 > kMaxWidth || p.left_shift_2 > kMaxWidth || p.right_shift > kMaxWidth ||
      bit_length(u) + p.left_shift_1 > 63 || bit_length(v) + p.left_shift_2 > 63) {
    throw McmError("shift out of range");
  }
  const uint64_t a = u << p.left_shift_1;
  const uint64_t b = v << p.left_shift_2;
  const uint64_t sum = p.subtract ? (a > b ? a - b : b - a) : a + b;
  if (sum == 0) throw McmError("degenerate zero");
  if (p.right_shift > 0 && std::countr_zero(sum) < p.right_shift) throw McmError("invalid r");
  return sum >> p.right_shift;
}

uint64_t AdderGraph::value_of(int index) const {
  if (index == 0) return 1;
  if (index < 0 || index > cost()) throw std::out_of_range("operand index");
  return nodes[static_cast<size_t>(index - 1)].value;
}

int AdderGraph::index_of(uint64_t value) const {
  if (value == 1) return 0;
  for (size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].value == value) return static_cast<int>(k) + 1;
  }
  return -1;
}

int AdderGraph::add(uint64_t value, int lhs, int rhs, const AOperationParams& params) {
  nodes.push_back({value, lhs, rhs, params});
  return cost();
}

VerifyReport verify_solution(const McmInstance& inst, const AdderGraph& graph) {
  VerifyReport report;
  int width = inst.width;
  if (width == 0) {
    for (const auto& n : graph.nodes) width = std::max(width, bit_length(n.value) + 1);
  }
  const int max_shift = std::max(width - 1, 0);
  auto fail = [&](int index, const std::string& why) {
    report.ok = false;
    report.failing_nodes.push_back(index);
    report.diagnostics.push_back("node " + std::to_string(index) + ": " + why);
  };

  for (int k = 1; k <= graph.cost(); ++k) {
    const auto& node = graph.nodes[static_cast<size_t>(k - 1)];
    if (node.lhs < 0 || node.lhs >= k || node.rhs < 0 || node.rhs >= k) {
      fail(k, "operand index not earlier than the node");
      continue;
    }
    const auto& p = node.params;
    if (p.left_shift_1 < 0 || p.left_shift_1 > max_shift || p.left_shift_2 < 0 || p.left_shift_2 > max_shift ||
        p.right_shift < 0 || p.right_shift > max_shift) {
      fail(k, "shift outside [0, " + std::to_string(max_shift) + "]");
      continue;
    }
    const uint64_t u = graph.value_of(node.lhs);
    const uint64_t v = graph.value_of(node.rhs);
    std::string error;
    try {
      if (apply_a_operation(u, v, p) == node.value) continue;
      error = "value " + std::to_string(node.value) + " differs from " + std::to_string(apply_a_operation(u, v, p));
    } catch (const McmError& e) {
      error = e.what();
    }
    // Distinguish wrong shifts from an unreachable value.
    bool reachable = false;
    for (int l1 = 0; l1 <= max_shift && !reachable; ++l1)
      for (int l2 = 0; l2 <= max_shift && !reachable; ++l2)
        for (int r = 0; r <= max_shift && !reachable; ++r)
          for (bool s : {false, true}) {
            try {
              if (apply_a_operation(u, v, {l1, l2, r, s}) == node.value) {
                reachable = true;
                break;
              }
            } catch (const McmError&) {
            }
          }
    fail(k, error + (reachable ? " (reachable from its operands with other shifts)"
                               : " (not reachable from its operands)"));
  }

  for (uint64_t t : inst.targets) {
    if (graph.index_of(t) <= 0) {
      report.ok = false;
      report.diagnostics.push_back("target " + std::to_string(t) + " not covered");
    }
  }
  return report;
}

int64_t CsdDigits::value() const {
  int64_t v = 0;
  for (int8_t d : digits) v = 2 * v + d;
  return v;
}

int CsdDigits::nonzero_count() const {
  return static_cast<int>(std::count_if(digits.begin(), digits.end(), [](int8_t d) { return d != 0; }));
}

CsdDigits to_csd(uint64_t value) {
  std::vector<int8_t> lsb_first;
  while (value != 0) {
    int8_t d = 0;
    if (value & 1) {
      d = (value & 3) == 1 ? 1 : -1;
      value = d == 1 ? value - 1 : value + 1;
    }
    lsb_first.push_back(d);
    value >>= 1;
  }
  return {std::vector<int8_t>(lsb_first.rbegin(), lsb_first.rend())};
}

namespace {

CsdDigits binary_digits(uint64_t value) {
  CsdDigits out;
  for (int b = bit_length(value) - 1; b >= 0; --b) out.digits.push_back(static_cast<int8_t>((value >> b) & 1));
  return out;
}

CsdDigits recode(uint64_t value, Recoding recoding) {
  return recoding == Recoding::Csd ? to_csd(value) : binary_digits(value);
}

}  // namespace

int recoding_upper_bound(const McmInstance& inst, Recoding recoding) {
  int total = 0;
  for (uint64_t t : inst.targets) total += recode(t, recoding).nonzero_count() - 1;
  return total;
}

AdderGraph recoding_witness(const McmInstance& inst, Recoding recoding) {
  AdderGraph graph;
  for (uint64_t t : inst.targets) {
    const CsdDigits d = recode(t, recoding);
    const int top = static_cast<int>(d.digits.size()) - 1;
    // The leading digit is +1; its value is the shift 1 << top.
    int acc_index = -1;
    uint64_t acc = uint64_t{1} << top;
    for (int i = 1; i <= top; ++i) {
      const int8_t digit = d.digits[static_cast<size_t>(i)];
      if (digit == 0) continue;
      const int pos = top - i;
      const bool sub = digit < 0;
      const uint64_t next = sub ? acc - (uint64_t{1} << pos) : acc + (uint64_t{1} << pos);
      int existing = graph.index_of(next);
      if (existing < 0) {
        if (acc_index < 0) {
          existing = graph.add(next, 0, 0, {top, pos, 0, sub});
        } else {
          existing = graph.add(next, acc_index, 0, {0, pos, 0, sub});
        }
      }
      acc_index = existing;
      acc = next;
    }
  }
  return graph;
}

std::optional<SingleOperation> find_single_operation(std::span<const uint64_t> ready, uint64_t target, int width,
                                                     bool right_shifts) {
  if (target == 0 || width < 1 || width > kMaxWidth) return std::nullopt;
  const uint64_t bound = uint64_t{1} << width;
  const int max_shift = width - 1;
  const int max_r = right_shifts ? max_shift : 0;
  for (int r = 0; r <= max_r; ++r) {
    if (bit_length(target) + r > width) break;
    const uint64_t want = target << r;
    for (size_t i = 0; i < ready.size(); ++i) {
      for (int l1 = 0; l1 <= max_shift; ++l1) {
        if (bit_length(ready[i]) + l1 > width) break;
        const uint64_t a = ready[i] << l1;
        for (size_t j = 0; j < ready.size(); ++j) {
          const uint64_t v = ready[j];
          const int li = static_cast<int>(i);
          const int lj = static_cast<int>(j);
          if (a < want) {
            if (int l2 = shift_between(v, want - a, max_shift); l2 >= 0) return SingleOperation{li, lj, {l1, l2, r, false}};
          }
          if (a > want) {
            if (int l2 = shift_between(v, a - want, max_shift); l2 >= 0) return SingleOperation{li, lj, {l1, l2, r, true}};
          }
          if (want + a < bound) {
            if (int l2 = shift_between(v, want + a, max_shift); l2 >= 0) return SingleOperation{li, lj, {l1, l2, r, true}};
          }
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// Depth-first search over ready sets with iterative deepening on the cost.
class OracleSearch {
 public:
  OracleSearch(const McmInstance& inst, const OracleOptions& opts)
      : targets_(inst.targets), width_(inst.width), bound_(uint64_t{1} << inst.width), opts_(opts) {}

  std::optional<OracleResult> run() {
    if (targets_.empty()) return OracleResult{};
    for (int budget = static_cast<int>(targets_.size()); budget <= opts_.max_ops; ++budget) {
      visited_.clear();
      ready_ = {1};
      steps_.clear();
      std::vector<uint64_t> uncovered = targets_;
      if (search(uncovered, budget)) {
        OracleResult result;
        result.cost = static_cast<int>(steps_.size());
        for (size_t k = 0; k < steps_.size(); ++k) {
          result.graph.add(ready_[k + 1], steps_[k].lhs, steps_[k].rhs, steps_[k].params);
        }
        return result;
      }
    }
    return std::nullopt;
  }

 private:
  bool in_ready(uint64_t w) const { return std::find(ready_.begin(), ready_.end(), w) != ready_.end(); }

  void push(uint64_t w, const SingleOperation& op) {
    ready_.push_back(w);
    steps_.push_back(op);
  }
  void pop_to(size_t size) {
    ready_.resize(size);
    steps_.resize(size - 1);
  }

  // Every value one A-operation away from the ready set, excluding values
  // already present and powers of two (a shifted 1 serves those).
  std::vector<uint64_t> successors() const {
    std::vector<char> seen(static_cast<size_t>(bound_), 0);
    std::vector<uint64_t> out;
    const int max_r = opts_.right_shifts ? width_ - 1 : 0;
    auto consider = [&](uint64_t w) {
      for (int r = 0; r <= max_r && w != 0; ++r) {
        if (r > 0) {
          if (w & 1) break;
          w >>= 1;
        }
        if (w >= bound_ || seen[w] || is_power_of_two(w) || in_ready(w)) continue;
        seen[w] = 1;
        out.push_back(w);
      }
    };
    for (size_t i = 0; i < ready_.size(); ++i) {
      for (int l1 = 0; bit_length(ready_[i]) + l1 <= width_; ++l1) {
        const uint64_t a = ready_[i] << l1;
        for (size_t j = i; j < ready_.size(); ++j) {
          for (int l2 = 0; bit_length(ready_[j]) + l2 <= width_; ++l2) {
            const uint64_t b = ready_[j] << l2;
            if (a + b < bound_) consider(a + b);
            consider(a > b ? a - b : b - a);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Values w for which `t` becomes one A-operation away once w is ready.
  void back_candidates(uint64_t t, std::unordered_set<uint64_t>& out) const {
    const int max_r = opts_.right_shifts ? width_ - 1 : 0;
    auto add_quotients = [&](uint64_t x) {
      while (x != 0) {
        out.insert(x);
        if (x & 1) break;
        x >>= 1;
      }
    };
    for (int r = 0; r <= max_r; ++r) {
      if (bit_length(t) + r > width_) break;
      const uint64_t want = t << r;
      for (uint64_t v : ready_) {
        for (int l2 = 0; bit_length(v) + l2 <= width_; ++l2) {
          const uint64_t b = v << l2;
          if (b < want) add_quotients(want - b);
          if (b > want) add_quotients(b - want);
          if (want + b < bound_) add_quotients(want + b);
        }
      }
      // want == w * (2^a +/- 2^b)
      for (int a = 0; a < width_; ++a) {
        for (int b = 0; b < width_; ++b) {
          const uint64_t plus = (uint64_t{1} << a) + (uint64_t{1} << b);
          const uint64_t minus = a > b ? (uint64_t{1} << a) - (uint64_t{1} << b) : 0;
          if (want % plus == 0) out.insert(want / plus);
          if (minus != 0 && want % minus == 0) out.insert(want / minus);
        }
      }
    }
  }

  std::string key() const {
    std::vector<uint64_t> sorted = ready_;
    std::sort(sorted.begin(), sorted.end());
    std::string k;
    for (uint64_t v : sorted) k += std::to_string(v) + ",";
    return k;
  }

  bool search(std::vector<uint64_t> uncovered, int ops_left) {
    const size_t mark = ready_.size();
    // Adding a reachable target never hurts: it must be built anyway.
    for (bool progress = true; progress && ops_left >= 0;) {
      progress = false;
      for (size_t i = 0; i < uncovered.size(); ++i) {
        if (auto op = find_single_operation(ready_, uncovered[i], width_, opts_.right_shifts)) {
          push(uncovered[i], *op);
          uncovered.erase(uncovered.begin() + static_cast<std::ptrdiff_t>(i));
          --ops_left;
          progress = true;
          break;
        }
      }
    }
    if (ops_left < 0) {
      pop_to(mark);
      return false;
    }
    if (uncovered.empty()) return true;
    const int need = static_cast<int>(uncovered.size()) + 1;
    if (ops_left < need || !visited_.insert(key() + "|" + std::to_string(ops_left)).second) {
      pop_to(mark);
      return false;
    }

    const std::vector<uint64_t> succ = successors();
    std::vector<uint64_t> candidates;
    if (ops_left == need) {
      // Last intermediate: some target must become directly reachable.
      std::unordered_set<uint64_t> back;
      for (uint64_t t : uncovered) back_candidates(t, back);
      for (uint64_t w : succ) {
        if (back.count(w)) candidates.push_back(w);
      }
    } else {
      candidates = succ;
    }
    for (uint64_t w : candidates) {
      auto op = find_single_operation(ready_, w, width_, opts_.right_shifts);
      if (!op) continue;
      const size_t inner = ready_.size();
      push(w, *op);
      if (search(uncovered, ops_left - 1)) return true;
      pop_to(inner);
    }
    pop_to(mark);
    return false;
  }

  std::vector<uint64_t> targets_;
  int width_;
  uint64_t bound_;
  OracleOptions opts_;
  std::vector<uint64_t> ready_;
  std::vector<SingleOperation> steps_;
  std::unordered_set<std::string> visited_;
};

}  // namespace

std::optional<OracleResult> brute_force_optimal(const McmInstance& inst, const OracleOptions& options) {
  if (options.max_ops < 0 || options.max_ops > 4) throw std::invalid_argument("oracle limited to max_ops <= 4");
  if (inst.width > 12) throw std::invalid_argument("oracle limited to width <= 12");
  return OracleSearch(inst, options).run();
}

}  // namespace mcmpbs
