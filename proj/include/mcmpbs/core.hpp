#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcmpbs {

/// Raised for user-facing failures (bad input, degenerate operations,
/// unreadable solver output). The message is the stable error text.
class McmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Widest value that fits the 64-bit arithmetic used throughout.
inline constexpr int kMaxWidth = 62;

int bit_length(uint64_t value);

/// A normalized MCM instance: positive, odd, distinct targets (each >= 3)
/// plus the working bit width N (bit length of the largest target + 1).
struct McmInstance {
  struct Source {
    int64_t raw;
    uint64_t normalized;  // 1 when the raw value was a power of two (cost-free)
  };

  std::vector<uint64_t> targets;  // ascending
  int width = 0;
  std::vector<Source> sources;

  bool empty() const { return targets.empty(); }
  uint64_t max_target() const { return targets.empty() ? 0 : targets.back(); }
};

McmInstance normalize_targets(std::span<const int64_t> raw);

/// Builds an instance from already-normalized targets with an explicit width.
/// Throws std::invalid_argument when a target is even, < 3 or does not fit.
McmInstance make_instance(std::vector<uint64_t> targets, int width);

struct AOperationParams {
  int left_shift_1 = 0;
  int left_shift_2 = 0;
  int right_shift = 0;
  bool subtract = false;

  friend bool operator==(const AOperationParams&, const AOperationParams&) = default;
};

/// |(u << l1) + (-1)^s (v << l2)| >> r. Throws McmError("degenerate zero")
/// when the sum vanishes and McmError("invalid r") when the right shift would
/// discard set bits.
uint64_t apply_a_operation(uint64_t u, uint64_t v, const AOperationParams& p);

/// Ready set realization. Operand index 0 is the implicit constant 1 and
/// index k >= 1 refers to nodes[k - 1].
struct AdderGraph {
  struct Node {
    uint64_t value = 0;
    int lhs = 0;
    int rhs = 0;
    AOperationParams params;

    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;

  int cost() const { return static_cast<int>(nodes.size()); }
  /// Value of operand index `index` (0 is the constant 1).
  uint64_t value_of(int index) const;
  /// Operand index of `value`, or -1 when absent.
  int index_of(uint64_t value) const;
  /// Appends a node and returns its operand index.
  int add(uint64_t value, int lhs, int rhs, const AOperationParams& params);

  friend bool operator==(const AdderGraph&, const AdderGraph&) = default;
};

struct VerifyReport {
  bool ok = true;
  std::vector<int> failing_nodes;  // 1-based operand indices
  std::vector<std::string> diagnostics;

  explicit operator bool() const { return ok; }
};

VerifyReport verify_solution(const McmInstance& inst, const AdderGraph& graph);

/// Signed digits over {-1, 0, +1}, most significant first.
struct CsdDigits {
  std::vector<int8_t> digits;

  int64_t value() const;
  int nonzero_count() const;
};

CsdDigits to_csd(uint64_t value);

enum class Recoding { Binary, Csd };

/// Sum over targets of (nonzero digits - 1) under the given recoding.
int recoding_upper_bound(const McmInstance& inst, Recoding recoding);
inline int csd_upper_bound(const McmInstance& inst) { return recoding_upper_bound(inst, Recoding::Csd); }
inline int binary_upper_bound(const McmInstance& inst) { return recoding_upper_bound(inst, Recoding::Binary); }

/// Adder graph that realizes every target by accumulating its recoded digits
/// from the most significant end. Shared partial values are reused, so the
/// cost never exceeds recoding_upper_bound().
AdderGraph recoding_witness(const McmInstance& inst, Recoding recoding);

/// One A-operation producing `target` from two members of `ready`.
struct SingleOperation {
  int lhs = 0;  // indices into `ready`
  int rhs = 0;
  AOperationParams params;
};

/// Searches one A-operation over `ready` that yields `target`, under the
/// encoder's arithmetic: operands shifted left stay below 2^width, the
/// (pre right shift) result lies in (0, 2^width), and shifts are in
/// [0, width - 1]. Right shifts are only tried when `right_shifts` is set.
std::optional<SingleOperation> find_single_operation(std::span<const uint64_t> ready, uint64_t target,
                                                     int width, bool right_shifts);

struct OracleOptions {
  int max_ops = 4;
  bool right_shifts = false;
};

struct OracleResult {
  int cost = 0;
  AdderGraph graph;
};

/// Exhaustive minimum-cost search for desk-scale instances (width <= 12,
/// max_ops <= 4). Returns std::nullopt when no ready set with at most
/// max_ops operations covers the targets ("exceeds max_ops").
std::optional<OracleResult> brute_force_optimal(const McmInstance& inst, const OracleOptions& options = {});

}  // namespace mcmpbs
