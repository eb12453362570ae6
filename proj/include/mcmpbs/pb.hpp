#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcmpbs {

/// 1-based variable identifier, allocated densely by PbFormula.
struct VarId {
  uint32_t index = 0;

  friend bool operator==(VarId, VarId) = default;
  friend auto operator<=>(VarId, VarId) = default;
};

struct Term {
  int64_t coef = 0;
  VarId var;

  friend bool operator==(const Term&, const Term&) = default;
};

enum class Relation { GreaterEq, Equal };

/// sum(coef_i * x_i) (>= | =) bound over 0-1 variables.
struct PbConstraint {
  std::vector<Term> terms;
  Relation relation = Relation::GreaterEq;
  int64_t bound = 0;

  friend bool operator==(const PbConstraint&, const PbConstraint&) = default;
};

/// N variables, most significant bit first.
struct BitVec {
  std::vector<VarId> bits;

  size_t width() const { return bits.size(); }
  VarId operator[](size_t i) const { return bits[i]; }
  friend bool operator==(const BitVec&, const BitVec&) = default;
};

/// Total 0-1 assignment over variables 1..var_count.
class Model {
 public:
  Model() = default;
  explicit Model(uint32_t var_count) : values_(var_count, 0) {}
  explicit Model(std::vector<uint8_t> values) : values_(std::move(values)) {}

  uint32_t var_count() const { return static_cast<uint32_t>(values_.size()); }
  bool operator[](VarId v) const { return values_.at(v.index - 1) != 0; }
  void set(VarId v, bool value) { values_.at(v.index - 1) = value ? 1 : 0; }
  const std::vector<uint8_t>& values() const { return values_; }

  /// Big-endian unsigned value of a bit vector.
  uint64_t decode(const BitVec& bits) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  std::vector<uint8_t> values_;
};

struct FormulaStats {
  uint64_t variables = 0;
  uint64_t constraints = 0;

  friend bool operator==(const FormulaStats&, const FormulaStats&) = default;
};

class PbFormula {
 public:
  VarId new_var();
  BitVec new_bitvec(size_t width);

  /// Validates and appends; returns the constraint index. Duplicates are kept.
  size_t add_constraint(PbConstraint c, std::string annotation = {});

  /// Label attached to the constraints added while the scope is active.
  void set_annotation(std::string label) { current_label_ = std::move(label); }

  uint32_t var_count() const { return var_count_; }
  const std::vector<PbConstraint>& constraints() const { return constraints_; }
  const std::vector<std::string>& annotations() const { return annotations_; }
  FormulaStats stats() const { return {var_count_, constraints_.size()}; }

  /// Whether `m` satisfies every constraint.
  bool satisfied_by(const Model& m) const;
  /// Index of the first violated constraint, if any.
  std::optional<size_t> first_violation(const Model& m) const;

  /// Raises the variable count without adding constraints (used by parsers).
  void reserve_vars(uint32_t count);

 private:
  uint32_t var_count_ = 0;
  std::vector<PbConstraint> constraints_;
  std::vector<std::string> annotations_;
  std::string current_label_;
};

bool constraint_satisfied(const PbConstraint& c, const Model& m);

struct OpbOptions {
  /// Emit `* label` comment lines before annotated constraints.
  bool annotations = false;
  /// Emit every `=` constraint as a `>=` pair for solvers without equality.
  bool split_equalities = false;
};

std::string emit_opb(const PbFormula& f, const OpbOptions& options = {});

/// Reads the subset of OPB written by emit_opb (decision instances, plain
/// variables). Comment lines directly before a constraint become its
/// annotation. Throws McmError on malformed input.
PbFormula parse_opb(std::string_view text);

enum class SolveStatus { Sat, Unsat, Unknown };

std::string_view to_string(SolveStatus s);

struct SolverOutput {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<Model> model;
  std::vector<std::string> warnings;
};

/// Parses `s ...` status and `v ...` value lines of the pseudo-Boolean
/// competition output protocol. Throws McmError("unparsable solver output").
SolverOutput parse_model(std::string_view solver_output, uint32_t var_count);

/// Writes `s`/`v` lines in the same protocol (used by the `solve` command).
std::string format_solver_output(SolveStatus status, const Model* model);

}  // namespace mcmpbs
