#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcmpbs/core.hpp"
#include "mcmpbs/encoder.hpp"
#include "mcmpbs/pb.hpp"

namespace mcmpbs {

/// Environment variable holding the default external solver command.
inline constexpr const char* kSolverEnv = "MCMPBS_SOLVER";

struct Backend {
  enum class Kind { Internal, Dpll, External };

  Kind kind = Kind::Internal;
  std::string command;  // External: shell template, `{opb}` is replaced by the file path

  /// "internal" (or "cdcl"), "dpll", "external" (command from MCMPBS_SOLVER)
  /// or a command template. Templates without `{opb}` get the path appended.
  static Backend parse(std::string_view spec);
  std::string name() const;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<Model> model;
  double elapsed = 0;  // seconds
  std::string backend;
  std::vector<std::string> warnings;
};

/// Runs one backend. timeout_s <= 0 means no limit. External backends get the
/// formula as an OPB file and are killed (with their process group) on expiry.
/// Throws McmError when the executable is missing or its output unparsable.
SolveOutcome solve(const PbFormula& f, const Backend& backend, double timeout_s,
                   const std::atomic<bool>* stop = nullptr);

/// Races the backends on one formula; the first SAT/UNSAT answer wins and the
/// others are stopped. UNKNOWN when none decides in time.
SolveOutcome solve_portfolio(const PbFormula& f, std::span<const Backend> backends, double timeout_s);

/// Reads the adder graph out of a model of res.formula. Throws
/// McmError("decode failure") when the model does not satisfy the formula or
/// the values cannot be explained by A-operations.
AdderGraph decode_solution(const EncodeResult& res, const Model& m);

struct LevelResult {
  int ops = 0;
  SolveOutcome outcome;
};

struct OptimizationReport {
  int optimal_ops = 0;
  bool proven = false;
  int upper_bound = 0;
  AdderGraph graph;
  std::vector<LevelResult> per_level;
};

struct OptimizeOptions {
  EncodingConfig config;               // ops is overwritten per level
  std::vector<Backend> backends{{}};   // more than one runs a portfolio per level
  double per_level_timeout = 300;
  std::optional<int> upper_bound;      // CSD bound when absent
};

/// Linear descent from upper_bound - 1 while the level is satisfiable.
OptimizationReport optimal_mcm(const McmInstance& inst, const OptimizeOptions& options = {});

}  // namespace mcmpbs
