#pragma once

#include <atomic>
#include <cstdint>
#include <optional>

#include "mcmpbs/pb.hpp"

namespace mcmpbs {

/// Cdcl: clause learning with non-chronological backjumps, activity-based
/// branching and restarts. Dpll: lowest-index decisions (0 first),
/// chronological backtracking, no learning.
enum class SolverMode { Cdcl, Dpll };

struct SolverOptions {
  SolverMode mode = SolverMode::Cdcl;
  double timeout_s = 0;  // wall clock; 0 disables
  const std::atomic<bool>* stop = nullptr;
};

struct SolverStats {
  uint64_t decisions = 0;
  uint64_t conflicts = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
  uint64_t learned = 0;
};

struct SolverResult {
  SolveStatus status = SolveStatus::Unknown;
  std::optional<Model> model;
  SolverStats stats;
};

/// Decides the formula with counter (slack) propagation on pseudo-Boolean
/// rows and watched literals on clauses. Unknown only on timeout or stop.
SolverResult solve_pb(const PbFormula& f, const SolverOptions& options = {});

}  // namespace mcmpbs
