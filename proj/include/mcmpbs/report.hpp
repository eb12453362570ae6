#pragma once

#include <nlohmann/json.hpp>

#include "mcmpbs/harness.hpp"
#include "mcmpbs/optimizer.hpp"

namespace mcmpbs {

using nlohmann::json;

json to_json(const AdderGraph& g);
AdderGraph graph_from_json(const json& j);

json to_json(const SolveOutcome& o, bool with_model = false);
SolveOutcome outcome_from_json(const json& j);

json to_json(const OptimizationReport& r);
OptimizationReport optimization_from_json(const json& j);

json to_json(const BenchReport& r);
BenchReport bench_from_json(const json& j);

json stats_json(const EncodeResult& r);

}  // namespace mcmpbs
