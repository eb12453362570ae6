#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcmpbs/core.hpp"
#include "mcmpbs/encoder.hpp"
#include "mcmpbs/optimizer.hpp"

namespace mcmpbs {

// Instance text: integers separated by whitespace, commas or semicolons.
// `#` starts a comment; `# key: value` comments are kept as metadata and
// `# ops: K` sets the operation count of a decision test.
struct InstanceFile {
  std::vector<int64_t> raw;
  McmInstance instance;
  std::optional<int> ops;
  std::map<std::string, std::string> metadata;
};

InstanceFile parse_instance(std::string_view text);
InstanceFile load_instance(const std::string& path);
std::string format_instance(const InstanceFile& file);

// Graph text: one node per line, `value = a <<l1 (+|-) b <<l2 [>>r]`, where a
// and b are values of earlier nodes or 1.
AdderGraph parse_graph(std::string_view text);
AdderGraph load_graph(const std::string& path);
std::string format_graph(const AdderGraph& graph);

struct FirGenSpec {
  int bits = 10;
  int taps = 14;
  uint64_t seed = 1;
};

/// Coefficients drawn uniformly from [1, 2^bits - 1] with a 64-bit Mersenne
/// twister; the normalized set becomes the instance.
InstanceFile generate_fir(const FirGenSpec& spec);

/// Decision tests at the recoding upper bound (SAT) and one below it.
std::pair<InstanceFile, InstanceFile> companion_tests(const InstanceFile& base);

struct BenchInstance {
  std::string id;
  InstanceFile file;  // file.ops must be set
};

struct BenchOptions {
  EncodingConfig config;
  std::vector<Backend> backends{{}};
  double timeout = 300;
  int jobs = 1;
};

struct BenchRecord {
  std::string id;
  int variant = 3;
  int ops = 0;
  uint64_t variables = 0;
  uint64_t constraints = 0;
  TrivialVerdict trivial = TrivialVerdict::None;
  std::vector<SolveOutcome> outcomes;  // one per backend; empty for trivial instances
};

struct BackendSummary {
  std::string backend;
  int solved = 0;
  double average_time = 0;  // over solved instances
  int best = 0;             // instances where this backend was fastest
};

struct VbsEntry {
  std::string id;
  SolveStatus status = SolveStatus::Unknown;
  std::optional<double> time;  // absent when no backend decided
  std::string backend;
};

struct BenchReport {
  std::vector<BenchRecord> records;
  std::vector<BackendSummary> backends;
  std::vector<VbsEntry> vbs;
  int vbs_solved = 0;
  double vbs_average_time = 0;
};

std::vector<BenchInstance> load_bench_dir(const std::string& dir);
BenchReport run_bench(const std::vector<BenchInstance>& instances, const BenchOptions& options);
/// Recomputes backends/vbs aggregates from the records.
void aggregate(BenchReport& report, const std::vector<std::string>& backend_names);
std::string render_table(const BenchReport& report);

}  // namespace mcmpbs
