#include "mcmpbs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

namespace mcmpbs {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw McmError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

}  // namespace

InstanceFile parse_instance(std::string_view text) {
  InstanceFile f;
  int line_no = 0;
  for (const std::string& line : lines_of(text)) {
    ++line_no;
    std::string_view body = line;
    if (size_t hash = body.find('#'); hash != std::string_view::npos) {
      const std::string comment = trim(body.substr(hash + 1));
      if (size_t colon = comment.find(':'); colon != std::string::npos) {
        const std::string key = trim(std::string_view(comment).substr(0, colon));
        const std::string value = trim(std::string_view(comment).substr(colon + 1));
        if (!key.empty() && key.find(' ') == std::string::npos) f.metadata[key] = value;
      }
      body = body.substr(0, hash);
    }
    std::string cleaned(body);
    std::replace_if(cleaned.begin(), cleaned.end(), [](char c) { return c == ',' || c == ';'; }, ' ');
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
      int64_t v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || p != tok.data() + tok.size()) {
        throw McmError("bad instance file: line " + std::to_string(line_no) + ": '" + tok + "' is not an integer");
      }
      f.raw.push_back(v);
    }
  }
  if (f.raw.empty()) throw McmError("bad instance file: no constants");
  if (auto it = f.metadata.find("ops"); it != f.metadata.end()) {
    int k = 0;
    auto [p, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), k);
    if (ec != std::errc{} || p != it->second.data() + it->second.size() || k < 0) {
      throw McmError("bad instance file: ops must be a non-negative integer");
    }
    f.ops = k;
  }
  f.instance = normalize_targets(f.raw);
  return f;
}

InstanceFile load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string format_instance(const InstanceFile& file) {
  std::string out;
  if (file.ops) out += "# ops: " + std::to_string(*file.ops) + "\n";
  for (const auto& [k, v] : file.metadata) {
    if (k == "ops") continue;
    out += "# " + k + ": " + v + "\n";
  }
  for (size_t i = 0; i < file.raw.size(); ++i) out += (i ? " " : "") + std::to_string(file.raw[i]);
  return out + "\n";
}

AdderGraph parse_graph(std::string_view text) {
  static const std::regex node_re(
      R"(^\s*(\d+)\s*=\s*(\d+)\s*(?:<<\s*(\d+))?\s*([+-])\s*(\d+)\s*(?:<<\s*(\d+))?\s*(?:>>\s*(\d+))?\s*$)");
  AdderGraph g;
  int line_no = 0;
  for (std::string line : lines_of(text)) {
    ++line_no;
    if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, node_re)) {
      throw McmError("bad graph file: line " + std::to_string(line_no) + ": expected 'value = a <<l1 +|- b <<l2 [>>r]'");
    }
    auto num = [&](int i) -> uint64_t { return m[i].matched ? std::stoull(m[i].str()) : 0; };
    auto operand = [&](int i) {
      const int idx = g.index_of(num(i));
      if (idx < 0) {
        throw McmError("bad graph file: line " + std::to_string(line_no) + ": unknown operand " + m[i].str());
      }
      return idx;
    };
    AOperationParams p;
    p.left_shift_1 = static_cast<int>(num(3));
    p.left_shift_2 = static_cast<int>(num(6));
    p.right_shift = static_cast<int>(num(7));
    p.subtract = m[4].str() == "-";
    g.add(num(1), operand(2), operand(5), p);
  }
  return g;
}

AdderGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

std::string format_graph(const AdderGraph& graph) {
  std::string out;
  for (const auto& n : graph.nodes) {
    out += std::to_string(n.value) + " = " + std::to_string(graph.value_of(n.lhs)) + " <<" +
           std::to_string(n.params.left_shift_1) + (n.params.subtract ? " - " : " + ") +
           std::to_string(graph.value_of(n.rhs)) + " <<" + std::to_string(n.params.left_shift_2);
    if (n.params.right_shift > 0) out += " >>" + std::to_string(n.params.right_shift);
    out += "\n";
  }
  return out;
}

InstanceFile generate_fir(const FirGenSpec& spec) {
  if (spec.taps <= 0) throw McmError("taps must be positive");
  if (spec.bits < 1 || spec.bits > kMaxWidth - 1) throw McmError("bits out of range");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int64_t> dist(1, (int64_t{1} << spec.bits) - 1);
  InstanceFile f;
  for (int i = 0; i < spec.taps; ++i) f.raw.push_back(dist(rng));
  f.metadata["generator"] = "fir";
  f.metadata["bits"] = std::to_string(spec.bits);
  f.metadata["taps"] = std::to_string(spec.taps);
  f.metadata["seed"] = std::to_string(spec.seed);
  f.instance = normalize_targets(f.raw);
  return f;
}

std::pair<InstanceFile, InstanceFile> companion_tests(const InstanceFile& base) {
  const int ub = csd_upper_bound(base.instance);
  if (ub < 2) throw McmError("upper bound " + std::to_string(ub) + " leaves no companion test");
  InstanceFile sat = base, below = base;
  sat.ops = ub;
  sat.metadata["expect"] = "SAT";
  below.ops = ub - 1;
  below.metadata["expect"] = "?";
  return {sat, below};
}

std::vector<BenchInstance> load_bench_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw McmError("not a directory: " + dir);
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.empty() || name[0] == '.' || e.path().extension() == ".json") continue;
    paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<BenchInstance> out;
  for (const auto& p : paths) {
    BenchInstance b{p.stem().string(), load_instance(p.string())};
    if (!b.file.ops) throw McmError("bench instance " + p.string() + " has no '# ops:' line");
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

BenchRecord bench_one(const BenchInstance& bi, const BenchOptions& options) {
  BenchRecord r;
  r.id = bi.id;
  r.variant = static_cast<int>(options.config.variant);
  r.ops = bi.file.ops.value_or(0);
  if (bi.file.instance.empty()) {
    r.trivial = TrivialVerdict::Sat;
    return r;
  }
  if (r.ops < 1) {
    r.trivial = TrivialVerdict::Unsat;
    return r;
  }
  EncodingConfig cfg = options.config;
  cfg.ops = r.ops;
  EncodeResult enc = encode_mcm(bi.file.instance, cfg);
  r.variables = enc.formula.var_count();
  r.constraints = enc.formula.constraints().size();
  r.trivial = enc.trivial_verdict;
  if (r.trivial != TrivialVerdict::None) return r;  // not run
  for (const Backend& b : options.backends) {
    SolveOutcome o;
    try {
      o = solve(enc.formula, b, options.timeout);
    } catch (const McmError& e) {
      o.backend = b.name();
      o.warnings.push_back(e.what());
    }
    if (o.status == SolveStatus::Sat && o.model) {
      try {
        decode_solution(enc, *o.model);
      } catch (const McmError& e) {
        o.warnings.push_back(e.what());
      }
    }
    o.model.reset();
    r.outcomes.push_back(std::move(o));
  }
  return r;
}

}  // namespace

BenchReport run_bench(const std::vector<BenchInstance>& instances, const BenchOptions& options) {
  if (options.backends.empty()) throw McmError("missing backend");
  BenchReport report;
  report.records.resize(instances.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < instances.size(); i = next++) report.records[i] = bench_one(instances[i], options);
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(instances.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  std::vector<std::string> names;
  for (const Backend& b : options.backends) names.push_back(b.name());
  aggregate(report, names);
  return report;
}

void aggregate(BenchReport& report, const std::vector<std::string>& backend_names) {
  report.backends.clear();
  report.vbs.clear();
  for (const auto& n : backend_names) report.backends.push_back({n});
  std::vector<double> totals(backend_names.size(), 0);
  double vbs_total = 0;
  report.vbs_solved = 0;
  for (const BenchRecord& r : report.records) {
    if (r.trivial != TrivialVerdict::None) continue;
    VbsEntry v;
    v.id = r.id;
    std::optional<size_t> fastest;
    for (size_t i = 0; i < r.outcomes.size() && i < backend_names.size(); ++i) {
      const SolveOutcome& o = r.outcomes[i];
      if (o.status == SolveStatus::Unknown) continue;
      ++report.backends[i].solved;
      totals[i] += o.elapsed;
      if (!fastest || o.elapsed < r.outcomes[*fastest].elapsed) fastest = i;
    }
    if (fastest) {
      const SolveOutcome& o = r.outcomes[*fastest];
      ++report.backends[*fastest].best;
      v.status = o.status;
      v.time = o.elapsed;
      v.backend = backend_names[*fastest];
      ++report.vbs_solved;
      vbs_total += o.elapsed;
    }
    report.vbs.push_back(std::move(v));
  }
  for (size_t i = 0; i < report.backends.size(); ++i) {
    const int s = report.backends[i].solved;
    report.backends[i].average_time = s > 0 ? totals[i] / s : 0;
  }
  report.vbs_average_time = report.vbs_solved > 0 ? vbs_total / report.vbs_solved : 0;
}

std::string render_table(const BenchReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(16) << "instance" << std::right << std::setw(5) << "ops" << std::setw(10) << "vars"
      << std::setw(11) << "cons";
  for (const auto& b : report.backends) out << std::setw(16) << b.backend.substr(0, 15);
  out << std::setw(16) << "VBS" << "\n";
  auto cell = [](const SolveOutcome& o) {
    std::ostringstream c;
    if (o.status == SolveStatus::Unknown) {
      c << "T/O";
    } else {
      c << std::fixed << std::setprecision(2) << o.elapsed << (o.status == SolveStatus::Sat ? " S" : " U");
    }
    return c.str();
  };
  size_t vi = 0;
  for (const BenchRecord& r : report.records) {
    out << std::left << std::setw(16) << r.id.substr(0, 15) << std::right << std::setw(5) << r.ops << std::setw(10)
        << r.variables << std::setw(11) << r.constraints;
    if (r.trivial != TrivialVerdict::None) {
      out << "  trivial " << to_string(r.trivial) << " (not run)\n";
      continue;
    }
    for (const auto& o : r.outcomes) out << std::setw(16) << cell(o);
    const VbsEntry& v = report.vbs[vi++];
    SolveOutcome vo;
    vo.status = v.status;
    vo.elapsed = v.time.value_or(0);
    out << std::setw(16) << cell(vo) << "\n";
  }
  out << std::left << std::setw(42) << "solved";
  for (const auto& b : report.backends) out << std::right << std::setw(16) << b.solved;
  out << std::setw(16) << report.vbs_solved << "\n";
  out << std::left << std::setw(42) << "average time (solved)";
  for (const auto& b : report.backends) out << std::right << std::setw(16) << std::fixed << std::setprecision(2) << b.average_time;
  out << std::setw(16) << report.vbs_average_time << "\n";
  out << std::left << std::setw(42) << "best";
  for (const auto& b : report.backends) out << std::right << std::setw(16) << b.best;
  out << "\n";
  return out.str();
}

}  // namespace mcmpbs
