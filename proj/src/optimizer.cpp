#include "mcmpbs/optimizer.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "mcmpbs/solver.hpp"

namespace mcmpbs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    std::string tmpl = (std::filesystem::temp_directory_path() / "mcmpbs-XXXXXX.opb").string();
    const int fd = mkstemps(tmpl.data(), 4);
    if (fd < 0) throw McmError("cannot create temporary OPB file");
    path_ = tmpl;
    size_t off = 0;
    while (off < contents.size()) {
      const ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
      if (n <= 0) {
        ::close(fd);
        throw McmError("cannot write temporary OPB file");
      }
      off += static_cast<size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProcessResult {
  std::string output;
  int exit_code = -1;
  bool killed = false;
};

ProcessResult run_command(const std::string& cmd, double timeout_s, const std::atomic<bool>* stop) {
  int fds[2];
  if (pipe(fds) != 0) throw McmError("cannot create pipe");
  const pid_t pid = fork();
  if (pid < 0) throw McmError("cannot fork");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(fds[1], STDOUT_FILENO);
    const int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  close(fds[1]);
  ProcessResult r;
  const auto t0 = Clock::now();
  char buf[65536];
  for (;;) {
    if ((timeout_s > 0 && seconds_since(t0) > timeout_s) ||
        (stop != nullptr && stop->load(std::memory_order_relaxed))) {
      kill(-pid, SIGKILL);
      r.killed = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int ready = poll(&p, 1, 50);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    r.output.append(buf, static_cast<size_t>(n));
  }
  close(fds[0]);
  int status = 0;
  if (!r.killed && timeout_s > 0) {
    // output closed; give the process the rest of the budget to exit
    while (waitpid(pid, &status, WNOHANG) == 0) {
      if (seconds_since(t0) > timeout_s || (stop != nullptr && stop->load())) {
        kill(-pid, SIGKILL);
        r.killed = true;
        waitpid(pid, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  } else {
    waitpid(pid, &status, 0);
  }
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

}  // namespace

Backend Backend::parse(std::string_view spec) {
  Backend b;
  if (spec.empty() || spec == "internal" || spec == "cdcl") return b;
  if (spec == "dpll") {
    b.kind = Kind::Dpll;
    return b;
  }
  b.kind = Kind::External;
  if (spec == "external") {
    const char* env = std::getenv(kSolverEnv);
    if (env == nullptr || *env == '\0') throw McmError(std::string("backend 'external' needs ") + kSolverEnv);
    b.command = env;
  } else {
    b.command = std::string(spec);
  }
  if (b.command.find("{opb}") == std::string::npos) b.command += " {opb}";
  return b;
}

std::string Backend::name() const {
  switch (kind) {
    case Kind::Internal:
      return "internal";
    case Kind::Dpll:
      return "dpll";
    case Kind::External:
      return command;
  }
  return "?";
}

SolveOutcome solve(const PbFormula& f, const Backend& backend, double timeout_s, const std::atomic<bool>* stop) {
  SolveOutcome out;
  out.backend = backend.name();
  const auto t0 = Clock::now();
  if (backend.kind != Backend::Kind::External) {
    SolverOptions o;
    o.mode = backend.kind == Backend::Kind::Dpll ? SolverMode::Dpll : SolverMode::Cdcl;
    o.timeout_s = timeout_s;
    o.stop = stop;
    SolverResult r = solve_pb(f, o);
    out.status = r.status;
    out.model = std::move(r.model);
    out.elapsed = seconds_since(t0);
    return out;
  }
  TempFile file(emit_opb(f));
  std::string cmd = backend.command;
  for (size_t at = cmd.find("{opb}"); at != std::string::npos; at = cmd.find("{opb}", at)) {
    const std::string q = shell_quote(file.path());
    cmd.replace(at, 5, q);
    at += q.size();
  }
  ProcessResult pr = run_command(cmd, timeout_s, stop);
  out.elapsed = seconds_since(t0);
  if (pr.killed) {
    out.status = SolveStatus::Unknown;
    return out;
  }
  SolverOutput so;
  try {
    so = parse_model(pr.output, f.var_count());
  } catch (const McmError&) {
    if (pr.exit_code == 127) throw McmError("backend executable missing: " + backend.command);
    throw;
  }
  out.status = so.status;
  out.model = std::move(so.model);
  out.warnings = std::move(so.warnings);
  return out;
}

SolveOutcome solve_portfolio(const PbFormula& f, std::span<const Backend> backends, double timeout_s) {
  if (backends.empty()) throw McmError("no backend configured");
  if (backends.size() == 1) return solve(f, backends[0], timeout_s);
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::optional<SolveOutcome> winner;
  std::vector<SolveOutcome> results(backends.size());
  std::vector<std::string> errors;
  const auto t0 = Clock::now();
  {
    std::vector<std::jthread> workers;
    for (size_t i = 0; i < backends.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          SolveOutcome o = solve(f, backends[i], timeout_s, &stop);
          std::lock_guard lock(mu);
          if (o.status != SolveStatus::Unknown && !winner) {
            winner = o;
            stop = true;
          }
          results[i] = std::move(o);
        } catch (const std::exception& e) {
          std::lock_guard lock(mu);
          errors.push_back(backends[i].name() + ": " + e.what());
        }
      });
    }
  }
  if (winner) {
    winner->elapsed = seconds_since(t0);
    for (auto& e : errors) winner->warnings.push_back(e);
    return *winner;
  }
  if (errors.size() == backends.size()) throw McmError(errors.front());
  SolveOutcome out;
  out.elapsed = seconds_since(t0);
  out.backend = "portfolio";
  out.warnings = errors;
  return out;
}

namespace {

int selected_index(const Model& m, const BitVec& selectors) {
  for (size_t k = 0; k < selectors.width(); ++k) {
    if (m[selectors[k]]) return static_cast<int>(k);
  }
  return -1;
}

int single_bit(uint64_t v) { return v != 0 && (v & (v - 1)) == 0 ? bit_length(v) - 1 : -1; }

[[noreturn]] void decode_failure(const std::string& why) { throw McmError("decode failure: " + why); }

}  // namespace

AdderGraph decode_solution(const EncodeResult& res, const Model& m) {
  if (res.trivial_verdict == TrivialVerdict::Sat && res.trivial_witness) return *res.trivial_witness;
  if (res.trivial_verdict == TrivialVerdict::Unsat) decode_failure("the encoding is trivially unsatisfiable");
  if (m.var_count() < res.formula.var_count()) decode_failure("model is shorter than the formula");
  if (auto bad = res.formula.first_violation(m)) {
    decode_failure("model violates constraint " + std::to_string(*bad));
  }
  const int width = res.plan.width;
  AdderGraph g;
  std::vector<int> slot_index(res.ops.size() + 1, -1);  // slot -> operand index, -1 when dropped

  for (size_t s = 0; s < res.ops.size(); ++s) {
    const OpEncoding& op = res.ops[s];
    const uint64_t value = m.decode(op.value);
    if (value == 0) continue;
    if (int existing = g.index_of(value); existing >= 0) {
      slot_index[s + 1] = existing;
      continue;
    }
    std::optional<std::pair<int, int>> operands;
    AOperationParams params;
    if (op.fixed) {
      const auto& node = res.plan.fixed.nodes[s];
      // fixed nodes refer to the constant and earlier fixed slots only
      const auto map = [&](int idx) { return idx == 0 ? 0 : slot_index[static_cast<size_t>(idx)]; };
      if (map(node.lhs) >= 0 && map(node.rhs) >= 0) {
        operands = {map(node.lhs), map(node.rhs)};
        params = node.params;
      }
    } else {
      const Candidate* chosen = nullptr;
      const uint64_t pre = m.decode(op.pre_shift);
      for (const Candidate& c : op.candidates) {
        if (m[c.selector] && m.decode(c.result) == pre) {
          chosen = &c;
          break;
        }
      }
      if (chosen == nullptr) decode_failure("no candidate selected for operation " + std::to_string(s + 1));
      params.right_shift = op.right_shift_selectors.width() ? selected_index(m, op.right_shift_selectors) : 0;
      const auto operand = [&](const OperandRef& r, int& shift) -> int {
        if (r.source_op == 0) {
          shift = single_bit(m.decode(r.bits));
          return shift < 0 ? -1 : 0;
        }
        shift = selected_index(m, r.shift_selectors);
        return shift < 0 ? -1 : slot_index[static_cast<size_t>(r.source_op)];
      };
      const CandidateKind k = chosen->kind;
      if (k == CandidateKind::Exactly2) {
        const uint64_t bits = m.decode(chosen->lhs.bits);
        const uint64_t low = bits & (~bits + 1);
        params.left_shift_1 = single_bit(bits - low);
        params.left_shift_2 = single_bit(low);
        if (params.left_shift_1 >= 0 && params.left_shift_2 >= 0) operands = {0, 0};
      } else {
        int a = operand(chosen->lhs, params.left_shift_1);
        int b = operand(chosen->rhs, params.left_shift_2);
        params.subtract = k != CandidateKind::ShiftPlusPower && k != CandidateKind::PairSum;
        if (k == CandidateKind::PairDifferenceSwapped) {
          std::swap(a, b);
          std::swap(params.left_shift_1, params.left_shift_2);
        }
        if (a >= 0 && b >= 0) operands = {a, b};
      }
    }
    bool ok = false;
    if (operands) {
      try {
        ok = apply_a_operation(g.value_of(operands->first), g.value_of(operands->second), params) == value;
      } catch (const McmError&) {
      }
    }
    if (!ok) {
      // degenerate operands (dropped zero or duplicate slots): search directly
      std::vector<uint64_t> ready{1};
      for (const auto& n : g.nodes) ready.push_back(n.value);
      auto found = find_single_operation(ready, value, width, res.plan.right_shifts);
      if (!found) decode_failure("value " + std::to_string(value) + " of operation " + std::to_string(s + 1) +
                                 " is not one operation away from earlier values");
      operands = {found->lhs, found->rhs};
      params = found->params;
    }
    slot_index[s + 1] = g.add(value, operands->first, operands->second, params);
  }
  VerifyReport report = verify_solution(res.instance, g);
  if (!report.ok) {
    decode_failure(report.diagnostics.empty() ? std::string("graph does not verify") : report.diagnostics.front());
  }
  return g;
}

OptimizationReport optimal_mcm(const McmInstance& inst, const OptimizeOptions& options) {
  OptimizationReport rep;
  if (inst.empty()) {
    rep.proven = true;
    return rep;
  }
  const int ub = options.upper_bound.value_or(csd_upper_bound(inst));
  if (ub <= 0) throw McmError("upper bound must be positive for a non-empty instance");
  rep.upper_bound = ub;
  rep.optimal_ops = ub;
  std::optional<AdderGraph> best;

  auto run_level = [&](int k) -> SolveStatus {
    LevelResult level;
    level.ops = k;
    if (k == 0) {
      level.outcome.status = SolveStatus::Unsat;
      level.outcome.backend = "trivial";
      rep.per_level.push_back(std::move(level));
      return SolveStatus::Unsat;
    }
    EncodingConfig cfg = options.config;
    cfg.ops = k;
    EncodeResult enc = encode_mcm(inst, cfg);
    if (enc.trivial_verdict != TrivialVerdict::None) {
      level.outcome.status = enc.trivial_verdict == TrivialVerdict::Sat ? SolveStatus::Sat : SolveStatus::Unsat;
      level.outcome.backend = "trivial";
      if (enc.trivial_verdict == TrivialVerdict::Sat) best = *enc.trivial_witness;
    } else {
      level.outcome = solve_portfolio(enc.formula, options.backends, options.per_level_timeout);
      if (level.outcome.status == SolveStatus::Sat) best = decode_solution(enc, *level.outcome.model);
    }
    const SolveStatus st = level.outcome.status;
    rep.per_level.push_back(std::move(level));
    return st;
  };

  for (int k = ub - 1; k >= 0; --k) {
    const SolveStatus st = run_level(k);
    if (st == SolveStatus::Sat) {
      rep.optimal_ops = k;
      continue;
    }
    rep.proven = st == SolveStatus::Unsat;
    break;
  }
  if (!best) {
    for (Recoding r : {Recoding::Csd, Recoding::Binary}) {
      AdderGraph w = recoding_witness(inst, r);
      if (w.cost() <= ub) {
        best = std::move(w);
        break;
      }
    }
  }
  if (!best) {
    // an upper bound below the recoding bounds has to be confirmed by a solve
    const SolveStatus st = run_level(ub);
    if (st != SolveStatus::Sat) throw McmError("no solution found with upper_bound operations");
  }
  rep.graph = std::move(*best);
  return rep;
}

}  // namespace mcmpbs
