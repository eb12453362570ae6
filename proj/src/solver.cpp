#include "mcmpbs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mcmpbs {

namespace {

using Lit = uint32_t;

constexpr Lit mk_lit(uint32_t v, bool negated) { return 2 * v + (negated ? 1u : 0u); }
constexpr uint32_t var_of(Lit l) { return l >> 1; }
constexpr Lit negate(Lit l) { return l ^ 1u; }

struct Reason {
  enum Kind : uint8_t { None, Clause, Pb };
  Kind kind = None;
  uint32_t index = 0;
};

struct Clause {
  std::vector<Lit> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
  uint32_t lbd = 0;
};

struct Watch {
  uint32_t cref;
  Lit blocker;
};

// sum coef_i * lit_i >= degree, coefficients positive and sorted descending.
struct PbRow {
  std::vector<int64_t> coefs;
  std::vector<Lit> lits;
  int64_t degree = 0;
  int64_t slack = 0;  // sum of coefficients of non-false literals minus degree
};

struct Occ {
  uint32_t row;
  int64_t coef;
};

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

class Engine {
 public:
  Engine(const PbFormula& f, const SolverOptions& o) : opts_(o), nv_(f.var_count()) {
    assign_.assign(nv_, -1);
    level_.assign(nv_, 0);
    reason_.assign(nv_, Reason{});
    pos_.assign(nv_, 0);
    phase_.assign(nv_, 0);
    seen_.assign(nv_, 0);
    activity_.assign(nv_, 0);
    heap_pos_.assign(nv_, -1);
    watches_.resize(2 * static_cast<size_t>(nv_));
    occ_.resize(2 * static_cast<size_t>(nv_));
    if (o.timeout_s > 0) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(o.timeout_s));
    }
    for (const PbConstraint& c : f.constraints()) {
      add_geq(c.terms, c.bound, 1);
      if (c.relation == Relation::Equal) add_geq(c.terms, c.bound, -1);
      if (unsat_) break;
    }
    for (uint32_t v = 0; v < nv_; ++v) heap_insert(v);
  }

  SolverResult run() {
    SolverResult r;
    if (!unsat_) {
      // rows already tight before any assignment
      for (uint32_t i = 0; i < rows_.size() && !unsat_; ++i) imply_from_row(i);
    }
    if (unsat_) {
      r.status = SolveStatus::Unsat;
    } else {
      r.status = opts_.mode == SolverMode::Cdcl ? cdcl() : dpll();
    }
    if (r.status == SolveStatus::Sat) {
      Model m(nv_);
      for (uint32_t v = 0; v < nv_; ++v) m.set(VarId{v + 1}, assign_[v] == 1);
      r.model = std::move(m);
    }
    r.stats = stats_;
    return r;
  }

 private:
  int value(Lit l) const {
    const int a = assign_[var_of(l)];
    return a < 0 ? -1 : (a ^ static_cast<int>(l & 1u));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void add_geq(const std::vector<Term>& terms, int64_t bound, int64_t sign) {
    PbRow row;
    int64_t d = sign * bound;
    std::vector<std::pair<int64_t, Lit>> ts;
    for (const Term& t : terms) {
      const int64_t c = sign * t.coef;
      const uint32_t v = t.var.index - 1;
      if (c > 0) {
        ts.push_back({c, mk_lit(v, false)});
      } else {
        ts.push_back({-c, mk_lit(v, true)});
        d += -c;
      }
    }
    if (d <= 0) return;
    int64_t sum = 0;
    for (auto& [c, l] : ts) {
      c = std::min(c, d);
      sum += c;
    }
    if (sum < d) {
      unsat_ = true;
      return;
    }
    if (d == 1 || ts.size() == 1) {
      std::vector<Lit> lits;
      for (auto& [c, l] : ts) lits.push_back(l);
      add_clause(std::move(lits), false);
      return;
    }
    std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [c, l] : ts) {
      row.coefs.push_back(c);
      row.lits.push_back(l);
    }
    row.degree = d;
    row.slack = sum - d;
    const uint32_t idx = static_cast<uint32_t>(rows_.size());
    for (size_t i = 0; i < row.lits.size(); ++i) occ_[row.lits[i]].push_back({idx, row.coefs[i]});
    rows_.push_back(std::move(row));
  }

  // Only called at level 0 before search, or for learnt clauses after backjump.
  uint32_t add_clause(std::vector<Lit> lits, bool learnt) {
    if (lits.size() == 1) {
      const int v = value(lits[0]);
      if (v == 0) {
        unsat_ = true;
      } else if (v < 0) {
        enqueue(lits[0], Reason{});
      }
      return UINT32_MAX;
    }
    const uint32_t cref = static_cast<uint32_t>(clauses_.size());
    Clause c;
    c.lits = std::move(lits);
    c.learnt = learnt;
    watches_[c.lits[0]].push_back({cref, c.lits[1]});
    watches_[c.lits[1]].push_back({cref, c.lits[0]});
    clauses_.push_back(std::move(c));
    return cref;
  }

  void enqueue(Lit l, Reason why) {
    const uint32_t v = var_of(l);
    assign_[v] = (l & 1u) ? 0 : 1;
    level_[v] = decision_level();
    reason_[v] = why;
    pos_[v] = static_cast<uint32_t>(trail_.size());
    trail_.push_back(l);
  }

  // Implications of a row whose slack is already up to date.
  bool imply_from_row(uint32_t idx) {
    PbRow& row = rows_[idx];
    if (row.slack < 0) {
      if (decision_level() == 0) unsat_ = true;
      return false;
    }
    for (size_t i = 0; i < row.lits.size(); ++i) {
      if (row.coefs[i] <= row.slack) break;
      if (value(row.lits[i]) < 0) enqueue(row.lits[i], Reason{Reason::Pb, idx});
    }
    return true;
  }

  Reason propagate() {
    Reason conflict;
    while (qhead_ < trail_.size()) {
      const Lit p = trail_[qhead_++];
      const Lit fl = negate(p);
      ++stats_.propagations;

      bool pb_conflict = false;
      for (const Occ& o : occ_[fl]) {
        PbRow& row = rows_[o.row];
        row.slack -= o.coef;
        if (pb_conflict) continue;
        if (row.slack < 0) {
          pb_conflict = true;
          conflict = Reason{Reason::Pb, o.row};
          continue;
        }
        if (row.slack < row.coefs[0]) imply_from_row(o.row);
      }
      if (pb_conflict) return conflict;

      std::vector<Watch>& ws = watches_[fl];
      size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watch w = ws[i];
        if (value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses_[w.cref];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == fl) std::swap(c.lits[0], c.lits[1]);
        ++i;
        const Lit first = c.lits[0];
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != 0) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[c.lits[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (value(first) == 0) {
          conflict = Reason{Reason::Clause, w.cref};
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, Reason{Reason::Clause, w.cref});
        }
      }
      ws.resize(j);
      if (conflict.kind != Reason::None) return conflict;
    }
    return conflict;
  }

  void backtrack(int level) {
    if (decision_level() <= level) return;
    const size_t lim = trail_lim_[static_cast<size_t>(level)];
    for (size_t i = trail_.size(); i-- > lim;) {
      const Lit l = trail_[i];
      const uint32_t v = var_of(l);
      if (i < qhead_) {
        for (const Occ& o : occ_[negate(l)]) rows_[o.row].slack += o.coef;
      }
      phase_[v] = static_cast<uint8_t>(assign_[v]);
      assign_[v] = -1;
      reason_[v] = Reason{};
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(lim);
    trail_lim_.resize(static_cast<size_t>(level));
    qhead_ = std::min(qhead_, lim);
  }

  // Literals that, all false, force `implied` (or, with no implied literal,
  // falsify the reason). Falsified literals placed on the trail earlier.
  void explain(Reason r, int64_t implied_var, std::vector<Lit>& out) {
    out.clear();
    if (r.kind == Reason::Clause) {
      for (Lit l : clauses_[r.index].lits) {
        if (static_cast<int64_t>(var_of(l)) != implied_var) out.push_back(l);
      }
      return;
    }
    const PbRow& row = rows_[r.index];
    const uint32_t limit = implied_var < 0 ? UINT32_MAX : pos_[static_cast<size_t>(implied_var)];
    for (Lit l : row.lits) {
      if (value(l) == 0 && pos_[var_of(l)] < limit) out.push_back(l);
    }
  }

  void bump_var(uint32_t v) {
    if ((activity_[v] += var_inc_) > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) heap_up(static_cast<size_t>(heap_pos_[v]));
  }

  void bump_clause(Clause& c) {
    if ((c.activity += cla_inc_) > 1e20) {
      for (Clause& x : clauses_) {
        if (x.learnt) x.activity *= 1e-20;
      }
      cla_inc_ *= 1e-20;
    }
  }

  void analyze(Reason conflict, std::vector<Lit>& learnt, int& back_level) {
    learnt.assign(1, 0);
    int path = 0;
    int64_t pvar = -1;
    size_t index = trail_.size();
    Reason r = conflict;
    std::vector<Lit> lits;
    for (;;) {
      if (r.kind == Reason::Clause && clauses_[r.index].learnt) bump_clause(clauses_[r.index]);
      explain(r, pvar, lits);
      for (Lit q : lits) {
        const uint32_t v = var_of(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump_var(v);
        if (level_[v] >= decision_level()) {
          ++path;
        } else {
          learnt.push_back(q);
        }
      }
      while (!seen_[var_of(trail_[--index])]) {
      }
      const Lit p = trail_[index];
      pvar = var_of(p);
      seen_[static_cast<size_t>(pvar)] = 0;
      if (--path == 0) {
        learnt[0] = negate(p);
        break;
      }
      r = reason_[static_cast<size_t>(pvar)];
    }

    // drop literals implied by the rest of the clause
    const std::vector<Lit> marked(learnt.begin() + 1, learnt.end());
    size_t keep = 1;
    for (size_t i = 1; i < learnt.size(); ++i) {
      const uint32_t v = var_of(learnt[i]);
      bool redundant = false;
      if (reason_[v].kind != Reason::None) {
        explain(reason_[v], v, lits);
        redundant = std::all_of(lits.begin(), lits.end(), [&](Lit l) {
          const uint32_t u = var_of(l);
          return seen_[u] || level_[u] == 0;
        });
      }
      if (!redundant) learnt[keep++] = learnt[i];
    }
    for (Lit l : marked) seen_[var_of(l)] = 0;
    learnt.resize(keep);

    back_level = 0;
    if (learnt.size() > 1) {
      size_t best = 1;
      for (size_t i = 2; i < learnt.size(); ++i) {
        if (level_[var_of(learnt[i])] > level_[var_of(learnt[best])]) best = i;
      }
      std::swap(learnt[1], learnt[best]);
      back_level = level_[var_of(learnt[1])];
    }
  }

  uint32_t lbd(const std::vector<Lit>& lits) {
    ++stamp_;
    if (level_stamp_.size() < static_cast<size_t>(decision_level()) + 1) level_stamp_.resize(decision_level() + 1, 0);
    uint32_t n = 0;
    for (Lit l : lits) {
      const int lv = level_[var_of(l)];
      if (level_stamp_[static_cast<size_t>(lv)] != stamp_) {
        level_stamp_[static_cast<size_t>(lv)] = stamp_;
        ++n;
      }
    }
    return n;
  }

  bool locked(uint32_t cref) const {
    const Clause& c = clauses_[cref];
    const uint32_t v = var_of(c.lits[0]);
    return value(c.lits[0]) == 1 && reason_[v].kind == Reason::Clause && reason_[v].index == cref;
  }

  void reduce_db() {
    std::vector<uint32_t> cand;
    for (uint32_t i = 0; i < clauses_.size(); ++i) {
      const Clause& c = clauses_[i];
      if (c.learnt && !c.deleted && c.lbd > 2 && !locked(i)) cand.push_back(i);
    }
    std::sort(cand.begin(), cand.end(), [&](uint32_t a, uint32_t b) {
      const Clause &x = clauses_[a], &y = clauses_[b];
      if (x.lbd != y.lbd) return x.lbd > y.lbd;
      return x.activity < y.activity;
    });
    for (size_t i = 0; i < cand.size() / 2; ++i) {
      clauses_[cand[i]].deleted = true;
      clauses_[cand[i]].lits.shrink_to_fit();
    }
    // compact: remap clause references
    std::vector<uint32_t> remap(clauses_.size(), UINT32_MAX);
    std::vector<Clause> kept;
    kept.reserve(clauses_.size());
    for (uint32_t i = 0; i < clauses_.size(); ++i) {
      if (clauses_[i].deleted) continue;
      remap[i] = static_cast<uint32_t>(kept.size());
      kept.push_back(std::move(clauses_[i]));
    }
    clauses_ = std::move(kept);
    for (uint32_t v = 0; v < nv_; ++v) {
      if (reason_[v].kind == Reason::Clause) reason_[v].index = remap[reason_[v].index];
    }
    for (auto& ws : watches_) ws.clear();
    for (uint32_t i = 0; i < clauses_.size(); ++i) {
      const Clause& c = clauses_[i];
      watches_[c.lits[0]].push_back({i, c.lits[1]});
      watches_[c.lits[1]].push_back({i, c.lits[0]});
    }
  }

  bool out_of_time() {
    if (opts_.stop != nullptr && opts_.stop->load(std::memory_order_relaxed)) return true;
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_) return true;
    return false;
  }

  // Max-activity heap over unassigned variables.
  bool heap_less(uint32_t a, uint32_t b) const { return activity_[a] > activity_[b]; }
  void heap_up(size_t i) {
    const uint32_t v = heap_[i];
    while (i > 0) {
      const size_t p = (i - 1) / 2;
      if (!heap_less(v, heap_[p])) break;
      heap_[i] = heap_[p];
      heap_pos_[heap_[i]] = static_cast<int64_t>(i);
      i = p;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int64_t>(i);
  }
  void heap_down(size_t i) {
    const uint32_t v = heap_[i];
    for (;;) {
      size_t c = 2 * i + 1;
      if (c >= heap_.size()) break;
      if (c + 1 < heap_.size() && heap_less(heap_[c + 1], heap_[c])) ++c;
      if (!heap_less(heap_[c], v)) break;
      heap_[i] = heap_[c];
      heap_pos_[heap_[i]] = static_cast<int64_t>(i);
      i = c;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int64_t>(i);
  }
  void heap_insert(uint32_t v) {
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
  }
  int64_t heap_pop() {
    while (!heap_.empty()) {
      const uint32_t v = heap_[0];
      heap_pos_[v] = -1;
      heap_[0] = heap_.back();
      heap_.pop_back();
      if (!heap_.empty()) {
        heap_pos_[heap_[0]] = 0;
        heap_down(0);
      }
      if (assign_[v] < 0) return v;
    }
    return -1;
  }

  SolveStatus cdcl() {
    if (propagate().kind != Reason::None) return SolveStatus::Unsat;
    std::vector<Lit> learnt;
    uint64_t next_reduce = 4000;
    int restart_no = 0;
    uint64_t budget = static_cast<uint64_t>(luby(2, restart_no) * 100);
    uint64_t since_restart = 0;
    uint64_t ticks = 0;
    for (;;) {
      if ((++ticks & 255) == 0 && out_of_time()) return SolveStatus::Unknown;
      const Reason conflict = propagate();
      if (conflict.kind != Reason::None) {
        ++stats_.conflicts;
        ++since_restart;
        if (decision_level() == 0) return SolveStatus::Unsat;
        int back = 0;
        analyze(conflict, learnt, back);
        const uint32_t l = lbd(learnt);
        backtrack(back);
        if (learnt.size() == 1) {
          enqueue(learnt[0], Reason{});
        } else {
          const uint32_t cref = add_clause(learnt, true);
          clauses_[cref].lbd = l;
          bump_clause(clauses_[cref]);
          enqueue(learnt[0], Reason{Reason::Clause, cref});
        }
        ++stats_.learned;
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;
        continue;
      }
      if (since_restart >= budget) {
        ++stats_.restarts;
        backtrack(0);
        since_restart = 0;
        budget = static_cast<uint64_t>(luby(2, ++restart_no) * 100);
      }
      if (stats_.conflicts >= next_reduce) {
        next_reduce = stats_.conflicts + 4000 + 300 * (stats_.restarts + 1);
        reduce_db();
      }
      const int64_t v = heap_pop();
      if (v < 0) return SolveStatus::Sat;
      ++stats_.decisions;
      trail_lim_.push_back(trail_.size());
      enqueue(mk_lit(static_cast<uint32_t>(v), phase_[static_cast<size_t>(v)] == 0), Reason{});
    }
  }

  SolveStatus dpll() {
    std::vector<uint8_t> flipped;
    uint64_t ticks = 0;
    for (;;) {
      if ((++ticks & 255) == 0 && out_of_time()) return SolveStatus::Unknown;
      if (propagate().kind != Reason::None) {
        ++stats_.conflicts;
        int l = decision_level();
        while (l > 0 && flipped[static_cast<size_t>(l - 1)]) --l;
        if (l == 0) return SolveStatus::Unsat;
        const Lit d = trail_[trail_lim_[static_cast<size_t>(l - 1)]];
        backtrack(l - 1);
        trail_lim_.push_back(trail_.size());
        flipped.resize(static_cast<size_t>(l));
        flipped[static_cast<size_t>(l - 1)] = 1;
        enqueue(negate(d), Reason{});
        continue;
      }
      uint32_t v = 0;
      while (v < nv_ && assign_[v] >= 0) ++v;
      if (v == nv_) return SolveStatus::Sat;
      ++stats_.decisions;
      trail_lim_.push_back(trail_.size());
      flipped.resize(trail_lim_.size());
      flipped.back() = 0;
      enqueue(mk_lit(v, true), Reason{});
    }
  }

  SolverOptions opts_;
  uint32_t nv_;
  bool unsat_ = false;
  std::optional<std::chrono::steady_clock::time_point> deadline_;

  std::vector<int8_t> assign_;
  std::vector<int> level_;
  std::vector<Reason> reason_;
  std::vector<uint32_t> pos_;
  std::vector<uint8_t> phase_;
  std::vector<uint8_t> seen_;
  std::vector<Lit> trail_;
  std::vector<size_t> trail_lim_;
  size_t qhead_ = 0;

  std::vector<Clause> clauses_;
  std::vector<std::vector<Watch>> watches_;
  std::vector<PbRow> rows_;
  std::vector<std::vector<Occ>> occ_;

  std::vector<double> activity_;
  double var_inc_ = 1;
  double cla_inc_ = 1;
  std::vector<uint32_t> heap_;
  std::vector<int64_t> heap_pos_;

  std::vector<uint32_t> level_stamp_;
  uint32_t stamp_ = 0;

  SolverStats stats_;
};

}  // namespace

SolverResult solve_pb(const PbFormula& f, const SolverOptions& options) {
  Engine e(f, options);
  return e.run();
}

}  // namespace mcmpbs
