#include "mcmpbs/pb.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "mcmpbs/core.hpp"

namespace mcmpbs {

uint64_t Model::decode(const BitVec& bits) const {
  uint64_t v = 0;
  for (VarId b : bits.bits) v = (v << 1) | ((*this)[b] ? 1u : 0u);
  return v;
}

VarId PbFormula::new_var() { return VarId{++var_count_}; }

BitVec PbFormula::new_bitvec(size_t width) {
  BitVec out;
  out.bits.reserve(width);
  for (size_t i = 0; i < width; ++i) out.bits.push_back(new_var());
  return out;
}

void PbFormula::reserve_vars(uint32_t count) {
  if (count > var_count_) var_count_ = count;
}

size_t PbFormula::add_constraint(PbConstraint c, std::string annotation) {
  std::set<uint32_t> seen;
  for (const Term& t : c.terms) {
    if (t.var.index == 0 || t.var.index > var_count_) {
      throw std::out_of_range("constraint references unallocated variable x" + std::to_string(t.var.index));
    }
    if (t.coef == 0) throw std::invalid_argument("zero coefficient");
    if (!seen.insert(t.var.index).second) throw std::invalid_argument("duplicate variable in constraint");
  }
  constraints_.push_back(std::move(c));
  annotations_.push_back(annotation.empty() ? current_label_ : std::move(annotation));
  return constraints_.size() - 1;
}

bool constraint_satisfied(const PbConstraint& c, const Model& m) {
  int64_t lhs = 0;
  for (const Term& t : c.terms) {
    if (m[t.var]) lhs += t.coef;
  }
  return c.relation == Relation::Equal ? lhs == c.bound : lhs >= c.bound;
}

std::optional<size_t> PbFormula::first_violation(const Model& m) const {
  if (m.var_count() < var_count_) return 0;
  for (size_t i = 0; i < constraints_.size(); ++i) {
    if (!constraint_satisfied(constraints_[i], m)) return i;
  }
  return std::nullopt;
}

bool PbFormula::satisfied_by(const Model& m) const { return !first_violation(m).has_value(); }

namespace {

void write_terms(std::string& out, const std::vector<Term>& terms, int64_t sign) {
  for (const Term& t : terms) {
    const int64_t c = sign * t.coef;
    out += c > 0 ? "+" : "";
    out += std::to_string(c);
    out += " x";
    out += std::to_string(t.var.index);
    out += ' ';
  }
}

}  // namespace

std::string emit_opb(const PbFormula& f, const OpbOptions& options) {
  size_t lines = 0;
  for (const auto& c : f.constraints()) {
    lines += (options.split_equalities && c.relation == Relation::Equal) ? 2 : 1;
  }
  std::string out = "* #variable= " + std::to_string(f.var_count()) + " #constraint= " + std::to_string(lines) + "\n";
  std::string_view last_label;
  for (size_t i = 0; i < f.constraints().size(); ++i) {
    const auto& c = f.constraints()[i];
    const std::string& label = f.annotations()[i];
    if (options.annotations && !label.empty() && label != last_label) {
      out += "* " + label + "\n";
      last_label = label;
    }
    if (options.split_equalities && c.relation == Relation::Equal) {
      write_terms(out, c.terms, 1);
      out += ">= " + std::to_string(c.bound) + " ;\n";
      write_terms(out, c.terms, -1);
      out += ">= " + std::to_string(-c.bound) + " ;\n";
      continue;
    }
    write_terms(out, c.terms, 1);
    out += c.relation == Relation::Equal ? "= " : ">= ";
    out += std::to_string(c.bound);
    out += " ;\n";
  }
  return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_int(std::string_view s, int64_t& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_var(std::string_view s, uint32_t& out) {
  if (s.size() < 2 || s.front() != 'x') return false;
  auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && out > 0;
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    f(line);
    if (end == text.size()) break;
    start = end + 1;
  }
}

}  // namespace

PbFormula parse_opb(std::string_view text) {
  PbFormula f;
  bool header = false;
  std::string pending;
  size_t line_no = 0;
  for_each_line(text, [&](std::string_view line) {
    ++line_no;
    auto fail = [&](const std::string& why) {
      throw McmError("malformed OPB at line " + std::to_string(line_no) + ": " + why);
    };
    if (line.empty()) return;
    if (line.front() == '*') {
      if (!header && line.find("#variable=") != std::string_view::npos) {
        auto tokens = split_ws(line);
        for (size_t i = 0; i + 1 < tokens.size(); ++i) {
          if (tokens[i] == "#variable=") {
            int64_t v = 0;
            if (!parse_int(tokens[i + 1], v) || v < 0) fail("bad variable count");
            f.reserve_vars(static_cast<uint32_t>(v));
          }
        }
        header = true;
      } else {
        std::string_view label = line.substr(1);
        if (!label.empty() && label.front() == ' ') label.remove_prefix(1);
        pending = std::string(label);
      }
      return;
    }
    auto tokens = split_ws(line);
    if (tokens.empty()) return;
    if (tokens.back() != ";") fail("missing ';'");
    if (tokens.size() < 3) fail("truncated constraint");
    PbConstraint c;
    const std::string_view rel = tokens[tokens.size() - 3];
    if (rel == ">=") {
      c.relation = Relation::GreaterEq;
    } else if (rel == "=") {
      c.relation = Relation::Equal;
    } else {
      fail("unknown relation");
    }
    if (!parse_int(tokens[tokens.size() - 2], c.bound)) fail("bad bound");
    const size_t nterm_tokens = tokens.size() - 3;
    if (nterm_tokens % 2 != 0) fail("unpaired term");
    for (size_t i = 0; i < nterm_tokens; i += 2) {
      Term t;
      uint32_t var = 0;
      if (!parse_int(tokens[i], t.coef)) fail("bad coefficient");
      if (!parse_var(tokens[i + 1], var)) fail("bad variable");
      t.var = VarId{var};
      f.reserve_vars(var);
      c.terms.push_back(t);
    }
    f.add_constraint(std::move(c), pending);
    pending.clear();
  });
  return f;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Sat:
      return "SAT";
    case SolveStatus::Unsat:
      return "UNSAT";
    case SolveStatus::Unknown:
      return "UNKNOWN";
  }
  return "UNKNOWN";
}

SolverOutput parse_model(std::string_view solver_output, uint32_t var_count) {
  SolverOutput out;
  bool have_status = false;
  std::vector<int8_t> values(var_count, -1);
  for_each_line(solver_output, [&](std::string_view line) {
    auto tokens = split_ws(line);
    if (tokens.empty()) return;
    if (tokens[0] == "s") {
      std::string rest;
      for (size_t i = 1; i < tokens.size(); ++i) rest += (i > 1 ? " " : "") + std::string(tokens[i]);
      if (rest == "SATISFIABLE" || rest == "OPTIMUM FOUND") {
        out.status = SolveStatus::Sat;
      } else if (rest == "UNSATISFIABLE") {
        out.status = SolveStatus::Unsat;
      } else if (rest == "UNKNOWN") {
        out.status = SolveStatus::Unknown;
      } else {
        throw McmError("unparsable solver output");
      }
      have_status = true;
    } else if (tokens[0] == "v") {
      for (size_t i = 1; i < tokens.size(); ++i) {
        std::string_view lit = tokens[i];
        const bool neg = !lit.empty() && lit.front() == '-';
        if (neg) lit.remove_prefix(1);
        uint32_t var = 0;
        if (!parse_var(lit, var)) throw McmError("unparsable solver output");
        if (var > var_count) {
          out.warnings.push_back("ignoring value for unknown variable x" + std::to_string(var));
          continue;
        }
        values[var - 1] = neg ? 0 : 1;
      }
    }
  });
  if (!have_status) throw McmError("unparsable solver output");
  if (out.status == SolveStatus::Sat) {
    Model m(var_count);
    size_t defaulted = 0;
    for (uint32_t i = 0; i < var_count; ++i) {
      if (values[i] < 0) ++defaulted;
      m.set(VarId{i + 1}, values[i] == 1);
    }
    if (defaulted > 0) out.warnings.push_back(std::to_string(defaulted) + " unassigned variables defaulted to 0");
    out.model = std::move(m);
  }
  return out;
}

std::string format_solver_output(SolveStatus status, const Model* model) {
  std::string out;
  switch (status) {
    case SolveStatus::Sat:
      out = "s SATISFIABLE\n";
      break;
    case SolveStatus::Unsat:
      out = "s UNSATISFIABLE\n";
      break;
    case SolveStatus::Unknown:
      out = "s UNKNOWN\n";
      break;
  }
  if (status == SolveStatus::Sat && model != nullptr) {
    std::string line = "v";
    for (uint32_t i = 1; i <= model->var_count(); ++i) {
      std::string lit = std::string(" ") + ((*model)[VarId{i}] ? "x" : "-x") + std::to_string(i);
      if (line.size() + lit.size() > 78) {
        out += line + "\n";
        line = "v";
      }
      line += lit;
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace mcmpbs
