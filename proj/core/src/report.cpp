#include "cartan/report.hpp"

#include "cartan/parse.hpp"

#include <algorithm>
#include <cstdio>

namespace cartan {

void Report::put(const std::string& key, std::string value) {
  entries_.emplace_back(key, std::move(value));
}
void Report::put(const std::string& key, const Expr& value) {
  put(key, format_expr(value));
}
void Report::put(const std::string& key, const Rational& value) {
  put(key, to_string(value));
}
void Report::put(const std::string& key, double value) {
  put(key, format_double(value));
}
void Report::put(const std::string& key, long value) {
  put(key, std::to_string(value));
}
void Report::text(const std::string& line) {
  text_ += line;
  text_ += '\n';
}

std::string Report::kv() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string theta_pair(int j, int k) {
  return "theta" + std::to_string(j) + "^theta" + std::to_string(k);
}

// Slot coefficients of one structure row in (j,k) order, each rendered as a
// signed rational or an invariant name.
std::vector<std::pair<std::pair<int, int>, std::string>> row_slots(
    const PipelineResult& pr, int row) {
  std::vector<std::pair<std::pair<int, int>, std::string>> out;
  for (const auto& [slot, c] : pr.constants) {
    auto [i, j, k] = slot;
    if (i == row) out.push_back({{j, k}, to_string(c)});
  }
  for (const auto& [slot, name] : pr.invariant_slots) {
    auto [i, j, k] = slot;
    if (i == row) out.push_back({{j, k}, name});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string render_structure_row(const PipelineResult& pr, int row) {
  std::string rhs;
  for (const auto& [jk, coeff] : row_slots(pr, row)) {
    bool negative = coeff.size() > 1 && coeff[0] == '-';
    std::string mag = negative ? coeff.substr(1) : coeff;
    if (rhs.empty())
      rhs = negative ? "-" : "";
    else
      rhs += negative ? " - " : " + ";
    if (mag != "1") {
      rhs += mag;
      rhs += ' ';
    }
    rhs += theta_pair(jk.first, jk.second);
  }
  if (rhs.empty()) rhs = "0";
  return "d theta" + std::to_string(row) + " = " + rhs;
}

Report report_derivation(const PipelineResult& pr,
                         const std::string& operator_name) {
  Report rep;
  const std::string mode = to_string(pr.mode);
  rep.put("mode", mode);
  rep.put("operator", operator_name);
  for (int row = 1; row <= 6; ++row)
    for (const auto& [jk, coeff] : row_slots(pr, row))
      rep.put(mode + ".dtheta." + std::to_string(row) + ".coeff." +
                  std::to_string(jk.first) + "_" + std::to_string(jk.second),
              coeff);
  for (const auto& [name, expr] : pr.invariants)
    rep.put(mode + ".invariant." + name, expr);
  for (const auto& [param, expr] : pr.bindings)
    rep.put(mode + ".binding.a" + std::to_string(param), expr);

  rep.text("final structure equations (" + mode + " equivalence, operator " +
           operator_name + "):");
  for (int row = 1; row <= 6; ++row)
    rep.text("  " + render_structure_row(pr, row));
  rep.text("invariants:");
  for (const auto& [name, expr] : pr.invariants)
    rep.text("  " + name + " = " + format_expr(expr));
  rep.text("group parameter bindings:");
  for (const auto& [param, expr] : pr.bindings)
    rep.text("  a" + std::to_string(param) + " = " + format_expr(expr));
  return rep;
}

InvariantEvaluation evaluate_invariants(const OperatorSpec& op, Mode mode,
                                        const JetPoint& jp) {
  InvariantEvaluation ev;
  ev.mode = mode;

  std::map<std::string, Expr> generic = generic_pipeline(mode).invariants;
  generic.emplace("I", invariant_expr(OperatorSpec::generic(), mode));

  std::map<std::string, Expr> shown = generic;
  if (!op.is_generic() && specializable(op)) {
    shown = run_pipeline(op, mode).invariants;
    shown.emplace("I", invariant_expr(op, mode));
  } else if (!op.is_generic()) {
    ev.symbolic_generic = true;
  }

  int order = 1;
  for (const auto& [name, e] : generic)
    order = std::max(order, coefficient_order(e));
  std::map<Atom, double> env = jp.env();
  auto coeff = op.coefficient_env(jp.x, order);
  env.insert(coeff.begin(), coeff.end());

  for (const auto& [name, expr] : generic) {
    InvariantValue v;
    v.name = name;
    v.symbolic = shown.at(name);
    v.value = expr.evaluate(env);
    ev.values.push_back(std::move(v));
  }
  return ev;
}

Report report_invariants(const InvariantEvaluation& ev, const JetPoint& jp,
                         const std::string& operator_name) {
  Report rep;
  const std::string mode = to_string(ev.mode);
  rep.put("mode", mode);
  rep.put("operator", operator_name);
  const char* coord[6] = {"x", "u", "p", "q", "r", "s"};
  const double value[6] = {jp.x, jp.u, jp.p, jp.q, jp.r, jp.s};
  for (int i = 0; i < 6; ++i)
    rep.put(std::string("point.") + coord[i], value[i]);
  for (const InvariantValue& v : ev.values) {
    rep.put("invariant." + v.name + ".value", v.value);
    rep.put("invariant." + v.name + ".expr", v.symbolic);
  }
  rep.put("symbolic", ev.symbolic_generic ? "generic" : "operator");

  std::string at = "(";
  for (int i = 0; i < 6; ++i) {
    if (i) at += ", ";
    at += std::string(coord[i]) + "=" + format_double(value[i]);
  }
  at += ")";
  rep.text("invariants of " + operator_name + " (" + mode + " equivalence) at " +
           at + ":");
  for (const InvariantValue& v : ev.values) {
    std::string pad(2 - std::min<std::size_t>(2, v.name.size() - 1), ' ');
    rep.text("  " + v.name + pad + " = " + format_double(v.value));
    rep.text("    expr: " + format_expr(v.symbolic));
  }
  if (ev.symbolic_generic)
    rep.text(
        "note: f4 has no exact fourth root in the expression fragment, so the "
        "symbolic column shows the generic reduction; values are bound to the "
        "operator numerically");
  return rep;
}

Report report_equivalence(const EquivalenceReport& er) {
  Report rep;
  rep.put("mode", std::string(to_string(er.mode)));
  rep.put("samples", long(er.operator_identity.trials));
  rep.put("tolerance", er.tolerance);
  rep.put("probe.operator.max_deviation",
          er.operator_identity.max_deviation);
  for (const ProbeSummary& s : er.invariants)
    rep.put("probe.invariant." + s.label + ".max_deviation", s.max_deviation);
  rep.put("max_deviation", er.max_deviation);
  rep.put("verdict", er.equivalent ? "equivalent" : "distinct");

  rep.text("equivalence check (" + std::string(to_string(er.mode)) +
           "), tolerance " + format_double(er.tolerance) + ":");
  rep.text("  operator identity: " +
           std::to_string(er.operator_identity.trials) +
           " probes, max deviation " +
           format_double(er.operator_identity.max_deviation));
  for (const ProbeSummary& s : er.invariants)
    rep.text("  invariant " + s.label + ": " + std::to_string(s.trials) +
             " probes, max deviation " + format_double(s.max_deviation));
  rep.text(er.equivalent ? "verdict: equivalent" : "verdict: distinct");
  return rep;
}

Report report_comparison(const PaperComparisonReport& pc) {
  Report rep;
  const std::string mode = to_string(pc.mode);
  rep.put("mode", mode);
  rep.put("rows", long(pc.rows.size()));
  int equal = 0, differs = 0;
  std::size_t width = 0;
  for (const ComparisonRow& row : pc.rows) {
    (row.equal ? equal : differs)++;
    width = std::max(width, row.id.size());
  }
  for (const ComparisonRow& row : pc.rows) {
    const std::string base = "row." + row.id;
    rep.put(base + ".verdict", row.equal ? "equal" : "differs");
    rep.put(base + ".expected", row.expect_equal ? "equal" : "differs");
    rep.put(base + ".as_expected", row.as_expected() ? "yes" : "no");
    rep.put(base + ".deviation", row.max_rel_deviation);
  }
  rep.put("equal_rows", long(equal));
  rep.put("differing_rows", long(differs));
  rep.put("unexpected", long(pc.unexpected()));
  rep.put("status", pc.all_expected() ? "as-expected" : "unexpected-mismatch");

  rep.text("reference comparison (" + mode + " equivalence): " +
           std::to_string(pc.rows.size()) + " rows, " + std::to_string(equal) +
           " equal, " + std::to_string(differs) + " with print defects, " +
           std::to_string(pc.unexpected()) + " unexpected");
  for (const ComparisonRow& row : pc.rows) {
    std::string line = "  " + row.id;
    line.append(width + 2 - row.id.size(), ' ');
    line += row.equal ? "equal  " : "differs";
    line += row.as_expected() ? "  " : "  UNEXPECTED (";
    if (!row.as_expected())
      line += std::string("annotated ") +
              (row.expect_equal ? "equal" : "differs") + ")  ";
    line += "deviation " + format_double(row.max_rel_deviation);
    rep.text(line);
    if (!row.equal && !row.note.empty()) rep.text("      note: " + row.note);
  }
  return rep;
}

Report report_selftest(const SelftestResult& sr) {
  Report rep;
  rep.put("seed", long(sr.seed));
  for (const SuiteResult& s : sr.suites) {
    rep.put("suite." + s.name + ".trials", long(s.trials));
    rep.put("suite." + s.name + ".failures", long(s.failures));
  }
  rep.put("suites", long(sr.suites.size()));
  rep.put("failures", long(sr.total_failures()));
  rep.put("status", sr.passed() ? "pass" : "fail");

  std::size_t width = 0;
  for (const SuiteResult& s : sr.suites) width = std::max(width, s.name.size());
  rep.text("selftest, seed " + std::to_string(sr.seed) + ":");
  for (const SuiteResult& s : sr.suites) {
    std::string line = "  " + s.name;
    line.append(width + 2 - s.name.size(), ' ');
    line += s.failures == 0 ? "pass" : "FAIL";
    line += "  (" + std::to_string(s.trials) + " trials";
    if (s.failures) line += ", " + std::to_string(s.failures) + " failures";
    line += ")";
    rep.text(line);
    for (const std::string& note : s.notes) rep.text("      " + note);
  }
  rep.text(sr.passed() ? "selftest: pass" : "selftest: FAIL");
  return rep;
}

}  // namespace cartan
