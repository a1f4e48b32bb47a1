#include "cartan/paper_check.hpp"

#include "cartan/coframe.hpp"
#include "cartan/form.hpp"
#include "cartan/parse.hpp"
#include "cartan/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cartan {

namespace {

std::string trimmed(std::string_view sv) {
  size_t b = sv.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = sv.find_last_not_of(" \t\r");
  return std::string(sv.substr(b, e - b + 1));
}

void flush_row(ReferenceRow& row, bool has_expect,
               std::vector<ReferenceRow>& out) {
  if (row.id.empty() && row.printed.empty()) return;
  if (row.id.empty())
    fail(Errc::invalid_input, "reference record without an id line");
  if (row.printed.empty())
    fail(Errc::invalid_input, "reference record " + row.id + " lacks printed:");
  if (!has_expect)
    fail(Errc::invalid_input, "reference record " + row.id + " lacks expect:");
  out.push_back(std::move(row));
  row = {};
}

}  // namespace

std::vector<ReferenceRow> parse_reference_rows(std::string_view text) {
  std::vector<ReferenceRow> out;
  ReferenceRow cur;
  bool has_expect = false;
  size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    std::string line = trimmed(raw);
    if (line.empty()) {
      flush_row(cur, has_expect, out);
      has_expect = false;
      continue;
    }
    if (line[0] == '#') continue;
    size_t colon = line.find(':');
    if (colon == std::string::npos)
      fail(Errc::invalid_input, "reference card line " + std::to_string(lineno) +
                                    ": expected key: value");
    std::string key = trimmed(line.substr(0, colon));
    std::string value = trimmed(line.substr(colon + 1));
    if (key == "id") {
      cur.id = value;
    } else if (key == "printed") {
      cur.printed = value;
    } else if (key == "expect") {
      if (value == "equal")
        cur.expect_equal = true;
      else if (value == "typo")
        cur.expect_equal = false;
      else
        fail(Errc::invalid_input,
             "reference card line " + std::to_string(lineno) +
                 ": expect must be equal or typo, got " + value);
      has_expect = true;
    } else if (key == "note") {
      cur.note = value;
    } else {
      fail(Errc::invalid_input, "reference card line " + std::to_string(lineno) +
                                    ": unknown key " + key);
    }
  }
  flush_row(cur, has_expect, out);
  return out;
}

std::vector<ReferenceRow> load_reference_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::invalid_input, "cannot open reference card " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_reference_rows(buf.str());
}

std::string default_reference_dir() {
  if (const char* env = std::getenv("CARTAN_FORGE_DATA")) return env;
  return CARTAN_PAPER_DATA_DIR;
}

std::string reference_file_name(Mode mode) {
  return mode == Mode::direct ? "reference_direct.kv" : "reference_gauge.kv";
}

int PaperComparisonReport::unexpected() const {
  int n = 0;
  for (const ComparisonRow& r : rows)
    if (!r.as_expected()) ++n;
  return n;
}

namespace {

std::string slot_id(const std::string& family, int row, std::pair<int, int> jk) {
  return family + "." + std::to_string(row) + "." +
         std::to_string(jk.first + 1) + "_" + std::to_string(jk.second + 1);
}

// Everything the pipeline derives, keyed by the reference-card id scheme.
std::map<std::string, Expr> build_registry(const OperatorSpec& op, Mode mode,
                                           const PipelineResult& pr) {
  std::map<std::string, Expr> reg;

  std::array<Form, 6> base = base_coframe(op, mode);
  for (const auto& [idx, c] : base[5].terms1())
    reg["omega6." + covector_name(idx)] = c;

  for (int i = 0; i < 6; ++i)
    for (const auto& [jk, c] : pr.free_stage[i].torsion)
      reg[slot_id("free", i + 1, jk)] = c;

  for (const auto& [param, value] : pr.bindings)
    reg["binding.a" + std::to_string(param)] = value;

  // Snapshots after each normalization loop except the last (whose outcome is
  // the final structure).  Substituting the loop's resolved parameter values
  // into the lifted coframe and re-resolving reproduces the engine's state
  // between loops.
  std::array<Form, 6> theta = lifted_coframe(op, mode);
  std::map<Atom, Expr> binds;
  for (size_t k = 0; k + 1 < pr.stages.size(); ++k) {
    for (const Normalization& n : pr.stages[k].steps)
      binds.emplace(Atom::param(n.param), pr.bindings.at(n.param));
    std::array<Form, 6> partial;
    for (int i = 0; i < 6; ++i) partial[i] = substitute_in_form(theta[i], binds);
    Matrix6 inv = invert_matrix(coframe_matrix(partial));
    std::string family = "stage" + std::to_string(pr.stages[k].stage);
    for (int i = 0; i < 6; ++i) {
      CoframeResolution res = resolve_in_coframe(d(partial[i]), inv);
      for (const auto& [jk, c] : res.torsion) reg[slot_id(family, i + 1, jk)] = c;
    }
  }

  for (int i = 0; i < 6; ++i)
    for (const auto& [jk, c] : pr.structure[i].torsion)
      reg[slot_id("final", i + 1, jk)] = c;

  for (const auto& [name, value] : pr.invariants) reg["invariant." + name] = value;

  for (int i = 0; i < 6; ++i)
    for (const auto& [idx, c] : pr.theta[i].terms1())
      reg["theta" + std::to_string(i + 1) + "." + covector_name(idx)] = c;

  return reg;
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Positive draws for atoms that sit under fractional powers or in
// denominators (u, f4, group parameters); signed draws elsewhere.
double draw_for(Atom a, Rng& rng) {
  if (a.is_param()) return rng.uniform(0.5, 2.0);
  if (a.is_chart())
    return a.chart_var() == ChartVar::u ? rng.uniform(0.5, 2.0)
                                        : rng.uniform(-2.0, 2.0);
  if (a.coeff_index() == 4 && a.deriv_order() == 0) return rng.uniform(0.5, 2.0);
  return rng.uniform(-2.0, 2.0);
}

double max_rel_deviation(const Expr& a, const Expr& b, uint64_t seed) {
  std::set<Atom> atoms = a.atoms();
  std::set<Atom> more = b.atoms();
  atoms.insert(more.begin(), more.end());
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::map<Atom, double> env;
    for (Atom at : atoms) env[at] = draw_for(at, rng);
    double va = a.evaluate(env);
    double vb = b.evaluate(env);
    double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
    worst = std::max(worst, std::fabs(va - vb) / scale);
  }
  return worst;
}

}  // namespace

PaperComparisonReport compare_with_paper(const OperatorSpec& op, Mode mode,
                                         const std::vector<ReferenceRow>& rows) {
  PaperComparisonReport report;
  report.mode = mode;
  PipelineResult pr = run_pipeline(op, mode);
  std::map<std::string, Expr> reg = build_registry(op, mode, pr);

  std::set<std::string> covered;
  for (const ReferenceRow& ref : rows) {
    ComparisonRow row;
    row.id = ref.id;
    row.expect_equal = ref.expect_equal;
    row.note = ref.note;
    row.printed = parse_expr(ref.printed, full_symbols());
    auto it = reg.find(ref.id);
    row.derived = it == reg.end() ? Expr::zero() : it->second;
    row.equal = row.printed == row.derived;
    row.max_rel_deviation =
        max_rel_deviation(row.printed, row.derived, fnv1a(ref.id));
    covered.insert(ref.id);
    report.rows.push_back(std::move(row));
  }

  // Sparsity guard: every nonzero derived final slot must be accounted for by
  // the card, else it is appended as an unexpected difference from zero.
  for (int i = 0; i < 6; ++i) {
    for (const auto& [jk, c] : pr.structure[i].torsion) {
      std::string id = slot_id("final", i + 1, jk);
      if (covered.count(id)) continue;
      ComparisonRow row;
      row.id = id;
      row.printed = Expr::zero();
      row.derived = c;
      row.equal = c.is_zero();
      row.expect_equal = true;
      row.note = "derived slot not covered by the reference card";
      row.max_rel_deviation = max_rel_deviation(row.printed, row.derived,
                                                fnv1a(id));
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

PaperComparisonReport compare_with_paper(const OperatorSpec& op, Mode mode) {
  std::string path = default_reference_dir() + "/" + reference_file_name(mode);
  return compare_with_paper(op, mode, load_reference_rows(path));
}

}  // namespace cartan
