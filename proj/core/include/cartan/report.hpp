#pragma once

#include "cartan/equiv.hpp"
#include "cartan/paper_check.hpp"
#include "cartan/pipeline.hpp"
#include "cartan/selftest.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cartan {

// Dual-format command output: a flat `key = value` document for machines and
// a rendered text form for people.  Both are assembled in one deterministic
// pass, so equal inputs give byte-identical output.
class Report {
 public:
  void put(const std::string& key, std::string value);
  void put(const std::string& key, const Expr& value);
  void put(const std::string& key, const Rational& value);
  void put(const std::string& key, double value);
  void put(const std::string& key, long value);
  void text(const std::string& line);  // appends one human-readable line

  std::string kv() const;  // "key = value" lines in insertion order
  const std::string& human() const { return text_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string text_;
};

// "%.12g" — the fixed numeric rendering used across all reports.
std::string format_double(double v);

// Structure-equation line "d theta3 = theta1^theta4 + 1/4 theta2^theta3";
// constant slots render as rationals, functional slots as invariant names.
std::string render_structure_row(const PipelineResult& pr, int row);

Report report_derivation(const PipelineResult& pr,
                         const std::string& operator_name);

struct InvariantValue {
  std::string name;
  Expr symbolic;  // specialized to the operator when possible, else generic
  double value = 0;
};

// Numeric invariant values at jp.  The symbolic column shows the operator's
// own reduction when its f4 admits an exact fourth root, the generic one
// otherwise (`symbolic_generic` reports which).
struct InvariantEvaluation {
  Mode mode = Mode::direct;
  std::vector<InvariantValue> values;
  bool symbolic_generic = false;
};

InvariantEvaluation evaluate_invariants(const OperatorSpec& op, Mode mode,
                                        const JetPoint& jp);

Report report_invariants(const InvariantEvaluation& ev, const JetPoint& jp,
                         const std::string& operator_name);

Report report_equivalence(const EquivalenceReport& er);

Report report_comparison(const PaperComparisonReport& pc);

Report report_selftest(const SelftestResult& sr);

}  // namespace cartan
