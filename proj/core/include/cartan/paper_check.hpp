#pragma once

#include "cartan/jet.hpp"
#include "cartan/pipeline.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace cartan {

// One record of a reference card: a formula as printed in the published
// derivation this engine re-derives, keyed by what it describes.  The engine
// is the ground truth; `expect_equal == false` marks rows with known print
// defects and `note` says what is wrong with the printed form.
//
// Row id families (slot indices are 1-based, row.j_k means the theta^j^theta^k
// coefficient of d(theta^row)):
//   omega6.<dx|du|dp|dq|dr|ds>  slots of the invariant 1-form closing the
//                               base coframe
//   free.<i>.<j>_<k>            essential torsion before any normalization
//   stage<n>.<i>.<j>_<k>        torsion after normalization loop n
//   binding.a<p>                solved group-parameter values
//   final.<i>.<j>_<k>           final structure equation coefficients
//   invariant.<name>            fundamental invariants
//   theta<i>.<cov>              fully reduced coframe components
struct ReferenceRow {
  std::string id;
  std::string printed;
  bool expect_equal = true;
  std::string note;
};

// Reference-card format: records of `key: value` lines separated by blank
// lines; keys are id/printed/expect/note, expect is `equal` or `typo`;
// full-line `#` comments.  Throws Errc::invalid_input on malformed cards.
std::vector<ReferenceRow> parse_reference_rows(std::string_view text);
std::vector<ReferenceRow> load_reference_rows(const std::string& path);

// Directory holding reference_direct.kv / reference_gauge.kv: the
// CARTAN_FORGE_DATA environment variable when set, else the installed or
// source-tree data directory baked in at configure time.
std::string default_reference_dir();
std::string reference_file_name(Mode mode);

struct ComparisonRow {
  std::string id;
  Expr printed;
  Expr derived;
  bool equal = false;        // canonical-form comparison outcome
  bool expect_equal = true;  // annotation carried from the reference card
  double max_rel_deviation = 0.0;  // over the random-point sample
  std::string note;
  bool as_expected() const { return equal == expect_equal; }
};

struct PaperComparisonReport {
  Mode mode = Mode::direct;
  std::vector<ComparisonRow> rows;
  int unexpected() const;
  bool all_expected() const { return unexpected() == 0; }
};

// Compares every reference row against the value the pipeline derives for the
// same id, recording a symbolic verdict plus the maximum relative deviation
// over 100 seeded random domain points.  Derived final-structure slots that
// no reference row covers are appended as extra rows expected equal-to-zero,
// so sparsity disagreements always surface.  Mismatches never throw; they are
// data in the report.  The reference cards describe the generic operator, so
// comparisons against specialized operators will report spurious differences.
PaperComparisonReport compare_with_paper(const OperatorSpec& op, Mode mode,
                                         const std::vector<ReferenceRow>& rows);

// Loads the reference card for `mode` from default_reference_dir().
PaperComparisonReport compare_with_paper(const OperatorSpec& op, Mode mode);

}  // namespace cartan
