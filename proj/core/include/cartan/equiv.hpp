#pragma once

#include "cartan/jet.hpp"
#include "cartan/pipeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cartan {

struct EquivalenceOptions {
  int samples = 20;
  Interval interval;       // x-range for sampling; B is checked on its image
  std::uint64_t seed = 0;
  double tolerance = 1e-8;  // relative, on both probe families
};

// One probe family's outcome; deviation is the worst relative mismatch seen.
struct ProbeSummary {
  std::string label;
  int trials = 0;
  double max_deviation = 0;
};

struct EquivalenceReport {
  Mode mode = Mode::direct;
  double tolerance = 0;
  ProbeSummary operator_identity;          // Dbar[ubar] against D[u] probes
  std::vector<ProbeSummary> invariants;    // one entry per named invariant
  double max_deviation = 0;                // worst over all families
  bool equivalent = false;                 // every family within tolerance
};

// Decides whether b is the mode-transform of a under t, numerically:
//  - operator identity: for random polynomials u and points x0,
//    sum bbar_i(xi(x0)) * ubar^(i)(xi(x0)) must match D[u](x0) (direct) or
//    phi(x0) * D[u](x0) (gauge), with the ubar-jet supplied by prolong;
//  - invariant matching: each derived invariant of b at the prolonged point
//    must match the same invariant of a at the source point.
// Invariants are evaluated through the generic reduction with coefficient
// atoms bound numerically, so neither operator needs an exact fourth root.
// Errc::invalid_input when phi is not positive on the interval (the
// invariants live on the u > 0 branch), or when an operator/transformation
// fails its own interval validation.
EquivalenceReport check_equivalence(const OperatorSpec& a,
                                    const OperatorSpec& b,
                                    const Transformation& t, Mode mode,
                                    const EquivalenceOptions& opts = {});

}  // namespace cartan
