#pragma once

#include "cartan/coframe.hpp"
#include "cartan/jet.hpp"

#include <tuple>
#include <vector>

namespace cartan {

// Torsion slot of a structure equation: d theta^row has coefficient T at
// theta^j ^ theta^k.  All components 1-based; k == 6 addresses theta^6.
using SlotKey = std::tuple<int, int, int>;

// One normalization event in the reduction.
struct Normalization {
  SlotKey slot;
  Rational target;      // value the slot is driven to (0 or 1)
  int param = 0;        // index of the group parameter solved for
  Expr value;           // solution in terms of the parameters still free
  Expr resolved_value;  // same, with every later solve substituted back
};

struct StageTrace {
  int stage = 0;
  std::vector<Normalization> steps;
};

struct PipelineResult {
  Mode mode = Mode::direct;
  std::array<Form, 6> base;                      // contact coframe w
  std::array<CoframeResolution, 6> free_stage;   // d theta, all params free
  std::vector<StageTrace> stages;
  std::map<int, Expr> bindings;                  // param -> resolved value
  std::array<Form, 6> theta;                     // fully reduced coframe
  std::array<CoframeResolution, 6> structure;    // final d theta resolutions
  std::map<SlotKey, Rational> constants;         // nonzero rational slots
  std::map<SlotKey, std::string> invariant_slots;
  std::map<std::string, Expr> invariants;        // named functional torsion
};

// w1 = dx, w2 = (du - p dx)/u, w3..w5 the higher contact forms, w6 = dI with
// the mode's scalar invariant I built from the operator's coefficients.
std::array<Form, 6> base_coframe(const OperatorSpec& op, Mode mode);

// theta = G w for the 10-parameter lower-triangular structure group.
std::array<Form, 6> lifted_coframe(const OperatorSpec& op, Mode mode);

// Value of `param` that makes `torsion` equal `target`.  Handles slots that
// are affine in the parameter and slots of the monomial form C * a^n,
// |n| <= 4 (the quartic root of the first reduction); anything else is
// Errc::schedule_failed.
Expr solve_normalization(const Expr& torsion, Atom param,
                         const Rational& target);

// True when the reduction can run with the operator's own coefficient
// functions substituted for the f-atoms (f4 must admit an exact fourth root
// inside the expression fragment).
bool specializable(const OperatorSpec& op);

// Full sequential reduction.  Verifies every scheduled slot holds its target
// in the final structure equations, that no parameter differentials remain,
// and that functional torsion appears only in the mode's invariant slots.
PipelineResult run_pipeline(const OperatorSpec& op, Mode mode);

// Reduction of the generic operator, computed once per mode.
const PipelineResult& generic_pipeline(Mode mode);

}  // namespace cartan
