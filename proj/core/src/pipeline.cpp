#include "cartan/pipeline.hpp"

#include <set>

namespace cartan {

namespace {

Expr chart(ChartVar v) { return Expr::atom(Atom::chart(v)); }

struct ScheduleEntry {
  int stage;
  SlotKey slot;
  int target;
  int param;
};

// Normalization order.  Within a stage the solves are sequential: each one
// recomputes the structure equations with the new binding in force.
const std::vector<ScheduleEntry>& schedule(Mode m) {
  static const std::vector<ScheduleEntry> direct{
      {1, {5, 1, 6}, 1, 10}, {1, {4, 1, 5}, 1, 6}, {1, {3, 1, 4}, 1, 3},
      {1, {2, 1, 3}, 1, 1},  {1, {2, 1, 2}, 0, 2},
      {2, {3, 1, 3}, 0, 5},  {2, {5, 1, 5}, 0, 9},
      {3, {3, 1, 2}, 0, 4},
      {4, {4, 1, 3}, 0, 8},  {4, {4, 1, 2}, 0, 7},
  };
  static const std::vector<ScheduleEntry> gauge{
      {1, {5, 1, 6}, 1, 10}, {1, {4, 1, 5}, 1, 6}, {1, {3, 1, 4}, 1, 3},
      {1, {2, 1, 3}, 1, 1},  {1, {2, 1, 2}, 0, 2},
      {2, {3, 1, 2}, 0, 4},  {2, {3, 1, 3}, 0, 5}, {2, {5, 1, 5}, 0, 9},
      {3, {4, 1, 3}, 0, 8},  {3, {4, 1, 2}, 0, 7},
  };
  return m == Mode::direct ? direct : gauge;
}

const std::map<SlotKey, std::string>& invariant_slot_names(Mode m) {
  static const std::map<SlotKey, std::string> direct{
      {{5, 1, 2}, "I"},
      {{4, 1, 4}, "I1"},
      {{5, 1, 3}, "I2"},
      {{5, 1, 4}, "I3"},
  };
  // Gauge carries three slot invariants; the scalar I (already a function on
  // the base there) completes the set of four.
  static const std::map<SlotKey, std::string> gauge{
      {{4, 1, 4}, "I1"},
      {{5, 1, 3}, "I2"},
      {{5, 1, 4}, "I3"},
  };
  return m == Mode::direct ? direct : gauge;
}

std::string slot_name(const SlotKey& s) {
  auto [row, j, k] = s;
  return "(" + std::to_string(row) + ";" + std::to_string(j) + "," +
         std::to_string(k) + ")";
}

struct Engine {
  Mode mode;
  std::array<Form, 6> base;
  std::map<Atom, Expr> resolved;

  Expr param_or_value(int i) const {
    Atom a = Atom::param(i);
    auto it = resolved.find(a);
    return it != resolved.end() ? it->second : Expr::atom(a);
  }

  std::array<Form, 6> theta() const {
    auto a = [this](int i) { return param_or_value(i); };
    std::array<Form, 6> th;
    th[0] = a(1) * base[0];
    th[1] = base[1];
    th[2] = a(2) * base[1] + a(3) * base[2];
    th[3] = a(4) * base[1] + a(5) * base[2] + a(6) * base[3];
    th[4] = a(7) * base[1] + a(8) * base[2] + a(9) * base[3] + a(10) * base[4];
    th[5] = base[5];
    return th;
  }

  std::array<CoframeResolution, 6> resolutions(
      const std::array<Form, 6>& th) const {
    Matrix6 inv = invert_matrix(coframe_matrix(th));
    std::array<CoframeResolution, 6> out;
    for (int i = 0; i < 6; ++i) {
      out[static_cast<std::size_t>(i)] =
          resolve_in_coframe(d(th[static_cast<std::size_t>(i)]), inv);
    }
    return out;
  }

  // Adds param -> value and keeps every stored value free of solved params.
  void bind(int param, const Expr& value) {
    Atom a = Atom::param(param);
    std::map<Atom, Expr> one{{a, value}};
    for (auto& [key, stored] : resolved) {
      if (stored.contains(a)) stored = stored.substituted(one);
    }
    resolved.emplace(a, value);
  }
};

}  // namespace

std::array<Form, 6> base_coframe(const OperatorSpec& op, Mode mode) {
  std::array<Form, 6> w;
  w[0] = Form::covector(0);
  w[1] = (Expr::one() / chart(ChartVar::u)) *
         (Form::covector(1) - chart(ChartVar::p) * Form::covector(0));
  w[2] = Form::covector(2) - chart(ChartVar::q) * Form::covector(0);
  w[3] = Form::covector(3) - chart(ChartVar::r) * Form::covector(0);
  w[4] = Form::covector(4) - chart(ChartVar::s) * Form::covector(0);
  w[5] = d(Form::scalar(invariant_expr(op, mode)));
  return w;
}

std::array<Form, 6> lifted_coframe(const OperatorSpec& op, Mode mode) {
  Engine eng{mode, base_coframe(op, mode), {}};
  return eng.theta();
}

Expr solve_normalization(const Expr& torsion, Atom param,
                         const Rational& target) {
  if (!torsion.contains(param))
    fail(Errc::schedule_failed,
         "torsion slot does not involve " + param.name());
  Expr pa = Expr::atom(param);
  Expr A = torsion.derivative(param);
  if (!A.is_zero() && A.derivative(param).is_zero()) {
    Expr B = torsion - A * pa;
    if (!B.contains(param)) {
      return (Expr::constant(target) - B) / A;
    }
  }
  for (int n : {1, -1, 2, -2, 3, -3, 4, -4}) {
    Expr cand = torsion / Expr::atom_power(param, 4 * n);
    if (cand.contains(param)) continue;
    if (target == 0)
      fail(Errc::schedule_failed,
           "monomial torsion in " + param.name() + " cannot be driven to 0");
    Expr rhs = Expr::constant(target) / cand;  // param^n = rhs
    return rhs.pow(Rational(1) / n);  // (negative denominators trip boost)
  }
  fail(Errc::nonlinear_normalization,
       "torsion slot is neither affine nor monomial in " + param.name());
}

bool specializable(const OperatorSpec& op) {
  if (op.is_generic()) return true;
  try {
    (void)op.f[4].pow(Rational(1, 4));
    return true;
  } catch (const Error&) {
    return false;
  }
}

PipelineResult run_pipeline(const OperatorSpec& op, Mode mode) {
  if (!specializable(op))
    fail(Errc::unsupported_radical,
         "f4 admits no exact fourth root; run the reduction on the generic "
         "operator and bind coefficients numerically");
  PipelineResult out;
  out.mode = mode;
  out.base = base_coframe(op, mode);

  Engine eng{mode, out.base, {}};
  out.free_stage = eng.resolutions(eng.theta());

  for (const ScheduleEntry& entry : schedule(mode)) {
    auto res = eng.resolutions(eng.theta());
    auto [row, j, k] = entry.slot;
    Expr torsion =
        res[static_cast<std::size_t>(row - 1)].torsion_at(j - 1, k - 1);
    Expr value;
    try {
      value = solve_normalization(torsion, Atom::param(entry.param),
                                  Rational(entry.target));
    } catch (const Error& e) {
      fail(Errc::schedule_failed,
           "stage " + std::to_string(entry.stage) + ", slot " +
               slot_name(entry.slot) + ": " + e.what());
    }
    eng.bind(entry.param, value);
    if (out.stages.empty() || out.stages.back().stage != entry.stage) {
      out.stages.push_back({entry.stage, {}});
    }
    out.stages.back().steps.push_back(
        {entry.slot, Rational(entry.target), entry.param, value, value});
  }

  // All ten parameters must be gone.
  for (int i = 1; i <= kParamCount; ++i) {
    auto it = eng.resolved.find(Atom::param(i));
    if (it == eng.resolved.end())
      fail(Errc::schedule_failed,
           "parameter a" + std::to_string(i) + " was never solved");
    for (const Atom& a : it->second.atoms()) {
      if (a.is_param())
        fail(Errc::schedule_failed,
             "binding for a" + std::to_string(i) + " still mentions " +
                 a.name());
    }
    out.bindings.emplace(i, it->second);
  }
  for (auto& stage : out.stages) {
    for (auto& step : stage.steps) {
      step.resolved_value = step.value.substituted(eng.resolved);
    }
  }

  out.theta = eng.theta();
  out.structure = eng.resolutions(out.theta);

  // Scheduled slots must hold their targets in the final equations.
  for (const ScheduleEntry& entry : schedule(mode)) {
    auto [row, j, k] = entry.slot;
    Expr torsion = out.structure[static_cast<std::size_t>(row - 1)].torsion_at(
        j - 1, k - 1);
    if (!(torsion.is_rational() &&
          *torsion.as_rational() == Rational(entry.target)))
      fail(Errc::schedule_failed,
           "slot " + slot_name(entry.slot) + " drifted off its target");
  }

  // Classify the final torsion: rational constants everywhere except the
  // mode's invariant slots; no parameter differentials left anywhere.
  const auto& names = invariant_slot_names(mode);
  for (int row = 1; row <= 6; ++row) {
    const auto& res = out.structure[static_cast<std::size_t>(row - 1)];
    if (!res.mixed.empty())
      fail(Errc::schedule_failed,
           "row " + std::to_string(row) +
               " keeps a parameter differential after all solves");
    for (const auto& [jk, c] : res.torsion) {
      SlotKey key{row, jk.first + 1, jk.second + 1};
      auto named = names.find(key);
      if (named != names.end()) {
        for (const Atom& a : c.atoms()) {
          if (a.is_param())
            fail(Errc::schedule_failed, "invariant " + named->second +
                                            " still mentions " + a.name());
        }
        out.invariant_slots.emplace(key, named->second);
        out.invariants.emplace(named->second, c);
        continue;
      }
      if (!c.is_rational())
        fail(Errc::schedule_failed,
             "unexpected functional torsion at " + slot_name(key));
      out.constants.emplace(key, *c.as_rational());
    }
  }
  // Invariant slots that vanish identically (possible for special operators)
  // still get a named entry so reports stay uniform.
  for (const auto& [key, name] : names) {
    if (!out.invariants.count(name)) {
      out.invariant_slots.emplace(key, name);
      out.invariants.emplace(name, Expr::zero());
    }
  }
  return out;
}

const PipelineResult& generic_pipeline(Mode mode) {
  static const PipelineResult direct =
      run_pipeline(OperatorSpec::generic(), Mode::direct);
  static const PipelineResult gauge =
      run_pipeline(OperatorSpec::generic(), Mode::gauge);
  return mode == Mode::direct ? direct : gauge;
}

}  // namespace cartan
