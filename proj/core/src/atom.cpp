#include "cartan/atom.hpp"

#include "cartan/errors.hpp"

namespace cartan {

namespace {
constexpr uint32_t kParamBase = 0x100;
constexpr uint32_t kCoeffBase = 0x10000;
constexpr uint32_t kCoeffStride = 0x1000;  // derivative orders per function
}  // namespace

Atom Atom::chart(ChartVar v) { return Atom(static_cast<uint32_t>(v)); }

Atom Atom::param(int i) {
  if (i < 1 || i > kParamCount) fail(Errc::invalid_input, "parameter index out of range");
  return Atom(kParamBase + static_cast<uint32_t>(i - 1));
}

Atom Atom::coeff(int i, int order) {
  if (i < 0 || i > 4) fail(Errc::invalid_input, "coefficient index out of range");
  if (order < 0 || order >= static_cast<int>(kCoeffStride))
    fail(Errc::invalid_input, "derivative order out of range");
  return Atom(kCoeffBase + static_cast<uint32_t>(i) * kCoeffStride +
              static_cast<uint32_t>(order));
}

Atom::Kind Atom::kind() const {
  if (key_ < kParamBase) return Kind::chart;
  if (key_ < kCoeffBase) return Kind::param;
  return Kind::coeff;
}

ChartVar Atom::chart_var() const {
  if (!is_chart()) fail(Errc::invalid_input, "not a chart variable");
  return static_cast<ChartVar>(key_);
}

int Atom::param_index() const {
  if (!is_param()) fail(Errc::invalid_input, "not a group parameter");
  return static_cast<int>(key_ - kParamBase) + 1;
}

int Atom::coeff_index() const {
  if (!is_coeff()) fail(Errc::invalid_input, "not a coefficient function");
  return static_cast<int>((key_ - kCoeffBase) / kCoeffStride);
}

int Atom::deriv_order() const {
  if (!is_coeff()) return 0;
  return static_cast<int>((key_ - kCoeffBase) % kCoeffStride);
}

Atom Atom::bumped() const {
  return Atom::coeff(coeff_index(), deriv_order() + 1);
}

std::optional<int> Atom::covector_index() const {
  switch (kind()) {
    case Kind::chart: return static_cast<int>(key_);
    case Kind::param: return kChartCount + param_index() - 1;
    case Kind::coeff: return std::nullopt;
  }
  return std::nullopt;
}

std::string Atom::name() const {
  static const char* chart_names[kChartCount] = {"x", "u", "p", "q", "r", "s"};
  switch (kind()) {
    case Kind::chart: return chart_names[key_];
    case Kind::param: return "a" + std::to_string(param_index());
    case Kind::coeff: {
      std::string s = "f" + std::to_string(coeff_index());
      s.append(static_cast<size_t>(deriv_order()), '\'');
      return s;
    }
  }
  return "?";
}

Atom covector_atom(int index) {
  if (index < 0 || index >= kCovectorCount)
    fail(Errc::invalid_input, "covector index out of range");
  if (index < kChartCount) return Atom::chart(static_cast<ChartVar>(index));
  return Atom::param(index - kChartCount + 1);
}

std::string covector_name(int index) { return "d" + covector_atom(index).name(); }

std::optional<Atom> atom_from_base_name(const std::string& base, int primes) {
  static const char* chart_names[kChartCount] = {"x", "u", "p", "q", "r", "s"};
  for (int i = 0; i < kChartCount; ++i) {
    if (base == chart_names[i]) {
      if (primes != 0) return std::nullopt;
      return Atom::chart(static_cast<ChartVar>(i));
    }
  }
  if (base.size() >= 2 && base[0] == 'a') {
    int i = 0;
    for (size_t k = 1; k < base.size(); ++k) {
      if (base[k] < '0' || base[k] > '9') return std::nullopt;
      i = i * 10 + (base[k] - '0');
    }
    if (i < 1 || i > kParamCount || primes != 0) return std::nullopt;
    return Atom::param(i);
  }
  if (base.size() == 2 && base[0] == 'f' && base[1] >= '0' && base[1] <= '4')
    return Atom::coeff(base[1] - '0', primes);
  return std::nullopt;
}

}  // namespace cartan
