#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace cartan {

enum class ChartVar : int { x = 0, u = 1, p = 2, q = 3, r = 4, s = 5 };

inline constexpr int kChartCount = 6;
inline constexpr int kParamCount = 10;
// Basis covectors of the lifted space: dx,du,dp,dq,dr,ds, da1..da10.
inline constexpr int kCovectorCount = kChartCount + kParamCount;

// One indeterminate: a jet chart variable, a structure-group parameter
// a1..a10, or the k-th x-derivative of a coefficient function f0..f4.
// The packed key realises the total order
//   x < u < p < q < r < s < a1 < ... < a10 < f0 < f0' < ... < f4 < f4' < ...
// which fixes the canonical term order everywhere in the engine.
class Atom {
 public:
  enum class Kind : uint8_t { chart = 0, param = 1, coeff = 2 };

  static Atom chart(ChartVar v);
  static Atom param(int i);               // i in 1..10
  static Atom coeff(int i, int order = 0);  // f_i^(order), i in 0..4

  Kind kind() const;
  bool is_chart() const { return kind() == Kind::chart; }
  bool is_param() const { return kind() == Kind::param; }
  bool is_coeff() const { return kind() == Kind::coeff; }

  ChartVar chart_var() const;
  int param_index() const;  // 1..10
  int coeff_index() const;  // 0..4
  int deriv_order() const;

  // Next x-derivative of a coefficient atom: f4' -> f4''.
  Atom bumped() const;

  // Index of the associated basis covector; coefficient atoms are functions
  // of x and have none.
  std::optional<int> covector_index() const;

  uint32_t key() const { return key_; }
  std::string name() const;

  friend bool operator==(Atom a, Atom b) { return a.key_ == b.key_; }
  friend std::strong_ordering operator<=>(Atom a, Atom b) {
    return a.key_ <=> b.key_;
  }

 private:
  explicit Atom(uint32_t key) : key_(key) {}
  uint32_t key_;
};

Atom covector_atom(int index);
std::string covector_name(int index);

// Resolves "x", "a7", "f2" (+ prime count) to an atom; nullopt for unknown
// names so the parser can report its own spans.
std::optional<Atom> atom_from_base_name(const std::string& base, int primes);

}  // namespace cartan
