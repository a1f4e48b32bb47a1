#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cartan {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::vector<std::string> notes;  // one diagnostic line per failure
};

struct SelftestResult {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  int total_failures() const;
  bool passed() const { return total_failures() == 0; }
};

// Seeded property run over every layer of the engine: expression algebra,
// parser round-trips, exterior calculus identities, prolongation oracles,
// the invariance theorem, coframe equivariance, Bianchi closure, gauge
// homogeneity, structure-constant rigidity, the reference cards, and
// determinism of the reduction itself.  Equal seeds give identical results.
SelftestResult run_selftest(std::uint64_t seed);

}  // namespace cartan
