#pragma once

#include <stdexcept>
#include <string>

namespace cartan {

// Stable error taxonomy for the whole engine.  The CLI maps these to exit
// statuses without string matching, so codes must not be reused.
enum class Errc {
  zero_divisor,
  unsupported_radical,
  missing_binding,
  cyclic_binding,
  singular_evaluation,
  expression_too_large,
  degree_overflow,
  degenerate_coframe,
  nonlinear_normalization,
  schedule_failed,
  invalid_input,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace cartan
