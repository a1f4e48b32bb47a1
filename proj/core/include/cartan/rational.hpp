#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace cartan {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Exact integer k-th root of n >= 0, or nullopt when none exists.
std::optional<BigInt> exact_nth_root(const BigInt& n, unsigned k);

// Exact k-th root of a rational.  Negative bases are allowed only for odd k.
std::optional<Rational> exact_rational_root(const Rational& r, unsigned k);

// Integer power; exp < 0 requires base != 0.
Rational rational_pow(const Rational& base, long exp);

}  // namespace cartan
