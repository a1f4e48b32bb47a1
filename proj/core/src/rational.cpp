#include "cartan/rational.hpp"

#include "cartan/errors.hpp"

#include <cmath>

namespace cartan {

std::string to_string(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1)
    return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::optional<BigInt> exact_nth_root(const BigInt& n, unsigned k) {
  if (n < 0) return std::nullopt;
  if (k == 0) return std::nullopt;
  if (k == 1 || n == 0 || n == 1) return n;
  // Double estimate, then fix up by walking.  Inputs stay desk-sized here.
  double est = std::pow(n.convert_to<double>(), 1.0 / k);
  BigInt root(static_cast<long long>(est + 0.5));
  if (root < 1) root = 1;
  while (boost::multiprecision::pow(root, k) > n) --root;
  while (boost::multiprecision::pow(root + 1, k) <= n) ++root;
  if (boost::multiprecision::pow(root, k) == n) return root;
  return std::nullopt;
}

std::optional<Rational> exact_rational_root(const Rational& r, unsigned k) {
  if (k == 1) return r;
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) {
    if (k % 2 == 0) return std::nullopt;
    num = -num;
  }
  auto rn = exact_nth_root(num, k);
  auto rd = exact_nth_root(den, k);
  if (!rn || !rd) return std::nullopt;
  Rational out(*rn, *rd);
  return neg ? -out : out;
}

Rational rational_pow(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  if (base == 0) {
    if (exp < 0) fail(Errc::zero_divisor, "zero divisor in rational power");
    return Rational(0);
  }
  bool inv = exp < 0;
  unsigned long n = inv ? static_cast<unsigned long>(-exp)
                        : static_cast<unsigned long>(exp);
  Rational acc(1), b = base;
  while (n) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (inv) acc = Rational(1) / acc;
  return acc;
}

}  // namespace cartan
