#include "cartan/expr.hpp"

#include "cartan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cartan {

namespace {

using Mono = std::vector<AtomPower>;  // sorted by atom, quarters != 0

struct Term {
  Rational c;
  Mono m;
};

using Terms = std::vector<Term>;  // canonical: term order, unique monomials

// Canonical term order: ascending atom, then descending exponent, then the
// longer monomial first.  Gives x^2 + x*u + x + u + 1 style orderings.
int mono_cmp(const Mono& a, const Mono& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i].atom != b[i].atom) return a[i].atom < b[i].atom ? -1 : 1;
    if (a[i].quarters != b[i].quarters)
      return a[i].quarters > b[i].quarters ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() > b.size() ? -1 : 1;
  return 0;
}

bool mono_eq(const Mono& a, const Mono& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

void check_size(size_t n) {
  if (n > kMaxTerms)
    fail(Errc::expression_too_large,
         "expression exceeded " + std::to_string(kMaxTerms) + " terms (" +
             std::to_string(n) + "); aborting canonicalization");
}

Mono mono_mul(const Mono& a, const Mono& b) {
  Mono out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].atom == b[j].atom) {
      int q = a[i].quarters + b[j].quarters;
      if (q != 0) out.push_back({a[i].atom, q});
      ++i, ++j;
    } else if (a[i].atom < b[j].atom) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  return out;
}

Mono mono_scale_exp(const Mono& m, int factor) {
  Mono out;
  out.reserve(m.size());
  for (const auto& f : m) out.push_back({f.atom, f.quarters * factor});
  return out;
}

// Sort + merge duplicates + drop zeros.
Terms canonical(Terms raw) {
  std::sort(raw.begin(), raw.end(),
            [](const Term& a, const Term& b) { return mono_cmp(a.m, b.m) < 0; });
  Terms out;
  out.reserve(raw.size());
  for (auto& t : raw) {
    if (t.c == 0) continue;
    if (!out.empty() && mono_eq(out.back().m, t.m)) {
      out.back().c += t.c;
      if (out.back().c == 0) out.pop_back();
    } else {
      out.push_back(std::move(t));
    }
  }
  check_size(out.size());
  return out;
}

Terms add_terms(const Terms& a, const Terms& b) {
  Terms out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = mono_cmp(a[i].m, b[j].m);
    if (c == 0) {
      Rational s = a[i].c + b[j].c;
      if (s != 0) out.push_back({std::move(s), a[i].m});
      ++i, ++j;
    } else if (c < 0) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back(b[j]);
  check_size(out.size());
  return out;
}

Terms neg_terms(Terms a) {
  for (auto& t : a) t.c = -t.c;
  return a;
}

Terms mul_terms(const Terms& a, const Terms& b) {
  if (a.empty() || b.empty()) return {};
  // The size cap applies to collected results; a transient product may exceed
  // it (high-degree univariate factors collect massively), so oversized
  // products are accumulated blockwise with collection after every block.
  if (a.size() * b.size() <= kMaxTerms) {
    Terms raw;
    raw.reserve(a.size() * b.size());
    for (const auto& ta : a)
      for (const auto& tb : b)
        raw.push_back({ta.c * tb.c, mono_mul(ta.m, tb.m)});
    return canonical(std::move(raw));
  }
  const size_t chunk = std::max<size_t>(1, kMaxTerms / b.size());
  Terms acc;
  for (size_t i0 = 0; i0 < a.size(); i0 += chunk) {
    const size_t i1 = std::min(a.size(), i0 + chunk);
    Terms raw;
    raw.reserve((i1 - i0) * b.size());
    for (size_t i = i0; i < i1; ++i)
      for (const auto& tb : b)
        raw.push_back({a[i].c * tb.c, mono_mul(a[i].m, tb.m)});
    acc = add_terms(acc, canonical(std::move(raw)));
  }
  return acc;
}

Terms scale_terms(const Terms& a, const Rational& c, const Mono& m) {
  if (c == 0) return {};
  Terms raw;
  raw.reserve(a.size());
  for (const auto& t : a) raw.push_back({t.c * c, mono_mul(t.m, m)});
  return canonical(std::move(raw));
}

Terms one_terms() { return {Term{Rational(1), {}}}; }

bool is_one_terms(const Terms& t) {
  return t.size() == 1 && t[0].m.empty() && t[0].c == 1;
}

// Monomial content: per-atom minimum exponent over all terms, treating an
// atom missing from some term as exponent 0 there.
Mono mono_content(const Terms& terms) {
  std::map<Atom, std::pair<int, size_t>> mins;  // atom -> (min, #terms seen in)
  for (const auto& t : terms)
    for (const auto& f : t.m) {
      auto [it, fresh] = mins.try_emplace(f.atom, std::make_pair(f.quarters, size_t{0}));
      if (!fresh) it->second.first = std::min(it->second.first, f.quarters);
      ++it->second.second;
    }
  Mono out;
  for (auto& [atom, v] : mins) {
    int q = v.first;
    if (v.second < terms.size()) q = std::min(q, 0);
    if (q != 0) out.push_back({atom, q});
  }
  return out;
}

Rational rational_content(const Terms& terms) {
  BigInt g = 0, l = 1;
  for (const auto& t : terms) {
    g = boost::multiprecision::gcd(
        g, BigInt(boost::multiprecision::abs(boost::multiprecision::numerator(t.c))));
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(t.c));
  }
  Rational c(g, l);
  if (!terms.empty() && terms.front().c < 0) c = -c;
  return c;
}

bool terms_equal(const Terms& a, const Terms& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].c != b[i].c || !mono_eq(a[i].m, b[i].m)) return false;
  return true;
}

}  // namespace

struct Expr::Impl {
  Terms num;
  Terms den;  // one_terms() or a content-free multi-term sum
};

namespace {

std::shared_ptr<const Expr::Impl> make_impl(Terms num, Terms den) {
  return std::make_shared<const Expr::Impl>(
      Expr::Impl{std::move(num), std::move(den)});
}

const std::shared_ptr<const Expr::Impl>& zero_impl() {
  static const auto z = make_impl({}, one_terms());
  return z;
}

// Quotient normalization.  Single-term denominators fold into the numerator;
// multi-term denominators lose monomial and rational content and get a
// positive leading coefficient.  No multivariate gcd beyond content.
std::shared_ptr<const Expr::Impl> normalize(Terms num, Terms den) {
  if (den.empty()) fail(Errc::zero_divisor, "zero divisor");
  if (num.empty()) return zero_impl();
  if (den.size() == 1) {
    const Term& d = den[0];
    if (!is_one_terms(den))
      num = scale_terms(num, Rational(1) / d.c, mono_scale_exp(d.m, -1));
    return make_impl(std::move(num), one_terms());
  }
  Mono m = mono_content(den);
  if (!m.empty()) {
    Mono inv = mono_scale_exp(m, -1);
    num = scale_terms(num, Rational(1), inv);
    den = scale_terms(den, Rational(1), inv);
  }
  Rational c = rational_content(den);
  if (c != 1 && c != 0) {
    Rational inv = Rational(1) / c;
    num = scale_terms(num, inv, {});
    den = scale_terms(den, inv, {});
  }
  if (terms_equal(num, den)) return make_impl(one_terms(), one_terms());
  return make_impl(std::move(num), std::move(den));
}

struct Raw {
  const Terms& num;
  const Terms& den;
};

}  // namespace

struct ExprAccess {
  static const Expr::Impl& impl(const Expr& e) { return *e.impl_; }
  static Expr wrap(std::shared_ptr<const Expr::Impl> i) { return Expr(std::move(i)); }
};

namespace {
Raw raw(const Expr& e) {
  const Expr::Impl& i = ExprAccess::impl(e);
  return {i.num, i.den};
}
}  // namespace

Expr::Expr() : impl_(zero_impl()) {}

Expr Expr::zero() { return Expr(); }

Expr Expr::one() {
  static const Expr e = ExprAccess::wrap(make_impl(one_terms(), one_terms()));
  return e;
}

Expr Expr::constant(const Rational& r) {
  if (r == 0) return zero();
  return ExprAccess::wrap(make_impl({Term{r, {}}}, one_terms()));
}

Expr Expr::from_int(long n) { return constant(Rational(n)); }

Expr Expr::atom(Atom a) { return atom_power(a, 4); }

Expr Expr::atom_power(Atom a, int quarters) {
  if (quarters == 0) return one();
  return ExprAccess::wrap(
      make_impl({Term{Rational(1), {AtomPower{a, quarters}}}}, one_terms()));
}

Expr operator+(const Expr& a, const Expr& b) {
  Raw ra = raw(a), rb = raw(b);
  if (terms_equal(ra.den, rb.den))
    return ExprAccess::wrap(normalize(add_terms(ra.num, rb.num), ra.den));
  Terms num = add_terms(mul_terms(ra.num, rb.den), mul_terms(rb.num, ra.den));
  return ExprAccess::wrap(normalize(std::move(num), mul_terms(ra.den, rb.den)));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr Expr::operator-() const {
  Raw r = raw(*this);
  return ExprAccess::wrap(make_impl(neg_terms(r.num), r.den));
}

Expr operator*(const Expr& a, const Expr& b) {
  Raw ra = raw(a), rb = raw(b);
  return ExprAccess::wrap(
      normalize(mul_terms(ra.num, rb.num), mul_terms(ra.den, rb.den)));
}

Expr operator/(const Expr& a, const Expr& b) {
  Raw ra = raw(a), rb = raw(b);
  if (rb.num.empty()) fail(Errc::zero_divisor, "zero divisor");
  return ExprAccess::wrap(
      normalize(mul_terms(ra.num, rb.den), mul_terms(ra.den, rb.num)));
}

bool Expr::is_zero() const { return raw(*this).num.empty(); }

bool Expr::is_one() const {
  Raw r = raw(*this);
  return is_one_terms(r.num) && is_one_terms(r.den);
}

bool Expr::is_rational() const {
  Raw r = raw(*this);
  if (!is_one_terms(r.den)) return false;
  return r.num.empty() || (r.num.size() == 1 && r.num[0].m.empty());
}

std::optional<Rational> Expr::as_rational() const {
  if (!is_rational()) return std::nullopt;
  Raw r = raw(*this);
  if (r.num.empty()) return Rational(0);
  return r.num[0].c;
}

Expr pow(const Expr& base, const Rational& exponent) { return base.pow(exponent); }

Expr Expr::pow(const Rational& exponent) const {
  Rational q4r = exponent * 4;
  if (boost::multiprecision::denominator(q4r) != 1)
    fail(Errc::unsupported_radical,
         "unsupported radical: exponent " + cartan::to_string(exponent) +
             " has denominator not dividing 4");
  BigInt q4b = boost::multiprecision::numerator(q4r);
  if (q4b > 1'000'000 || q4b < -1'000'000)
    fail(Errc::invalid_input, "exponent out of range");
  long q4 = q4b.convert_to<long>();

  if (q4 == 0) {
    if (is_zero()) fail(Errc::zero_divisor, "zero divisor: 0^0");
    return one();
  }
  if (is_zero()) {
    if (q4 < 0) fail(Errc::zero_divisor, "zero divisor: negative power of zero");
    return zero();
  }
  if (q4 % 4 == 0) {
    long n = q4 / 4;
    Expr b = *this;
    if (n < 0) {
      b = one() / b;
      n = -n;
    }
    Expr acc = one();
    while (n) {
      if (n & 1) acc = acc * b;
      b = b * b;
      n >>= 1;
    }
    return acc;
  }
  // Fractional exponent: only a single term (positive branch) is in fragment.
  Raw r = raw(*this);
  if (!is_one_terms(r.den) || r.num.size() != 1)
    fail(Errc::unsupported_radical,
         "unsupported radical: fractional power of a multi-term expression");
  const Term& t = r.num[0];
  long g = std::abs(std::gcd(q4, 4L));
  unsigned root_index = static_cast<unsigned>(4 / g);
  long ipow = q4 / g;
  auto root = exact_rational_root(t.c, root_index);
  if (!root)
    fail(Errc::unsupported_radical,
         "unsupported radical: coefficient " + cartan::to_string(t.c) +
             " has no exact " + std::to_string(root_index) + "th root");
  Rational coeff = rational_pow(*root, ipow);
  Mono mono;
  mono.reserve(t.m.size());
  for (const auto& f : t.m) {
    long scaled = static_cast<long>(f.quarters) * q4;
    if (scaled % 4 != 0)
      fail(Errc::unsupported_radical,
           "unsupported radical: would need exponent denominator beyond 4 on " +
               f.atom.name());
    int nq = static_cast<int>(scaled / 4);
    if (nq != 0) mono.push_back({f.atom, nq});
  }
  return ExprAccess::wrap(make_impl({Term{coeff, std::move(mono)}}, one_terms()));
}

namespace {

// d(atom)/dv as a multiplier atom: 1, another atom, or nothing.
enum class DKind { zero, unit, bump };

DKind atom_derivative(Atom a, Atom v, Atom* bumped) {
  if (a == v) return DKind::unit;
  if (a.is_coeff() && v.is_chart() && v.chart_var() == ChartVar::x) {
    *bumped = a.bumped();
    return DKind::bump;
  }
  return DKind::zero;
}

Terms diff_terms(const Terms& terms, Atom v) {
  Terms rawv;
  for (const auto& t : terms) {
    for (size_t i = 0; i < t.m.size(); ++i) {
      Atom bumped = t.m[i].atom;
      DKind k = atom_derivative(t.m[i].atom, v, &bumped);
      if (k == DKind::zero) continue;
      Term nt;
      nt.c = t.c * Rational(t.m[i].quarters, 4);
      Mono m;
      m.reserve(t.m.size() + 1);
      for (size_t j = 0; j < t.m.size(); ++j) {
        int q = t.m[j].quarters - (j == i ? 4 : 0);
        if (q != 0) m.push_back({t.m[j].atom, q});
      }
      nt.m = std::move(m);
      if (k == DKind::bump)
        nt.m = mono_mul(nt.m, Mono{AtomPower{bumped, 4}});
      rawv.push_back(std::move(nt));
    }
  }
  return canonical(std::move(rawv));
}

}  // namespace

Expr Expr::derivative(Atom v) const {
  if (v.is_coeff())
    fail(Errc::invalid_input, "cannot differentiate by a coefficient atom");
  Raw r = raw(*this);
  Terms dn = diff_terms(r.num, v);
  if (is_one_terms(r.den))
    return ExprAccess::wrap(normalize(std::move(dn), one_terms()));
  Terms dd = diff_terms(r.den, v);
  // d' = 0 keeps the denominator fixed; squaring it anyway would double the
  // degree at every derivative along a chain.
  if (dd.empty()) return ExprAccess::wrap(normalize(std::move(dn), r.den));
  // (n'd - nd') / d^2
  Terms num = add_terms(mul_terms(dn, r.den), neg_terms(mul_terms(r.num, dd)));
  return ExprAccess::wrap(normalize(std::move(num), mul_terms(r.den, r.den)));
}

namespace {

Expr subst_terms(const Terms& terms, const std::map<Atom, Expr>& bindings) {
  Expr acc = Expr::zero();
  for (const auto& t : terms) {
    Expr prod = Expr::constant(t.c);
    for (const auto& f : t.m) {
      auto it = bindings.find(f.atom);
      if (it == bindings.end())
        prod = prod * Expr::atom_power(f.atom, f.quarters);
      else
        prod = prod * it->second.pow(Rational(f.quarters, 4));
    }
    acc = acc + prod;
  }
  return acc;
}

}  // namespace

Expr Expr::substituted(const std::map<Atom, Expr>& bindings) const {
  if (bindings.empty()) return *this;
  // A value may mention its own key (renaming, e.g. x -> (x-b)/a) since the
  // substitution is simultaneous; mentioning a *different* bound atom would
  // make the result depend on resolution order, so that stays an error.
  for (const auto& [a, value] : bindings)
    for (const auto& [b, unused] : bindings) {
      (void)unused;
      if (a != b && value.contains(b))
        fail(Errc::cyclic_binding, "cyclic binding: value for " + a.name() +
                                       " mentions bound atom " + b.name());
    }
  Raw r = raw(*this);
  Expr num = subst_terms(r.num, bindings);
  if (is_one_terms(r.den)) return num;
  Expr den = subst_terms(r.den, bindings);
  return num / den;  // zero_divisor surfaces naturally
}

namespace {

constexpr double kSingularTol = 1e-12;

double eval_terms(const Terms& terms, const std::map<Atom, double>& env) {
  double sum = 0;
  for (const auto& t : terms) {
    double prod = to_double(t.c);
    for (const auto& f : t.m) {
      auto it = env.find(f.atom);
      if (it == env.end())
        fail(Errc::missing_binding, "missing binding for " + f.atom.name());
      double v = it->second;
      if (f.quarters % 4 == 0) {
        if (f.quarters < 0 && std::abs(v) < kSingularTol)
          fail(Errc::singular_evaluation,
               "singular evaluation: " + f.atom.name() + " near zero");
        prod *= std::pow(v, f.quarters / 4);
      } else {
        if (v < kSingularTol)
          fail(Errc::singular_evaluation,
               "singular evaluation: fractional power of non-positive " +
                   f.atom.name());
        prod *= std::pow(v, static_cast<double>(f.quarters) / 4.0);
      }
    }
    sum += prod;
  }
  return sum;
}

Rational eval_terms_exact(const Terms& terms, const std::map<Atom, Rational>& env) {
  Rational sum(0);
  for (const auto& t : terms) {
    Rational prod = t.c;
    for (const auto& f : t.m) {
      auto it = env.find(f.atom);
      if (it == env.end())
        fail(Errc::missing_binding, "missing binding for " + f.atom.name());
      long q = f.quarters;
      long g = std::abs(std::gcd(q, 4L));
      unsigned root_index = static_cast<unsigned>(4 / g);
      Rational base = it->second;
      if (root_index > 1) {
        auto root = exact_rational_root(base, root_index);
        if (!root)
          fail(Errc::unsupported_radical,
               "unsupported radical: no exact root of " + cartan::to_string(base));
        base = *root;
      }
      if (base == 0 && q < 0)
        fail(Errc::singular_evaluation, "singular evaluation: division by zero");
      prod *= rational_pow(base, q / g);
    }
    sum += prod;
  }
  return sum;
}

}  // namespace

double Expr::evaluate(const std::map<Atom, double>& env) const {
  Raw r = raw(*this);
  double num = eval_terms(r.num, env);
  if (is_one_terms(r.den)) return num;
  double den = eval_terms(r.den, env);
  if (std::abs(den) < kSingularTol)
    fail(Errc::singular_evaluation, "singular evaluation: denominator near zero");
  return num / den;
}

Rational Expr::evaluate_exact(const std::map<Atom, Rational>& env) const {
  Raw r = raw(*this);
  Rational num = eval_terms_exact(r.num, env);
  if (is_one_terms(r.den)) return num;
  Rational den = eval_terms_exact(r.den, env);
  if (den == 0)
    fail(Errc::singular_evaluation, "singular evaluation: denominator is zero");
  return num / den;
}

namespace {

using Series = std::vector<double>;  // Taylor coefficients around the point

Series series_mul(const Series& a, const Series& b) {
  Series out(a.size(), 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// (v + eps)^alpha truncated: generalized binomial coefficients.  A zero
// falling factorial (integer alpha < k) zeroes the term before v^(alpha-k)
// could blow up.
Series series_pow_at(double v, double alpha, size_t len, const Atom& who) {
  bool integral = alpha == std::floor(alpha);
  if (integral ? (alpha < 0 && std::abs(v) < kSingularTol)
               : (v < kSingularTol))
    fail(Errc::singular_evaluation,
         integral ? "singular evaluation: " + who.name() + " near zero"
                  : "singular evaluation: fractional power of non-positive " +
                        who.name());
  Series out(len, 0.0);
  double binom = 1.0;
  for (size_t k = 0; k < len; ++k) {
    out[k] = binom == 0.0 ? 0.0 : binom * std::pow(v, alpha - double(k));
    binom *= (alpha - double(k)) / double(k + 1);
  }
  return out;
}

Series eval_terms_jet(const Terms& terms, const std::map<Atom, double>& env,
                      Atom var, size_t len) {
  Series sum(len, 0.0);
  for (const auto& t : terms) {
    Series prod(len, 0.0);
    prod[0] = to_double(t.c);
    for (const auto& f : t.m) {
      auto it = env.find(f.atom);
      if (it == env.end())
        fail(Errc::missing_binding, "missing binding for " + f.atom.name());
      double alpha = double(f.quarters) / 4.0;
      if (f.atom == var) {
        prod = series_mul(prod, series_pow_at(it->second, alpha, len, f.atom));
      } else {
        // Constant along var: scale the running product.
        Series c = series_pow_at(it->second, alpha, 1, f.atom);
        for (double& p : prod) p *= c[0];
      }
    }
    for (size_t k = 0; k < len; ++k) sum[k] += prod[k];
  }
  return sum;
}

Series series_div(const Series& n, const Series& d) {
  if (std::abs(d[0]) < kSingularTol)
    fail(Errc::singular_evaluation, "singular evaluation: denominator near zero");
  Series q(n.size(), 0.0);
  for (size_t k = 0; k < n.size(); ++k) {
    double acc = n[k];
    for (size_t i = 1; i <= k; ++i) acc -= d[i] * q[k - i];
    q[k] = acc / d[0];
  }
  return q;
}

}  // namespace

std::vector<double> Expr::evaluate_jet(const std::map<Atom, double>& env,
                                       Atom var, int order) const {
  if (order < 0) fail(Errc::invalid_input, "evaluate_jet needs order >= 0");
  const size_t len = static_cast<size_t>(order) + 1;
  Raw r = raw(*this);
  Series num = eval_terms_jet(r.num, env, var, len);
  Series out = is_one_terms(r.den)
                   ? std::move(num)
                   : series_div(num, eval_terms_jet(r.den, env, var, len));
  double factorial = 1.0;
  for (size_t k = 0; k < len; ++k) {
    out[k] *= factorial;  // Taylor coefficient -> derivative value
    factorial *= double(k + 1);
  }
  return out;
}

std::set<Atom> Expr::atoms() const {
  std::set<Atom> out;
  Raw r = raw(*this);
  for (const Terms* ts : {&r.num, &r.den})
    for (const auto& t : *ts)
      for (const auto& f : t.m) out.insert(f.atom);
  return out;
}

bool Expr::contains(Atom a) const {
  Raw r = raw(*this);
  for (const Terms* ts : {&r.num, &r.den})
    for (const auto& t : *ts)
      for (const auto& f : t.m)
        if (f.atom == a) return true;
  return false;
}

Expr Expr::numerator() const {
  return ExprAccess::wrap(make_impl(raw(*this).num, one_terms()));
}

Expr Expr::denominator() const {
  return ExprAccess::wrap(make_impl(raw(*this).den, one_terms()));
}

bool Expr::has_unit_denominator() const { return is_one_terms(raw(*this).den); }

size_t Expr::term_count() const { return raw(*this).num.size(); }

namespace {
std::vector<TermView> view_terms(const Terms& ts) {
  std::vector<TermView> out;
  out.reserve(ts.size());
  for (const auto& t : ts) out.push_back({t.c, t.m});
  return out;
}
}  // namespace

std::vector<TermView> Expr::numerator_terms() const {
  return view_terms(raw(*this).num);
}

std::vector<TermView> Expr::denominator_terms() const {
  return view_terms(raw(*this).den);
}

bool operator==(const Expr& a, const Expr& b) {
  if (&ExprAccess::impl(a) == &ExprAccess::impl(b)) return true;
  Raw ra = raw(a), rb = raw(b);
  return terms_equal(ra.num, rb.num) && terms_equal(ra.den, rb.den);
}

EqualityVerdict check_equal(const Expr& a, const Expr& b, uint64_t seed) {
  if (a == b) return EqualityVerdict::syntactic;
  Expr cross = a.numerator() * b.denominator() - b.numerator() * a.denominator();
  if (cross.is_zero()) return EqualityVerdict::cross_multiplied;
  // Probabilistic fallback: seeded numeric probes on [0.5, 2].
  std::set<Atom> vars = a.atoms();
  for (Atom v : b.atoms()) vars.insert(v);
  Rng rng(seed ^ 0x517cc1b727220a95ULL);
  int done = 0, attempts = 0;
  while (done < 50 && attempts < 500) {
    ++attempts;
    std::map<Atom, double> env;
    for (Atom v : vars) env[v] = rng.uniform(0.5, 2.0);
    double va, vb;
    try {
      va = a.evaluate(env);
      vb = b.evaluate(env);
    } catch (const Error&) {
      continue;  // singular sample; draw again
    }
    double scale = std::max({1.0, std::abs(va), std::abs(vb)});
    if (std::abs(va - vb) > 1e-10 * scale) return EqualityVerdict::unequal;
    ++done;
  }
  return EqualityVerdict::probabilistic;
}

bool exprs_equal(const Expr& a, const Expr& b, uint64_t seed) {
  return check_equal(a, b, seed) != EqualityVerdict::unequal;
}

const char* to_string(EqualityVerdict v) {
  switch (v) {
    case EqualityVerdict::unequal: return "unequal";
    case EqualityVerdict::syntactic: return "syntactic";
    case EqualityVerdict::cross_multiplied: return "cross-multiplied";
    case EqualityVerdict::probabilistic: return "probabilistic";
  }
  return "?";
}

}  // namespace cartan
