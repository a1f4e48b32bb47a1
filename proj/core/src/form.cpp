#include "cartan/form.hpp"

#include <algorithm>

namespace cartan {

namespace {

void check_index(int i) {
  if (i < 0 || i >= kCovectorCount)
    fail(Errc::invalid_input, "covector index out of range");
}

// Sorts the tuple in place, returns the permutation sign (0 on repeats).
int sort_sign(int* idx, int n) {
  int sign = 1;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (idx[a] == idx[b]) return 0;
      if (idx[a] > idx[b]) {
        std::swap(idx[a], idx[b]);
        sign = -sign;
      }
    }
  }
  return sign;
}

}  // namespace

Form Form::zero(int degree) {
  if (degree < 0 || degree > 3)
    fail(Errc::degree_overflow, "form degree must be 0..3");
  Form f;
  f.degree_ = degree;
  return f;
}

Form Form::scalar(const Expr& e) {
  Form f;
  f.c0_ = e;
  return f;
}

Form Form::covector(int index) {
  check_index(index);
  Form f;
  f.degree_ = 1;
  f.c1_[index] = Expr::one();
  return f;
}

Form Form::d_atom(Atom a) {
  auto idx = a.covector_index();
  if (!idx)
    fail(Errc::invalid_input,
         "no covector slot for atom " + a.name());
  return covector(*idx);
}

bool Form::is_zero() const {
  switch (degree_) {
    case 0: return c0_.is_zero();
    case 1: return c1_.empty();
    case 2: return c2_.empty();
    default: return c3_.empty();
  }
}

const Expr& Form::scalar_part() const {
  if (degree_ != 0) fail(Errc::invalid_input, "scalar_part on nonzero degree");
  return c0_;
}

Expr Form::coeff1(int i) const {
  if (degree_ != 1) fail(Errc::invalid_input, "coeff1 on wrong degree");
  auto it = c1_.find(i);
  return it == c1_.end() ? Expr::zero() : it->second;
}

Expr Form::coeff2(int i, int j) const {
  if (degree_ != 2) fail(Errc::invalid_input, "coeff2 on wrong degree");
  int idx[2] = {i, j};
  int sign = sort_sign(idx, 2);
  if (sign == 0) return Expr::zero();
  auto it = c2_.find({idx[0], idx[1]});
  if (it == c2_.end()) return Expr::zero();
  return sign > 0 ? it->second : Expr::zero() - it->second;
}

Expr Form::coeff3(int i, int j, int k) const {
  if (degree_ != 3) fail(Errc::invalid_input, "coeff3 on wrong degree");
  int idx[3] = {i, j, k};
  int sign = sort_sign(idx, 3);
  if (sign == 0) return Expr::zero();
  auto it = c3_.find({idx[0], idx[1], idx[2]});
  if (it == c3_.end()) return Expr::zero();
  return sign > 0 ? it->second : Expr::zero() - it->second;
}

void Form::set1(int i, const Expr& c) {
  check_index(i);
  if (!c.is_zero()) c1_[i] = c;
}

void Form::add2(int i, int j, const Expr& c) {
  check_index(i);
  check_index(j);
  int idx[2] = {i, j};
  int sign = sort_sign(idx, 2);
  if (sign == 0 || c.is_zero()) return;
  Expr signed_c = sign > 0 ? c : Expr::zero() - c;
  auto key = std::make_pair(idx[0], idx[1]);
  auto it = c2_.find(key);
  if (it == c2_.end()) {
    c2_.emplace(key, signed_c);
  } else {
    it->second = it->second + signed_c;
    if (it->second.is_zero()) c2_.erase(it);
  }
}

void Form::add3(int i, int j, int k, const Expr& c) {
  check_index(i);
  check_index(j);
  check_index(k);
  int idx[3] = {i, j, k};
  int sign = sort_sign(idx, 3);
  if (sign == 0 || c.is_zero()) return;
  Expr signed_c = sign > 0 ? c : Expr::zero() - c;
  std::array<int, 3> key{idx[0], idx[1], idx[2]};
  auto it = c3_.find(key);
  if (it == c3_.end()) {
    c3_.emplace(key, signed_c);
  } else {
    it->second = it->second + signed_c;
    if (it->second.is_zero()) c3_.erase(it);
  }
}

void Form::prune() {
  for (auto it = c1_.begin(); it != c1_.end();) {
    it = it->second.is_zero() ? c1_.erase(it) : std::next(it);
  }
  for (auto it = c2_.begin(); it != c2_.end();) {
    it = it->second.is_zero() ? c2_.erase(it) : std::next(it);
  }
  for (auto it = c3_.begin(); it != c3_.end();) {
    it = it->second.is_zero() ? c3_.erase(it) : std::next(it);
  }
}

Form Form::operator+(const Form& o) const {
  if (degree_ != o.degree_)
    fail(Errc::invalid_input, "adding forms of different degree");
  Form out = *this;
  switch (degree_) {
    case 0:
      out.c0_ = out.c0_ + o.c0_;
      break;
    case 1:
      for (const auto& [i, c] : o.c1_) {
        auto it = out.c1_.find(i);
        if (it == out.c1_.end()) {
          out.c1_.emplace(i, c);
        } else {
          it->second = it->second + c;
        }
      }
      break;
    case 2:
      for (const auto& [ij, c] : o.c2_) out.add2(ij.first, ij.second, c);
      break;
    default:
      for (const auto& [ijk, c] : o.c3_) out.add3(ijk[0], ijk[1], ijk[2], c);
      break;
  }
  out.prune();
  return out;
}

Form Form::operator-() const {
  Form out = *this;
  out.c0_ = Expr::zero() - out.c0_;
  for (auto& [i, c] : out.c1_) c = Expr::zero() - c;
  for (auto& [ij, c] : out.c2_) c = Expr::zero() - c;
  for (auto& [ijk, c] : out.c3_) c = Expr::zero() - c;
  return out;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

Form operator*(const Expr& s, const Form& f) {
  Form out = f;
  if (s.is_zero()) return Form::zero(f.degree_);
  out.c0_ = s * out.c0_;
  for (auto& [i, c] : out.c1_) c = s * c;
  for (auto& [ij, c] : out.c2_) c = s * c;
  for (auto& [ijk, c] : out.c3_) c = s * c;
  return out;
}

Form wedge(const Form& a, const Form& b) {
  int deg = a.degree_ + b.degree_;
  if (deg > 3)
    fail(Errc::degree_overflow,
         "wedge result degree " + std::to_string(deg) + " exceeds 3");
  // Scalar factors commute.
  if (a.degree_ == 0) return a.c0_ * b;
  if (b.degree_ == 0) return b.c0_ * a;
  Form out = Form::zero(deg);
  if (a.degree_ == 1 && b.degree_ == 1) {
    for (const auto& [i, ci] : a.c1_)
      for (const auto& [j, cj] : b.c1_) out.add2(i, j, ci * cj);
  } else if (a.degree_ == 1 && b.degree_ == 2) {
    for (const auto& [i, ci] : a.c1_)
      for (const auto& [jk, cjk] : b.c2_)
        out.add3(i, jk.first, jk.second, ci * cjk);
  } else {  // 2 wedge 1
    for (const auto& [ij, cij] : a.c2_)
      for (const auto& [k, ck] : b.c1_)
        out.add3(ij.first, ij.second, k, cij * ck);
  }
  out.prune();
  return out;
}

namespace {

// d of a scalar coefficient as component list over the 16 covectors.  The dx
// component uses the bumping derivative, so coefficient-atom dependence
// arrives as f' dx without du..ds crosstalk.
std::map<int, Expr> scalar_differential(const Expr& e) {
  std::map<int, Expr> out;
  Expr ddx = e.derivative(Atom::chart(ChartVar::x));
  if (!ddx.is_zero()) out[0] = ddx;
  for (const Atom& a : e.atoms()) {
    auto idx = a.covector_index();
    if (!idx || *idx == 0) continue;
    Expr da = e.derivative(a);
    if (!da.is_zero()) out[*idx] = da;
  }
  return out;
}

}  // namespace

Form d(const Form& f) {
  if (f.degree_ >= 3)
    fail(Errc::degree_overflow, "d of a degree-3 form leaves the fragment");
  Form out = Form::zero(f.degree_ + 1);
  switch (f.degree_) {
    case 0:
      for (const auto& [v, c] : scalar_differential(f.c0_)) out.set1(v, c);
      break;
    case 1:
      for (const auto& [i, ci] : f.c1_)
        for (const auto& [v, c] : scalar_differential(ci)) out.add2(v, i, c);
      break;
    default:
      for (const auto& [ij, cij] : f.c2_)
        for (const auto& [v, c] : scalar_differential(cij))
          out.add3(v, ij.first, ij.second, c);
      break;
  }
  out.prune();
  return out;
}

Form substitute_in_form(const Form& f, const std::map<Atom, Expr>& bindings) {
  if (f.degree_ == 0) return Form::scalar(f.c0_.substituted(bindings));
  // Replacement 1-forms per covector; unbound slots keep their covector.
  std::array<const Expr*, kCovectorCount> bound{};
  for (const auto& [a, e] : bindings) {
    auto idx = a.covector_index();
    if (idx) bound[static_cast<std::size_t>(*idx)] = &e;
  }
  // Binding values cannot mention bound atoms (substituted() rejects that),
  // so the replacement differentials need no further substitution.
  auto replacement = [&](int v) -> Form {
    const Expr* b = bound[static_cast<std::size_t>(v)];
    if (!b) return Form::covector(v);
    return d(Form::scalar(*b));
  };
  Form out = Form::zero(f.degree_);
  if (f.degree_ == 1) {
    for (const auto& [i, ci] : f.c1_) {
      out += ci.substituted(bindings) * replacement(i);
    }
    return out;
  }
  if (f.degree_ == 2) {
    for (const auto& [ij, cij] : f.c2_) {
      out += cij.substituted(bindings) *
             wedge(replacement(ij.first), replacement(ij.second));
    }
    return out;
  }
  for (const auto& [ijk, c] : f.c3_) {
    out += c.substituted(bindings) *
           wedge(replacement(ijk[0]),
                 wedge(replacement(ijk[1]), replacement(ijk[2])));
  }
  return out;
}

double Form::evaluate(const std::map<Atom, double>& env) const {
  if (degree_ != 0) fail(Errc::invalid_input, "scalar evaluate on form");
  return c0_.evaluate(env);
}

double Form::evaluate(const std::map<Atom, double>& env,
                      const TangentVector& X) const {
  if (degree_ != 1) fail(Errc::invalid_input, "1-form evaluate degree");
  double acc = 0;
  for (const auto& [i, c] : c1_)
    acc += c.evaluate(env) * X[static_cast<std::size_t>(i)];
  return acc;
}

double Form::evaluate(const std::map<Atom, double>& env,
                      const TangentVector& X, const TangentVector& Y) const {
  if (degree_ != 2) fail(Errc::invalid_input, "2-form evaluate degree");
  double acc = 0;
  for (const auto& [ij, c] : c2_) {
    auto i = static_cast<std::size_t>(ij.first);
    auto j = static_cast<std::size_t>(ij.second);
    acc += c.evaluate(env) * (X[i] * Y[j] - X[j] * Y[i]);
  }
  return acc;
}

}  // namespace cartan
