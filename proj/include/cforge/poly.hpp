#pragma once
#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "coeff_ring.hpp"
#include "errors.hpp"
#include "series.hpp"

namespace cforge {

// dense polynomial over a CoeffRing (division and gcd require a field)
class GFPoly {
 public:
  GFPoly() : C_(nullptr) {}
  explicit GFPoly(const CoeffRing* C) : C_(C) {}
  GFPoly(const CoeffRing* C, std::vector<RElem> cs) : C_(C), c_(std::move(cs)) { trim(); }

  static GFPoly zero(const CoeffRing* C) { return GFPoly(C); }
  static GFPoly one(const CoeffRing* C) { return constant(C, C->one()); }
  static GFPoly constant(const CoeffRing* C, const RElem& a) {
    return GFPoly(C, std::vector<RElem>{a});
  }
  static GFPoly monomial(const CoeffRing* C, const RElem& a, int64_t e) {
    std::vector<RElem> cs(static_cast<size_t>(e + 1), C->zero());
    cs[static_cast<size_t>(e)] = a;
    return GFPoly(C, std::move(cs));
  }
  static GFPoly var(const CoeffRing* C) { return monomial(C, C->one(), 1); }

  const CoeffRing* ring() const { return C_; }
  int64_t deg() const { return static_cast<int64_t>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  RElem coeff(int64_t i) const {
    if (i < 0 || i >= static_cast<int64_t>(c_.size())) return C_->zero();
    return c_[static_cast<size_t>(i)];
  }
  RElem lead() const {
    if (c_.empty()) throw NotApplicable("leading coefficient of zero polynomial");
    return c_.back();
  }

  friend GFPoly operator+(const GFPoly& a, const GFPoly& b) {
    a.check(b);
    std::vector<RElem> cs(std::max(a.c_.size(), b.c_.size()), a.C_->zero());
    for (size_t i = 0; i < cs.size(); ++i)
      cs[i] = a.C_->add(a.coeff(static_cast<int64_t>(i)), b.coeff(static_cast<int64_t>(i)));
    return GFPoly(a.C_, std::move(cs));
  }
  friend GFPoly operator-(const GFPoly& a) {
    std::vector<RElem> cs(a.c_.size());
    for (size_t i = 0; i < cs.size(); ++i) cs[i] = a.C_->neg(a.c_[i]);
    return GFPoly(a.C_, std::move(cs));
  }
  friend GFPoly operator-(const GFPoly& a, const GFPoly& b) { return a + (-b); }
  friend GFPoly operator*(const GFPoly& a, const GFPoly& b) {
    a.check(b);
    if (a.is_zero() || b.is_zero()) return zero(a.C_);
    std::vector<RElem> cs(a.c_.size() + b.c_.size() - 1, a.C_->zero());
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j)
        cs[i + j] = a.C_->add(cs[i + j], a.C_->mul(a.c_[i], b.c_[j]));
    return GFPoly(a.C_, std::move(cs));
  }
  GFPoly scaled(const RElem& s) const {
    std::vector<RElem> cs(c_.size());
    for (size_t i = 0; i < cs.size(); ++i) cs[i] = C_->mul(c_[i], s);
    return GFPoly(C_, std::move(cs));
  }

  friend bool operator==(const GFPoly& a, const GFPoly& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (size_t i = 0; i < a.c_.size(); ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }
  friend bool operator!=(const GFPoly& a, const GFPoly& b) { return !(a == b); }

  // quotient and remainder; coefficient ring must be a field
  friend std::pair<GFPoly, GFPoly> divmod(const GFPoly& a, const GFPoly& b) {
    a.check(b);
    if (!a.C_->is_field()) throw NotApplicable("polynomial division needs a field");
    if (b.is_zero()) throw NotAUnit("polynomial division by zero");
    GFPoly r = a, q = zero(a.C_);
    RElem linv = a.C_->inv(b.lead());
    while (!r.is_zero() && r.deg() >= b.deg()) {
      int64_t e = r.deg() - b.deg();
      RElem s = a.C_->mul(r.lead(), linv);
      GFPoly m = monomial(a.C_, s, e);
      q = q + m;
      r = r - m * b;
    }
    return {q, r};
  }
  friend GFPoly operator/(const GFPoly& a, const GFPoly& b) { return divmod(a, b).first; }
  friend GFPoly operator%(const GFPoly& a, const GFPoly& b) { return divmod(a, b).second; }

  GFPoly monic() const {
    if (is_zero()) return *this;
    return scaled(C_->inv(lead()));
  }

  friend GFPoly gcd(GFPoly a, GFPoly b) {
    while (!b.is_zero()) {
      GFPoly r = a % b;
      a = b;
      b = r;
    }
    return a.monic();
  }

  RElem eval(const RElem& x) const {
    RElem r = C_->zero();
    for (size_t i = c_.size(); i-- > 0;) r = C_->add(C_->mul(r, x), c_[i]);
    return r;
  }

  // value in F_q((pi)) under t = 1/pi: degree-d polynomial has support [-d, 0]
  Series at_inverse_pi(const SeriesRing* R) const {
    if (R->coeff != C_) throw RingMismatch("series ring over different coefficients");
    std::vector<RElem> cs(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) cs[c_.size() - 1 - i] = c_[i];
    return Series::make(R, -deg(), std::move(cs));
  }

  std::vector<int64_t> encode() const {
    std::vector<int64_t> v;
    for (const RElem& x : c_) v.push_back(C_->encode(x));
    return v;
  }

  std::string to_string(const std::string& var = "t") const {
    if (is_zero()) return "0";
    std::string s;
    for (size_t i = c_.size(); i-- > 0;) {
      if (C_->is_zero(c_[i])) continue;
      if (!s.empty()) s += "+";
      std::string co = std::to_string(C_->encode(c_[i]));
      if (i == 0) s += co;
      else {
        if (co != "1") s += co + "*";
        s += var;
        if (i != 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void check(const GFPoly& b) const {
    if (C_ != b.C_) throw RingMismatch("polynomials over different rings");
  }
  void trim() {
    while (!c_.empty() && C_->is_zero(c_.back())) c_.pop_back();
  }
  const CoeffRing* C_;
  std::vector<RElem> c_;
};

// fraction num/den of polynomials over a field, normalized: gcd removed, den monic
class PolyFrac {
 public:
  PolyFrac() = default;
  explicit PolyFrac(GFPoly n) : num_(std::move(n)), den_(GFPoly::one(num_.ring())) {}
  PolyFrac(GFPoly n, GFPoly d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

  static PolyFrac zero(const CoeffRing* C) { return PolyFrac(GFPoly::zero(C)); }
  static PolyFrac one(const CoeffRing* C) { return PolyFrac(GFPoly::one(C)); }

  const GFPoly& num() const { return num_; }
  const GFPoly& den() const { return den_; }
  const CoeffRing* ring() const { return num_.ring(); }
  bool is_zero() const { return num_.is_zero(); }

  friend PolyFrac operator+(const PolyFrac& a, const PolyFrac& b) {
    return PolyFrac(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend PolyFrac operator-(const PolyFrac& a) { return PolyFrac(-a.num_, a.den_); }
  friend PolyFrac operator-(const PolyFrac& a, const PolyFrac& b) { return a + (-b); }
  friend PolyFrac operator*(const PolyFrac& a, const PolyFrac& b) {
    return PolyFrac(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend PolyFrac operator/(const PolyFrac& a, const PolyFrac& b) {
    if (b.is_zero()) throw NotAUnit("division by zero fraction");
    return PolyFrac(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const PolyFrac& a, const PolyFrac& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const PolyFrac& a, const PolyFrac& b) { return !(a == b); }

  std::string to_string(const std::string& var = "x") const {
    std::string s = num_.to_string(var);
    if (den_ != GFPoly::one(num_.ring())) s = "(" + s + ")/(" + den_.to_string(var) + ")";
    return s;
  }

 private:
  void normalize() {
    if (den_.is_zero()) throw NotAUnit("fraction with zero denominator");
    if (num_.is_zero()) {
      den_ = GFPoly::one(num_.ring());
      return;
    }
    GFPoly g = gcd(num_, den_);
    num_ = num_ / g;
    den_ = den_ / g;
    RElem linv = num_.ring()->inv(den_.lead());
    num_ = num_.scaled(linv);
    den_ = den_.scaled(linv);
  }
  GFPoly num_, den_;
};

// an exact Laurent series as a fraction in the uniformizer
inline PolyFrac series_to_frac(const Series& s) {
  if (!s.exact()) throw PrecisionExhausted("fraction from inexact series");
  const CoeffRing* C = s.ring()->coeff;
  if (!C->is_field()) throw NotApplicable("fractions need field coefficients");
  std::vector<RElem> cs;
  for (int64_t e = s.support_lo(); e < s.support_hi(); ++e) cs.push_back(s.coeff(e));
  GFPoly p(C, std::move(cs));
  int64_t lo = s.appears_zero() ? 0 : s.support_lo();
  if (lo >= 0) return PolyFrac(p * GFPoly::monomial(C, C->one(), lo));
  return PolyFrac(p, GFPoly::monomial(C, C->one(), -lo));
}

// ---- parsing ----
//
// polynomial literal over variable `var`: terms joined by + or -, each
//    [coeff] [* ] [var [^ exponent]]
// with coeff a nonnegative integer in the ring's element encoding.

namespace detail {
inline void skip_ws(const std::string& s, size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}
inline bool parse_uint(const std::string& s, size_t& i, int64_t& out) {
  skip_ws(s, i);
  size_t j = i;
  int64_t v = 0;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
    v = v * 10 + (s[j] - '0');
    ++j;
  }
  if (j == i) return false;
  out = v;
  i = j;
  return true;
}
inline bool parse_int(const std::string& s, size_t& i, int64_t& out) {
  skip_ws(s, i);
  bool neg = false;
  size_t save = i;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
    neg = s[i] == '-';
    ++i;
  }
  if (!parse_uint(s, i, out)) {
    i = save;
    return false;
  }
  if (neg) out = -out;
  return true;
}
inline bool match_word(const std::string& s, size_t& i, const std::string& w) {
  skip_ws(s, i);
  if (s.compare(i, w.size(), w) != 0) return false;
  size_t j = i + w.size();
  if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
    return false;
  i = j;
  return true;
}
}  // namespace detail

// one term: coefficient code and exponent; returns false at end of input
template <class Emit>
inline void parse_poly_terms(const std::string& s, const std::string& var, Emit emit) {
  size_t i = 0;
  detail::skip_ws(s, i);
  if (i >= s.size()) throw UsageError("empty polynomial literal");
  bool first = true;
  while (true) {
    detail::skip_ws(s, i);
    if (i >= s.size()) break;
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw UsageError("expected + or - in polynomial literal: " + s);
    }
    first = false;
    detail::skip_ws(s, i);
    int64_t code = -1;
    bool have_coeff = detail::parse_uint(s, i, code);
    int64_t expo = 0;
    bool have_var = detail::match_word(s, i, var);
    if (!have_var) {
      detail::skip_ws(s, i);
      if (have_coeff && i < s.size() && s[i] == '*') {
        ++i;
        if (!detail::match_word(s, i, var))
          throw UsageError("expected variable '" + var + "' after * in: " + s);
        have_var = true;
      }
    }
    if (have_var) {
      expo = 1;
      detail::skip_ws(s, i);
      if (i < s.size() && s[i] == '^') {
        ++i;
        if (!detail::parse_int(s, i, expo)) throw UsageError("bad exponent in: " + s);
      }
    } else if (!have_coeff) {
      throw UsageError("expected term in polynomial literal: " + s);
    }
    emit(sign, have_coeff ? code : 1, expo);
  }
}

inline GFPoly parse_poly(const CoeffRing* C, const std::string& s, const std::string& var = "t") {
  GFPoly p = GFPoly::zero(C);
  parse_poly_terms(s, var, [&](int sign, int64_t code, int64_t expo) {
    if (expo < 0) throw UsageError("negative exponent in polynomial literal: " + s);
    RElem c = C->decode(code);
    if (sign < 0) c = C->neg(c);
    p = p + GFPoly::monomial(C, c, expo);
  });
  return p;
}

// Laurent series literal over `pi`, e.g. "pi^-2 + 1 + 3*pi"; exact result
inline Series parse_series(const SeriesRing* R, const std::string& s,
                           const std::string& var = "pi") {
  Series out = Series::zero(R);
  parse_poly_terms(s, var, [&](int sign, int64_t code, int64_t expo) {
    RElem c = R->coeff->decode(code);
    if (sign < 0) c = R->coeff->neg(c);
    out = out + Series::from_coeff(R, c, expo);
  });
  return out;
}

}  // namespace cforge
