#pragma once
#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "coeff_ring.hpp"
#include "errors.hpp"

namespace cforge {

// sentinel exponents
inline constexpr int64_t PREC_EXACT = std::numeric_limits<int64_t>::max();
inline constexpr int64_t VAL_INF = std::numeric_limits<int64_t>::max() / 4;

struct SeriesRing {
  const CoeffRing* coeff;
  int prec;  // default relative precision used when truncation is forced

  static const SeriesRing* get(const CoeffRing* c, int prec = 24) {
    static std::mutex mu;
    static std::map<std::tuple<const CoeffRing*, int>, std::unique_ptr<SeriesRing>> cache;
    if (prec < 1) throw RingMismatch("series precision must be positive");
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(c, prec);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    auto r = std::unique_ptr<SeriesRing>(new SeriesRing{c, prec});
    const SeriesRing* ptr = r.get();
    cache[key] = std::move(r);
    return ptr;
  }
};

// Truncated Laurent series sum c_e pi^e over a coefficient ring.
//
// Stored support is normalized (no zero coefficient at either end) and lies
// strictly below `prec`, the absolute precision: coefficients at exponents
// < prec are exactly known, nothing is known beyond. prec == PREC_EXACT means
// the element IS its stored support (a Laurent polynomial, no error term).
//
// An empty support therefore means two distinct observable things:
//   exact zero            (prec == PREC_EXACT)
//   zero up to precision  (prec finite: the element lies in pi^prec * O)
// and the two are never conflated.
class Series {
 public:
  Series() : R_(nullptr), lo_(0), prec_(PREC_EXACT) {}

  static Series zero(const SeriesRing* R) { return Series(R, 0, {}, PREC_EXACT); }
  static Series big_oh(const SeriesRing* R, int64_t p) { return Series(R, 0, {}, p); }
  static Series from_int(const SeriesRing* R, int64_t n) {
    return from_coeff(R, R->coeff->from_int(n), 0);
  }
  static Series one(const SeriesRing* R) { return from_int(R, 1); }
  static Series pi_pow(const SeriesRing* R, int64_t e) {
    return from_coeff(R, R->coeff->one(), e);
  }
  static Series from_coeff(const SeriesRing* R, const RElem& c, int64_t e) {
    return Series(R, e, {c}, PREC_EXACT);
  }
  // coefficients cs[i] at exponent lo + i
  static Series make(const SeriesRing* R, int64_t lo, std::vector<RElem> cs,
                     int64_t prec = PREC_EXACT) {
    return Series(R, lo, std::move(cs), prec);
  }

  const SeriesRing* ring() const { return R_; }
  int64_t prec() const { return prec_; }
  bool exact() const { return prec_ == PREC_EXACT; }
  bool support_empty() const { return cs_.empty(); }

  bool is_zero_certified() const { return cs_.empty() && exact(); }
  bool appears_zero() const { return cs_.empty(); }
  bool zero_up_to_precision() const { return cs_.empty() && !exact(); }

  // certified nonzero at this precision?
  bool is_nonzero_certified() const { return !cs_.empty(); }

  int64_t val() const {
    if (!cs_.empty()) return lo_;
    if (exact()) return VAL_INF;
    throw PrecisionExhausted("valuation of a series that is zero up to O(pi^" +
                             std::to_string(prec_) + ")");
  }

  RElem leading_coeff() const {
    if (cs_.empty()) throw PrecisionExhausted("leading coefficient of zero");
    return cs_[0];
  }

  bool leading_is_unit() const {
    return !cs_.empty() && R_->coeff->is_unit(cs_[0]);
  }

  // coefficient at exponent e; must be below the absolute precision
  RElem coeff(int64_t e) const {
    if (!exact() && e >= prec_)
      throw PrecisionExhausted("coefficient at pi^" + std::to_string(e) +
                               " beyond O(pi^" + std::to_string(prec_) + ")");
    if (cs_.empty() || e < lo_ || e >= lo_ + static_cast<int64_t>(cs_.size()))
      return R_->coeff->zero();
    return cs_[static_cast<size_t>(e - lo_)];
  }

  int64_t support_lo() const { return lo_; }
  int64_t support_hi() const {  // one past the last stored exponent
    return cs_.empty() ? lo_ : lo_ + static_cast<int64_t>(cs_.size());
  }

  // ---- arithmetic ----

  friend Series operator+(const Series& a, const Series& b) {
    a.check(b);
    int64_t p = std::min(a.prec_, b.prec_);
    if (a.cs_.empty() && b.cs_.empty()) return Series(a.R_, 0, {}, p);
    int64_t lo = std::min(a.cs_.empty() ? b.lo_ : a.lo_, b.cs_.empty() ? a.lo_ : b.lo_);
    int64_t hi = std::max(a.support_hi(), b.support_hi());
    std::vector<RElem> cs(static_cast<size_t>(hi - lo), a.R_->coeff->zero());
    for (size_t i = 0; i < a.cs_.size(); ++i)
      cs[static_cast<size_t>(a.lo_ + static_cast<int64_t>(i) - lo)] = a.cs_[i];
    for (size_t i = 0; i < b.cs_.size(); ++i) {
      size_t j = static_cast<size_t>(b.lo_ + static_cast<int64_t>(i) - lo);
      cs[j] = a.R_->coeff->add(cs[j], b.cs_[i]);
    }
    return Series(a.R_, lo, std::move(cs), p);
  }

  friend Series operator-(const Series& a) {
    std::vector<RElem> cs(a.cs_.size());
    for (size_t i = 0; i < a.cs_.size(); ++i) cs[i] = a.R_->coeff->neg(a.cs_[i]);
    return Series(a.R_, a.lo_, std::move(cs), a.prec_);
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  friend Series operator*(const Series& a, const Series& b) {
    a.check(b);
    if (a.is_zero_certified() || b.is_zero_certified()) return zero(a.R_);
    // error exponent: min of v(a)+prec(b), v(b)+prec(a), prec(a)+prec(b)
    int64_t p = PREC_EXACT;
    if (!a.cs_.empty() && b.prec_ != PREC_EXACT) p = std::min(p, a.lo_ + b.prec_);
    if (!b.cs_.empty() && a.prec_ != PREC_EXACT) p = std::min(p, b.lo_ + a.prec_);
    if (a.prec_ != PREC_EXACT && b.prec_ != PREC_EXACT) p = std::min(p, a.prec_ + b.prec_);
    if (a.cs_.empty() || b.cs_.empty()) return Series(a.R_, 0, {}, p);
    std::vector<RElem> cs(a.cs_.size() + b.cs_.size() - 1, a.R_->coeff->zero());
    for (size_t i = 0; i < a.cs_.size(); ++i)
      for (size_t j = 0; j < b.cs_.size(); ++j)
        cs[i + j] = a.R_->coeff->add(cs[i + j], a.R_->coeff->mul(a.cs_[i], b.cs_[j]));
    return Series(a.R_, a.lo_ + b.lo_, std::move(cs), p);
  }

  Series scaled(const RElem& c) const {
    std::vector<RElem> cs(cs_.size());
    for (size_t i = 0; i < cs_.size(); ++i) cs[i] = R_->coeff->mul(cs_[i], c);
    return Series(R_, lo_, std::move(cs), prec_);
  }

  Series shifted(int64_t e) const {  // multiply by pi^e
    return Series(R_, lo_ + e, cs_, prec_ == PREC_EXACT ? PREC_EXACT : prec_ + e);
  }

  // Multiplicative inverse. The leading coefficient must be certified: a
  // support-empty inexact element raises PrecisionExhausted, a nonunit
  // leading coefficient (possible over Galois rings) raises NotAUnit.
  Series inverse() const {
    if (cs_.empty()) {
      if (exact()) throw NotAUnit("inverse of exact zero");
      throw PrecisionExhausted("inverse: leading term not certified nonzero");
    }
    if (!R_->coeff->is_unit(cs_[0])) throw NotAUnit("inverse: leading coefficient");
    const CoeffRing* C = R_->coeff;
    RElem c0inv = C->inv(cs_[0]);
    if (cs_.size() == 1 && exact()) return from_coeff(R_, c0inv, -lo_);
    // relative precision of the result
    int64_t rel = exact() ? R_->prec : prec_ - lo_;
    std::vector<RElem> d(static_cast<size_t>(rel), C->zero());
    d[0] = c0inv;
    for (int64_t n = 1; n < rel; ++n) {
      RElem s = C->zero();
      int64_t top = std::min<int64_t>(n, static_cast<int64_t>(cs_.size()) - 1);
      for (int64_t i = 1; i <= top; ++i)
        s = C->add(s, C->mul(cs_[static_cast<size_t>(i)], d[static_cast<size_t>(n - i)]));
      d[static_cast<size_t>(n)] = C->neg(C->mul(c0inv, s));
    }
    return Series(R_, -lo_, std::move(d), rel - lo_);
  }

  friend Series operator/(const Series& a, const Series& b) { return a * b.inverse(); }

  Series pow(int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    Series r = one(R_), b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  // canonical representative mod pi^n: stored support clipped to exponents < n,
  // exact by construction. Needs prec >= n.
  Series reduced_mod_pi(int64_t n) const {
    if (!exact() && prec_ < n)
      throw PrecisionExhausted("representative mod pi^" + std::to_string(n) +
                               " at O(pi^" + std::to_string(prec_) + ")");
    std::vector<RElem> cs;
    int64_t lo = lo_;
    for (size_t i = 0; i < cs_.size(); ++i)
      if (lo_ + static_cast<int64_t>(i) < n) cs.push_back(cs_[i]);
    return Series(R_, lo, std::move(cs), PREC_EXACT);
  }

  // forget everything at or beyond exponent p (explicit truncation)
  Series truncated(int64_t p) const {
    return Series(R_, lo_, cs_, std::min(prec_, p));
  }

  // ---- comparisons ----

  // true/false when certifiable, PrecisionExhausted otherwise
  friend bool certified_equal(const Series& a, const Series& b) {
    Series d = a - b;
    if (!d.cs_.empty()) return false;
    if (d.exact()) return true;
    throw PrecisionExhausted("equality ambiguous below O(pi^" + std::to_string(d.prec_) + ")");
  }

  // congruence mod pi^n, certified
  friend bool congruent_mod_pi(const Series& a, const Series& b, int64_t n) {
    Series d = a - b;
    if (!d.exact() && d.prec_ < n)
      throw PrecisionExhausted("congruence mod pi^" + std::to_string(n) + " not certifiable");
    return d.cs_.empty() || d.lo_ >= n;
  }

  // deterministic total order on exact series (for map keys)
  friend bool exact_less(const Series& a, const Series& b) {
    if (!a.exact() || !b.exact()) throw PrecisionExhausted("ordering of inexact series");
    if (a.cs_.empty() != b.cs_.empty()) return a.cs_.empty();
    if (a.cs_.empty()) return false;
    if (a.lo_ != b.lo_) return a.lo_ < b.lo_;
    if (a.cs_.size() != b.cs_.size()) return a.cs_.size() < b.cs_.size();
    for (size_t i = 0; i < a.cs_.size(); ++i) {
      int64_t x = a.R_->coeff->encode(a.cs_[i]), y = b.R_->coeff->encode(b.cs_[i]);
      if (x != y) return x < y;
    }
    return false;
  }

  friend bool exact_equal(const Series& a, const Series& b) {
    return !exact_less(a, b) && !exact_less(b, a);
  }

  std::vector<int64_t> encode() const {
    if (!exact()) throw PrecisionExhausted("encoding of inexact series");
    std::vector<int64_t> v;
    v.push_back(cs_.empty() ? 0 : lo_);
    for (const RElem& c : cs_) v.push_back(R_->coeff->encode(c));
    return v;
  }

  std::string to_string() const {
    if (cs_.empty() && exact()) return "0";
    std::string s;
    for (size_t i = 0; i < cs_.size(); ++i) {
      int64_t e = lo_ + static_cast<int64_t>(i);
      if (R_->coeff->is_zero(cs_[i])) continue;
      if (!s.empty()) s += " + ";
      std::string c = std::to_string(R_->coeff->encode(cs_[i]));
      if (e == 0) s += c;
      else if (c == "1") s += "pi^" + std::to_string(e);
      else s += c + "*pi^" + std::to_string(e);
    }
    if (!exact()) {
      if (!s.empty()) s += " + ";
      s += "O(pi^" + std::to_string(prec_) + ")";
    }
    return s;
  }

 private:
  Series(const SeriesRing* R, int64_t lo, std::vector<RElem> cs, int64_t prec)
      : R_(R), lo_(lo), cs_(std::move(cs)), prec_(prec) {
    normalize();
  }

  void check(const Series& b) const {
    if (R_ != b.R_) throw RingMismatch("series over different rings");
  }

  void normalize() {
    // clip support at the precision bound
    if (prec_ != PREC_EXACT && !cs_.empty()) {
      int64_t over = lo_ + static_cast<int64_t>(cs_.size()) - prec_;
      if (over > 0) {
        if (over >= static_cast<int64_t>(cs_.size())) cs_.clear();
        else cs_.resize(cs_.size() - static_cast<size_t>(over));
      }
    }
    size_t a = 0, b = cs_.size();
    while (a < b && R_->coeff->is_zero(cs_[a])) ++a;
    while (b > a && R_->coeff->is_zero(cs_[b - 1])) --b;
    if (a == b) {
      cs_.clear();
      lo_ = 0;
    } else {
      if (a > 0 || b < cs_.size())
        cs_ = std::vector<RElem>(cs_.begin() + static_cast<long>(a), cs_.begin() + static_cast<long>(b));
      lo_ += static_cast<int64_t>(a);
    }
  }

  const SeriesRing* R_;
  int64_t lo_;
  std::vector<RElem> cs_;
  int64_t prec_;
};

// coefficientwise reduction GR(p^k,f)((pi)) -> GF(p^f)((pi))
inline Series residue_map(const SeriesRing* target, const Series& a) {
  const CoeffRing* gr = a.ring()->coeff;
  if (target->coeff != gr->residue_ring()) throw RingMismatch("residue target ring");
  std::vector<RElem> cs;
  int64_t lo = a.support_lo();
  for (int64_t e = lo; e < a.support_hi(); ++e) cs.push_back(residue_map(gr, a.coeff(e)));
  return Series::make(target, lo, std::move(cs), a.prec());
}

// coefficientwise naive lift GF(p^f)((pi)) -> GR(p^k,f)((pi))
inline Series naive_lift(const SeriesRing* target, const Series& a) {
  if (target->coeff->residue_ring() != a.ring()->coeff) throw RingMismatch("lift target ring");
  std::vector<RElem> cs;
  int64_t lo = a.support_lo();
  for (int64_t e = lo; e < a.support_hi(); ++e) cs.push_back(naive_lift(target->coeff, a.coeff(e)));
  return Series::make(target, lo, std::move(cs), a.prec());
}

inline Series random_series(const SeriesRing* R, Rng& rng, int64_t lo_min = -3,
                            int64_t lo_max = 3, int max_len = 6, bool allow_inexact = false) {
  int64_t lo = rng.range(lo_min, lo_max);
  int len = static_cast<int>(rng.below(static_cast<uint64_t>(max_len + 1)));
  std::vector<RElem> cs;
  for (int i = 0; i < len; ++i) cs.push_back(R->coeff->random(rng));
  int64_t prec = PREC_EXACT;
  if (allow_inexact && rng.flip()) prec = lo + len + static_cast<int64_t>(rng.below(4));
  return Series::make(R, lo, std::move(cs), prec);
}

}  // namespace cforge
