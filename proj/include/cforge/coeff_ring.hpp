#pragma once
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace cforge {

// Element of GF(p^f) or of the Galois ring GR(p^k, f) = (Z/p^k)[x]/(m(x)):
// a polynomial residue c[0] + c[1] x + c[2] x^2 with coefficients in [0, p^k).
// f <= 3 throughout, so a fixed-size array suffices.
struct RElem {
  std::array<int64_t, 3> c{0, 0, 0};

  friend bool operator==(const RElem& a, const RElem& b) { return a.c == b.c; }
  friend bool operator!=(const RElem& a, const RElem& b) { return !(a == b); }
  friend bool operator<(const RElem& a, const RElem& b) { return a.c < b.c; }
};

// Ring descriptor. k = 1 gives the field GF(p^f); k > 1 the Galois ring
// GR(p^k, f). The modulus is a fixed monic lift of an irreducible degree-f
// polynomial over Z/p, shipped in a small built-in table (f = 1 uses x itself).
// Instances are interned: compare descriptors by pointer.
class CoeffRing {
 public:
  int64_t p;
  int k;
  int f;
  int64_t pk;  // p^k
  int64_t q;   // p^f
  std::array<int64_t, 4> modulus{0, 0, 0, 0};  // modulus[f] == 1

  static const CoeffRing* field(int64_t p, int f) { return get(p, 1, f); }
  static const CoeffRing* galois(int64_t p, int k, int f) { return get(p, k, f); }

  bool is_field() const { return k == 1; }
  const CoeffRing* residue_ring() const { return field(p, f); }

  // ---- element construction ----

  RElem zero() const { return RElem{}; }
  RElem one() const { return from_int(1); }

  RElem from_int(int64_t n) const {
    RElem r;
    r.c[0] = mod(n);
    return r;
  }

  RElem make(std::initializer_list<int64_t> cs) const {
    RElem r;
    int i = 0;
    for (int64_t v : cs) {
      if (i >= f) throw RingMismatch("coefficient list longer than degree");
      r.c[i++] = mod(v);
    }
    return r;
  }

  // dense integer encoding: sum c[i] * pk^i  (total order + hashing + I/O)
  int64_t encode(const RElem& a) const {
    int64_t e = 0;
    for (int i = f - 1; i >= 0; --i) e = e * pk + a.c[i];
    return e;
  }
  RElem decode(int64_t e) const {
    if (e < 0) throw RingMismatch("negative element code");
    RElem r;
    for (int i = 0; i < f; ++i) { r.c[i] = e % pk; e /= pk; }
    if (e != 0) throw RingMismatch("element code out of range");
    return r;
  }

  // ---- arithmetic ----

  RElem add(const RElem& a, const RElem& b) const {
    RElem r;
    for (int i = 0; i < f; ++i) r.c[i] = mod(a.c[i] + b.c[i]);
    return r;
  }
  RElem sub(const RElem& a, const RElem& b) const {
    RElem r;
    for (int i = 0; i < f; ++i) r.c[i] = mod(a.c[i] - b.c[i]);
    return r;
  }
  RElem neg(const RElem& a) const {
    RElem r;
    for (int i = 0; i < f; ++i) r.c[i] = mod(-a.c[i]);
    return r;
  }

  RElem mul(const RElem& a, const RElem& b) const {
    // schoolbook product, degree <= 4, then reduce by the monic modulus
    std::array<int64_t, 5> t{0, 0, 0, 0, 0};
    for (int i = 0; i < f; ++i)
      for (int j = 0; j < f; ++j) t[i + j] = mod(t[i + j] + mod(a.c[i] * b.c[j]));
    for (int d = 2 * (f - 1); d >= f; --d) {
      int64_t lead = t[d];
      if (lead == 0) continue;
      t[d] = 0;
      for (int i = 0; i < f; ++i) t[d - f + i] = mod(t[d - f + i] - lead * modulus[i]);
    }
    RElem r;
    for (int i = 0; i < f; ++i) r.c[i] = t[i];
    return r;
  }

  RElem pow(RElem a, int64_t e) const {
    RElem r = one();
    while (e > 0) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  bool is_zero(const RElem& a) const {
    for (int i = 0; i < f; ++i) if (a.c[i] != 0) return false;
    return true;
  }

  // units of GR(p^k,f) are exactly the elements nonzero mod p
  bool is_unit(const RElem& a) const {
    for (int i = 0; i < f; ++i) if (a.c[i] % p != 0) return true;
    return false;
  }

  RElem inv(const RElem& a) const {
    if (!is_unit(a)) throw NotAUnit("inv in coefficient ring");
    // inverse in the residue field by exponentiation, then Hensel:
    // x -> x(2 - ax) doubles p-adic accuracy each step.
    const CoeffRing* F = residue_ring();
    RElem x = lift_into(*this, F->pow(residue_of(*F, a), F->q - 2));
    for (int acc = 1; acc < k; acc *= 2) x = mul(x, sub(from_int(2), mul(a, x)));
    return x;
  }

  // ---- residue field transfer ----

  static RElem residue_of(const CoeffRing& field_ring, const RElem& a) {
    RElem r;
    for (int i = 0; i < field_ring.f; ++i) r.c[i] = a.c[i] % field_ring.p;
    return r;
  }
  static RElem lift_into(const CoeffRing& gr, const RElem& a) {
    return a;  // coefficients in [0,p) already reduced in [0,p^k)
  }

  // ---- enumeration / sampling ----

  std::vector<RElem> all_elements() const {
    int64_t total = 1;
    for (int i = 0; i < f; ++i) total *= pk;
    std::vector<RElem> out;
    out.reserve(static_cast<size_t>(total));
    for (int64_t e = 0; e < total; ++e) out.push_back(decode(e));
    return out;
  }

  std::vector<RElem> all_units() const {
    std::vector<RElem> out;
    for (const RElem& a : all_elements())
      if (is_unit(a)) out.push_back(a);
    return out;
  }

  // a fixed multiplicative generator of GF(p^f)^* (k = 1 only)
  RElem multiplicative_generator() const {
    if (k != 1) throw NotApplicable("generator of unit group: field only");
    for (const RElem& a : all_elements()) {
      if (is_zero(a)) continue;
      RElem x = a;
      bool prim = true;
      for (int64_t i = 1; i < q - 1; ++i) {
        if (x == one()) { prim = false; break; }
        x = mul(x, a);
      }
      if (prim) return a;
    }
    throw Error("no multiplicative generator found");  // unreachable
  }

  // discrete log base multiplicative_generator(); field units only
  int64_t dlog(const RElem& a) const {
    if (k != 1 || is_zero(a)) throw NotApplicable("dlog of nonunit");
    RElem g = multiplicative_generator(), x = one();
    for (int64_t i = 0; i < q - 1; ++i) {
      if (x == a) return i;
      x = mul(x, g);
    }
    throw Error("dlog failed");  // unreachable
  }

  RElem random(Rng& rng) const {
    RElem r;
    for (int i = 0; i < f; ++i) r.c[i] = static_cast<int64_t>(rng.below(static_cast<uint64_t>(pk)));
    return r;
  }
  RElem random_unit(Rng& rng) const {
    for (;;) {
      RElem r = random(rng);
      if (is_unit(r)) return r;
    }
  }

  std::string to_string(const RElem& a) const { return std::to_string(encode(a)); }

 private:
  int64_t mod(int64_t v) const {
    v %= pk;
    return v < 0 ? v + pk : v;
  }

  static const CoeffRing* get(int64_t p, int k, int f) {
    static std::mutex mu;
    static std::map<std::tuple<int64_t, int, int>, std::unique_ptr<CoeffRing>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(p, k, f);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second.get();
    auto ring = std::unique_ptr<CoeffRing>(new CoeffRing(p, k, f));
    const CoeffRing* ptr = ring.get();
    cache[key] = std::move(ring);
    return ptr;
  }

  CoeffRing(int64_t p_, int k_, int f_) : p(p_), k(k_), f(f_) {
    if (p != 2 && p != 3 && p != 5 && p != 7) throw RingMismatch("p must be one of 2,3,5,7");
    if (f < 1 || f > 3) throw RingMismatch("f must be 1, 2 or 3");
    if (k < 1 || k > 12) throw RingMismatch("k must be in [1,12]");
    pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    q = 1;
    for (int i = 0; i < f; ++i) q *= p;
    set_modulus();
    check_modulus_irreducible();
  }

  void set_modulus() {
    // fixed table of monic irreducible polynomials over Z/p; the Galois-ring
    // modulus is the same integer coefficient vector read mod p^k.
    auto set = [&](std::initializer_list<int64_t> cs) {
      int i = 0;
      for (int64_t v : cs) modulus[i++] = v % pk;
    };
    if (f == 1) { set({0, 1}); return; }  // x
    if (f == 2) {
      if (p == 2) set({1, 1, 1});            // x^2 + x + 1
      else if (p == 3) set({2, 2, 1});       // x^2 + 2x + 2
      else if (p == 5) set({2, 4, 1});       // x^2 + 4x + 2
      else set({3, 6, 1});                   // x^2 + 6x + 3
      return;
    }
    if (p == 2) set({1, 1, 0, 1});           // x^3 + x + 1
    else if (p == 3) set({1, 2, 0, 1});      // x^3 + 2x + 1
    else if (p == 5) set({3, 3, 0, 1});      // x^3 + 3x + 3
    else set({4, 0, 6, 1});                  // x^3 + 6x^2 + 4
  }

  void check_modulus_irreducible() const {
    if (f == 1) return;
    // degree 2 or 3: irreducible over Z/p iff no root in Z/p
    for (int64_t r = 0; r < p; ++r) {
      int64_t v = 0;
      for (int i = f; i >= 0; --i) v = (v * r + (modulus[i] % p)) % p;
      if (v == 0) throw RingMismatch("modulus table entry is reducible");
    }
  }
};

inline RElem residue_map(const CoeffRing* gr, const RElem& a) {
  return CoeffRing::residue_of(*gr->residue_ring(), a);
}

// set-theoretic section of residue_map: coefficients in [0,p) reread in GR(p^k,f)
inline RElem naive_lift(const CoeffRing* gr, const RElem& a) {
  return CoeffRing::lift_into(*gr, a);
}

}  // namespace cforge
