#pragma once
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix2.hpp"
#include "poly.hpp"
#include "series.hpp"

namespace cforge {

// ---- the exceptional degree set and its maximum function ----
//
// degrees m with every binomial C(m, i) nonzero mod p: equivalently
// 0 < m < p, or m = m' p^r - 1 with 0 < m' < p and r > 0

inline bool special_degree(int64_t p, int64_t m) {
  if (m <= 0) return false;
  if (m < p) return true;
  int64_t s = m + 1;
  int64_t r = 0;
  while (s % p == 0) {
    s /= p;
    ++r;
  }
  return r > 0 && s < p;
}

inline int64_t special_degree_floor(int64_t p, int64_t n) {
  if (n < 1) throw NotApplicable("no special degree below 1");
  for (int64_t m = n; m >= 1; --m)
    if (special_degree(p, m)) return m;
  throw NotApplicable("unreachable: 1 is always special");
}

// ---- homogeneous polynomials of degree n in two variables ----

// coefficient c[j] sits on X^j Y^{n-j}
struct HomPoly {
  int n = 0;
  std::vector<Series> c;

  HomPoly() = default;
  HomPoly(int n_, std::vector<Series> c_) : n(n_), c(std::move(c_)) {
    if (c.size() != static_cast<size_t>(n + 1)) throw IncompatibleWeight("coefficient count");
  }

  static HomPoly zero(const SeriesRing* R, int n) {
    return HomPoly(n, std::vector<Series>(static_cast<size_t>(n + 1), Series::zero(R)));
  }
  static HomPoly monomial(const SeriesRing* R, int n, int j, const Series& coeff) {
    HomPoly p = zero(R, n);
    p.c[static_cast<size_t>(j)] = coeff;
    return p;
  }
  static HomPoly x_power(const SeriesRing* R, int n) {
    return monomial(R, n, n, Series::one(R));
  }
  static HomPoly y_power(const SeriesRing* R, int n) {
    return monomial(R, n, 0, Series::one(R));
  }

  const SeriesRing* ring() const { return c[0].ring(); }

  friend HomPoly operator+(const HomPoly& a, const HomPoly& b) {
    if (a.n != b.n) throw IncompatibleWeight("sum of different degrees");
    HomPoly r = a;
    for (size_t j = 0; j < r.c.size(); ++j) r.c[j] = r.c[j] + b.c[j];
    return r;
  }
  friend HomPoly operator-(const HomPoly& a, const HomPoly& b) {
    if (a.n != b.n) throw IncompatibleWeight("difference of different degrees");
    HomPoly r = a;
    for (size_t j = 0; j < r.c.size(); ++j) r.c[j] = r.c[j] - b.c[j];
    return r;
  }
  HomPoly scaled(const Series& s) const {
    HomPoly r = *this;
    for (Series& x : r.c) x = x * s;
    return r;
  }
  bool is_zero_certified() const {
    for (const Series& x : c)
      if (!x.is_zero_certified()) return false;
    return true;
  }
  bool exact() const {
    for (const Series& x : c)
      if (!x.exact()) return false;
    return true;
  }

  std::string to_string() const {
    std::string s;
    for (int j = n; j >= 0; --j) {
      const Series& co = c[static_cast<size_t>(j)];
      if (co.is_zero_certified()) continue;
      if (!s.empty()) s += " + ";
      std::string cs = co.to_string();
      if (cs.find('+') != std::string::npos || cs.find('*') != std::string::npos)
        cs = "(" + cs + ")";
      s += cs;
      if (j > 0) s += "*X^" + std::to_string(j);
      if (j < n) s += "*Y^" + std::to_string(n - j);
    }
    return s.empty() ? "0" : s;
  }
};

inline bool certified_equal(const HomPoly& a, const HomPoly& b) {
  if (a.n != b.n) return false;
  for (size_t j = 0; j < a.c.size(); ++j)
    if (!certified_equal(a.c[j], b.c[j])) return false;
  return true;
}

// substitution X -> aX + bY, Y -> cX + dY by the entries of M, then an
// optional determinant twist det(M)^{-l}. Substituting the entries of g^{-1}
// realizes the degree-n action of g twisted by det^l.
inline HomPoly rho_subst(const Matrix2& M, const HomPoly& P, int64_t l = 0) {
  const SeriesRing* R = P.ring();
  int n = P.n;
  // pow1[j] = coefficients of (aX + bY)^j, pow2[j] = coefficients of (cX + dY)^j
  std::vector<std::vector<Series>> pow1(static_cast<size_t>(n + 1)),
      pow2(static_cast<size_t>(n + 1));
  pow1[0] = {Series::one(R)};
  pow2[0] = {Series::one(R)};
  for (int j = 1; j <= n; ++j) {
    auto step = [&](const std::vector<Series>& prev, const Series& hi, const Series& lo) {
      // multiply a homogeneous coefficient vector by (hi*X + lo*Y)
      std::vector<Series> r(prev.size() + 1, Series::zero(R));
      for (size_t i = 0; i < prev.size(); ++i) {
        r[i + 1] = r[i + 1] + prev[i] * hi;
        r[i] = r[i] + prev[i] * lo;
      }
      return r;
    };
    pow1[static_cast<size_t>(j)] = step(pow1[static_cast<size_t>(j - 1)], M.a(), M.b());
    pow2[static_cast<size_t>(j)] = step(pow2[static_cast<size_t>(j - 1)], M.c(), M.d());
  }
  HomPoly out = HomPoly::zero(R, n);
  for (int j = 0; j <= n; ++j) {
    const Series& co = P.c[static_cast<size_t>(j)];
    if (co.is_zero_certified()) continue;
    const auto &f = pow1[static_cast<size_t>(j)], &g = pow2[static_cast<size_t>(n - j)];
    for (size_t i1 = 0; i1 < f.size(); ++i1)
      for (size_t i2 = 0; i2 < g.size(); ++i2)
        out.c[i1 + i2] = out.c[i1 + i2] + co * f[i1] * g[i2];
  }
  if (l != 0) out = out.scaled(M.det().pow(-l));
  return out;
}

// action of a group element (inverts the matrix; prefer rho_subst with an
// exactly-known inverse when precision matters)
inline HomPoly rho_act(const Matrix2& g, const HomPoly& P, int64_t l = 0) {
  return rho_subst(g.inverse(), P, l);
}

// ---- dual vectors ----

// phi[j] = value on the monomial X^j Y^{n-j}
struct DualVec {
  int n = 0;
  std::vector<Series> v;

  DualVec() = default;
  DualVec(int n_, std::vector<Series> v_) : n(n_), v(std::move(v_)) {
    if (v.size() != static_cast<size_t>(n + 1)) throw IncompatibleWeight("component count");
  }
  static DualVec zero(const SeriesRing* R, int n) {
    return DualVec(n, std::vector<Series>(static_cast<size_t>(n + 1), Series::zero(R)));
  }
  static DualVec delta(const SeriesRing* R, int n, int j) {
    DualVec d = zero(R, n);
    d.v[static_cast<size_t>(j)] = Series::one(R);
    return d;
  }
  const SeriesRing* ring() const { return v[0].ring(); }

  friend DualVec operator+(const DualVec& a, const DualVec& b) {
    if (a.n != b.n) throw IncompatibleWeight("sum of different degrees");
    DualVec r = a;
    for (size_t j = 0; j < r.v.size(); ++j) r.v[j] = r.v[j] + b.v[j];
    return r;
  }
  friend DualVec operator-(const DualVec& a, const DualVec& b) {
    if (a.n != b.n) throw IncompatibleWeight("difference of different degrees");
    DualVec r = a;
    for (size_t j = 0; j < r.v.size(); ++j) r.v[j] = r.v[j] - b.v[j];
    return r;
  }
  DualVec scaled(const Series& s) const {
    DualVec r = *this;
    for (Series& x : r.v) x = x * s;
    return r;
  }
  DualVec negated() const {
    DualVec r = *this;
    for (Series& x : r.v) x = -x;
    return r;
  }
  bool is_zero_certified() const {
    for (const Series& x : v)
      if (!x.is_zero_certified()) return false;
    return true;
  }

  std::string to_string() const {
    std::string s = "[";
    for (size_t j = 0; j < v.size(); ++j) {
      if (j) s += ", ";
      s += v[j].to_string();
    }
    return s + "]";
  }
};

inline bool certified_equal(const DualVec& a, const DualVec& b) {
  if (a.n != b.n) return false;
  for (size_t j = 0; j < a.v.size(); ++j)
    if (!certified_equal(a.v[j], b.v[j])) return false;
  return true;
}

inline Series pairing(const DualVec& phi, const HomPoly& P) {
  if (phi.n != P.n) throw IncompatibleWeight("pairing of different degrees");
  Series s = Series::zero(phi.ring());
  for (size_t j = 0; j < phi.v.size(); ++j) s = s + phi.v[j] * P.c[j];
  return s;
}

// dual action of g: value on P becomes the value on the substitution by g's
// own entries (the matrix of the action of g^{-1}), twisted by det(g)^{-l}.
// Pairing a dual vector moved by g against a polynomial moved by g is then
// the original pairing.
inline DualVec dual_act(const Matrix2& g, const DualVec& phi, int64_t l = 0) {
  const SeriesRing* R = phi.ring();
  DualVec out = DualVec::zero(R, phi.n);
  for (int j = 0; j <= phi.n; ++j) {
    HomPoly image = rho_subst(g, HomPoly::monomial(R, phi.n, j, Series::one(R)));
    Series s = Series::zero(R);
    for (size_t i = 0; i < image.c.size(); ++i) s = s + phi.v[i] * image.c[i];
    out.v[static_cast<size_t>(j)] = s;
  }
  if (l != 0) out = out.scaled(g.det().pow(-l));
  return out;
}

// ---- distinguished one-parameter families and cyclicity probes ----

// substitution matrices whose rho realizes the two families: applying
// rho_subst with these is the action of their matrix inverses
inline Matrix2 gamma_subst_mat(const SeriesRing* R, const Series& a) {
  return Matrix2(a, Series::one(R), Series::one(R), Series::zero(R));
}
inline Matrix2 delta_subst_mat(const SeriesRing* R, const Series& a) {
  return Matrix2(a, Series::one(R), Series::zero(R), Series::one(R));
}
// the group elements themselves
inline Matrix2 gamma_group_mat(const SeriesRing* R, const Series& a) {
  return Matrix2(Series::zero(R), Series::one(R), Series::one(R), -a);
}
inline Matrix2 delta_group_mat(const SeriesRing* R, const Series& a) {
  Series ai = a.inverse();
  return Matrix2(ai, -ai, Series::zero(R), Series::one(R));
}

// default parameter samples: the residue field units plus unit perturbations
// of the uniformizer (deduplicated; small in characteristic 2)
inline std::vector<Series> default_cyclicity_samples(const SeriesRing* R) {
  std::vector<Series> out;
  auto push = [&](const Series& s) {
    for (const Series& t : out)
      if (exact_equal(s, t)) return;
    out.push_back(s);
  };
  for (const RElem& u : R->coeff->all_units()) push(Series::from_coeff(R, u, 0));
  Series one = Series::one(R), pi = Series::pi_pow(R, 1);
  push(one + pi);
  push(one - pi);
  push(pi + one);
  push(pi - one);
  return out;
}

// closure of a generator under the sampled substitutions, with the cumulative
// substitution words kept for later replay
struct CyclicClosure {
  int n = 0;
  std::vector<HomPoly> raw;       // raw[j] = rho_subst(words[j], generator)
  std::vector<Matrix2> words;     // cumulative substitution matrices
  std::vector<std::vector<PolyFrac>> echelon;  // row-reduced copies of raw
  bool complete = false;          // echelon spans the whole degree-n space

  size_t rank() const { return raw.size(); }
};

namespace detail {
inline std::vector<PolyFrac> hom_to_frac(const HomPoly& P) {
  std::vector<PolyFrac> v;
  for (const Series& s : P.c) v.push_back(series_to_frac(s));
  return v;
}

// reduce v against rows (assumed in echelon form with unit leading pivots);
// returns false if v reduces to zero, otherwise appends the new echelon row
inline bool echelon_insert(std::vector<std::vector<PolyFrac>>& rows, std::vector<PolyFrac> v,
                           const CoeffRing* C) {
  PolyFracOps ops{C};
  for (const auto& row : rows) {
    size_t piv = 0;
    while (piv < row.size() && row[piv].is_zero()) ++piv;
    if (piv == row.size()) continue;
    if (v[piv].is_zero()) continue;
    PolyFrac f = v[piv];
    for (size_t j = 0; j < v.size(); ++j) v[j] = ops.sub(v[j], ops.mul(f, row[j]));
  }
  size_t piv = 0;
  while (piv < v.size() && v[piv].is_zero()) ++piv;
  if (piv == v.size()) return false;
  PolyFrac inv = ops.div(ops.one(), v[piv]);
  for (size_t j = 0; j < v.size(); ++j) v[j] = ops.mul(v[j], inv);
  rows.push_back(std::move(v));
  return true;
}
}  // namespace detail

inline CyclicClosure cyclic_closure(const SeriesRing* R, int n, const HomPoly& generator,
                                    const std::vector<Series>& samples,
                                    size_t max_steps = 20000) {
  if (!R->coeff->is_field()) throw NotApplicable("cyclicity closure needs field coefficients");
  CyclicClosure cl;
  cl.n = n;
  const CoeffRing* C = R->coeff;
  std::vector<Matrix2> subs;
  for (const Series& a : samples) {
    subs.push_back(gamma_subst_mat(R, a));
    subs.push_back(delta_subst_mat(R, a));
  }
  auto add = [&](const HomPoly& P, const Matrix2& W) {
    if (!detail::echelon_insert(cl.echelon, detail::hom_to_frac(P), C)) return false;
    cl.raw.push_back(P);
    cl.words.push_back(W);
    return true;
  };
  add(generator, Matrix2::identity(R));
  size_t steps = 0;
  for (size_t i = 0; i < cl.raw.size() && cl.rank() < static_cast<size_t>(n + 1); ++i) {
    for (const Matrix2& S : subs) {
      if (++steps > max_steps)
        throw DegreeBoundTooSmall("closure step budget exhausted at rank " +
                                  std::to_string(cl.rank()));
      // copies: add() grows cl.raw, which may reallocate under us
      HomPoly base = cl.raw[i];
      Matrix2 W = cl.words[i];
      add(rho_subst(S, base), W * S);
      if (cl.rank() == static_cast<size_t>(n + 1)) break;
    }
  }
  cl.complete = cl.rank() == static_cast<size_t>(n + 1);
  return cl;
}

// coefficients x with target = sum x_j rho_subst(words[j], generator), if the
// target lies in the closure span
inline std::optional<std::vector<PolyFrac>> express_in_closure(const CyclicClosure& cl,
                                                               const HomPoly& target) {
  if (target.n != cl.n) throw IncompatibleWeight("closure expression");
  const CoeffRing* C = target.ring()->coeff;
  PolyFracOps ops{C};
  // columns are the raw vectors
  size_t dim = static_cast<size_t>(cl.n + 1);
  std::vector<std::vector<PolyFrac>> m(dim, std::vector<PolyFrac>(cl.raw.size(), ops.zero()));
  for (size_t j = 0; j < cl.raw.size(); ++j) {
    auto col = detail::hom_to_frac(cl.raw[j]);
    for (size_t i = 0; i < dim; ++i) m[i][j] = col[i];
  }
  return solve_affine(m, detail::hom_to_frac(target), ops);
}

// the proper subspace spanned by p-th power monomials, present when p | n
inline std::vector<HomPoly> frobenius_subrep(const SeriesRing* R, int n) {
  int64_t p = R->coeff->p;
  if (n <= 0 || n % p != 0) throw NotApplicable("frobenius subspace needs p | n, n > 0");
  std::vector<HomPoly> basis;
  for (int j = 0; j * p <= n; ++j)
    basis.push_back(HomPoly::monomial(R, n, j * static_cast<int>(p), Series::one(R)));
  return basis;
}

// ---- exhaustive invariant subspace probe over the residue field ----

// substitution over bare field elements (fast path for the finite group)
inline std::vector<RElem> rho_subst_fq(const CoeffRing* C, int n,
                                       const std::array<RElem, 4>& M,
                                       const std::vector<RElem>& v) {
  std::vector<std::vector<RElem>> pow1(static_cast<size_t>(n + 1)),
      pow2(static_cast<size_t>(n + 1));
  pow1[0] = {C->one()};
  pow2[0] = {C->one()};
  for (int j = 1; j <= n; ++j) {
    auto step = [&](const std::vector<RElem>& prev, const RElem& hi, const RElem& lo) {
      std::vector<RElem> r(prev.size() + 1, C->zero());
      for (size_t i = 0; i < prev.size(); ++i) {
        r[i + 1] = C->add(r[i + 1], C->mul(prev[i], hi));
        r[i] = C->add(r[i], C->mul(prev[i], lo));
      }
      return r;
    };
    pow1[static_cast<size_t>(j)] = step(pow1[static_cast<size_t>(j - 1)], M[0], M[1]);
    pow2[static_cast<size_t>(j)] = step(pow2[static_cast<size_t>(j - 1)], M[2], M[3]);
  }
  std::vector<RElem> out(static_cast<size_t>(n + 1), C->zero());
  for (int j = 0; j <= n; ++j) {
    const RElem& co = v[static_cast<size_t>(j)];
    if (C->is_zero(co)) continue;
    const auto &f = pow1[static_cast<size_t>(j)], &g = pow2[static_cast<size_t>(n - j)];
    for (size_t i1 = 0; i1 < f.size(); ++i1)
      for (size_t i2 = 0; i2 < g.size(); ++i2)
        out[i1 + i2] = C->add(out[i1 + i2], C->mul(co, C->mul(f[i1], g[i2])));
  }
  return out;
}

inline std::vector<std::array<RElem, 4>> enumerate_gl2(const CoeffRing* C) {
  if (!C->is_field()) throw NotApplicable("finite group enumeration needs a field");
  std::vector<std::array<RElem, 4>> out;
  auto all = C->all_elements();
  for (const RElem& a : all)
    for (const RElem& b : all)
      for (const RElem& c : all)
        for (const RElem& d : all) {
          RElem det = C->sub(C->mul(a, d), C->mul(b, c));
          if (!C->is_zero(det)) out.push_back({a, b, c, d});
        }
  return out;
}

struct ProbeResult {
  bool irreducible = false;
  std::vector<std::vector<RElem>> invariant_basis;  // echelon basis when reducible
  std::vector<RElem> witness;                       // a generator of that subspace
  uint64_t vectors_checked = 0;
};

// Exhaustive certificate: the degree-n space over F_q is irreducible under
// the full finite group iff every nonzero vector generates everything. Each
// vector's orbit span is closed under the whole group by construction, so a
// short span is a genuine invariant subspace.
inline ProbeResult invariant_subspace_probe(const CoeffRing* C, int n) {
  auto group = enumerate_gl2(C);
  size_t dim = static_cast<size_t>(n + 1);
  ProbeResult res;

  // enumerate projective representatives: first nonzero coordinate is 1
  auto all = C->all_elements();
  for (size_t lead = 0; lead < dim; ++lead) {
    // v = e_lead + arbitrary tail in coordinates lead+1..
    std::vector<int64_t> tail(dim - lead - 1, 0);
    for (;;) {
      std::vector<RElem> vec(dim, C->zero());
      vec[lead] = C->one();
      for (size_t i = 0; i < tail.size(); ++i) vec[lead + 1 + i] = all[static_cast<size_t>(tail[i])];
      ++res.vectors_checked;

      // orbit span closure, echelonized
      std::vector<std::vector<RElem>> basis;
      std::vector<std::vector<RElem>> queue{vec};
      auto insert = [&](std::vector<RElem> w) {
        for (const auto& row : basis) {
          size_t piv = 0;
          while (piv < row.size() && C->is_zero(row[piv])) ++piv;
          if (piv < row.size() && !C->is_zero(w[piv])) {
            RElem f = w[piv];
            for (size_t j = 0; j < w.size(); ++j)
              w[j] = C->sub(w[j], C->mul(f, row[j]));
          }
        }
        size_t piv = 0;
        while (piv < w.size() && C->is_zero(w[piv])) ++piv;
        if (piv == w.size()) return false;
        RElem inv = C->inv(w[piv]);
        for (size_t j = 0; j < w.size(); ++j) w[j] = C->mul(w[j], inv);
        basis.push_back(std::move(w));
        return true;
      };
      insert(vec);
      for (size_t i = 0; i < queue.size() && basis.size() < dim; ++i) {
        for (const auto& g : group) {
          std::vector<RElem> img = rho_subst_fq(C, n, g, queue[i]);
          if (insert(img)) {
            queue.push_back(std::move(img));
            if (basis.size() == dim) break;
          }
        }
      }
      if (basis.size() < dim) {
        res.irreducible = false;
        res.invariant_basis = std::move(basis);
        res.witness = vec;
        return res;
      }

      size_t i = 0;
      for (; i < tail.size(); ++i) {
        if (++tail[i] < static_cast<int64_t>(all.size())) break;
        tail[i] = 0;
      }
      if (tail.empty() || i == tail.size()) break;
    }
  }
  res.irreducible = true;
  return res;
}

// "c0, c1, ..., cn" with series-literal entries
inline HomPoly parse_hom_poly(const SeriesRing* R, int n, const std::string& s) {
  std::vector<Series> cs;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      cs.push_back(parse_series(R, s.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (cs.size() != static_cast<size_t>(n + 1))
    throw UsageError("expected " + std::to_string(n + 1) + " coefficients");
  return HomPoly(n, std::move(cs));
}

}  // namespace cforge
