#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cforge/errors.hpp"
#include "cforge/linalg.hpp"
#include "cforge/quotient.hpp"
#include "cforge/representations.hpp"

namespace cforge {

// Harmonic cocycles of weight n+2: functions on oriented edges valued in the
// dual of the degree-n homogeneous polynomials, antisymmetric under edge
// reversal and summing to zero over the edges leaving each vertex.  A cocycle
// either stores free-standing edge values (for hand-built examples and action
// tests) or is backed by a quotient graph, in which case one dual vector per
// edge orbit determines the value on every explored edge through the tag
// witnesses.
struct HarmonicCocycle {
  int weight;
  int64_t twist = 0;
  const SeriesRing* R;
  std::map<Edge::Key, std::pair<Edge, DualVec>> values;  // free-standing mode
  const QuotientGraph* ctx = nullptr;                    // orbit mode
  std::map<int64_t, DualVec> orbit_values;

  HarmonicCocycle(int w, const SeriesRing* ring, int64_t l = 0)
      : weight(w), twist(l), R(ring) {
    if (w < 2) throw IncompatibleWeight("cocycle weight must be at least 2");
  }

  int degree() const { return weight - 2; }

  void set(const Edge& e, const DualVec& val) {
    if (ctx) throw NotApplicable("orbit-backed cocycles are read-only");
    if (val.n != degree()) throw IncompatibleWeight("dual value has the wrong degree");
    auto rit = values.find(e.reversed().key());
    if (rit != values.end()) {
      rit->second.second = val.negated();
      return;
    }
    auto it = values.find(e.key());
    if (it != values.end())
      it->second.second = val;
    else
      values.emplace(e.key(), std::make_pair(e, val));
  }

  DualVec value(const Edge& e) const {
    if (!ctx) {
      auto it = values.find(e.key());
      if (it != values.end()) return it->second.second;
      it = values.find(e.reversed().key());
      if (it != values.end()) return it->second.second.negated();
      return DualVec::zero(R, degree());
    }
    const EdgeTag& t = ctx->tag_of(e);
    auto it = orbit_values.find(t.pair);
    if (it == orbit_values.end()) return DualVec::zero(R, degree());
    DualVec v = it->second;
    if (degree() > 0 || twist != 0) v = dual_act(t.witness.at_inverse_pi(R), v, twist);
    return t.sign > 0 ? v : v.negated();
  }
};

struct HarmonicityReport {
  bool harmonic = true;
  std::optional<Vertex> failure;
  std::optional<DualVec> defect;  // the nonzero outgoing sum at the failure
};

// checks the outgoing-sum law at each listed vertex
inline HarmonicityReport is_harmonic(const HarmonicCocycle& f, const std::vector<Vertex>& at) {
  HarmonicityReport rep;
  for (const Vertex& v : at) {
    DualVec s = DualVec::zero(f.R, f.degree());
    for (const Vertex& nb : v.neighbors()) s = s + f.value(Edge(v, nb));
    if (!s.is_zero_certified()) {
      rep.harmonic = false;
      rep.failure = v;
      rep.defect = s;
      return rep;
    }
  }
  return rep;
}

// (g f)(e) = rho*(g) f(g^{-1} e), realised by pushing each stored value forward
inline HarmonicCocycle gamma_action(const Matrix2& g, const HarmonicCocycle& f) {
  if (f.ctx) throw NotApplicable("orbit-backed cocycles transform through their tags");
  HarmonicCocycle out(f.weight, f.R, f.twist);
  for (const auto& [k, ev] : f.values)
    out.set(act_edge(g, ev.first), dual_act(g, ev.second, f.twist));
  return out;
}

inline HarmonicCocycle gamma_action(const PolyMatrix2& g, const HarmonicCocycle& f) {
  return gamma_action(g.at_inverse_pi(f.R), f);
}

enum class SolveRing { field, integers, galois_ring, laurent_field };

inline std::string solve_ring_name(SolveRing r) {
  switch (r) {
    case SolveRing::field: return "field";
    case SolveRing::integers: return "integers";
    case SolveRing::galois_ring: return "galois";
    case SolveRing::laurent_field: return "laurent";
  }
  throw UsageError("unknown solve ring");
}

struct CocycleOptions {
  SolveRing ring = SolveRing::field;
  const CoeffRing* galois = nullptr;  // required for SolveRing::galois_ring
  int64_t twist = 0;
  int extra_ray_levels = 0;   // widen the support window down the cusp rays
  bool cusp_vanishing = false;  // demand vanishing on every cusp-ray edge class
};

namespace detail {

// One linear system per invariant-space computation.  Unknowns are dual
// vectors indexed by edge orbit; rows come in three kinds.
//   harmonicity: for each anchored vertex orbit, the outgoing edges are
//     partitioned into classes under the conjugated vertex stabilizer; each
//     class contributes sign * sum_g rho*(g) applied to its orbit unknown.
//   stabilizer: (rho*(h) - 1) phi = 0 for h stabilizing the orbit
//     representative.
//   reversal: (rho*(g) + 1) phi = 0 when some group element reverses the
//     representative.
struct CocycleSystem {
  struct Term {
    int64_t pair;
    int sign;
    std::vector<PolyMatrix2> gammas;
  };
  struct HarmRow {
    int64_t orbit;
    std::vector<Term> terms;
  };
  std::vector<int64_t> unknowns;  // sorted edge-orbit ids
  std::vector<HarmRow> harm_rows;
  std::vector<std::pair<int64_t, PolyMatrix2>> stab_rows;
  std::vector<std::pair<int64_t, PolyMatrix2>> rev_rows;
  bool rows_complete = true;

  int64_t slot(int64_t pair) const {
    auto it = std::lower_bound(unknowns.begin(), unknowns.end(), pair);
    if (it == unknowns.end() || *it != pair) return -1;
    return it - unknowns.begin();
  }
};

inline CocycleSystem cocycle_system(const QuotientGraph& Q, const CocycleOptions& opt) {
  CocycleSystem S;
  std::set<int64_t> uk;
  auto ray_endpoint = [&](const EdgeOrbitInfo& P) {
    return Q.vertex_orbits[static_cast<size_t>(P.origin_orbit)].on_cusp_ray ||
           Q.vertex_orbits[static_cast<size_t>(P.terminus_orbit)].on_cusp_ray;
  };
  for (size_t k = 0; k < Q.edge_orbits.size(); ++k) {
    const EdgeOrbitInfo& P = Q.edge_orbits[k];
    if (P.on_cusp_ray) continue;
    if (P.first_edge) {
      if (!opt.cusp_vanishing) uk.insert(static_cast<int64_t>(k));
      continue;
    }
    if (ray_endpoint(P)) continue;
    uk.insert(static_cast<int64_t>(k));
  }
  for (const CuspRay& ray : Q.cusp_rays) {
    if (opt.extra_ray_levels + 1 > static_cast<int>(ray.segment_edge_pairs.size()))
      throw UsageError("support window exceeds the classified ray segments");
    for (int j = 0; j < opt.extra_ray_levels; ++j)
      uk.insert(ray.segment_edge_pairs[static_cast<size_t>(j)]);
  }
  S.unknowns.assign(uk.begin(), uk.end());

  // every unknown needs the outgoing-sum row at both endpoint orbits
  std::set<int64_t> need_row;
  for (int64_t pair : S.unknowns) {
    const EdgeOrbitInfo& P = Q.edge_orbits[static_cast<size_t>(pair)];
    need_row.insert(P.origin_orbit);
    need_row.insert(P.terminus_orbit);
  }

  const SeriesRing* R = Q.group.R;
  for (size_t k = 0; k < Q.vertex_orbits.size(); ++k) {
    const VertexOrbitInfo& O = Q.vertex_orbits[k];
    if (!O.interior()) {
      if (need_row.count(static_cast<int64_t>(k))) S.rows_complete = false;
      continue;
    }
    bool touches = false;
    for (const auto& pm : O.pattern)
      if (uk.count(pm.first)) touches = true;
    if (!touches) continue;
    const Vertex& av = Q.ball.vertices[static_cast<size_t>(O.anchor)];
    const PolyMatrix2& wa = Q.vertex_tags[static_cast<size_t>(O.anchor)].witness;
    PolyMatrix2 wai = wa.inverse();
    CocycleSystem::HarmRow row{static_cast<int64_t>(k), {}};
    std::map<Edge::Key, Edge> remaining;
    for (const Vertex& nb : av.neighbors()) {
      Edge e(av, nb);
      remaining.emplace(e.key(), e);
    }
    while (!remaining.empty()) {
      Edge head = remaining.begin()->second;
      const EdgeTag& ht = Q.tag_of(head);
      CocycleSystem::Term term{ht.pair, ht.sign, {}};
      std::map<Edge::Key, PolyMatrix2> images;
      for (const PolyMatrix2& s : Q.stabilizer(static_cast<int64_t>(k))) {
        PolyMatrix2 g = wa * s * wai;
        Edge img = act_edge(g.at_inverse_pi(R), head);
        images.emplace(img.key(), std::move(g));
      }
      for (const auto& [ik, g] : images) {
        auto it = remaining.find(ik);
        if (it == remaining.end())
          throw InvarianceViolation("stabilizer class escaped the anchored link");
        if (Q.tag_of(it->second).pair != ht.pair)
          throw InvarianceViolation("stabilizer class mixes edge orbits");
        remaining.erase(it);
        term.gammas.push_back(g * ht.witness);
      }
      if (S.slot(term.pair) >= 0) row.terms.push_back(std::move(term));
    }
    if (!row.terms.empty()) S.harm_rows.push_back(std::move(row));
  }
  for (int64_t pair : S.unknowns) {
    for (const PolyMatrix2& h : Q.edge_pair_stabilizer(pair)) S.stab_rows.emplace_back(pair, h);
    const EdgeOrbitInfo& P = Q.edge_orbits[static_cast<size_t>(pair)];
    if (P.reversible) S.rev_rows.emplace_back(pair, *P.reversal_witness);
  }
  return S;
}

// Weight two with no twist: rho* is trivial, so every row collapses to
// integers (class sizes with signs, and 2 on the diagonal for reversals;
// stabilizer rows vanish identically).
inline ZMat integer_rows(const CocycleSystem& S) {
  ZMat A;
  size_t cols = S.unknowns.size();
  for (const auto& row : S.harm_rows) {
    std::vector<mpz_class> r(cols, mpz_class(0));
    for (const auto& t : row.terms)
      r[static_cast<size_t>(S.slot(t.pair))] += t.sign * mpz_class(t.gammas.size());
    A.push_back(std::move(r));
  }
  for (const auto& [pair, g] : S.rev_rows) {
    std::vector<mpz_class> r(cols, mpz_class(0));
    r[static_cast<size_t>(S.slot(pair))] = 2;
    A.push_back(std::move(r));
  }
  return A;
}

// matrix of rho* with the given determinant twist, columns over the dual
// delta basis, entries as polynomial fractions in pi
inline std::vector<std::vector<PolyFrac>> dual_matrix(const Matrix2& g, const SeriesRing* R,
                                                      int n, int64_t twist) {
  size_t m = static_cast<size_t>(n + 1);
  std::vector<std::vector<PolyFrac>> M(m, std::vector<PolyFrac>(m, PolyFrac::zero(R->coeff)));
  for (int j = 0; j <= n; ++j) {
    DualVec img = dual_act(g, DualVec::delta(R, n, j), twist);
    for (int i = 0; i <= n; ++i)
      M[static_cast<size_t>(i)][static_cast<size_t>(j)] = series_to_frac(img.v[static_cast<size_t>(i)]);
  }
  return M;
}

inline std::vector<std::vector<PolyFrac>> fraction_rows(const CocycleSystem& S,
                                                        const QuotientGraph& Q, int n,
                                                        int64_t twist) {
  const SeriesRing* R = Q.group.R;
  PolyFracOps ops{R->coeff};
  size_t block = static_cast<size_t>(n + 1);
  size_t cols = S.unknowns.size() * block;
  std::vector<std::vector<PolyFrac>> A;
  auto fresh = [&]() {
    return std::vector<std::vector<PolyFrac>>(block, std::vector<PolyFrac>(cols, ops.zero()));
  };
  auto add_block = [&](std::vector<std::vector<PolyFrac>>& rows, int64_t pair,
                       const std::vector<std::vector<PolyFrac>>& B) {
    size_t base = static_cast<size_t>(S.slot(pair)) * block;
    for (size_t i = 0; i < block; ++i)
      for (size_t j = 0; j < block; ++j)
        rows[i][base + j] = ops.add(rows[i][base + j], B[i][j]);
  };
  for (const auto& row : S.harm_rows) {
    auto rows = fresh();
    for (const auto& t : row.terms) {
      std::vector<std::vector<PolyFrac>> B(block, std::vector<PolyFrac>(block, ops.zero()));
      for (const PolyMatrix2& g : t.gammas) {
        auto M = dual_matrix(g.at_inverse_pi(R), R, n, twist);
        for (size_t i = 0; i < block; ++i)
          for (size_t j = 0; j < block; ++j) B[i][j] = ops.add(B[i][j], M[i][j]);
      }
      if (t.sign < 0)
        for (size_t i = 0; i < block; ++i)
          for (size_t j = 0; j < block; ++j) B[i][j] = ops.neg(B[i][j]);
      add_block(rows, t.pair, B);
    }
    for (auto& r : rows) A.push_back(std::move(r));
  }
  for (const auto& [pair, h] : S.stab_rows) {
    auto rows = fresh();
    auto M = dual_matrix(h.at_inverse_pi(R), R, n, twist);
    for (size_t i = 0; i < block; ++i) M[i][i] = ops.sub(M[i][i], ops.one());
    add_block(rows, pair, M);
    for (auto& r : rows) A.push_back(std::move(r));
  }
  for (const auto& [pair, g] : S.rev_rows) {
    auto rows = fresh();
    auto M = dual_matrix(g.at_inverse_pi(R), R, n, twist);
    for (size_t i = 0; i < block; ++i) M[i][i] = ops.add(M[i][i], ops.one());
    add_block(rows, pair, M);
    for (auto& r : rows) A.push_back(std::move(r));
  }
  return A;
}

}  // namespace detail

// The space of group-invariant harmonic cocycles of the given weight with the
// requested support condition, over one of four coefficient rings.  Basis
// vectors are stored flat: one block of weight-1 coordinates per unknown edge
// orbit, in unknown_pairs order.
struct InvariantSpace {
  std::string group_name;
  int weight = 2;
  SolveRing ring = SolveRing::field;
  const CoeffRing* galois = nullptr;
  int64_t twist = 0;
  int64_t depth = 0;
  int64_t q = 0;
  int extra_ray_levels = 0;
  bool cusp_vanishing = false;
  std::vector<int64_t> unknown_pairs;
  size_t block = 1;
  std::vector<std::vector<PolyFrac>> basis;     // laurent_field
  std::vector<std::vector<mpz_class>> zbasis;   // field / integers / galois_ring
  std::vector<mpz_class> invariant_factors;     // integers
  std::vector<int> torsion_exponents;           // galois_ring
  int64_t dimension = 0;  // free rank over integers and Galois rings
  bool rows_complete = true;

  size_t basis_count() const {
    return ring == SolveRing::laurent_field ? basis.size() : zbasis.size();
  }

  int64_t slot(int64_t pair) const {
    auto it = std::lower_bound(unknown_pairs.begin(), unknown_pairs.end(), pair);
    if (it == unknown_pairs.end() || *it != pair) return -1;
    return it - unknown_pairs.begin();
  }
};

inline InvariantSpace invariant_space(const QuotientGraph& Q, int weight,
                                      const CocycleOptions& opt = {}) {
  if (weight < 2) throw IncompatibleWeight("cocycle weight must be at least 2");
  if (opt.extra_ray_levels < 0) throw UsageError("negative support window");
  if (opt.cusp_vanishing && opt.extra_ray_levels > 0)
    throw UsageError("a support window contradicts vanishing on the cusps");
  if (weight > 2 && opt.ring != SolveRing::laurent_field)
    throw RingMismatch("weights above two need the Laurent scalar field");
  if (opt.twist != 0 && opt.ring != SolveRing::laurent_field)
    throw RingMismatch("determinant twists need the Laurent scalar field");
  const CoeffRing* C = Q.group.field();
  if (opt.ring == SolveRing::galois_ring) {
    if (!opt.galois) throw RingMismatch("no Galois ring supplied");
    if (opt.galois->p != C->p || opt.galois->f != C->f)
      throw RingMismatch("the Galois ring must lift the residue field");
  }

  detail::CocycleSystem sys = detail::cocycle_system(Q, opt);
  InvariantSpace S;
  S.group_name = Q.group.name();
  S.weight = weight;
  S.ring = opt.ring;
  S.galois = opt.galois;
  S.twist = opt.twist;
  S.depth = Q.depth;
  S.q = C->q;
  S.extra_ray_levels = opt.extra_ray_levels;
  S.cusp_vanishing = opt.cusp_vanishing;
  S.unknown_pairs = sys.unknowns;
  S.block = static_cast<size_t>(weight - 1);
  S.rows_complete = sys.rows_complete;
  size_t cols = S.unknown_pairs.size() * S.block;

  switch (opt.ring) {
    case SolveRing::field: {
      ZMat A = detail::integer_rows(sys);
      auto kb = z_kernel_mod_field(A, C, cols);
      for (auto& v : kb) {
        std::vector<mpz_class> w;
        for (const RElem& x : v) w.emplace_back(C->encode(x));
        S.zbasis.push_back(std::move(w));
      }
      S.dimension = static_cast<int64_t>(S.zbasis.size());
      break;
    }
    case SolveRing::integers: {
      ZMat A = detail::integer_rows(sys);
      if (A.empty()) {
        ZMat id = z_identity(cols);
        for (size_t j = 0; j < cols; ++j) S.zbasis.push_back(id[j]);
        S.dimension = static_cast<int64_t>(cols);
        break;
      }
      SnfResult snf = smith_normal_form(A);
      for (const mpz_class& d : snf.diagonal())
        if (d != 0) S.invariant_factors.push_back(d);
      size_t r = S.invariant_factors.size();
      for (size_t j = r; j < cols; ++j) {
        std::vector<mpz_class> v(cols);
        for (size_t i = 0; i < cols; ++i) v[i] = snf.V[i][j];
        S.zbasis.push_back(std::move(v));
      }
      S.dimension = static_cast<int64_t>(cols - r);
      break;
    }
    case SolveRing::galois_ring: {
      ZMat A = detail::integer_rows(sys);
      if (A.empty()) {
        ZMat id = z_identity(cols);
        for (size_t j = 0; j < cols; ++j) S.zbasis.push_back(id[j]);
        S.dimension = static_cast<int64_t>(cols);
        break;
      }
      ModPkKernel mk = modpk_kernel(A, mpz_class(opt.galois->p), opt.galois->k);
      S.zbasis = mk.generators;
      S.torsion_exponents = mk.torsion_exponents;
      S.dimension = mk.free_rank;
      break;
    }
    case SolveRing::laurent_field: {
      auto A = detail::fraction_rows(sys, Q, weight - 2, opt.twist);
      PolyFracOps ops{C};
      auto kb = kernel_basis(std::move(A), ops, cols);
      for (auto& v : kb) {
        GFPoly lcm = GFPoly::one(C);
        for (const PolyFrac& x : v) {
          GFPoly g = gcd(lcm, x.den());
          lcm = lcm * (x.den() / g);
        }
        PolyFrac scale(lcm);
        for (PolyFrac& x : v) x = x * scale;
        S.basis.push_back(std::move(v));
      }
      S.dimension = static_cast<int64_t>(S.basis.size());
      break;
    }
  }
  return S;
}

// the b-th basis vector's dual value on the representative of the given edge
// orbit, materialised in R
inline DualVec basis_value(const InvariantSpace& S, size_t b, int64_t pair,
                           const SeriesRing* R) {
  int n = S.weight - 2;
  int64_t sl = S.slot(pair);
  if (sl < 0) return DualVec::zero(R, n);
  size_t base = static_cast<size_t>(sl) * S.block;
  DualVec out = DualVec::zero(R, n);
  if (S.ring == SolveRing::laurent_field) {
    const auto& v = S.basis.at(b);
    for (size_t j = 0; j < S.block; ++j) {
      const PolyFrac& x = v[base + j];
      if (x.is_zero()) continue;
      if (x.num().ring() != R->coeff) throw RingMismatch("basis entries live over another field");
      if (x.den().deg() != 0) throw NotAUnit("basis entry has a nonconstant denominator");
      RElem dinv = R->coeff->inv(x.den().coeff(0));
      Series s = Series::zero(R);
      for (int64_t i = 0; i <= x.num().deg(); ++i)
        s = s + Series::from_coeff(R, R->coeff->mul(x.num().coeff(i), dinv), i);
      out.v[j] = s;
    }
  } else {
    const auto& v = S.zbasis.at(b);
    for (size_t j = 0; j < S.block; ++j) {
      mpz_class m = v[base + j] % R->coeff->pk;
      if (m < 0) m += R->coeff->pk;
      out.v[j] = Series::from_int(R, m.get_si());
    }
  }
  return out;
}

// realise one basis vector as an orbit-backed cocycle over R
inline HarmonicCocycle rep_cocycle(const QuotientGraph& Q, const InvariantSpace& S, size_t b,
                                   const SeriesRing* R) {
  const CoeffRing* C = Q.group.field();
  if (S.ring == SolveRing::galois_ring) {
    if (R->coeff != S.galois && R->coeff != C)
      throw RingMismatch("cocycle ring must be the Galois ring or its residue field");
  } else if (S.ring == SolveRing::laurent_field || S.ring == SolveRing::field) {
    if (R->coeff != C) throw RingMismatch("cocycle ring must match the group's field");
  }
  if (R->coeff != C && (S.weight != 2 || S.twist != 0))
    throw RingMismatch("witness transport away from the group field needs weight two");
  if (b >= S.basis_count()) throw UsageError("basis index out of range");
  HarmonicCocycle f(S.weight, R, S.twist);
  f.ctx = &Q;
  for (int64_t pair : S.unknown_pairs) {
    DualVec v = basis_value(S, b, pair, R);
    if (!v.is_zero_certified()) f.orbit_values.emplace(pair, std::move(v));
  }
  return f;
}

// extend an orbit-backed cocycle to any explored edge; the value is
// independent of which tag witness the quotient stored
inline DualVec invariant_extend(const QuotientGraph& Q, const HarmonicCocycle& f,
                                const Edge& e) {
  if (f.ctx != &Q) throw NotApplicable("cocycle is not backed by this quotient");
  return f.value(e);
}

// true when every nonzero value sits in the finite part or on a first ray edge
inline bool support_check(const QuotientGraph& Q, const HarmonicCocycle& f) {
  auto pair_ok = [&](int64_t pair) {
    const EdgeOrbitInfo& P = Q.edge_orbits[static_cast<size_t>(pair)];
    if (P.on_cusp_ray) return false;
    if (P.first_edge) return true;
    return !Q.vertex_orbits[static_cast<size_t>(P.origin_orbit)].on_cusp_ray &&
           !Q.vertex_orbits[static_cast<size_t>(P.terminus_orbit)].on_cusp_ray;
  };
  if (f.ctx) {
    for (const auto& [pair, v] : f.orbit_values)
      if (!v.is_zero_certified() && !pair_ok(pair)) return false;
    return true;
  }
  for (const auto& [k, ev] : f.values) {
    if (ev.second.is_zero_certified()) continue;
    if (!pair_ok(Q.tag_of(ev.first).pair)) return false;
  }
  return true;
}

// re-solve with the support window one level wider: the dimension must not
// grow, and (over fields) nothing may leak onto the added ray classes
inline bool support_check(const QuotientGraph& Q, const InvariantSpace& S) {
  if (S.cusp_vanishing) throw NotApplicable("support growth is void under cusp vanishing");
  CocycleOptions opt;
  opt.ring = S.ring;
  opt.galois = S.galois;
  opt.twist = S.twist;
  opt.extra_ray_levels = S.extra_ray_levels + 1;
  InvariantSpace T = invariant_space(Q, S.weight, opt);
  if (T.dimension != S.dimension) return false;
  if (S.ring == SolveRing::integers || S.ring == SolveRing::galois_ring) return true;
  std::set<int64_t> old_pairs(S.unknown_pairs.begin(), S.unknown_pairs.end());
  for (size_t b = 0; b < T.basis_count(); ++b)
    for (size_t i = 0; i < T.unknown_pairs.size(); ++i) {
      if (old_pairs.count(T.unknown_pairs[i])) continue;
      for (size_t j = 0; j < T.block; ++j) {
        size_t c = i * T.block + j;
        bool zero = T.ring == SolveRing::laurent_field ? T.basis[b][c].is_zero()
                                                       : T.zbasis[b][c] == 0;
        if (!zero) return false;
      }
    }
  return true;
}

}  // namespace cforge
