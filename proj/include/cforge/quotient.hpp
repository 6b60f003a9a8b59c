#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cforge/arithmetic_group.hpp"
#include "cforge/errors.hpp"
#include "cforge/linalg.hpp"
#include "cforge/matrix2.hpp"
#include "cforge/tree.hpp"

namespace cforge {

// Gamma-equivalence of vertices, reduced to linear algebra over F_q.
//
// gamma carries the lattice of v into pi^s times the lattice of w, where
// s = (n_v - n_w)/2, iff each column (x, y) of gamma * M_v satisfies
// val(y) >= s and val(x - y u_w) >= s + n_w.  Every vanishing Laurent
// coefficient is an F_q-linear condition on the polynomial coefficients of
// gamma, and det in F_q^* upgrades the containment to equality of classes,
// so witnesses are found by solving an affine system and filtering by det.

namespace detail {

struct WitnessSystem {
  const ArithmeticGroup* G;
  int64_t D;  // entry degree bound
  std::vector<std::vector<RElem>> rows;
  std::vector<RElem> rhs;

  WitnessSystem(const ArithmeticGroup& group, int64_t bound) : G(&group), D(bound) {
    if (D < 0) throw UsageError("negative degree bound");
  }

  size_t cols() const { return 4 * static_cast<size_t>(D + 1); }

  // require coeff_j(sum_i slot_i pi^{-i} * mult[slot]) = 0 for all j < threshold
  void add_vanishing(const std::array<Series, 4>& mult, int64_t threshold) {
    const CoeffRing* C = G->field();
    int64_t lo = threshold;
    for (const Series& m : mult)
      if (!m.support_empty()) lo = std::min(lo, m.val() - D);
    for (int64_t j = lo; j < threshold; ++j) {
      std::vector<RElem> row(cols(), C->zero());
      bool any = false;
      for (int s = 0; s < 4; ++s) {
        if (mult[static_cast<size_t>(s)].support_empty()) continue;
        for (int64_t i = 0; i <= D; ++i) {
          RElem c = mult[static_cast<size_t>(s)].coeff(j + i);
          if (!C->is_zero(c)) {
            row[static_cast<size_t>(s * (D + 1) + i)] = c;
            any = true;
          }
        }
      }
      if (any) {
        rows.push_back(std::move(row));
        rhs.push_back(C->zero());
      }
    }
  }

  // conditions for gamma * (lattice of v) contained in pi^s * (lattice of w);
  // the caller has already checked that n_v - n_w is even
  void add_lattice_pair(const Vertex& v, const Vertex& w) {
    const SeriesRing* R = G->R;
    int64_t s = (v.n - w.n) / 2;
    Series pn = Series::pi_pow(R, v.n);
    Series one = Series::one(R);
    Series z = Series::zero(R);
    add_vanishing({z, z, pn, z}, s);
    add_vanishing({pn, z, z - pn * w.u, z}, s + w.n);
    add_vanishing({z, z, v.u, one}, s);
    add_vanishing({v.u, one, z - v.u * w.u, z - w.u}, s + w.n);
  }

  void add_congruences() {
    if (G->kind == GroupKind::full) return;
    const CoeffRing* C = G->field();
    const GFPoly& N = G->level;
    std::vector<GFPoly> tmod(static_cast<size_t>(D + 1));
    tmod[0] = GFPoly::one(C) % N;
    GFPoly t = GFPoly::var(C);
    for (int64_t i = 1; i <= D; ++i)
      tmod[static_cast<size_t>(i)] = (tmod[static_cast<size_t>(i - 1)] * t) % N;
    auto add = [&](int slot, const GFPoly& target) {
      for (int64_t j = 0; j < N.deg(); ++j) {
        std::vector<RElem> row(cols(), C->zero());
        for (int64_t i = 0; i <= D; ++i)
          row[static_cast<size_t>(slot * (D + 1) + i)] = tmod[static_cast<size_t>(i)].coeff(j);
        rows.push_back(std::move(row));
        rhs.push_back(target.coeff(j));
      }
    };
    GFPoly zero = GFPoly::zero(C);
    GFPoly one = GFPoly::one(C);
    switch (G->kind) {
      case GroupKind::gamma0:
        add(2, zero);
        break;
      case GroupKind::gamma1:
        add(2, zero);
        add(0, one);
        add(3, one);
        break;
      case GroupKind::gammaFull:
        add(2, zero);
        add(1, zero);
        add(0, one);
        add(3, one);
        break;
      default:
        break;
    }
  }

  PolyMatrix2 decode(const std::vector<RElem>& x) const {
    const CoeffRing* C = G->field();
    std::array<GFPoly, 4> e;
    for (int s = 0; s < 4; ++s)
      e[static_cast<size_t>(s)] =
          GFPoly(C, std::vector<RElem>(x.begin() + s * (D + 1), x.begin() + (s + 1) * (D + 1)));
    return PolyMatrix2(e[0], e[1], e[2], e[3]);
  }

  // all group elements solving the system, or just the first when first_only
  std::vector<PolyMatrix2> solve(bool first_only) const {
    const CoeffRing* C = G->field();
    RElemOps ops{C};
    std::vector<RElem> part;
    std::vector<std::vector<RElem>> kb;
    if (rows.empty()) {
      part.assign(cols(), C->zero());
      kb = kernel_basis(rows, ops, cols());
    } else {
      auto p = solve_affine(rows, rhs, ops);
      if (!p) return {};
      part = std::move(*p);
      kb = kernel_basis(rows, ops, cols());
    }
    double bits = static_cast<double>(kb.size()) * std::log2(static_cast<double>(C->q));
    if (bits > 26)
      throw UsageError("witness search space too large (q^" + std::to_string(kb.size()) + ")");
    AffineSpaceEnum en(C, std::move(part), std::move(kb));
    std::vector<PolyMatrix2> out;
    std::vector<RElem> x;
    while (en.next(x)) {
      PolyMatrix2 g = decode(x);
      if (!g.det_is_constant_unit()) continue;
      out.push_back(std::move(g));
      if (first_only) break;
    }
    return out;
  }
};

}  // namespace detail

// Entry-degree bound that provably captures every witness: a carrier of
// (v, w) factors as pi^s M_w h M_v^{-1} with h integral, so its entries
// have degree at most -s + max(-n_w, -val u_w, 0) + max(n_v, n_v - val u_v, 0).
// The distance-based rule of thumb d(v, o) + d(w, o) + deg(level) + 1 is
// honored as a floor so explicit bounds from callers compare predictably.
inline int64_t equiv_degree_bound(const ArithmeticGroup& G, const Vertex& v, const Vertex& w) {
  int64_t termw = std::max<int64_t>(-w.n, 0);
  if (!w.u.support_empty()) termw = std::max(termw, -w.u.val());
  int64_t termv = std::max<int64_t>(v.n, 0);
  if (!v.u.support_empty()) termv = std::max(termv, v.n - v.u.val());
  int64_t exact = termw + termv - (v.n - w.n) / 2;
  Vertex o = Vertex::standard(G.R);
  int64_t thumb = tree_distance(v, o) + tree_distance(w, o) +
                  std::max<int64_t>(G.level.deg(), 0) + 1;
  return std::max(exact, thumb);
}

struct EquivResult {
  std::optional<PolyMatrix2> witness;  // moves v onto w
  bool certified = false;              // an empty answer rules out all of Gamma
  int64_t bound_used = 0;
};

inline EquivResult equiv_witness(const ArithmeticGroup& G, const Vertex& v, const Vertex& w,
                                 int64_t degree_bound = -1) {
  if ((v.n - w.n) % 2 != 0) return {std::nullopt, true, 0};  // units preserve level parity
  int64_t need = equiv_degree_bound(G, v, w);
  int64_t D = degree_bound < 0 ? need : degree_bound;
  detail::WitnessSystem sys(G, D);
  sys.add_lattice_pair(v, w);
  sys.add_congruences();
  std::vector<PolyMatrix2> sols = sys.solve(true);
  if (sols.empty()) return {std::nullopt, D >= need, D};
  if (act_vertex(sols[0].at_inverse_pi(G.R), v) != w || !G.member(sols[0]))
    throw InvarianceViolation("witness solver produced a non-witness");
  return {sols[0], true, D};
}

inline std::vector<PolyMatrix2> vertex_stabilizer(const ArithmeticGroup& G, const Vertex& v,
                                                  int64_t degree_bound = -1) {
  int64_t D = degree_bound < 0 ? equiv_degree_bound(G, v, v) : degree_bound;
  detail::WitnessSystem sys(G, D);
  sys.add_lattice_pair(v, v);
  sys.add_congruences();
  std::vector<PolyMatrix2> sols = sys.solve(false);
  for (const PolyMatrix2& g : sols)
    if (act_vertex(g.at_inverse_pi(G.R), v) != v || !G.member(g))
      throw InvarianceViolation("stabilizer solver produced a non-stabilizer");
  return sols;
}

inline EquivResult edge_equiv_witness(const ArithmeticGroup& G, const Edge& e, const Edge& f,
                                      int64_t degree_bound = -1) {
  if ((e.origin.n - f.origin.n) % 2 != 0 || (e.terminus.n - f.terminus.n) % 2 != 0)
    return {std::nullopt, true, 0};
  int64_t need = std::max(equiv_degree_bound(G, e.origin, f.origin),
                          equiv_degree_bound(G, e.terminus, f.terminus));
  int64_t D = degree_bound < 0 ? need : degree_bound;
  detail::WitnessSystem sys(G, D);
  sys.add_lattice_pair(e.origin, f.origin);
  sys.add_lattice_pair(e.terminus, f.terminus);
  sys.add_congruences();
  std::vector<PolyMatrix2> sols = sys.solve(true);
  if (sols.empty()) return {std::nullopt, D >= need, D};
  if (act_edge(sols[0].at_inverse_pi(G.R), e) != f || !G.member(sols[0]))
    throw InvarianceViolation("edge witness solver produced a non-witness");
  return {sols[0], true, D};
}

inline std::vector<PolyMatrix2> edge_stabilizer(const ArithmeticGroup& G, const Edge& e,
                                                int64_t degree_bound = -1) {
  int64_t need = std::max(equiv_degree_bound(G, e.origin, e.origin),
                          equiv_degree_bound(G, e.terminus, e.terminus));
  int64_t D = degree_bound < 0 ? need : degree_bound;
  detail::WitnessSystem sys(G, D);
  sys.add_lattice_pair(e.origin, e.origin);
  sys.add_lattice_pair(e.terminus, e.terminus);
  sys.add_congruences();
  std::vector<PolyMatrix2> sols = sys.solve(false);
  for (const PolyMatrix2& g : sols)
    if (act_edge(g.at_inverse_pi(G.R), e) != e || !G.member(g))
      throw InvarianceViolation("edge stabilizer solver produced a non-stabilizer");
  return sols;
}

// ---- the quotient graph of the ball around the standard vertex ----

struct VertexTag {
  int64_t orbit = -1;
  PolyMatrix2 witness;  // moves the orbit representative onto this vertex
};

struct EdgeTag {
  int64_t pair = -1;
  int sign = 1;  // +1: witness * rep, -1: witness * reversed(rep)
  PolyMatrix2 witness;
};

struct VertexOrbitInfo {
  Vertex rep;  // lexicographically least member seen
  std::vector<int64_t> members;  // ball indices
  int64_t anchor = -1;  // lex-least member with all neighbors explored, -1 if none
  bool on_cusp_ray = false;
  int64_t stabilizer_order = 0;
  std::vector<int64_t> neighbor_class;        // Gamma_v class per rep.neighbors() position
  std::vector<PolyMatrix2> neighbor_witness;  // moves the class head onto that neighbor
  std::vector<std::pair<int64_t, int64_t>> pattern;  // (edge orbit, multiplicity) at the anchor

  explicit VertexOrbitInfo(Vertex r) : rep(std::move(r)) {}
  bool interior() const { return anchor >= 0; }
};

struct EdgeOrbitInfo {
  Edge rep;  // lexicographically least oriented member
  std::vector<Edge> members;  // both orientations of every ball edge in the class
  int64_t origin_orbit = -1, terminus_orbit = -1;
  bool reversible = false;  // some gamma maps rep to its reversal
  std::optional<PolyMatrix2> reversal_witness;
  bool on_cusp_ray = false;
  bool first_edge = false;  // entry edge of a detected cusp ray

  EdgeOrbitInfo(Edge r, int64_t oo, int64_t to)
      : rep(std::move(r)), origin_orbit(oo), terminus_orbit(to) {}
};

struct CuspRay {
  int64_t attachment_orbit = -1;  // vertex orbit the ray hangs off
  Edge first_edge;                // oriented into the ray, origin at the attachment
  int64_t first_edge_pair = -1;
  std::vector<int64_t> segment_orbits;      // ray vertex orbits, outward
  std::vector<int64_t> segment_edge_pairs;  // edge orbits between consecutive segments

  explicit CuspRay(Edge fe) : first_edge(std::move(fe)) {}
};

struct QuotientOptions {
  int64_t degree_bound = -1;  // -1: provable per-pair bound
  int64_t cusp_persist = 3;   // levels of stable pattern before a ray is classified
};

struct QuotientGraph {
  ArithmeticGroup group;
  int64_t depth;
  TreeBall ball;
  std::vector<VertexOrbitInfo> vertex_orbits;
  std::vector<VertexTag> vertex_tags;  // indexed like ball.vertices
  std::vector<std::vector<PolyMatrix2>> stabilizers;  // indexed like vertex_orbits
  std::vector<EdgeOrbitInfo> edge_orbits;
  std::map<Edge::Key, EdgeTag> edge_tags;  // every oriented ball edge
  std::vector<CuspRay> cusp_rays;

  QuotientGraph(ArithmeticGroup g, int64_t d, TreeBall b)
      : group(std::move(g)), depth(d), ball(std::move(b)) {}

  const VertexTag& tag_of(const Vertex& v) const {
    int64_t i = ball.find(v);
    if (i < 0) throw OutOfExploredRegion("vertex outside the explored ball: " + v.to_string());
    return vertex_tags[static_cast<size_t>(i)];
  }
  const EdgeTag& tag_of(const Edge& e) const {
    auto it = edge_tags.find(e.key());
    if (it == edge_tags.end())
      throw OutOfExploredRegion("edge outside the explored ball: " + e.to_string());
    return it->second;
  }

  const std::vector<PolyMatrix2>& stabilizer(int64_t orbit) const {
    return stabilizers[static_cast<size_t>(orbit)];
  }

  // stabilizer of the representative oriented edge of a pair, via the
  // stabilizer of its origin's orbit
  const std::vector<PolyMatrix2>& edge_pair_stabilizer(int64_t pair) const {
    auto it = edge_stab_cache_.find(pair);
    if (it != edge_stab_cache_.end()) return it->second;
    const EdgeOrbitInfo& P = edge_orbits[static_cast<size_t>(pair)];
    const VertexTag& ot = tag_of(P.rep.origin);
    PolyMatrix2 w = ot.witness;
    PolyMatrix2 wi = w.inverse();
    Vertex x = act_vertex(wi.at_inverse_pi(group.R), P.rep.terminus);
    std::vector<PolyMatrix2> out;
    for (const PolyMatrix2& s : stabilizers[static_cast<size_t>(ot.orbit)])
      if (act_vertex(s.at_inverse_pi(group.R), x) == x) out.push_back(w * s * wi);
    return edge_stab_cache_.emplace(pair, std::move(out)).first->second;
  }

 private:
  mutable std::map<int64_t, std::vector<PolyMatrix2>> edge_stab_cache_;
};

namespace detail {

// gamma with gamma * r = e, given that origins and termini are already known
// to lie in matching vertex orbits; uses the Gamma_v classes at the origin orbit
inline std::optional<PolyMatrix2> match_edge(const QuotientGraph& Q, const Edge& r,
                                             const Edge& e) {
  const VertexTag& t1 = Q.tag_of(r.origin);
  const VertexTag& t2 = Q.tag_of(e.origin);
  const VertexOrbitInfo& O = Q.vertex_orbits[static_cast<size_t>(t1.orbit)];
  const SeriesRing* R = Q.group.R;
  Vertex x = act_vertex(t1.witness.inverse().at_inverse_pi(R), r.terminus);
  Vertex y = act_vertex(t2.witness.inverse().at_inverse_pi(R), e.terminus);
  std::vector<Vertex> nbs = O.rep.neighbors();
  int64_t px = -1, py = -1;
  for (size_t i = 0; i < nbs.size(); ++i) {
    if (nbs[i] == x) px = static_cast<int64_t>(i);
    if (nbs[i] == y) py = static_cast<int64_t>(i);
  }
  if (px < 0 || py < 0) throw InvarianceViolation("pulled-back edge end is not a neighbor");
  if (O.neighbor_class[static_cast<size_t>(px)] != O.neighbor_class[static_cast<size_t>(py)])
    return std::nullopt;
  return t2.witness * O.neighbor_witness[static_cast<size_t>(py)] *
         O.neighbor_witness[static_cast<size_t>(px)].inverse() * t1.witness.inverse();
}

}  // namespace detail

inline QuotientGraph quotient_graph(const ArithmeticGroup& G, int64_t depth,
                                    QuotientOptions opt = {}) {
  if (depth < 1 || depth > 8) throw UsageError("quotient depth must lie in [1, 8]");
  if (opt.cusp_persist < 1) throw UsageError("cusp persistence must be positive");
  QuotientGraph Q(G, depth, build_ball(Vertex::standard(G.R), static_cast<int>(depth)));
  const size_t NV = Q.ball.vertices.size();
  const PolyMatrix2 id = PolyMatrix2::identity(G.field());
  auto mat = [&](const PolyMatrix2& m) { return m.at_inverse_pi(G.R); };

  // vertex orbits, first-seen anchoring
  Q.vertex_tags.assign(NV, VertexTag{-1, id});
  for (size_t i = 0; i < NV; ++i) {
    const Vertex& x = Q.ball.vertices[i];
    int64_t hit = -1;
    PolyMatrix2 wit = id;
    for (size_t k = 0; k < Q.vertex_orbits.size() && hit < 0; ++k) {
      const Vertex& r = Q.vertex_orbits[k].rep;
      if ((x.n - r.n) % 2 != 0) continue;
      EquivResult er = equiv_witness(G, r, x, opt.degree_bound);
      if (er.witness) {
        hit = static_cast<int64_t>(k);
        wit = *er.witness;
      } else if (!er.certified) {
        throw DegreeBoundTooSmall("cannot certify inequivalence of " + r.to_string() + " and " +
                                  x.to_string() + " at degree bound " +
                                  std::to_string(er.bound_used));
      }
    }
    if (hit < 0) {
      hit = static_cast<int64_t>(Q.vertex_orbits.size());
      Q.vertex_orbits.emplace_back(x);
    }
    Q.vertex_orbits[static_cast<size_t>(hit)].members.push_back(static_cast<int64_t>(i));
    Q.vertex_tags[i] = VertexTag{hit, wit};
  }

  // re-anchor every orbit at its lexicographically least member
  for (VertexOrbitInfo& O : Q.vertex_orbits) {
    int64_t best = O.members[0];
    for (int64_t i : O.members)
      if (Q.ball.vertices[static_cast<size_t>(i)] < Q.ball.vertices[static_cast<size_t>(best)])
        best = i;
    if (best != O.members[0]) {
      PolyMatrix2 wbi = Q.vertex_tags[static_cast<size_t>(best)].witness.inverse();
      for (int64_t i : O.members) {
        PolyMatrix2& w = Q.vertex_tags[static_cast<size_t>(i)].witness;
        w = w * wbi;
      }
      O.rep = Q.ball.vertices[static_cast<size_t>(best)];
    }
    int64_t a = -1;
    for (int64_t i : O.members) {
      const Vertex& v = Q.ball.vertices[static_cast<size_t>(i)];
      bool full = true;
      for (const Vertex& nb : v.neighbors())
        if (!Q.ball.contains(nb)) {
          full = false;
          break;
        }
      if (full && (a < 0 || v < Q.ball.vertices[static_cast<size_t>(a)])) a = i;
    }
    O.anchor = a;
  }

  // stabilizers and Gamma_v classes of the representative's neighbors
  for (VertexOrbitInfo& O : Q.vertex_orbits) {
    Q.stabilizers.push_back(vertex_stabilizer(G, O.rep, opt.degree_bound));
    O.stabilizer_order = static_cast<int64_t>(Q.stabilizers.back().size());
    std::vector<Vertex> nbs = O.rep.neighbors();
    O.neighbor_class.assign(nbs.size(), -1);
    O.neighbor_witness.assign(nbs.size(), id);
    int64_t nc = 0;
    for (size_t a = 0; a < nbs.size(); ++a) {
      if (O.neighbor_class[a] >= 0) continue;
      O.neighbor_class[a] = nc;
      for (const PolyMatrix2& s : Q.stabilizers.back()) {
        Vertex img = act_vertex(mat(s), nbs[a]);
        int64_t pos = -1;
        for (size_t b = 0; b < nbs.size(); ++b)
          if (nbs[b] == img) pos = static_cast<int64_t>(b);
        if (pos < 0) throw InvarianceViolation("stabilizer moved a neighbor off the link");
        if (O.neighbor_class[static_cast<size_t>(pos)] < 0) {
          O.neighbor_class[static_cast<size_t>(pos)] = nc;
          O.neighbor_witness[static_cast<size_t>(pos)] = s;
        }
      }
      ++nc;
    }
  }

  // oriented edge orbits
  for (const Edge& ge : Q.ball.edges()) {
    int64_t o_orb = Q.vertex_tags[static_cast<size_t>(Q.ball.find(ge.origin))].orbit;
    int64_t t_orb = Q.vertex_tags[static_cast<size_t>(Q.ball.find(ge.terminus))].orbit;
    int64_t hit = -1;
    int sgn = 1;
    PolyMatrix2 wit = id;
    for (size_t k = 0; k < Q.edge_orbits.size() && hit < 0; ++k) {
      const EdgeOrbitInfo& P = Q.edge_orbits[k];
      if (P.origin_orbit == o_orb && P.terminus_orbit == t_orb) {
        if (auto g = detail::match_edge(Q, P.rep, ge)) {
          hit = static_cast<int64_t>(k);
          sgn = 1;
          wit = *g;
        }
      }
      if (hit < 0 && P.origin_orbit == t_orb && P.terminus_orbit == o_orb) {
        if (auto g = detail::match_edge(Q, P.rep, ge.reversed())) {
          hit = static_cast<int64_t>(k);
          sgn = -1;
          wit = *g;
        }
      }
    }
    if (hit < 0) {
      hit = static_cast<int64_t>(Q.edge_orbits.size());
      Q.edge_orbits.emplace_back(ge, o_orb, t_orb);
    }
    EdgeOrbitInfo& P = Q.edge_orbits[static_cast<size_t>(hit)];
    P.members.push_back(ge);
    P.members.push_back(ge.reversed());
    Q.edge_tags[ge.key()] = EdgeTag{hit, sgn, wit};
    Q.edge_tags[ge.reversed().key()] = EdgeTag{hit, -sgn, wit};
  }

  // re-anchor pairs at their lexicographically least oriented member
  for (EdgeOrbitInfo& P : Q.edge_orbits) {
    const Edge* best = &P.rep;
    for (const Edge& m : P.members)
      if (m < *best) best = &m;
    if (!(*best == P.rep)) {
      EdgeTag tb = Q.edge_tags[best->key()];
      PolyMatrix2 wbi = tb.witness.inverse();
      for (const Edge& m : P.members) {
        EdgeTag& tm = Q.edge_tags[m.key()];
        tm.witness = tm.witness * wbi;
        tm.sign *= tb.sign;
      }
      P.rep = *best;
      P.origin_orbit = Q.vertex_tags[static_cast<size_t>(Q.ball.find(P.rep.origin))].orbit;
      P.terminus_orbit = Q.vertex_tags[static_cast<size_t>(Q.ball.find(P.rep.terminus))].orbit;
    }
  }

  // reversal behavior, recomputed from witnesses
  for (EdgeOrbitInfo& P : Q.edge_orbits) {
    EquivResult er = edge_equiv_witness(G, P.rep, P.rep.reversed(), opt.degree_bound);
    if (er.witness) {
      P.reversible = true;
      P.reversal_witness = er.witness;
    } else if (!er.certified) {
      throw DegreeBoundTooSmall("cannot certify irreversibility of " + P.rep.to_string() +
                                " at degree bound " + std::to_string(er.bound_used));
    }
  }

  // incidence pattern at each fully explored orbit
  for (VertexOrbitInfo& O : Q.vertex_orbits) {
    if (O.anchor < 0) continue;
    const Vertex& v = Q.ball.vertices[static_cast<size_t>(O.anchor)];
    std::map<int64_t, int64_t> cnt;
    for (const Vertex& nb : v.neighbors()) ++cnt[Q.tag_of(Edge(v, nb)).pair];
    O.pattern.assign(cnt.begin(), cnt.end());
  }

  // cusp rays: the pattern (one continuation edge, q edges collapsing to one
  // orbit) persisting for cusp_persist consecutive levels out to the
  // unexplored boundary classifies a half-line
  const int64_t q = G.field()->q;
  struct Seg {
    int64_t in_pair, in_orbit, out_pair, out_orbit;
  };
  std::map<int64_t, Seg> segs;
  for (size_t k = 0; k < Q.vertex_orbits.size(); ++k) {
    const VertexOrbitInfo& O = Q.vertex_orbits[k];
    if (O.anchor < 0 || O.pattern.size() != 2) continue;
    int64_t m0 = O.pattern[0].second, m1 = O.pattern[1].second;
    int64_t out_pair, in_pair;
    if (m0 == 1 && m1 == q) {
      out_pair = O.pattern[0].first;
      in_pair = O.pattern[1].first;
    } else if (m0 == q && m1 == 1) {
      out_pair = O.pattern[1].first;
      in_pair = O.pattern[0].first;
    } else {
      continue;
    }
    const Vertex& av = Q.ball.vertices[static_cast<size_t>(O.anchor)];
    int64_t out_orbit = -1, in_orbit = -1;
    for (const Vertex& nb : av.neighbors()) {
      int64_t p = Q.tag_of(Edge(av, nb)).pair;
      int64_t orb = Q.vertex_tags[static_cast<size_t>(Q.ball.find(nb))].orbit;
      if (p == out_pair) out_orbit = orb;
      if (p == in_pair && in_orbit < 0) in_orbit = orb;
    }
    segs[static_cast<int64_t>(k)] = Seg{in_pair, in_orbit, out_pair, out_orbit};
  }
  std::set<int64_t> on_chain;
  std::vector<std::pair<std::vector<int64_t>, int64_t>> chains;  // (segments, terminal orbit)
  for (const auto& [k, s] : segs) {
    if (on_chain.count(k)) continue;
    // chain starts have no linking predecessor
    auto pit = segs.find(s.in_orbit);
    if (pit != segs.end() && pit->second.out_orbit == k && pit->second.out_pair == s.in_pair)
      continue;
    std::vector<int64_t> chain{k};
    int64_t cur = k;
    while (true) {
      const Seg& c = segs.at(cur);
      auto nit = segs.find(c.out_orbit);
      if (nit == segs.end() || nit->second.in_pair != c.out_pair ||
          nit->second.in_orbit != cur ||
          std::find(chain.begin(), chain.end(), c.out_orbit) != chain.end())
        break;
      chain.push_back(c.out_orbit);
      cur = c.out_orbit;
    }
    int64_t terminal = segs.at(chain.back()).out_orbit;
    bool to_boundary = !Q.vertex_orbits[static_cast<size_t>(terminal)].interior();
    if (static_cast<int64_t>(chain.size()) < opt.cusp_persist || !to_boundary ||
        std::find(chain.begin(), chain.end(), terminal) != chain.end())
      continue;
    for (int64_t c : chain) on_chain.insert(c);
    chains.emplace_back(std::move(chain), terminal);
  }
  // two chains can abut head to head (the quotient is locally a line); pop
  // both heads so that each ray attaches at a vertex of the finite part
  for (size_t i = 0; i < chains.size(); ++i)
    for (size_t j = i + 1; j < chains.size(); ++j) {
      std::vector<int64_t>& a = chains[i].first;
      std::vector<int64_t>& b = chains[j].first;
      if (a.size() > 1 && b.size() > 1 && segs.at(a[0]).in_orbit == b[0] &&
          segs.at(b[0]).in_orbit == a[0]) {
        a.erase(a.begin());
        b.erase(b.begin());
      }
    }
  for (const auto& [chain, terminal] : chains) {
    const Seg& first = segs.at(chain[0]);
    const VertexOrbitInfo& O1 = Q.vertex_orbits[static_cast<size_t>(chain[0])];
    const Vertex& av = Q.ball.vertices[static_cast<size_t>(O1.anchor)];
    std::optional<Edge> fe;
    for (const Vertex& nb : av.neighbors()) {
      if (Q.tag_of(Edge(av, nb)).pair != first.in_pair) continue;
      Edge cand(nb, av);
      if (!fe || cand < *fe) fe = cand;
    }
    CuspRay ray(*fe);
    ray.attachment_orbit = first.in_orbit;
    ray.first_edge_pair = first.in_pair;
    ray.segment_orbits = chain;
    ray.segment_orbits.push_back(terminal);
    for (int64_t c : chain) ray.segment_edge_pairs.push_back(segs.at(c).out_pair);
    for (int64_t c : ray.segment_orbits)
      Q.vertex_orbits[static_cast<size_t>(c)].on_cusp_ray = true;
    for (int64_t p : ray.segment_edge_pairs)
      Q.edge_orbits[static_cast<size_t>(p)].on_cusp_ray = true;
    Q.edge_orbits[static_cast<size_t>(first.in_pair)].first_edge = true;
    Q.cusp_rays.push_back(std::move(ray));
  }

  // post hoc soundness sweep over every stored witness
  for (size_t i = 0; i < NV; ++i) {
    const VertexTag& t = Q.vertex_tags[i];
    if (act_vertex(mat(t.witness), Q.vertex_orbits[static_cast<size_t>(t.orbit)].rep) !=
            Q.ball.vertices[i] ||
        !G.member(t.witness))
      throw InvarianceViolation("vertex tag failed re-verification");
  }
  for (const Edge& ge : Q.ball.edges()) {
    for (const Edge& e : {ge, ge.reversed()}) {
      const EdgeTag& t = Q.tag_of(e);
      const Edge& r = Q.edge_orbits[static_cast<size_t>(t.pair)].rep;
      Edge moved = act_edge(mat(t.witness), t.sign > 0 ? r : r.reversed());
      if (moved != e || !G.member(t.witness))
        throw InvarianceViolation("edge tag failed re-verification");
    }
  }
  for (const VertexOrbitInfo& O : Q.vertex_orbits) {
    if (O.anchor < 0) continue;
    int64_t total = 0;
    for (const auto& pm : O.pattern) total += pm.second;
    if (total != q + 1) throw InvarianceViolation("incidence pattern does not cover the link");
  }
  return Q;
}

// cycle rank E - V + C of the finite part (cusp rays and their entry edges removed)
inline int64_t betti1(const QuotientGraph& Q) {
  size_t n = Q.vertex_orbits.size();
  std::vector<int64_t> root(n);
  for (size_t i = 0; i < n; ++i) root[i] = static_cast<int64_t>(i);
  auto find = [&](int64_t a) {
    while (root[static_cast<size_t>(a)] != a) {
      root[static_cast<size_t>(a)] = root[static_cast<size_t>(root[static_cast<size_t>(a)])];
      a = root[static_cast<size_t>(a)];
    }
    return a;
  };
  int64_t V = 0, E = 0;
  for (const VertexOrbitInfo& O : Q.vertex_orbits)
    if (!O.on_cusp_ray) ++V;
  for (const EdgeOrbitInfo& P : Q.edge_orbits) {
    if (P.on_cusp_ray || P.first_edge) continue;
    if (Q.vertex_orbits[static_cast<size_t>(P.origin_orbit)].on_cusp_ray ||
        Q.vertex_orbits[static_cast<size_t>(P.terminus_orbit)].on_cusp_ray)
      continue;
    ++E;
    root[static_cast<size_t>(find(P.origin_orbit))] = find(P.terminus_orbit);
  }
  int64_t C = 0;
  for (size_t i = 0; i < n; ++i)
    if (!Q.vertex_orbits[i].on_cusp_ray && find(static_cast<int64_t>(i)) == static_cast<int64_t>(i))
      ++C;
  return E - V + C;
}

}  // namespace cforge
