#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix2.hpp"
#include "series.hpp"

namespace cforge {

// Vertex of the tree of lattice classes over the valuation ring of a local
// field F_q((pi)): the class of the column lattice [[pi^n, u], [0, 1]] with
// u a Laurent polynomial representative mod pi^n. The representative is
// always exact and reduced, so vertex equality is decidable.
struct Vertex {
  int64_t n;
  Series u;

  Vertex(int64_t n_, const Series& u_) : n(n_), u(u_.reduced_mod_pi(n_)) {}

  static Vertex standard(const SeriesRing* R) { return Vertex(0, Series::zero(R)); }

  const SeriesRing* ring() const { return u.ring(); }

  using Key = std::pair<int64_t, std::vector<int64_t>>;
  Key key() const { return {n, u.encode()}; }

  friend bool operator==(const Vertex& v, const Vertex& w) {
    return v.n == w.n && exact_equal(v.u, w.u);
  }
  friend bool operator!=(const Vertex& v, const Vertex& w) { return !(v == w); }
  friend bool operator<(const Vertex& v, const Vertex& w) { return v.key() < w.key(); }

  Vertex up() const { return Vertex(n - 1, u); }

  // the q neighbors one level deeper, in coefficient code order
  std::vector<Vertex> down() const {
    const CoeffRing* C = ring()->coeff;
    if (!C->is_field()) throw NotApplicable("tree requires field coefficients");
    std::vector<Vertex> out;
    for (const RElem& c : C->all_elements())
      out.push_back(Vertex(n + 1, u + Series::from_coeff(ring(), c, n)));
    return out;
  }

  std::vector<Vertex> neighbors() const {
    std::vector<Vertex> out{up()};
    for (Vertex& w : down()) out.push_back(std::move(w));
    return out;
  }

  std::string to_string() const { return "(" + std::to_string(n) + "; " + u.to_string() + ")"; }
};

inline int64_t tree_distance(const Vertex& v, const Vertex& w) {
  Series d = v.u - w.u;
  int64_t vd = d.is_zero_certified() ? VAL_INF : d.val();
  int64_t m = std::min({v.n, w.n, vd});
  return (v.n - m) + (w.n - m);
}

inline bool adjacent(const Vertex& v, const Vertex& w) { return tree_distance(v, w) == 1; }

inline Matrix2 matrix_of_vertex(const Vertex& v) {
  const SeriesRing* R = v.ring();
  return Matrix2(Series::pi_pow(R, v.n), v.u, Series::zero(R), Series::one(R));
}

// normal form of the lattice spanned by the columns: column-reduce using the
// bottom entry of smaller valuation, then rescale to [[pi^n, u], [0, 1]]
inline Vertex vertex_of_matrix(const Matrix2& g) {
  Series a = g.a(), b = g.b(), c = g.c(), d = g.d();
  Series det = g.det();
  if (det.is_zero_certified()) throw NotAUnit("vertex of a singular matrix");
  int64_t vdet = det.val();  // PrecisionExhausted when not certified nonzero
  auto valz = [](const Series& s) { return s.is_zero_certified() ? VAL_INF : s.val(); };
  if (valz(d) > valz(c)) {
    std::swap(a, b);
    std::swap(c, d);
  }
  int64_t n = vdet - 2 * valz(d);
  return Vertex(n, (b / d).reduced_mod_pi(n));
}

inline Vertex act_vertex(const Matrix2& g, const Vertex& v) {
  return vertex_of_matrix(g * matrix_of_vertex(v));
}

// oriented edge between adjacent vertices
struct Edge {
  Vertex origin, terminus;

  Edge(Vertex o, Vertex t) : origin(std::move(o)), terminus(std::move(t)) {
    if (tree_distance(origin, terminus) != 1)
      throw NotApplicable("edge endpoints are not adjacent");
  }

  bool downward() const { return terminus.n == origin.n + 1; }
  const Vertex& down_vertex() const { return downward() ? terminus : origin; }
  const Vertex& up_vertex() const { return downward() ? origin : terminus; }
  Edge reversed() const { return Edge(terminus, origin); }

  using Key = std::pair<Vertex::Key, Vertex::Key>;
  Key key() const { return {origin.key(), terminus.key()}; }

  friend bool operator==(const Edge& e, const Edge& f) {
    return e.origin == f.origin && e.terminus == f.terminus;
  }
  friend bool operator!=(const Edge& e, const Edge& f) { return !(e == f); }
  friend bool operator<(const Edge& e, const Edge& f) { return e.key() < f.key(); }

  std::string to_string() const { return origin.to_string() + " -> " + terminus.to_string(); }
};

inline Edge act_edge(const Matrix2& g, const Edge& e) {
  return Edge(act_vertex(g, e.origin), act_vertex(g, e.terminus));
}

// point of the projective line over the local field: the boundary of the tree
struct BoundaryPoint {
  bool infinite;
  Series z;  // meaningful when finite

  static BoundaryPoint at_infinity(const SeriesRing* R) {
    return BoundaryPoint{true, Series::zero(R)};
  }
  static BoundaryPoint finite(Series z) { return BoundaryPoint{false, std::move(z)}; }

  std::string to_string() const { return infinite ? "inf" : z.to_string(); }
};

// fractional linear action z -> (az + b)/(cz + d)
inline BoundaryPoint act_boundary(const Matrix2& g, const BoundaryPoint& p) {
  const SeriesRing* R = g.ring();
  if (p.infinite) {
    if (g.c().is_zero_certified()) return BoundaryPoint::at_infinity(R);
    return BoundaryPoint::finite(g.a() / g.c());
  }
  Series den = g.c() * p.z + g.d();
  if (den.is_zero_certified()) return BoundaryPoint::at_infinity(R);
  return BoundaryPoint::finite((g.a() * p.z + g.b()) / den);
}

// membership of a boundary point in the cone of ends through an edge:
// a downward edge cuts out the residue ball around the deeper representative,
// an upward edge its complement together with infinity
inline bool boundary_in_cone(const Edge& e, const BoundaryPoint& p) {
  const Vertex& dv = e.down_vertex();
  if (e.downward()) {
    if (p.infinite) return false;
    return congruent_mod_pi(p.z, dv.u, dv.n);
  }
  if (p.infinite) return true;
  return !congruent_mod_pi(p.z, dv.u, dv.n);
}

// U(inner) contained in U(outer), decided by the two distance identities
inline bool cone_contains(const Edge& outer, const Edge& inner) {
  if (outer == inner) return true;
  int64_t D = tree_distance(outer.origin, inner.origin);
  return tree_distance(outer.terminus, inner.origin) == D - 1 &&
         tree_distance(outer.origin, inner.terminus) == D + 1;
}

// the neighbor of v on the geodesic toward a boundary point
inline Vertex neighbor_toward(const Vertex& v, const BoundaryPoint& p) {
  if (p.infinite) return v.up();
  if (!congruent_mod_pi(p.z, v.u, v.n)) return v.up();
  return Vertex(v.n + 1, p.z.reduced_mod_pi(v.n + 1));
}

inline Edge edge_toward(const Vertex& v, const BoundaryPoint& p) {
  return Edge(v, neighbor_toward(v, p));
}

inline std::vector<Vertex> geodesic(const Vertex& v, const Vertex& w) {
  std::vector<Vertex> left{v}, right{w};
  while (left.back() != right.back()) {
    Vertex a = left.back(), b = right.back();
    if (a.n >= b.n) left.push_back(a.up());
    if (left.back() != b && b.n >= a.n) right.push_back(b.up());
  }
  for (size_t i = right.size() - 1; i-- > 0;) left.push_back(right[i]);
  return left;
}

// ball of given radius: vertices in breadth-first order with parent links
struct TreeBall {
  Vertex center;
  int radius;
  std::vector<Vertex> vertices;            // vertices[0] == center
  std::vector<int64_t> parent;             // parent[0] == -1
  std::vector<std::vector<int64_t>> children;
  std::map<Vertex::Key, int64_t> index;

  int64_t find(const Vertex& v) const {
    auto it = index.find(v.key());
    return it == index.end() ? -1 : it->second;
  }
  bool contains(const Vertex& v) const { return find(v) >= 0; }

  // one edge per adjacency, oriented away from the center
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (size_t i = 1; i < vertices.size(); ++i)
      out.push_back(Edge(vertices[static_cast<size_t>(parent[i])], vertices[i]));
    return out;
  }
};

inline TreeBall build_ball(const Vertex& center, int radius) {
  if (radius < 0) throw UsageError("negative ball radius");
  TreeBall ball{center, radius, {center}, {-1}, {{}}, {}};
  ball.index[center.key()] = 0;
  size_t frontier_begin = 0;
  for (int layer = 0; layer < radius; ++layer) {
    size_t frontier_end = ball.vertices.size();
    for (size_t i = frontier_begin; i < frontier_end; ++i) {
      Vertex v = ball.vertices[i];
      for (const Vertex& w : v.neighbors()) {
        if (ball.contains(w)) continue;
        ball.index[w.key()] = static_cast<int64_t>(ball.vertices.size());
        ball.vertices.push_back(w);
        ball.parent.push_back(static_cast<int64_t>(i));
        ball.children.emplace_back();
        ball.children[i].push_back(static_cast<int64_t>(ball.vertices.size()) - 1);
      }
    }
    frontier_begin = frontier_end;
  }
  return ball;
}

// "(n; series-literal)"
inline Vertex parse_vertex(const SeriesRing* R, const std::string& s) {
  size_t i = 0;
  detail::skip_ws(s, i);
  if (i >= s.size() || s[i] != '(') throw UsageError("vertex literal must look like (n; u)");
  ++i;
  int64_t n;
  if (!detail::parse_int(s, i, n)) throw UsageError("bad level in vertex literal: " + s);
  detail::skip_ws(s, i);
  if (i >= s.size() || s[i] != ';') throw UsageError("expected ';' in vertex literal: " + s);
  ++i;
  size_t close = s.rfind(')');
  if (close == std::string::npos || close < i) throw UsageError("unclosed vertex literal: " + s);
  Series u = parse_series(R, s.substr(i, close - i));
  size_t j = close + 1;
  detail::skip_ws(s, j);
  if (j != s.size()) throw UsageError("trailing input after vertex literal: " + s);
  return Vertex(n, u);
}

}  // namespace cforge
