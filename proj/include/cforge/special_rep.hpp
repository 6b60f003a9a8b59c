#pragma once

#include <map>
#include <utility>
#include <vector>

#include "cocycles.hpp"
#include "representations.hpp"
#include "tree.hpp"

namespace cforge {

// Locally constant functions on the boundary of the tree with values in the
// homogeneous polynomials of degree n, taken modulo the constant functions.
// An element is presented as a finite weighted sum of indicator functions
// lambda * 1_{U(e)} of boundary cones; normal_form below computes the unique
// canonical presentation of the class, so presentations may be manipulated
// freely (concatenated, refined, transported) in between.
struct StepFunction {
  int n = 0;
  int64_t twist = 0;  // determinant power used when values are transported
  const SeriesRing* R = nullptr;
  std::vector<std::pair<Edge, HomPoly>> terms;

  StepFunction(const SeriesRing* ring, int degree, int64_t twist_power = 0)
      : n(degree), twist(twist_power), R(ring) {
    if (R == nullptr) throw UsageError("step function needs a series ring");
    if (n < 0) throw IncompatibleWeight("negative coefficient degree");
  }

  void check_value(const HomPoly& lam) const {
    if (lam.n != n) throw IncompatibleWeight("coefficient degree mismatch");
    if (lam.ring() != R) throw RingMismatch("coefficient from a foreign ring");
  }

  void add_term(const Edge& e, const HomPoly& lam) {
    check_value(lam);
    if (e.origin.ring() != R) throw RingMismatch("edge from a foreign tree");
    terms.emplace_back(e, lam);
  }

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    if (a.n != b.n || a.twist != b.twist)
      throw IncompatibleWeight("sum of step functions of different kinds");
    if (a.R != b.R) throw RingMismatch("sum of step functions over different rings");
    StepFunction r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
  }
  friend StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    StepFunction nb = b;
    for (auto& t : nb.terms) t.second = HomPoly::zero(b.R, b.n) - t.second;
    return a + nb;
  }
  StepFunction scaled(const Series& s) const {
    StepFunction r = *this;
    for (auto& t : r.terms) t.second = t.second.scaled(s);
    return r;
  }
};

inline StepFunction from_indicator(const Edge& e, const HomPoly& lam, int64_t twist = 0) {
  StepFunction h(lam.ring(), lam.n, twist);
  h.add_term(e, lam);
  return h;
}

// value of the given presentation at a boundary point; well defined on the
// class only up to a global constant (differences of values are canonical)
inline HomPoly value_at(const StepFunction& h, const BoundaryPoint& z) {
  HomPoly v = HomPoly::zero(h.R, h.n);
  for (const auto& [e, lam] : h.terms)
    if (boundary_in_cone(e, z)) v = v + lam;
  return v;
}

// replace every term lambda * 1_{U(e)} on the named edge by the q terms on
// the onward edges at its terminus; the class is unchanged
inline StepFunction refine(const StepFunction& h, const Edge& e) {
  StepFunction out(h.R, h.n, h.twist);
  bool found = false;
  for (const auto& [d, lam] : h.terms) {
    if (d == e) {
      found = true;
      for (const Vertex& w : e.terminus.neighbors())
        if (w != e.origin) out.terms.emplace_back(Edge(e.terminus, w), lam);
    } else {
      out.terms.emplace_back(d, lam);
    }
  }
  if (!found) throw EdgeNotPresent("refine: edge absent from the presentation");
  return out;
}

// Canonical presentation of the class: the boundary cones of the minimal
// subtree carrying the support, coarsened until no q sibling cones agree,
// with the cone containing the end at infinity carrying value zero (that
// anchor kills the constants). Empty for the zero class. Certified-exact
// coefficients are assumed; undecided comparisons leave a finer (still
// correct) presentation.
inline StepFunction normal_form(const StepFunction& h) {
  StepFunction out(h.R, h.n, h.twist);
  std::map<Edge::Key, std::pair<Edge, HomPoly>> merged;
  for (const auto& [e, lam] : h.terms) {
    auto it = merged.find(e.key());
    if (it == merged.end())
      merged.emplace(e.key(), std::make_pair(e, lam));
    else
      it->second.second = it->second.second + lam;
  }
  std::vector<std::pair<Edge, HomPoly>> live;
  for (auto& [k, ev] : merged)
    if (!ev.second.is_zero_certified()) live.push_back(ev);
  if (live.empty()) return out;

  // minimal subtree spanning the surviving edges
  std::map<Vertex::Key, Vertex> tree;
  const Vertex root = live.front().first.origin;
  for (const auto& [e, lam] : live)
    for (const Vertex& w : geodesic(root, e.terminus)) tree.emplace(w.key(), w);
  for (const auto& [e, lam] : live)
    for (const Vertex& w : geodesic(root, e.origin)) tree.emplace(w.key(), w);

  // accumulated value on each outward boundary cone
  std::map<Edge::Key, std::pair<Edge, HomPoly>> bdry;
  for (const auto& [k, v] : tree)
    for (const Vertex& w : v.neighbors()) {
      if (tree.count(w.key())) continue;
      Edge b(v, w);
      HomPoly c = HomPoly::zero(h.R, h.n);
      for (const auto& [e, lam] : live)
        if (cone_contains(e, b)) c = c + lam;
      bdry.emplace(b.key(), std::make_pair(b, c));
    }

  const BoundaryPoint inf = BoundaryPoint::at_infinity(h.R);
  HomPoly anchor = HomPoly::zero(h.R, h.n);
  for (const auto& [k, bc] : bdry)
    if (boundary_in_cone(bc.first, inf)) anchor = bc.second;
  for (auto& [k, bc] : bdry) bc.second = bc.second - anchor;

  // merge the q cones at a leaf whenever they carry one common value
  bool changed = true;
  while (changed && tree.size() > 1) {
    changed = false;
    for (const auto& [k, v] : tree) {
      std::vector<Vertex> inside, outside;
      for (const Vertex& w : v.neighbors())
        (tree.count(w.key()) ? inside : outside).push_back(w);
      if (inside.size() != 1) continue;
      const HomPoly c0 = bdry.at(Edge(v, outside.front()).key()).second;
      bool equal = true;
      for (const Vertex& w : outside)
        if (!certified_equal(bdry.at(Edge(v, w).key()).second, c0)) equal = false;
      if (!equal) continue;
      for (const Vertex& w : outside) bdry.erase(Edge(v, w).key());
      Edge up(inside.front(), v);
      bdry.emplace(up.key(), std::make_pair(up, c0));
      tree.erase(k);
      changed = true;
      break;
    }
  }

  // around a single vertex, q cones sharing one value are the complement of
  // the remaining cone: rewrite through that complement, which either empties
  // the presentation or shrinks it to one indicator
  if (tree.size() == 1 && bdry.size() >= 2) {
    std::vector<std::pair<Edge, HomPoly>> around;
    for (const auto& [k, bc] : bdry) around.push_back(bc);
    size_t odd = around.size();
    bool all_equal = false;
    for (size_t i = 0; i < around.size() && odd == around.size() && !all_equal; ++i) {
      size_t matches = 0;
      for (const auto& [b, c] : around)
        if (certified_equal(c, around[i].second)) ++matches;
      if (matches == around.size()) all_equal = true;
      if (matches + 1 == around.size())
        for (size_t j = 0; j < around.size(); ++j)
          if (!certified_equal(around[j].second, around[i].second)) odd = j;
    }
    if (all_equal) {
      bdry.clear();  // a constant, and the anchor pins it to zero
    } else if (odd < around.size()) {
      HomPoly common = HomPoly::zero(h.R, h.n);
      for (size_t j = 0; j < around.size(); ++j)
        if (j != odd) common = around[j].second;
      bdry.clear();
      if (boundary_in_cone(around[odd].first, inf)) {
        Edge flip = around[odd].first.reversed();
        bdry.emplace(flip.key(), std::make_pair(flip, common));
      } else {
        bdry.emplace(around[odd].first.key(),
                     std::make_pair(around[odd].first, around[odd].second - common));
      }
    }
  }

  for (auto& [k, bc] : bdry)
    if (!bc.second.is_zero_certified()) out.terms.push_back(bc);
  return out;
}

inline bool is_zero_class(const StepFunction& h) { return normal_form(h).terms.empty(); }

inline bool same_class(const StepFunction& a, const StepFunction& b) {
  return is_zero_class(a - b);
}

// the boundary realisation of the value action: cones move by the tree
// action, coefficients by the degree-n substitution action
inline StepFunction sp_apply(const Matrix2& g, const StepFunction& h) {
  if (g.ring() != h.R) throw RingMismatch("matrix over a foreign ring");
  StepFunction out(h.R, h.n, h.twist);
  for (const auto& [e, lam] : h.terms)
    out.terms.emplace_back(act_edge(g, e), rho_act(g, lam, h.twist));
  return out;
}

inline StepFunction sp_apply(const PolyMatrix2& g, const StepFunction& h) {
  return sp_apply(g.at_inverse_pi(h.R), h);
}

// sum of f(e_i) evaluated at lambda_i; independent of the presentation when
// f is harmonic and antisymmetric on the region the presentation touches
inline Series pairing(const HarmonicCocycle& f, const StepFunction& h) {
  if (f.degree() != h.n) throw IncompatibleWeight("pairing needs weight n + 2");
  if (f.twist != h.twist) throw IncompatibleWeight("pairing needs matching twists");
  if (f.R != h.R) throw RingMismatch("pairing needs a common series ring");
  Series s = Series::zero(h.R);
  for (const auto& [e, lam] : h.terms) s = s + pairing(f.value(e), lam);
  return s;
}

}  // namespace cforge
