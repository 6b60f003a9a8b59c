#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cforge/arithmetic_group.hpp"
#include "cforge/cocycles.hpp"
#include "cforge/coeff_ring.hpp"
#include "cforge/quotient.hpp"
#include "cforge/representations.hpp"
#include "cforge/special_rep.hpp"
#include "cforge/tree.hpp"

// Glue between the invariant-cocycle side and the boundary side: labelled
// families of invariant cocycles, their boundary evaluators with finite
// support certificates, restriction of a degree-n homomorphism to its cyclic
// generator and the replay that extends it back, coefficientwise lifting into
// a p-adic coefficient ring, and the integral/mod-p comparison at weight two.

namespace cforge {

// ---- labelled class sets ----

// finite list of labels, each carrying the arithmetic group acting there;
// shipped configurations have a single label
struct ClassSet {
  std::vector<std::pair<std::string, ArithmeticGroup>> classes;

  explicit ClassSet(std::vector<std::pair<std::string, ArithmeticGroup>> cs)
      : classes(std::move(cs)) {
    if (classes.empty()) throw UsageError("a class set needs at least one label");
    for (size_t i = 0; i < classes.size(); ++i)
      for (size_t j = i + 1; j < classes.size(); ++j)
        if (classes[i].first == classes[j].first)
          throw UsageError("duplicate class label: " + classes[i].first);
  }

  static ClassSet single(const std::string& label, const ArithmeticGroup& g) {
    return ClassSet({{label, g}});
  }

  size_t size() const { return classes.size(); }

  bool has(const std::string& label) const {
    for (const auto& [l, g] : classes)
      if (l == label) return true;
    return false;
  }

  const ArithmeticGroup& group(const std::string& label) const {
    for (const auto& [l, g] : classes)
      if (l == label) return g;
    throw UsageError("unknown class label: " + label);
  }
};

// small deterministic batch of group members used for invariance spot checks:
// elementary matrices compatible with the congruence kind, unit diagonals
// where allowed, and a few two-letter products
inline std::vector<PolyMatrix2> group_sample_elements(const ArithmeticGroup& G) {
  const CoeffRing* C = G.field();
  GFPoly one = GFPoly::one(C), zero = GFPoly::zero(C), t = GFPoly::var(C);
  GFPoly bmul = G.kind == GroupKind::gammaFull ? G.level : one;
  GFPoly cmul = G.kind == GroupKind::full ? one : G.level;
  std::vector<PolyMatrix2> pool;
  auto push = [&](const PolyMatrix2& g) {
    if (!G.member(g)) return;
    for (const PolyMatrix2& h : pool)
      if (h == g) return;
    pool.push_back(g);
  };
  for (const GFPoly& b : {one, t, t * t}) push(PolyMatrix2(one, b * bmul, zero, one));
  for (const GFPoly& c : {one, t}) push(PolyMatrix2(one, zero, c * cmul, one));
  for (const RElem& u : C->all_units()) {
    GFPoly cu(C, {u});
    if (cu == one) continue;
    push(PolyMatrix2(cu, zero, zero, one));
    push(PolyMatrix2(one, zero, zero, cu));
  }
  size_t base = pool.size();
  for (size_t i = 0; i + 1 < base && pool.size() < base + 4; ++i)
    push(pool[i] * pool[i + 1]);
  if (base >= 2) push(pool[1] * pool[0]);
  return pool;
}

inline bool is_zero_cocycle(const HarmonicCocycle& f) {
  for (const auto& [pair, v] : f.orbit_values)
    if (!v.is_zero_certified()) return false;
  for (const auto& [k, ev] : f.values)
    if (!ev.second.is_zero_certified()) return false;
  return true;
}

namespace detail {

// two-sided recomputation of the transport identity f(ge) = rho*(g) f(e) on
// sampled members and edges; throws with the offending pair
inline void check_invariance(const std::string& label, const ArithmeticGroup& G,
                             const HarmonicCocycle& f) {
  const SeriesRing* TR = G.R;
  std::vector<Edge> edges;
  if (f.ctx) {
    for (const EdgeOrbitInfo& P : f.ctx->edge_orbits) {
      size_t take = 0;
      for (const Edge& e : P.members) {
        edges.push_back(e);
        if (++take >= 3) break;
      }
    }
  } else {
    for (const auto& [k, ev] : f.values) edges.push_back(ev.first);
    Vertex v0 = Vertex::standard(TR);
    for (const Vertex& nb : v0.neighbors()) edges.emplace_back(v0, nb);
  }
  for (const PolyMatrix2& gam : group_sample_elements(G)) {
    Matrix2 g = gam.at_inverse_pi(TR);
    for (const Edge& e : edges) {
      DualVec lhs = DualVec::zero(f.R, f.degree());
      try {
        lhs = f.value(act_edge(g, e));
      } catch (const OutOfExploredRegion&) {
        continue;
      }
      DualVec rhs = f.degree() > 0 || f.twist != 0
                        ? dual_act(gam.at_inverse_pi(f.R), f.value(e), f.twist)
                        : f.value(e);
      if (!(lhs - rhs).is_zero_certified())
        throw InvarianceViolation("component " + label + ": transport fails for " +
                                  gam.to_string() + " at " + e.to_string());
    }
  }
}

}  // namespace detail

// ---- global cocycles over a class set ----

// one invariant cocycle per label, all of the same weight, twist, and ring;
// components live on the same series ring that carries the group's tree
struct GlobalCocycle {
  ClassSet classes;
  std::map<std::string, HarmonicCocycle> parts;

  GlobalCocycle(ClassSet X, std::map<std::string, HarmonicCocycle> ps)
      : classes(std::move(X)), parts(std::move(ps)) {
    for (const auto& [label, G] : classes.classes) {
      auto it = parts.find(label);
      if (it == parts.end()) throw UsageError("class " + label + " has no component");
      if (it->second.R != G.R) throw RingMismatch("component off the group's series ring");
    }
    for (const auto& [label, f] : parts) {
      if (!classes.has(label)) throw UsageError("component for unknown label: " + label);
      const HarmonicCocycle& f0 = parts.begin()->second;
      if (f.weight != f0.weight || f.twist != f0.twist)
        throw IncompatibleWeight("components of mixed weight or twist");
      detail::check_invariance(label, classes.group(label), f);
    }
  }

  const HarmonicCocycle& part(const std::string& label) const {
    auto it = parts.find(label);
    if (it == parts.end()) throw UsageError("unknown class label: " + label);
    return it->second;
  }

  int weight() const { return parts.begin()->second.weight; }
  int64_t twist() const { return parts.begin()->second.twist; }
  const SeriesRing* ring() const { return parts.begin()->second.R; }

  bool zero() const {
    for (const auto& [label, f] : parts)
      if (!is_zero_cocycle(f)) return false;
    return true;
  }
};

// split a global family into its labelled components, re-verifying the
// invariance of each; inverse to phi_compose
inline std::map<std::string, HarmonicCocycle> phi_decompose(const GlobalCocycle& w) {
  for (const auto& [label, f] : w.parts)
    detail::check_invariance(label, w.classes.group(label), f);
  return w.parts;
}

// assemble labelled components into a global family, verifying invariance
inline GlobalCocycle phi_compose(const ClassSet& X,
                                 const std::map<std::string, HarmonicCocycle>& tuple) {
  for (const auto& [label, f] : tuple) detail::check_invariance(label, X.group(label), f);
  return GlobalCocycle(X, tuple);
}

// ---- the reference edge and its coset transporters ----

// the downward edge out of the standard vertex toward the zero residue
inline Edge standard_edge(const SeriesRing* R) {
  Vertex v0 = Vertex::standard(R);
  return Edge(v0, v0.down()[0]);
}

// a matrix carrying the standard edge onto e: translations assemble the
// downward case, and one uniformizer swap reverses orientation
inline Matrix2 edge_transporter(const Edge& e) {
  const SeriesRing* R = e.origin.u.ring();
  if (e.downward()) {
    Series c = (e.terminus.u - e.origin.u) * Series::pi_pow(R, -e.origin.n);
    return matrix_of_vertex(e.origin) *
           Matrix2(Series::one(R), c, Series::zero(R), Series::one(R));
  }
  return edge_transporter(e.reversed()) *
         Matrix2(Series::zero(R), Series::pi_pow(R, 1), Series::one(R), Series::zero(R));
}

// finite support region: every edge carrying a nonzero value is reachable as
// (group element) * (listed transporter) * (stabilizer of the base edge)
struct SupportCoset {
  std::string label;
  int64_t pair;  // edge-orbit id, -1 for free-standing components
  Edge rep;
  Matrix2 transporter;
};

struct SupportCertificate {
  Edge base;
  std::string stabilizer;  // description of the block absorbed on the right
  std::vector<SupportCoset> cosets;
};

inline SupportCertificate support_certificate(const GlobalCocycle& w) {
  const SeriesRing* R = w.ring();
  Edge base = standard_edge(R);
  SupportCertificate cert{base,
                          "stabilizer of " + base.to_string() +
                              " inside the integral points, together with scalars",
                          {}};
  for (const auto& [label, f] : w.parts) {
    if (f.ctx) {
      for (const auto& [pair, v] : f.orbit_values) {
        if (v.is_zero_certified()) continue;
        const Edge& rep = f.ctx->edge_orbits[static_cast<size_t>(pair)].rep;
        cert.cosets.push_back({label, pair, rep, edge_transporter(rep)});
      }
    } else {
      for (const auto& [k, ev] : f.values) {
        if (ev.second.is_zero_certified()) continue;
        cert.cosets.push_back({label, -1, ev.first, edge_transporter(ev.first)});
      }
    }
  }
  return cert;
}

// ---- boundary evaluators ----

// immutable closure evaluating a labelled component against transported step
// functions, carrying its own finite support certificate
struct AutomorphicEvaluator {
  std::shared_ptr<const GlobalCocycle> data;
  int weight;
  int64_t twist;
  SupportCertificate support;
  std::function<Series(const std::string&, const Matrix2&, const StepFunction&)> eval;
};

inline AutomorphicEvaluator make_evaluator(GlobalCocycle w) {
  auto data = std::make_shared<const GlobalCocycle>(std::move(w));
  auto eval = [data](const std::string& x, const Matrix2& g, const StepFunction& h) {
    return pairing(data->part(x), sp_apply(g, h));
  };
  return AutomorphicEvaluator{data, data->weight(), data->twist(),
                              support_certificate(*data), eval};
}

inline Series theta_evaluate(const AutomorphicEvaluator& W, const std::string& x,
                             const Matrix2& g, const StepFunction& h) {
  return W.eval(x, g, h);
}

inline Series theta_evaluate(const AutomorphicEvaluator& W, const std::string& x,
                             const PolyMatrix2& g, const StepFunction& h) {
  return W.eval(x, g.at_inverse_pi(h.R), h);
}

// read the components back off the evaluator through indicator values at the
// identity slot; exact left inverse of make_evaluator
inline GlobalCocycle hom_to_cocycle(const AutomorphicEvaluator& W) {
  int n = W.weight - 2;
  std::map<std::string, HarmonicCocycle> parts;
  for (const auto& [label, f] : W.data->parts) {
    HarmonicCocycle g(f.weight, f.R, f.twist);
    Matrix2 id = Matrix2::identity(f.R);
    auto observed = [&](const Edge& e) {
      DualVec v = DualVec::zero(f.R, n);
      for (int j = 0; j <= n; ++j)
        v.v[static_cast<size_t>(j)] = W.eval(
            label, id,
            from_indicator(e, HomPoly::monomial(f.R, n, j, Series::one(f.R)), f.twist));
      return v;
    };
    if (f.ctx) {
      g.ctx = f.ctx;
      for (const EdgeOrbitInfo& P : f.ctx->edge_orbits) {
        const EdgeTag& tag = f.ctx->tag_of(P.rep);
        DualVec v = observed(P.rep);
        if (tag.sign < 0) v = v.negated();
        if (n > 0 || f.twist != 0)
          v = dual_act(tag.witness.at_inverse_pi(f.R).inverse(), v, f.twist);
        if (!v.is_zero_certified()) g.orbit_values.emplace(tag.pair, std::move(v));
      }
    } else {
      for (const auto& [k, ev] : f.values) {
        DualVec v = observed(ev.first);
        if (!v.is_zero_certified()) g.set(ev.first, v);
      }
    }
    parts.emplace(label, std::move(g));
  }
  return GlobalCocycle(W.data->classes, std::move(parts));
}

// ---- sampled verification ----

namespace detail {

struct SampleRng {
  uint64_t s;
  explicit SampleRng(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int64_t below(int64_t n) { return static_cast<int64_t>(next() % static_cast<uint64_t>(n)); }
};

inline Series sample_series(const SeriesRing* R, SampleRng& rng, int64_t lo, int terms) {
  Series s = Series::zero(R);
  for (int i = 0; i < terms; ++i)
    s = s + Series::from_coeff(R, R->coeff->decode(rng.below(R->coeff->q)), lo + i);
  return s;
}

inline Series sample_unit(const SeriesRing* R, SampleRng& rng) {
  const CoeffRing* C = R->coeff;
  Series s = Series::from_coeff(R, C->decode(1 + rng.below(C->q - 1)), 0);
  return s + sample_series(R, rng, 1, 2);
}

// exact random point of the general linear group: elementary words and
// diagonal uniformizer powers, so determinants stay single-term
inline Matrix2 sample_point(const SeriesRing* R, SampleRng& rng) {
  Series one = Series::one(R), zero = Series::zero(R);
  Matrix2 g = Matrix2::identity(R);
  int words = 3 + static_cast<int>(rng.below(3));
  for (int i = 0; i < words; ++i) {
    switch (rng.below(3)) {
      case 0:
        g = g * Matrix2(one, sample_series(R, rng, rng.below(4) - 2, 2), zero, one);
        break;
      case 1:
        g = g * Matrix2(one, zero, sample_series(R, rng, rng.below(4) - 2, 2), one);
        break;
      default:
        g = g * Matrix2::diag_pi(R, rng.below(3) - 1, rng.below(3) - 1);
        break;
    }
  }
  return g;
}

}  // namespace detail

struct SupportReport {
  size_t samples = 0;
  size_t inside = 0;             // draws landing on a certified coset, per component
  size_t outside_vanishing = 0;  // draws off the region where every value vanished
  size_t unexplored = 0;         // draws leaving the explored ball, skipped
  bool verified = true;
  std::string witness;  // first failing draw, empty when verified
};

// draw points of the general linear group, transport the base edge, and check
// the evaluator vanishes whenever the landing edge is off the certified region
inline SupportReport verify_support(const AutomorphicEvaluator& W,
                                    const SupportCertificate& cert, size_t samples = 500,
                                    uint64_t seed = 2026) {
  SupportReport rep;
  rep.samples = samples;
  const GlobalCocycle& w = *W.data;
  const SeriesRing* R = w.ring();
  int n = W.weight - 2;
  detail::SampleRng rng(seed);
  std::set<std::pair<std::string, int64_t>> pairs;
  std::set<std::pair<std::string, Edge::Key>> freed;
  for (const SupportCoset& sc : cert.cosets) {
    if (sc.pair >= 0) pairs.emplace(sc.label, sc.pair);
    freed.emplace(sc.label, sc.rep.key());
    freed.emplace(sc.label, sc.rep.reversed().key());
  }
  for (size_t i = 0; i < samples; ++i) {
    Matrix2 g = detail::sample_point(R, rng);
    Edge e = act_edge(g, cert.base);
    for (const auto& [label, f] : w.parts) {
      bool in;
      if (f.ctx) {
        try {
          in = pairs.count({label, f.ctx->tag_of(e).pair}) > 0;
        } catch (const OutOfExploredRegion&) {
          ++rep.unexplored;
          continue;
        }
      } else {
        in = freed.count({label, e.key()}) > 0;
      }
      if (in) {
        ++rep.inside;
        continue;
      }
      for (int j = 0; j <= n; ++j) {
        Series val = W.eval(
            label, g,
            from_indicator(cert.base, HomPoly::monomial(R, n, j, Series::one(R)), W.twist));
        if (!val.is_zero_certified()) {
          rep.verified = false;
          if (rep.witness.empty())
            rep.witness = "component " + label + " detected off the region at " + e.to_string();
        }
      }
      ++rep.outside_vanishing;
    }
  }
  return rep;
}

inline SupportReport verify_support(const AutomorphicEvaluator& W, size_t samples = 500,
                                    uint64_t seed = 2026) {
  return verify_support(W, W.support, samples, seed);
}

struct InfinityReport {
  std::vector<Edge> presentation;  // edges of the canonical form of u
  size_t stabilizer_samples = 0;   // elements found fixing every presentation edge
  size_t checks = 0;               // two-sided evaluations performed
  size_t unexplored = 0;           // evaluations skipped for leaving the explored ball
  bool equivariant = true;
  std::string witness;
  size_t span_rank = 0;  // rank of the sampled orbit of u inside its edge block
  size_t ambient = 0;    // (number of presentation edges) * (degree + 1)
  bool trivial = false;  // zero component or empty presentation
};

// sampled witness that evaluation through u respects the common stabilizer of
// its presentation edges: finds fixing elements, compares both evaluation
// paths, and tracks how much of the edge block the orbit of u spans
inline InfinityReport verify_infinity_condition(const AutomorphicEvaluator& W,
                                                const std::string& x, const StepFunction& u,
                                                size_t samples = 60, uint64_t seed = 2027) {
  InfinityReport rep;
  const HarmonicCocycle& f = W.data->part(x);
  StepFunction nf = normal_form(u);
  for (const auto& [e, lam] : nf.terms) rep.presentation.push_back(e);
  if (rep.presentation.empty() || is_zero_cocycle(f)) {
    rep.trivial = true;
    return rep;
  }
  const SeriesRing* R = u.R;
  const CoeffRing* C = R->coeff;
  int n = u.n;
  size_t r = rep.presentation.size();
  rep.ambient = r * static_cast<size_t>(n + 1);
  detail::SampleRng rng(seed);
  int64_t deep = 2;
  for (const Edge& e : rep.presentation) {
    int64_t m = std::max(std::llabs(e.origin.n), std::llabs(e.terminus.n)) + 2;
    deep = std::max(deep, m);
  }
  Matrix2 T = edge_transporter(rep.presentation.front());
  Matrix2 Tinv = T.inverse();
  Series zero = Series::zero(R), one = Series::one(R);

  std::vector<std::vector<PolyFrac>> span;
  std::vector<size_t> order;  // term index per presentation edge
  std::map<Edge::Key, size_t> slot;
  for (size_t i = 0; i < r; ++i) slot.emplace(rep.presentation[i].key(), i);
  auto insert_span = [&](const StepFunction& h) {
    std::vector<HomPoly> block(r, HomPoly::zero(R, n));
    for (const auto& [e, lam] : h.terms) {
      auto it = slot.find(e.key());
      if (it == slot.end()) return;  // moved off the block, not comparable
      block[it->second] = block[it->second] + lam;
    }
    std::vector<PolyFrac> flat;
    for (const HomPoly& b : block)
      for (const PolyFrac& x : detail::hom_to_frac(b)) flat.push_back(x);
    detail::echelon_insert(span, std::move(flat), C);
  };
  insert_span(nf);

  size_t kept = 0;
  for (size_t i = 0; i < samples && kept < 24; ++i) {
    Matrix2 k = Matrix2::identity(R);
    switch (rng.below(3)) {
      case 0:  // scalar unit
        k = Matrix2::scalar(R, detail::sample_unit(R, rng));
        break;
      case 1: {  // deep principal perturbation of the identity
        Series pd = Series::pi_pow(R, deep);
        k = Matrix2(one + pd * detail::sample_series(R, rng, 0, 2),
                    pd * detail::sample_series(R, rng, 0, 2),
                    pd * detail::sample_series(R, rng, 0, 2),
                    one + pd * detail::sample_series(R, rng, 0, 2));
        break;
      }
      default: {  // integral stabilizer of the first edge, conjugated into place
        Matrix2 k0(detail::sample_unit(R, rng),
                   Series::pi_pow(R, 1) * detail::sample_series(R, rng, 0, 2),
                   detail::sample_series(R, rng, 0, 2), detail::sample_unit(R, rng));
        k = T * k0 * Tinv;
        break;
      }
    }
    bool fixes = true;
    try {
      for (const Edge& e : rep.presentation)
        if (!(act_edge(k, e) == e)) {
          fixes = false;
          break;
        }
    } catch (const Error&) {
      fixes = false;
    }
    if (!fixes) continue;
    ++kept;
    ++rep.stabilizer_samples;
    StepFunction ku = sp_apply(k, nf);
    for (int t = 0; t < 2; ++t) {
      Matrix2 g = detail::sample_point(R, rng);
      Series lhs = Series::zero(R), rhs = Series::zero(R);
      try {
        lhs = W.eval(x, g * k, nf);
        rhs = W.eval(x, g, ku);
      } catch (const OutOfExploredRegion&) {
        ++rep.unexplored;
        continue;
      }
      ++rep.checks;
      if (!(lhs - rhs).is_zero_certified()) {
        rep.equivariant = false;
        if (rep.witness.empty())
          rep.witness = "two-sided evaluation differs at stabilizer sample " +
                        std::to_string(kept);
      }
    }
    insert_span(ku);
  }
  rep.span_rank = span.size();
  return rep;
}

// ---- homomorphisms out of the degree-n coefficient module ----

// evaluation closure (v, u, g): v a degree-n coefficient, u a degree-zero
// step function, g the transport slot
struct VnHom {
  int n;
  int64_t twist;
  const SeriesRing* R;
  std::function<Series(const HomPoly&, const StepFunction&, const Matrix2&)> apply;
};

// the homomorphism induced by pairing a fixed cocycle against transported
// tensors v * u
inline VnHom vn_hom_from_cocycle(const HarmonicCocycle& f) {
  int n = f.degree();
  int64_t tw = f.twist;
  auto fp = std::make_shared<const HarmonicCocycle>(f);
  auto apply = [fp, n, tw](const HomPoly& v, const StepFunction& u, const Matrix2& g) {
    if (v.n != n) throw IncompatibleWeight("coefficient degree mismatch");
    if (u.n != 0 || u.twist != 0)
      throw IncompatibleWeight("second slot takes an untwisted degree-zero step function");
    StepFunction h(v.ring(), n, tw);
    for (const auto& [e, c] : u.terms) h.add_term(e, v.scaled(c.c[0]));
    return pairing(*fp, sp_apply(g, h));
  };
  return VnHom{n, tw, f.R, apply};
}

inline VnHom vn_hom(const AutomorphicEvaluator& W, const std::string& x) {
  return vn_hom_from_cocycle(W.data->part(x));
}

// largest degree at or below n whose binomials all survive reduction; the
// cyclic generator sits at this exponent
inline int64_t generator_exponent(int64_t p, int64_t n) {
  return n == 0 ? 0 : special_degree_floor(p, n);
}

// a homomorphism pinned down by its value on the cyclic generator
struct GeneratorImage {
  int n;
  int64_t alpha;
  int64_t twist;
  const SeriesRing* R;
  std::function<Series(const StepFunction&, const Matrix2&)> at;
};

inline GeneratorImage restrict_to_generator(const VnHom& psi) {
  int64_t alpha = generator_exponent(psi.R->coeff->p, psi.n);
  HomPoly gen = HomPoly::monomial(psi.R, psi.n, static_cast<int>(alpha), Series::one(psi.R));
  auto ap = psi.apply;
  auto at = [ap, gen](const StepFunction& u, const Matrix2& g) { return ap(gen, u, g); };
  return GeneratorImage{psi.n, alpha, psi.twist, psi.R, at};
}

// evaluate a fraction in the uniformizer back into a series ring; when the
// target ring lifts the fraction's field, coefficients pass through the
// set-theoretic section. Monomial denominators stay exact.
inline Series frac_to_series(const SeriesRing* R, const PolyFrac& x) {
  const CoeffRing* C = x.num().ring();
  bool lifting = R->coeff != C;
  if (lifting && R->coeff->residue_ring() != C)
    throw RingMismatch("fraction is not over the ring's residue field");
  auto poly = [&](const GFPoly& g) {
    Series s = Series::zero(R);
    for (int64_t i = 0; i <= g.deg(); ++i) {
      RElem c = g.coeff(i);
      if (C->encode(c) == 0) continue;
      s = s + Series::from_coeff(R, lifting ? naive_lift(R->coeff, c) : c, i);
    }
    return s;
  };
  if (x.is_zero()) return Series::zero(R);
  return poly(x.num()) * poly(x.den()).inverse();
}

namespace detail {

inline void require_generator_closure(const GeneratorImage& im, const CyclicClosure& cl) {
  if (cl.n != im.n) throw IncompatibleWeight("closure of the wrong degree");
  if (!cl.complete)
    throw ClosureIncomplete("spanning words do not cover degree " + std::to_string(im.n));
  HomPoly gen =
      HomPoly::monomial(im.R, im.n, static_cast<int>(im.alpha), Series::one(im.R));
  if (cl.raw.empty() || !certified_equal(cl.raw.front(), gen))
    throw UsageError("closure does not start from the generator monomial");
}

// target = sum of c_j * (word_j substituted into the generator); evaluating
// the image along each word and recombining reproduces the homomorphism
inline std::vector<std::pair<size_t, PolyFrac>> replay_coefficients(const CyclicClosure& cl,
                                                                    const HomPoly& m) {
  auto cs = express_in_closure(cl, m);
  if (!cs) throw ClosureIncomplete("target escapes the spanning words");
  std::vector<std::pair<size_t, PolyFrac>> out;
  for (size_t j = 0; j < cs->size(); ++j)
    if (!(*cs)[j].is_zero()) out.emplace_back(j, (*cs)[j]);
  return out;
}

// det(w)^tw as an exact fraction; raw closure rows carry plain substitution,
// so replaying them through the twisted action picks up this determinant
inline PolyFrac word_det_power(const Matrix2& w, int64_t tw) {
  PolyFrac d = series_to_frac(w.det());
  PolyFrac out = PolyFrac::one(d.ring());
  for (int64_t i = 0; i < (tw < 0 ? -tw : tw); ++i) out = out * d;
  if (tw < 0) out = PolyFrac::one(d.ring()) / out;
  return out;
}

}  // namespace detail

// rebuild the full homomorphism from the generator image by replaying the
// closure words; exact on values that are polynomial in the uniformizer
inline VnHom extend_from_generator(const GeneratorImage& im, const CyclicClosure& cl) {
  detail::require_generator_closure(im, cl);
  auto clp = std::make_shared<const CyclicClosure>(cl);
  auto at = im.at;
  const SeriesRing* R = im.R;
  int64_t tw = im.twist;
  auto apply = [clp, at, R, tw](const HomPoly& m, const StepFunction& u, const Matrix2& g) {
    PolyFrac acc{GFPoly::zero(R->coeff)};
    for (const auto& [j, c] : detail::replay_coefficients(*clp, m)) {
      Series val = at(sp_apply(clp->words[j], u), g * clp->words[j].inverse());
      acc = acc + c * detail::word_det_power(clp->words[j], tw) * series_to_frac(val);
    }
    return frac_to_series(R, acc);
  };
  return VnHom{im.n, im.twist, im.R, apply};
}

// ---- coefficientwise lifting ----

// set-theoretic lift of an exact series into a ring whose residue field
// carries it
inline Series series_lift(const SeriesRing* RZ, const Series& s) {
  const CoeffRing* gr = RZ->coeff;
  if (gr->residue_ring() != s.ring()->coeff)
    throw RingMismatch("series is not over the residue field of the target");
  if (!s.exact()) throw PrecisionExhausted("lift of an inexact series");
  Series out = Series::zero(RZ);
  for (int64_t e = s.support_lo(); e < s.support_hi(); ++e)
    out = out + Series::from_coeff(RZ, naive_lift(gr, s.coeff(e)), e);
  return out;
}

// coefficientwise residue of a series over a p-adic coefficient ring
inline Series series_residue(const SeriesRing* RL, const Series& s) {
  const CoeffRing* gr = s.ring()->coeff;
  if (gr->residue_ring() != RL->coeff)
    throw RingMismatch("target is not the residue field of the series ring");
  Series out = s.exact() ? Series::zero(RL) : Series::big_oh(RL, s.prec());
  for (int64_t e = s.support_lo(); e < s.support_hi(); ++e)
    out = out + Series::from_coeff(RL, residue_map(gr, s.coeff(e)), e);
  return out;
}

// homomorphism-shaped data over a p-adic coefficient ring: inputs stay over
// the residue field, values land upstairs, and composing with the residue
// recovers the field homomorphism exactly. The lift itself is set-theoretic,
// not linear over the ring.
struct LiftedHom {
  int n;
  int64_t twist;
  const SeriesRing* ring;     // Laurent series over the p-adic coefficients
  const SeriesRing* residue;  // field-side ring the inputs live on
  std::function<Series(const HomPoly&, const StepFunction&, const Matrix2&)> apply;
};

inline LiftedHom lift_hom(const GeneratorImage& im, const CyclicClosure& cl, int k) {
  const CoeffRing* C = im.R->coeff;
  if (!C->is_field()) throw RingMismatch("lifting starts from field data");
  if (k < 2) throw UsageError("lift precision must be at least two");
  detail::require_generator_closure(im, cl);
  const SeriesRing* RZ =
      SeriesRing::get(CoeffRing::galois(C->p, k, static_cast<int>(C->f)), im.R->prec);
  auto clp = std::make_shared<const CyclicClosure>(cl);
  auto at = im.at;
  const SeriesRing* R = im.R;
  int64_t tw = im.twist;
  auto apply = [clp, at, R, RZ, tw](const HomPoly& m, const StepFunction& u, const Matrix2& g) {
    PolyFrac acc{GFPoly::zero(R->coeff)};
    for (const auto& [j, c] : detail::replay_coefficients(*clp, m)) {
      Series val = at(sp_apply(clp->words[j], u), g * clp->words[j].inverse());
      acc = acc + c * detail::word_det_power(clp->words[j], tw) * series_to_frac(val);
    }
    return frac_to_series(RZ, acc);
  };
  return LiftedHom{im.n, im.twist, RZ, im.R, apply};
}

// ---- the weight-two integral comparison ----

struct Weight2IntegralReport {
  std::string group_name;
  int64_t depth = 0;
  int64_t free_rank = 0;
  std::vector<mpz_class> invariant_factors;
  int64_t field_dimension = 0;
  int64_t reduced_rank = 0;  // rank of the reduced integral basis over the field
  std::vector<mpz_class> offending_torsion;  // factors killed by the reduction
  bool reduction_surjective = true;
};

// solve the weight-two system over the integers and over the field off the
// same constraint builder, then test whether the reduced integral basis
// spans the field solution space
inline Weight2IntegralReport weight2_integral(const ArithmeticGroup& G, int64_t depth) {
  QuotientGraph Q = quotient_graph(G, depth);
  CocycleOptions zopt;
  zopt.ring = SolveRing::integers;
  InvariantSpace Z = invariant_space(Q, 2, zopt);
  CocycleOptions fopt;
  fopt.ring = SolveRing::field;
  InvariantSpace F = invariant_space(Q, 2, fopt);
  const CoeffRing* C = G.field();
  Weight2IntegralReport rep;
  rep.group_name = G.name();
  rep.depth = depth;
  rep.free_rank = Z.dimension;
  rep.invariant_factors = Z.invariant_factors;
  rep.field_dimension = F.dimension;
  std::vector<std::vector<PolyFrac>> rows;
  for (const auto& v : Z.zbasis) {
    std::vector<PolyFrac> r;
    for (const mpz_class& m : v) {
      mpz_class x = m % C->p;
      if (x < 0) x += C->p;
      r.emplace_back(GFPoly(C, {C->from_int(x.get_si())}));
    }
    detail::echelon_insert(rows, std::move(r), C);
  }
  rep.reduced_rank = static_cast<int64_t>(rows.size());
  for (const mpz_class& d : Z.invariant_factors)
    if (d % C->p == 0) rep.offending_torsion.push_back(d);
  rep.reduction_surjective = rep.reduced_rank == rep.field_dimension;
  return rep;
}

}  // namespace cforge
