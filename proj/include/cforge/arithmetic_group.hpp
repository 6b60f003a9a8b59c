#pragma once

#include <string>

#include "cforge/errors.hpp"
#include "cforge/matrix2.hpp"
#include "cforge/poly.hpp"
#include "cforge/series.hpp"

namespace cforge {

enum class GroupKind { full, gamma0, gamma1, gammaFull };

inline std::string kind_name(GroupKind k) {
  switch (k) {
    case GroupKind::full: return "full";
    case GroupKind::gamma0: return "gamma0";
    case GroupKind::gamma1: return "gamma1";
    case GroupKind::gammaFull: return "gammaFull";
  }
  throw NotApplicable("unknown group kind");
}

namespace detail {
inline GFPoly checked_level(const GFPoly& g) {
  if (g.deg() < 1) throw UsageError("congruence level must be a nonconstant polynomial");
  return g.monic();
}
}  // namespace detail

// finite-index subgroup of GL_2(F_q[t]), acting on the tree over F_q((pi)) via t = 1/pi
struct ArithmeticGroup {
  const SeriesRing* R = nullptr;
  GroupKind kind = GroupKind::full;
  GFPoly level;  // monic and nonconstant for the congruence kinds, 1 for the full group

  const CoeffRing* field() const { return R->coeff; }

  static ArithmeticGroup full(const SeriesRing* R) {
    return ArithmeticGroup{R, GroupKind::full, GFPoly::one(R->coeff)};
  }
  static ArithmeticGroup gamma0(const SeriesRing* R, const GFPoly& g) {
    return ArithmeticGroup{R, GroupKind::gamma0, detail::checked_level(g)};
  }
  static ArithmeticGroup gamma1(const SeriesRing* R, const GFPoly& g) {
    return ArithmeticGroup{R, GroupKind::gamma1, detail::checked_level(g)};
  }
  static ArithmeticGroup gamma_full(const SeriesRing* R, const GFPoly& g) {
    return ArithmeticGroup{R, GroupKind::gammaFull, detail::checked_level(g)};
  }

  // exact congruence test; the determinant must already be a constant unit
  bool member(const PolyMatrix2& g) const {
    if (!g.det_is_constant_unit()) throw NotAUnit("group membership needs det in F_q^*");
    const CoeffRing* C = field();
    GFPoly one = GFPoly::one(C);
    switch (kind) {
      case GroupKind::full:
        return true;
      case GroupKind::gamma0:
        return (g.c() % level).is_zero();
      case GroupKind::gamma1:
        return (g.c() % level).is_zero() && ((g.a() - one) % level).is_zero() &&
               ((g.d() - one) % level).is_zero();
      case GroupKind::gammaFull:
        return (g.c() % level).is_zero() && (g.b() % level).is_zero() &&
               ((g.a() - one) % level).is_zero() && ((g.d() - one) % level).is_zero();
    }
    throw NotApplicable("unknown group kind");
  }

  std::string name() const {
    if (kind == GroupKind::full) return "full";
    return kind_name(kind) + "(" + level.to_string() + ")";
  }
};

}  // namespace cforge
