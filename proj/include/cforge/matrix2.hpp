#pragma once
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "series.hpp"

namespace cforge {

// 2x2 matrix with Laurent series entries, row-major [[a,b],[c,d]]
class Matrix2 {
 public:
  Matrix2() = default;
  Matrix2(Series a, Series b, Series c, Series d)
      : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {
    const SeriesRing* R = e_[0].ring();
    for (int i = 1; i < 4; ++i)
      if (e_[static_cast<size_t>(i)].ring() != R) throw RingMismatch("matrix entries");
  }

  static Matrix2 identity(const SeriesRing* R) {
    return Matrix2(Series::one(R), Series::zero(R), Series::zero(R), Series::one(R));
  }
  static Matrix2 scalar(const SeriesRing* R, const Series& s) {
    return Matrix2(s, Series::zero(R), Series::zero(R), s);
  }
  // diag(pi^m, pi^n)
  static Matrix2 diag_pi(const SeriesRing* R, int64_t m, int64_t n) {
    return Matrix2(Series::pi_pow(R, m), Series::zero(R), Series::zero(R), Series::pi_pow(R, n));
  }

  const SeriesRing* ring() const { return e_[0].ring(); }
  const Series& a() const { return e_[0]; }
  const Series& b() const { return e_[1]; }
  const Series& c() const { return e_[2]; }
  const Series& d() const { return e_[3]; }
  const Series& at(int r, int c) const { return e_[static_cast<size_t>(2 * r + c)]; }

  friend Matrix2 operator*(const Matrix2& x, const Matrix2& y) {
    return Matrix2(x.a() * y.a() + x.b() * y.c(), x.a() * y.b() + x.b() * y.d(),
                   x.c() * y.a() + x.d() * y.c(), x.c() * y.b() + x.d() * y.d());
  }

  Series det() const { return a() * d() - b() * c(); }

  Matrix2 adjugate() const { return Matrix2(d(), -b(), -c(), a()); }

  Matrix2 inverse() const {
    Series di = det().inverse();
    Matrix2 ad = adjugate();
    return Matrix2(ad.a() * di, ad.b() * di, ad.c() * di, ad.d() * di);
  }

  Matrix2 transpose() const { return Matrix2(a(), c(), b(), d()); }

  bool exact() const {
    for (const Series& s : e_)
      if (!s.exact()) return false;
    return true;
  }

  std::string to_string() const {
    return "[[" + a().to_string() + "," + b().to_string() + "],[" + c().to_string() + "," +
           d().to_string() + "]]";
  }

 private:
  std::array<Series, 4> e_;
};

// 2x2 matrix with polynomial entries (elements of GL_2 of the polynomial ring)
class PolyMatrix2 {
 public:
  PolyMatrix2() = default;
  PolyMatrix2(GFPoly a, GFPoly b, GFPoly c, GFPoly d)
      : e_{std::move(a), std::move(b), std::move(c), std::move(d)} {
    const CoeffRing* C = e_[0].ring();
    for (int i = 1; i < 4; ++i)
      if (e_[static_cast<size_t>(i)].ring() != C) throw RingMismatch("matrix entries");
  }

  static PolyMatrix2 identity(const CoeffRing* C) {
    return PolyMatrix2(GFPoly::one(C), GFPoly::zero(C), GFPoly::zero(C), GFPoly::one(C));
  }

  const CoeffRing* ring() const { return e_[0].ring(); }
  const GFPoly& a() const { return e_[0]; }
  const GFPoly& b() const { return e_[1]; }
  const GFPoly& c() const { return e_[2]; }
  const GFPoly& d() const { return e_[3]; }
  const GFPoly& at(int r, int c) const { return e_[static_cast<size_t>(2 * r + c)]; }

  friend PolyMatrix2 operator*(const PolyMatrix2& x, const PolyMatrix2& y) {
    return PolyMatrix2(x.a() * y.a() + x.b() * y.c(), x.a() * y.b() + x.b() * y.d(),
                       x.c() * y.a() + x.d() * y.c(), x.c() * y.b() + x.d() * y.d());
  }
  friend bool operator==(const PolyMatrix2& x, const PolyMatrix2& y) {
    return x.a() == y.a() && x.b() == y.b() && x.c() == y.c() && x.d() == y.d();
  }
  friend bool operator!=(const PolyMatrix2& x, const PolyMatrix2& y) { return !(x == y); }

  GFPoly det() const { return a() * d() - b() * c(); }

  bool det_is_constant_unit() const {
    GFPoly dt = det();
    return dt.deg() == 0 && ring()->is_unit(dt.coeff(0));
  }

  // inverse within GL_2 of the polynomial ring: det must be a constant unit
  PolyMatrix2 inverse() const {
    GFPoly dt = det();
    if (dt.deg() != 0) throw NotAUnit("matrix determinant is not a constant");
    RElem di = ring()->inv(dt.coeff(0));
    return PolyMatrix2(d().scaled(di), (-b()).scaled(di), (-c()).scaled(di), a().scaled(di));
  }

  // image in GL_2 of the Laurent series field under t = 1/pi
  Matrix2 at_inverse_pi(const SeriesRing* R) const {
    return Matrix2(a().at_inverse_pi(R), b().at_inverse_pi(R), c().at_inverse_pi(R),
                   d().at_inverse_pi(R));
  }

  std::string to_string(const std::string& var = "t") const {
    return "[[" + a().to_string(var) + "," + b().to_string(var) + "],[" + c().to_string(var) +
           "," + d().to_string(var) + "]]";
  }

 private:
  std::array<GFPoly, 4> e_;
};

// ---- parsing "[[x,y],[z,w]]" with a caller-supplied entry parser ----

namespace detail {
inline std::array<std::string, 4> split_matrix_literal(const std::string& s) {
  size_t i = 0;
  skip_ws(s, i);
  auto expect = [&](char c) {
    skip_ws(s, i);
    if (i >= s.size() || s[i] != c)
      throw UsageError(std::string("expected '") + c + "' in matrix literal: " + s);
    ++i;
  };
  auto entry = [&]() {
    skip_ws(s, i);
    size_t start = i;
    while (i < s.size() && s[i] != ',' && s[i] != ']') ++i;
    if (i == start) throw UsageError("empty entry in matrix literal: " + s);
    size_t end = i;
    while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(start, end - start);
  };
  std::array<std::string, 4> out;
  expect('[');
  expect('[');
  out[0] = entry();
  expect(',');
  out[1] = entry();
  expect(']');
  expect(',');
  expect('[');
  out[2] = entry();
  expect(',');
  out[3] = entry();
  expect(']');
  expect(']');
  skip_ws(s, i);
  if (i != s.size()) throw UsageError("trailing input after matrix literal: " + s);
  return out;
}
}  // namespace detail

// entries are Laurent series literals in `var` (default "pi")
inline Matrix2 parse_matrix(const SeriesRing* R, const std::string& s,
                            const std::string& var = "pi") {
  auto e = detail::split_matrix_literal(s);
  return Matrix2(parse_series(R, e[0], var), parse_series(R, e[1], var),
                 parse_series(R, e[2], var), parse_series(R, e[3], var));
}

// entries are polynomial literals in `var` (default "t")
inline PolyMatrix2 parse_poly_matrix(const CoeffRing* C, const std::string& s,
                                     const std::string& var = "t") {
  auto e = detail::split_matrix_literal(s);
  return PolyMatrix2(parse_poly(C, e[0], var), parse_poly(C, e[1], var),
                     parse_poly(C, e[2], var), parse_poly(C, e[3], var));
}

}  // namespace cforge
