#pragma once
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "coeff_ring.hpp"
#include "errors.hpp"
#include "poly.hpp"

namespace cforge {

// ---- generic dense Gaussian elimination over a field ----
//
// Ops supplies the field operations for element type Ops::T.

struct RElemOps {
  using T = RElem;
  const CoeffRing* C;
  T zero() const { return C->zero(); }
  T one() const { return C->one(); }
  bool is_zero(const T& a) const { return C->is_zero(a); }
  T add(const T& a, const T& b) const { return C->add(a, b); }
  T sub(const T& a, const T& b) const { return C->sub(a, b); }
  T mul(const T& a, const T& b) const { return C->mul(a, b); }
  T neg(const T& a) const { return C->neg(a); }
  T div(const T& a, const T& b) const { return C->mul(a, C->inv(b)); }
};

struct PolyFracOps {
  using T = PolyFrac;
  const CoeffRing* C;
  T zero() const { return PolyFrac::zero(C); }
  T one() const { return PolyFrac::one(C); }
  bool is_zero(const T& a) const { return a.is_zero(); }
  T add(const T& a, const T& b) const { return a + b; }
  T sub(const T& a, const T& b) const { return a - b; }
  T mul(const T& a, const T& b) const { return a * b; }
  T neg(const T& a) const { return -a; }
  T div(const T& a, const T& b) const { return a / b; }
};

// reduced row echelon form in place; returns pivot column indices
template <class Ops>
std::vector<size_t> row_reduce(std::vector<std::vector<typename Ops::T>>& m, const Ops& ops) {
  std::vector<size_t> pivots;
  size_t rows = m.size();
  size_t cols = rows ? m[0].size() : 0;
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t sel = rows;
    for (size_t i = r; i < rows; ++i)
      if (!ops.is_zero(m[i][c])) {
        sel = i;
        break;
      }
    if (sel == rows) continue;
    std::swap(m[r], m[sel]);
    typename Ops::T inv_piv = ops.div(ops.one(), m[r][c]);
    for (size_t j = c; j < cols; ++j) m[r][j] = ops.mul(m[r][j], inv_piv);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || ops.is_zero(m[i][c])) continue;
      typename Ops::T f = m[i][c];
      for (size_t j = c; j < cols; ++j)
        m[i][j] = ops.sub(m[i][j], ops.mul(f, m[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class Ops>
size_t matrix_rank(std::vector<std::vector<typename Ops::T>> m, const Ops& ops) {
  return row_reduce(m, ops).size();
}

// basis of the right kernel {x : m x = 0}; cols inferred from the matrix,
// or pass explicitly for a zero-row matrix
template <class Ops>
std::vector<std::vector<typename Ops::T>> kernel_basis(
    std::vector<std::vector<typename Ops::T>> m, const Ops& ops, size_t cols_hint = 0) {
  size_t cols = m.empty() ? cols_hint : m[0].size();
  std::vector<size_t> pivots = row_reduce(m, ops);
  std::vector<bool> is_pivot(cols, false);
  for (size_t c : pivots) is_pivot[c] = true;
  std::vector<std::vector<typename Ops::T>> basis;
  for (size_t fc = 0; fc < cols; ++fc) {
    if (is_pivot[fc]) continue;
    std::vector<typename Ops::T> v(cols, ops.zero());
    v[fc] = ops.one();
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = ops.neg(m[r][fc]);
    basis.push_back(std::move(v));
  }
  return basis;
}

// solve m x = b; returns a particular solution or nullopt when inconsistent
template <class Ops>
std::optional<std::vector<typename Ops::T>> solve_affine(
    std::vector<std::vector<typename Ops::T>> m, const std::vector<typename Ops::T>& b,
    const Ops& ops) {
  size_t rows = m.size();
  size_t cols = rows ? m[0].size() : 0;
  for (size_t i = 0; i < rows; ++i) m[i].push_back(b[i]);
  std::vector<size_t> pivots = row_reduce(m, ops);
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  std::vector<typename Ops::T> x(cols, ops.zero());
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][cols];
  return x;
}

template <class Ops>
std::vector<typename Ops::T> mat_vec(const std::vector<std::vector<typename Ops::T>>& m,
                                     const std::vector<typename Ops::T>& x, const Ops& ops) {
  std::vector<typename Ops::T> y(m.size(), ops.zero());
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] = ops.add(y[i], ops.mul(m[i][j], x[j]));
  return y;
}

// deterministic enumeration of an affine space particular + span(basis) over a
// finite coefficient ring, in lexicographic order of the coefficient tuple
class AffineSpaceEnum {
 public:
  AffineSpaceEnum(const CoeffRing* C, std::vector<RElem> particular,
                  std::vector<std::vector<RElem>> basis)
      : C_(C), part_(std::move(particular)), basis_(std::move(basis)),
        counters_(basis_.size(), 0), done_(false) {}

  uint64_t size_log_q() const { return basis_.size(); }

  bool next(std::vector<RElem>& out) {
    if (done_) return false;
    out = part_;
    for (size_t i = 0; i < basis_.size(); ++i) {
      if (counters_[i] == 0) continue;
      RElem c = C_->decode(counters_[i]);
      for (size_t j = 0; j < out.size(); ++j)
        out[j] = C_->add(out[j], C_->mul(c, basis_[i][j]));
    }
    int64_t total = 1;
    for (int i = 0; i < C_->f; ++i) total *= C_->pk;
    size_t i = 0;
    for (; i < counters_.size(); ++i) {
      if (++counters_[i] < total) break;
      counters_[i] = 0;
    }
    if (counters_.empty() || i == counters_.size()) done_ = true;
    return true;
  }

 private:
  const CoeffRing* C_;
  std::vector<RElem> part_;
  std::vector<std::vector<RElem>> basis_;
  std::vector<int64_t> counters_;
  bool done_;
};

// ---- integer matrices (GMP) ----

using ZMat = std::vector<std::vector<mpz_class>>;

inline ZMat z_identity(size_t n) {
  ZMat m(n, std::vector<mpz_class>(n, 0));
  for (size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline ZMat z_mul(const ZMat& a, const ZMat& b) {
  size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
  ZMat r(n, std::vector<mpz_class>(m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

// fraction-free determinant (Bareiss)
inline mpz_class det_bareiss(ZMat m) {
  size_t n = m.size();
  if (n == 0) return 1;
  mpz_class sign = 1, prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t s = n;
      for (size_t i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          s = i;
          break;
        }
      if (s == n) return 0;
      std::swap(m[k], m[s]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) {
        mpz_class t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// Smith normal form: U * A * V = D with U, V unimodular and the diagonal of D
// nonnegative with d_i | d_{i+1}
struct SnfResult {
  ZMat U, D, V;
  std::vector<mpz_class> diagonal() const {
    std::vector<mpz_class> d;
    size_t n = std::min(D.size(), D.empty() ? size_t{0} : D[0].size());
    for (size_t i = 0; i < n; ++i) d.push_back(D[i][i]);
    return d;
  }
  size_t rank() const {
    size_t r = 0;
    for (const mpz_class& d : diagonal())
      if (d != 0) ++r;
    return r;
  }
};

inline SnfResult smith_normal_form(ZMat A) {
  size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  ZMat U = z_identity(rows), V = z_identity(cols);
  auto row_addmul = [&](size_t dst, size_t src, const mpz_class& f) {
    for (size_t j = 0; j < cols; ++j) A[dst][j] += f * A[src][j];
    for (size_t j = 0; j < rows; ++j) U[dst][j] += f * U[src][j];
  };
  auto col_addmul = [&](size_t dst, size_t src, const mpz_class& f) {
    for (size_t i = 0; i < rows; ++i) A[i][dst] += f * A[i][src];
    for (size_t i = 0; i < cols; ++i) V[i][dst] += f * V[i][src];
  };
  auto row_swap = [&](size_t a, size_t b) {
    std::swap(A[a], A[b]);
    std::swap(U[a], U[b]);
  };
  auto col_swap = [&](size_t a, size_t b) {
    for (size_t i = 0; i < rows; ++i) std::swap(A[i][a], A[i][b]);
    for (size_t i = 0; i < cols; ++i) std::swap(V[i][a], V[i][b]);
  };
  auto row_negate = [&](size_t r) {
    for (size_t j = 0; j < cols; ++j) A[r][j] = -A[r][j];
    for (size_t j = 0; j < rows; ++j) U[r][j] = -U[r][j];
  };

  size_t t = 0;
  while (t < rows && t < cols) {
    // pick a nonzero pivot of minimal absolute value in the trailing block
    size_t pi = rows, pj = cols;
    for (size_t i = t; i < rows; ++i)
      for (size_t j = t; j < cols; ++j)
        if (A[i][j] != 0 &&
            (pi == rows || cmp(abs(A[i][j]), abs(A[pi][pj])) < 0)) {
          pi = i;
          pj = j;
        }
    if (pi == rows) break;  // trailing block is zero
    if (pi != t) row_swap(t, pi);
    if (pj != t) col_swap(t, pj);
    bool clean = true;
    for (size_t i = t + 1; i < rows; ++i) {
      if (A[i][t] == 0) continue;
      mpz_class f = -(A[i][t] / A[t][t]);
      if (f != 0) row_addmul(i, t, f);
      if (A[i][t] != 0) clean = false;
    }
    for (size_t j = t + 1; j < cols; ++j) {
      if (A[t][j] == 0) continue;
      mpz_class f = -(A[t][j] / A[t][t]);
      if (f != 0) col_addmul(j, t, f);
      if (A[t][j] != 0) clean = false;
    }
    if (!clean) continue;  // remainders shrank, iterate with a smaller pivot
    // divisibility: pivot must divide every trailing entry
    bool fixed = false;
    for (size_t i = t + 1; i < rows && !fixed; ++i)
      for (size_t j = t + 1; j < cols && !fixed; ++j)
        if (A[i][j] % A[t][t] != 0) {
          row_addmul(t, i, 1);
          fixed = true;
        }
    if (fixed) continue;
    if (A[t][t] < 0) row_negate(t);
    ++t;
  }
  return SnfResult{std::move(U), std::move(A), std::move(V)};
}

// basis of the integer kernel {x in Z^n : A x = 0}
inline std::vector<std::vector<mpz_class>> z_kernel_basis(const ZMat& A) {
  size_t cols = A.empty() ? 0 : A[0].size();
  if (A.empty()) {
    std::vector<std::vector<mpz_class>> basis;
    ZMat id = z_identity(cols);
    for (size_t j = 0; j < cols; ++j) basis.push_back(id[j]);
    return basis;
  }
  SnfResult s = smith_normal_form(A);
  size_t r = s.rank();
  std::vector<std::vector<mpz_class>> basis;
  for (size_t j = r; j < cols; ++j) {
    std::vector<mpz_class> v(cols);
    for (size_t i = 0; i < cols; ++i) v[i] = s.V[i][j];
    basis.push_back(std::move(v));
  }
  return basis;
}

// structure of {x in (Z/p^k)^n : A x = 0} as a module over Z/p^k:
// free part plus cyclic torsion factors p^{e}, e < k, in ascending order
struct ModPkKernel {
  size_t free_rank = 0;
  std::vector<int> torsion_exponents;             // e with factor Z/p^e, 0 < e < k
  std::vector<std::vector<mpz_class>> generators;  // free generators then torsion
};

inline ModPkKernel modpk_kernel(const ZMat& A, const mpz_class& p, int k) {
  mpz_class pk;
  mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k));
  size_t cols = A.empty() ? 0 : A[0].size();
  ModPkKernel out;
  if (A.empty()) {
    out.free_rank = cols;
    ZMat id = z_identity(cols);
    for (size_t j = 0; j < cols; ++j) out.generators.push_back(id[j]);
    return out;
  }
  SnfResult s = smith_normal_form(A);
  std::vector<mpz_class> d = s.diagonal();
  size_t r = s.rank();
  auto column_of_V = [&](size_t j, const mpz_class& scale) {
    std::vector<mpz_class> v(cols);
    for (size_t i = 0; i < cols; ++i) {
      v[i] = (s.V[i][j] * scale) % pk;
      if (v[i] < 0) v[i] += pk;
    }
    return v;
  };
  // x = V y solves A x = 0 mod p^k iff d_i y_i = 0 mod p^k for each i
  std::vector<std::pair<int, size_t>> torsion;  // (exponent, column)
  for (size_t j = 0; j < cols; ++j) {
    mpz_class di = j < r ? d[j] : 0;
    mpz_class g = di == 0 ? pk : gcd(di, pk);
    if (g == 1) continue;  // only y_j = 0
    // solutions y_j are multiples of p^k/g: a cyclic group of order g = p^e
    int e = 0;
    mpz_class gg = g;
    while (gg % p == 0) {
      gg /= p;
      ++e;
    }
    if (e == k) {
      out.free_rank++;
      out.generators.push_back(column_of_V(j, 1));
    } else {
      torsion.emplace_back(e, j);
    }
  }
  std::sort(torsion.begin(), torsion.end());
  for (auto& [e, j] : torsion) {
    out.torsion_exponents.push_back(e);
    mpz_class scale;
    mpz_pow_ui(scale.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k - e));
    out.generators.push_back(column_of_V(j, scale));
  }
  return out;
}

// kernel over F_q of an integer matrix, with entries reduced through from_int
inline std::vector<std::vector<RElem>> z_kernel_mod_field(const ZMat& A, const CoeffRing* C,
                                                          size_t cols_hint = 0) {
  std::vector<std::vector<RElem>> m;
  for (const auto& row : A) {
    std::vector<RElem> r;
    for (const mpz_class& x : row)
      r.push_back(C->from_int(mpz_class(x % C->p).get_si()));
    m.push_back(std::move(r));
  }
  return kernel_basis(std::move(m), RElemOps{C}, cols_hint);
}

}  // namespace cforge
