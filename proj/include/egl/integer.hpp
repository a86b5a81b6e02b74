#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "egl/error.hpp"

namespace egl {

using Int = boost::multiprecision::cpp_int;
using IntVec = std::vector<Int>;

/// Dense integer matrix, row-major.
class IntMatrix {
public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 0 || cols < 0)
      throw Error(ErrorCode::DimensionMismatch, "IntMatrix: negative size");
  }
  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      m(i, i) = 1;
    return m;
  }
  static IntMatrix from_rows(const std::vector<std::vector<long long>> &rows, int cols = -1) {
    int c = cols >= 0 ? cols : (rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    IntMatrix m(static_cast<int>(rows.size()), c);
    for (int i = 0; i < m.rows(); ++i) {
      if (static_cast<int>(rows[i].size()) != c)
        throw Error(ErrorCode::DimensionMismatch, "IntMatrix: ragged rows");
      for (int j = 0; j < c; ++j)
        m(i, j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  Int &operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + j]; }
  const Int &operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * c_ + j]; }

  IntVec col(int j) const {
    IntVec v(r_);
    for (int i = 0; i < r_; ++i)
      v[i] = (*this)(i, j);
    return v;
  }
  IntMatrix transpose() const {
    IntMatrix t(c_, r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j)
        t(j, i) = (*this)(i, j);
    return t;
  }
  /// [A | B]
  IntMatrix hcat(const IntMatrix &b) const {
    if (b.r_ != r_)
      throw Error(ErrorCode::DimensionMismatch, "IntMatrix::hcat: row counts differ");
    IntMatrix m(r_, c_ + b.c_);
    for (int i = 0; i < r_; ++i) {
      for (int j = 0; j < c_; ++j)
        m(i, j) = (*this)(i, j);
      for (int j = 0; j < b.c_; ++j)
        m(i, c_ + j) = b(i, j);
    }
    return m;
  }
  bool is_zero() const {
    for (const auto &x : a_)
      if (x != 0)
        return false;
    return true;
  }

  void swap_rows(int i, int j) {
    for (int c = 0; c < c_; ++c)
      std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(int i, int j) {
    for (int r = 0; r < r_; ++r)
      std::swap((*this)(r, i), (*this)(r, j));
  }
  /// row_i += q * row_j
  void add_row(int i, int j, const Int &q) {
    for (int c = 0; c < c_; ++c)
      (*this)(i, c) += q * (*this)(j, c);
  }
  void add_col(int i, int j, const Int &q) {
    for (int r = 0; r < r_; ++r)
      (*this)(r, i) += q * (*this)(r, j);
  }
  void negate_row(int i) {
    for (int c = 0; c < c_; ++c)
      (*this)(i, c) = -(*this)(i, c);
  }

  friend bool operator==(const IntMatrix &a, const IntMatrix &b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

private:
  int r_ = 0, c_ = 0;
  std::vector<Int> a_;
};

inline IntMatrix operator*(const IntMatrix &a, const IntMatrix &b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "IntMatrix product: inner dimensions differ");
  IntMatrix m(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0)
        continue;
      for (int j = 0; j < b.cols(); ++j)
        m(i, j) += a(i, k) * b(k, j);
    }
  return m;
}

inline IntVec operator*(const IntMatrix &a, const IntVec &v) {
  if (a.cols() != static_cast<int>(v.size()))
    throw Error(ErrorCode::DimensionMismatch, "IntMatrix * vector: size mismatch");
  IntVec r(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      r[i] += a(i, j) * v[j];
  return r;
}

/// Fraction-free (Bareiss) determinant.
inline Int determinant(IntMatrix m) {
  const int n = m.rows();
  if (m.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "determinant: matrix not square");
  if (n == 0)
    return 1;
  Int sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int p = k + 1;
      while (p < n && m(p, k) == 0)
        ++p;
      if (p == n)
        return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SmithForm {
  IntMatrix U, S, V; // U * M * V = S
  int rank = 0;
  IntVec invariant_factors() const {
    IntVec d;
    for (int i = 0; i < rank; ++i)
      d.push_back(S(i, i));
    return d;
  }
};

/// Smith normal form with unimodular transforms: pivot on the smallest entry,
/// reduce its row and column, and fold in any entry the pivot does not divide.
inline SmithForm smith_normal_form(const IntMatrix &M) {
  const int m = M.rows(), n = M.cols();
  SmithForm f{IntMatrix::identity(m), M, IntMatrix::identity(n), 0};
  IntMatrix &S = f.S;
  for (int t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      int pi = -1, pj = -1;
      for (int i = t; i < m; ++i)
        for (int j = t; j < n; ++j)
          if (S(i, j) != 0 && (pi < 0 || abs(S(i, j)) < abs(S(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi < 0) {
        f.rank = t;
        return f;
      }
      S.swap_rows(t, pi);
      f.U.swap_rows(t, pi);
      S.swap_cols(t, pj);
      f.V.swap_cols(t, pj);

      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (S(i, t) == 0)
          continue;
        Int q = S(i, t) / S(t, t);
        S.add_row(i, t, -q);
        f.U.add_row(i, t, -q);
        clean = clean && S(i, t) == 0;
      }
      for (int j = t + 1; j < n; ++j) {
        if (S(t, j) == 0)
          continue;
        Int q = S(t, j) / S(t, t);
        S.add_col(j, t, -q);
        f.V.add_col(j, t, -q);
        clean = clean && S(t, j) == 0;
      }
      if (!clean)
        continue;
      int bad = -1;
      for (int i = t + 1; i < m && bad < 0; ++i)
        for (int j = t + 1; j < n; ++j)
          if (S(i, j) % S(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0)
        break;
      S.add_row(t, bad, 1);
      f.U.add_row(t, bad, 1);
    }
    if (S(t, t) < 0) {
      S.negate_row(t);
      f.U.negate_row(t);
    }
  }
  f.rank = 0;
  while (f.rank < std::min(m, n) && S(f.rank, f.rank) != 0)
    ++f.rank;
  return f;
}

/// Basis of {x : A x = 0} over Z.
inline std::vector<IntVec> integer_kernel(const IntMatrix &A) {
  SmithForm f = smith_normal_form(A);
  std::vector<IntVec> out;
  for (int j = f.rank; j < A.cols(); ++j)
    out.push_back(f.V.col(j));
  return out;
}

/// Is b in the Z-span of the columns of A?
inline bool in_column_lattice(const IntMatrix &A, const IntVec &b) {
  if (static_cast<int>(b.size()) != A.rows())
    throw Error(ErrorCode::DimensionMismatch, "in_column_lattice: size mismatch");
  if (A.cols() == 0) {
    for (const auto &x : b)
      if (x != 0)
        return false;
    return true;
  }
  SmithForm f = smith_normal_form(A);
  IntVec c = f.U * b;
  for (int i = 0; i < A.rows(); ++i) {
    if (i < f.rank) {
      if (c[i] % f.S(i, i) != 0)
        return false;
    } else if (c[i] != 0) {
      return false;
    }
  }
  return true;
}

/// Z^generators / (column span of relations).
struct HomologyPresentation {
  int generators = 0;
  IntMatrix relations; // generators x (number of relations)

  HomologyPresentation() : relations(0, 0) {}
  HomologyPresentation(int g, IntMatrix rel) : generators(g), relations(std::move(rel)) {
    if (g < 0 || relations.rows() != g)
      throw Error(ErrorCode::MalformedPresentation,
                  "presentation: relation matrix must have one row per generator");
  }
  static HomologyPresentation free(int g) { return {g, IntMatrix(g, 0)}; }

  bool is_zero_element(const IntVec &x) const { return in_column_lattice(relations, x); }

  /// Invariant factors d_i > 1 and the free rank.
  std::pair<IntVec, int> structure() const {
    SmithForm f = smith_normal_form(relations);
    IntVec torsion;
    for (const auto &d : f.invariant_factors())
      if (d != 1)
        torsion.push_back(d);
    return {torsion, generators - f.rank};
  }
};

/// Homomorphism between presented groups, checked to respect relations.
struct IntHom {
  IntMatrix matrix; // codomain.generators x domain.generators
  HomologyPresentation domain, codomain;

  IntHom(IntMatrix m, HomologyPresentation d, HomologyPresentation c)
      : matrix(std::move(m)), domain(std::move(d)), codomain(std::move(c)) {
    if (matrix.rows() != codomain.generators || matrix.cols() != domain.generators)
      throw Error(ErrorCode::MalformedPresentation, "IntHom: matrix shape does not match presentations");
    for (int j = 0; j < domain.relations.cols(); ++j)
      if (!codomain.is_zero_element(matrix * domain.relations.col(j)))
        throw Error(ErrorCode::MalformedPresentation,
                    "IntHom: relation " + std::to_string(j) + " does not map into the codomain relations");
  }
};

/// Generators of ker(f) in the domain, dropping those that are already zero.
inline std::vector<IntVec> kernel_generators(const IntHom &f) {
  const int g = f.domain.generators;
  IntMatrix combined = f.matrix.hcat(f.codomain.relations);
  std::vector<IntVec> out;
  for (const IntVec &v : integer_kernel(combined)) {
    IntVec x(v.begin(), v.begin() + g);
    if (!f.domain.is_zero_element(x))
      out.push_back(std::move(x));
  }
  return out;
}

using Mod2Vec = std::vector<int>;

inline int mod2_pairing(const Mod2Vec &eta, const IntVec &x) {
  Int s = 0;
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (eta[i] & 1)
      s += x[i];
  return static_cast<int>(abs(s) % 2);
}

struct SmoothDecision {
  bool hausdorff = true;
  std::vector<IntVec> kernel;
  std::optional<IntVec> witness; // kernel generator with eta = 1
};

/// eta factors through i_* H_1(D) iff it vanishes on ker(i_*).
inline SmoothDecision hausdorff_smooth_decision(const IntHom &i_star, const Mod2Vec &eta) {
  if (static_cast<int>(eta.size()) != i_star.domain.generators)
    throw Error(ErrorCode::MalformedPresentation, "eta: one entry per domain generator required");
  for (int v : eta)
    if (v != 0 && v != 1)
      throw Error(ErrorCode::MalformedPresentation, "eta: entries must be 0 or 1");
  for (int j = 0; j < i_star.domain.relations.cols(); ++j)
    if (mod2_pairing(eta, i_star.domain.relations.col(j)) != 0)
      throw Error(ErrorCode::MalformedPresentation,
                  "eta does not vanish on relation " + std::to_string(j) + " mod 2");
  SmoothDecision d;
  d.kernel = kernel_generators(i_star);
  for (const auto &k : d.kernel)
    if (mod2_pairing(eta, k)) {
      d.hausdorff = false;
      d.witness = k;
      break;
    }
  return d;
}

/// Is eta_class in the GF(2) column space of i_pullback?
inline bool double_cover_exists(const std::vector<std::vector<int>> &i_pullback, const Mod2Vec &eta_class) {
  const int rows = static_cast<int>(eta_class.size());
  if (static_cast<int>(i_pullback.size()) != rows)
    throw Error(ErrorCode::DimensionMismatch, "double_cover_exists: row count differs from eta_class");
  const int cols = rows ? static_cast<int>(i_pullback[0].size()) : 0;
  std::vector<std::vector<int>> a(rows, std::vector<int>(cols + 1));
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(i_pullback[i].size()) != cols)
      throw Error(ErrorCode::DimensionMismatch, "double_cover_exists: ragged matrix");
    for (int j = 0; j < cols; ++j)
      a[i][j] = i_pullback[i][j] & 1;
    a[i][cols] = eta_class[i] & 1;
  }
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = r;
    while (p < rows && !a[p][c])
      ++p;
    if (p == rows)
      continue;
    std::swap(a[p], a[r]);
    for (int i = 0; i < rows; ++i)
      if (i != r && a[i][c])
        for (int j = c; j <= cols; ++j)
          a[i][j] ^= a[r][j];
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (a[i][cols])
      return false;
  return true;
}

} // namespace egl
