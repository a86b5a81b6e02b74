#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "egl/error.hpp"

namespace egl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using Point = Vec;
using Predicate = std::function<bool(const Vec &)>;

/// Complex coordinate stored at positions (i, i+1).
inline cplx getc(const Vec &v, int i) { return {v[i], v[i + 1]}; }
inline void setc(Vec &v, int i, cplx z) {
  v[i] = z.real();
  v[i + 1] = z.imag();
}

inline Vec concat(const Vec &a, const Vec &b) {
  Vec r(a.size() + b.size());
  r << a, b;
  return r;
}

inline bool all_finite(const Vec &v) { return v.allFinite(); }

inline double sup_dist(const Vec &a, const Vec &b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "sup_dist on vectors of different size");
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

struct ToleranceProfile {
  double h = 1e-5;
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
  double subspace_tol = 1e-6;
  double curvature_budget = 10.0;

  void validate() const {
    if (!(h > 0 && abs_tol > 0 && rel_tol > 0 && subspace_tol > 0 && curvature_budget > 0))
      throw Error(ErrorCode::InvalidTolerance, "tolerances must be strictly positive");
    if (!(abs_tol > h * h * curvature_budget))
      throw Error(ErrorCode::InvalidTolerance,
                  "abs_tol must exceed h^2 times the curvature budget");
  }
};

struct SmoothMap {
  int domain_dim = 0;
  int codomain_dim = 0;
  std::function<Vec(const Vec &)> eval;
  Predicate domain; // empty means everywhere

  bool contains(const Vec &p) const { return !domain || domain(p); }
  Vec operator()(const Vec &p) const { return eval(p); }
};

inline SmoothMap identity_map(int dim) {
  return {dim, dim, [](const Vec &p) { return p; }, {}};
}

/// g after f
inline SmoothMap compose(const SmoothMap &g, const SmoothMap &f) {
  if (g.domain_dim != f.codomain_dim)
    throw Error(ErrorCode::DimensionMismatch, "compose: inner codomain != outer domain");
  SmoothMap r;
  r.domain_dim = f.domain_dim;
  r.codomain_dim = g.codomain_dim;
  r.eval = [g, f](const Vec &p) { return g.eval(f.eval(p)); };
  r.domain = [g, f](const Vec &p) { return f.contains(p) && g.contains(f.eval(p)); };
  return r;
}

inline Mat jacobian(const SmoothMap &f, const Point &p, const ToleranceProfile &prof) {
  if (p.size() != f.domain_dim)
    throw Error(ErrorCode::DimensionMismatch, "jacobian: point has wrong dimension");
  if (!f.contains(p))
    throw Error(ErrorCode::StencilOutsideDomain, "jacobian: base point outside domain");
  const double h = prof.h;
  Mat J(f.codomain_dim, f.domain_dim);
  Vec q = p;
  for (int j = 0; j < f.domain_dim; ++j) {
    q[j] = p[j] + h;
    if (!f.contains(q))
      throw Error(ErrorCode::StencilOutsideDomain, "jacobian: stencil point outside domain");
    Vec fp = f.eval(q);
    q[j] = p[j] - h;
    if (!f.contains(q))
      throw Error(ErrorCode::StencilOutsideDomain, "jacobian: stencil point outside domain");
    Vec fm = f.eval(q);
    q[j] = p[j];
    if (!all_finite(fp) || !all_finite(fm))
      throw Error(ErrorCode::NonFiniteValue, "jacobian: non-finite value on stencil");
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  return J;
}

/// Right singular vectors whose singular value is below tol.
inline std::vector<Vec> nullspace(const Mat &M, double tol) {
  std::vector<Vec> out;
  const int n = static_cast<int>(M.cols());
  if (n == 0)
    return out;
  if (M.rows() == 0) {
    for (int j = 0; j < n; ++j)
      out.push_back(Vec::Unit(n, j));
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec &sv = svd.singularValues();
  const Mat &V = svd.matrixV();
  for (int j = 0; j < n; ++j) {
    double s = j < sv.size() ? sv[j] : 0.0;
    if (s < tol)
      out.push_back(V.col(j));
  }
  return out;
}

inline Mat columns(const std::vector<Vec> &vs, int dim) {
  Mat A(dim, static_cast<int>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "vectors of unequal ambient dimension");
    A.col(static_cast<int>(i)) = vs[i];
  }
  return A;
}

/// Orthonormal basis of span(vs); directions with singular value below
/// rank_tol * max(1, largest) are discarded.
inline Mat orthonormal_span(const std::vector<Vec> &vs, int dim, double rank_tol = 1e-8) {
  Mat A = columns(vs, dim);
  if (A.cols() == 0)
    return Mat(dim, 0);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
  const Vec &sv = svd.singularValues();
  int r = 0;
  if (sv.size()) {
    const double cut = rank_tol * std::max(1.0, sv[0]);
    while (r < sv.size() && sv[r] > cut)
      ++r;
  }
  return svd.matrixU().leftCols(r);
}

inline int numeric_rank(const std::vector<Vec> &vs, int dim, double rank_tol = 1e-8) {
  return static_cast<int>(orthonormal_span(vs, dim, rank_tol).cols());
}

/// Largest principal angle between span(A) and span(B); pi/2 when the spans
/// have different dimension.
inline double largest_principal_angle(const std::vector<Vec> &A, const std::vector<Vec> &B,
                                      double rank_tol = 1e-8) {
  int dim = -1;
  for (const auto &v : A)
    dim = static_cast<int>(v.size());
  for (const auto &v : B) {
    if (dim >= 0 && v.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, "subspace comparison across dimensions");
    dim = static_cast<int>(v.size());
  }
  if (dim < 0)
    return 0.0;
  Mat QA = orthonormal_span(A, dim, rank_tol);
  Mat QB = orthonormal_span(B, dim, rank_tol);
  if (QA.cols() != QB.cols())
    return M_PI / 2;
  if (QA.cols() == 0)
    return 0.0;
  // sine of the largest angle = norm of the part of QB outside span(QA)
  Mat R = QB - QA * (QA.transpose() * QB);
  Eigen::JacobiSVD<Mat> svd(R);
  double s = std::min(1.0, svd.singularValues()[0]);
  return std::asin(s);
}

inline bool subspace_equal(const std::vector<Vec> &A, const std::vector<Vec> &B, double tol) {
  return largest_principal_angle(A, B) < tol;
}

enum class FormKind { Real, Complex };

struct FormField {
  int degree = 0;
  int ambient_dim = 0;
  FormKind kind = FormKind::Real;
  std::function<cplx(const Vec &, const std::vector<Vec> &)> eval;
  Predicate domain;

  bool contains(const Vec &p) const { return !domain || domain(p); }
  cplx operator()(const Vec &p, const std::vector<Vec> &vs) const { return eval(p, vs); }
};

/// Matrix of a 2-form in the coordinate basis: M(i,j) = w(p; e_i, e_j).
inline CMat form_matrix(const FormField &w, const Vec &p) {
  if (w.degree != 2)
    throw Error(ErrorCode::DimensionMismatch, "form_matrix needs a 2-form");
  const int n = w.ambient_dim;
  CMat M = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      cplx v = w.eval(p, {Vec::Unit(n, i), Vec::Unit(n, j)});
      M(i, j) = v;
      M(j, i) = -v;
    }
  return M;
}

/// 2-form u^T A(p) v with A antisymmetric, A given by coeff(p).
inline FormField two_form(int dim, FormKind kind, std::function<CMat(const Vec &)> coeff,
                          Predicate domain = {}) {
  FormField w;
  w.degree = 2;
  w.ambient_dim = dim;
  w.kind = kind;
  w.domain = std::move(domain);
  w.eval = [coeff](const Vec &p, const std::vector<Vec> &vs) -> cplx {
    CMat A = coeff(p);
    Eigen::VectorXcd u = vs[0].cast<cplx>(), v = vs[1].cast<cplx>();
    return (u.transpose() * A * v)(0, 0);
  };
  return w;
}

/// 1-form p -> c(p).v
inline FormField one_form(int dim, FormKind kind,
                          std::function<Eigen::VectorXcd(const Vec &)> covector,
                          Predicate domain = {}) {
  FormField w;
  w.degree = 1;
  w.ambient_dim = dim;
  w.kind = kind;
  w.domain = std::move(domain);
  w.eval = [covector](const Vec &p, const std::vector<Vec> &vs) -> cplx {
    Eigen::VectorXcd c = covector(p);
    return (c.transpose() * vs[0].cast<cplx>())(0, 0);
  };
  return w;
}

namespace detail {

inline void combinations(int n, int k, int start, std::vector<int> &cur,
                         std::vector<std::vector<int>> &out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

} // namespace detail

/// Shuffle formula: (a^b)(v) = sum over (k,l)-shuffles of sign * a(..) b(..).
inline FormField wedge(const FormField &a, const FormField &b) {
  if (a.ambient_dim != b.ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "wedge of forms on different spaces");
  FormField w;
  w.degree = a.degree + b.degree;
  w.ambient_dim = a.ambient_dim;
  w.kind = (a.kind == FormKind::Complex || b.kind == FormKind::Complex) ? FormKind::Complex
                                                                         : FormKind::Real;
  w.domain = [a, b](const Vec &p) { return a.contains(p) && b.contains(p); };
  const int k = a.degree, n = a.degree + b.degree;
  std::vector<std::vector<int>> shuffles;
  std::vector<int> cur;
  detail::combinations(n, k, 0, cur, shuffles);
  w.eval = [a, b, k, n, shuffles](const Vec &p, const std::vector<Vec> &vs) -> cplx {
    cplx total = 0.0;
    for (const auto &idx : shuffles) {
      std::vector<Vec> va, vb;
      std::vector<bool> used(n, false);
      int inversions = 0;
      for (int j = 0; j < k; ++j) {
        va.push_back(vs[idx[j]]);
        used[idx[j]] = true;
        inversions += idx[j] - j;
      }
      for (int i = 0; i < n; ++i)
        if (!used[i])
          vb.push_back(vs[i]);
      double sign = (inversions % 2) ? -1.0 : 1.0;
      total += sign * a.eval(p, va) * b.eval(p, vb);
    }
    return total;
  };
  return w;
}

inline FormField scale(const FormField &w, double c) {
  FormField r = w;
  r.eval = [w, c](const Vec &p, const std::vector<Vec> &vs) { return c * w.eval(p, vs); };
  return r;
}

inline FormField difference(const FormField &a, const FormField &b) {
  if (a.degree != b.degree || a.ambient_dim != b.ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "difference of incompatible forms");
  FormField r = a;
  r.kind = (a.kind == FormKind::Complex || b.kind == FormKind::Complex) ? FormKind::Complex
                                                                         : FormKind::Real;
  r.domain = [a, b](const Vec &p) { return a.contains(p) && b.contains(p); };
  r.eval = [a, b](const Vec &p, const std::vector<Vec> &vs) {
    return a.eval(p, vs) - b.eval(p, vs);
  };
  return r;
}

/// dw(v_0..v_k) = sum_i (-1)^i v_i( w(v_0..^v_i..v_k) ) for constant fields.
inline cplx exterior_derivative(const FormField &w, const Point &p, const std::vector<Vec> &vs,
                                const ToleranceProfile &prof) {
  if (static_cast<int>(vs.size()) != w.degree + 1)
    throw Error(ErrorCode::DimensionMismatch, "exterior_derivative needs degree+1 vectors");
  if (p.size() != w.ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "exterior_derivative: point dimension");
  const double h = prof.h;
  cplx total = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    std::vector<Vec> rest;
    for (std::size_t j = 0; j < vs.size(); ++j)
      if (j != i)
        rest.push_back(vs[j]);
    Vec pp = p + h * vs[i], pm = p - h * vs[i];
    if (!w.contains(pp) || !w.contains(pm))
      throw Error(ErrorCode::StencilOutsideDomain, "exterior_derivative stencil outside domain");
    cplx d = (w.eval(pp, rest) - w.eval(pm, rest)) / (2.0 * h);
    total += (i % 2 ? -1.0 : 1.0) * d;
  }
  return total;
}

inline cplx pullback(const SmoothMap &f, const FormField &w, const Point &p,
                     const std::vector<Vec> &vs, const ToleranceProfile &prof) {
  if (f.codomain_dim != w.ambient_dim)
    throw Error(ErrorCode::DimensionMismatch, "pullback: form lives on another space");
  Mat J = jacobian(f, p, prof);
  std::vector<Vec> pushed;
  for (const auto &v : vs)
    pushed.push_back(J * v);
  return w.eval(f.eval(p), pushed);
}

/// f*w as a form field (Jacobian recomputed per evaluation).
inline FormField pullback_form(const SmoothMap &f, const FormField &w,
                               const ToleranceProfile &prof) {
  FormField r;
  r.degree = w.degree;
  r.ambient_dim = f.domain_dim;
  r.kind = w.kind;
  r.domain = [f, w](const Vec &p) { return f.contains(p) && w.contains(f.eval(p)); };
  r.eval = [f, w, prof](const Vec &p, const std::vector<Vec> &vs) {
    return pullback(f, w, p, vs, prof);
  };
  return r;
}

} // namespace egl
