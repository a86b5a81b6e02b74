#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "egl/divisor.hpp"
#include "egl/symplectic_models.hpp"

namespace egl {

struct Witness {
  std::string label;
  std::vector<double> inputs;
  double residual = 0.0;
};

struct CheckReport {
  static constexpr std::size_t max_witnesses = 20;

  std::string check;
  std::string model;
  long long attempted = 0;
  long long passed = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  ToleranceProfile profile;
  bool pass = true;
  std::string mode = "bound"; // "regression": pass iff max_residual > tolerance
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;

  CheckReport() = default;
  CheckReport(std::string c, std::string m, double tol, std::uint64_t s, const ToleranceProfile &p)
      : check(std::move(c)), model(std::move(m)), tolerance(tol), seed(s), profile(p) {}

  /// One sample; NaN residuals count as failures.
  void record(double residual, const std::string &label, const Vec &inputs) {
    ++attempted;
    bool ok = residual <= tolerance;
    if (std::isfinite(residual))
      max_residual = std::max(max_residual, residual);
    if (ok) {
      ++passed;
      return;
    }
    pass = false;
    if (witnesses.size() < max_witnesses)
      witnesses.push_back({label, std::vector<double>(inputs.data(), inputs.data() + inputs.size()),
                           std::isfinite(residual) ? residual : -1.0});
  }
};

inline std::string check_stream_label(const std::string &check, const std::string &model) {
  return check + "/" + model;
}

// ---------------------------------------------------------------------------
// Groupoid axioms

namespace detail {

struct Residual {
  double value;
  const char *label;
};

/// sup distance, with a failed composition reported through its endpoint gap
template <class F>
double guarded(const GroupoidChartModel &model, F &&f) {
  try {
    return f();
  } catch (const Error &e) {
    if (e.code() == ErrorCode::NotComposable || e.code() == ErrorCode::ChartInvalid)
      return 1.0 + model.composable_tol;
    throw;
  }
}

} // namespace detail

/// Evaluates the seven groupoid identities on a composable triple.
inline std::vector<detail::Residual> groupoid_identity_residuals(const GroupoidChartModel &G,
                                                                 const Vec &g, const Vec &h,
                                                                 const Vec &k) {
  std::vector<detail::Residual> out;
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.s(G.m(g, h)), G.s(h)); }), "s(gh)=s(h)"});
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.t(G.m(g, h)), G.t(g)); }), "t(gh)=t(g)"});
  out.push_back({detail::guarded(G, [&] {
                   return sup_dist(G.m(G.m(g, h), k), G.m(g, G.m(h, k)));
                 }),
                 "(gh)k=g(hk)"});
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.m(G.unit(G.t(g)), g), g); }),
                 "u(t(g))g=g"});
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.m(g, G.unit(G.s(g))), g); }),
                 "gu(s(g))=g"});
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.m(g, G.inv(g)), G.unit(G.t(g))); }),
                 "g inv(g)=u(t(g))"});
  out.push_back({detail::guarded(G, [&] { return sup_dist(G.m(G.inv(g), g), G.unit(G.s(g))); }),
                 "inv(g)g=u(s(g))"});
  return out;
}

inline CheckReport check_groupoid_axioms(const GroupoidChartModel &G, const Sampler &sampler,
                                         long long samples, std::uint64_t seed,
                                         const ToleranceProfile &prof, double tol) {
  CheckReport rep("axioms", G.name, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("axioms", G.name)));
  for (long long i = 0; i < samples; ++i) {
    Vec g = sampler.arrow(rng);
    Vec h = sampler.next(g, rng);
    Vec k = sampler.next(h, rng);
    double worst = 0.0;
    std::string label;
    for (const auto &r : groupoid_identity_residuals(G, g, h, k)) {
      if (!(r.value <= tol)) {
        label += label.empty() ? "" : ";";
        label += r.label;
      }
      worst = std::isnan(r.value) ? r.value : std::max(worst, r.value);
    }
    rep.record(worst, label, concat(concat(g, h), k));
  }
  return rep;
}

inline CheckReport check_groupoid_axioms(const GroupoidChartModel &G, long long samples,
                                         std::uint64_t seed, const ToleranceProfile &prof) {
  return check_groupoid_axioms(G, G.sampler, samples, seed, prof, prof.abs_tol);
}

/// Copy of G whose product is shifted by `delta` in output coordinate `coord`.
inline GroupoidChartModel perturb_product(const GroupoidChartModel &G, int coord, double delta) {
  GroupoidChartModel P = G;
  P.name = G.name + "[perturbed]";
  auto prod = G.product;
  P.product = [prod, coord, delta](const Vec &g, const Vec &h) {
    Vec r = prod(g, h);
    r[coord] += delta;
    return r;
  };
  return P;
}

// ---------------------------------------------------------------------------
// Lie algebroid: dt(ker ds) at units

inline std::vector<Vec> lie_algebroid_of(const GroupoidChartModel &G, const Point &p,
                                         const ToleranceProfile &prof) {
  if (!G.valid_base(p))
    throw Error(ErrorCode::ChartInvalid, G.name + ": base point outside chart");
  Vec u = G.unit(p);
  if (!G.valid_arrow(u))
    throw Error(ErrorCode::ChartInvalid, G.name + ": unit outside chart");
  const int d = G.arrow_dim;
  SmoothMap s = restrict_continuous(G.s, u, d), t = restrict_continuous(G.t, u, d);
  Vec uc = u.head(d);
  Mat Js = jacobian(s, uc, prof);
  Mat stack = Js;
  if (G.constraint) {
    Mat Jc = jacobian(restrict_continuous(*G.constraint, u, d), uc, prof);
    stack.resize(Js.rows() + Jc.rows(), d);
    stack << Js, Jc;
  }
  double scale = 1.0;
  if (stack.size()) {
    Eigen::JacobiSVD<Mat> svd(stack);
    scale = std::max(1.0, svd.singularValues()[0]);
  }
  Mat Jt = jacobian(t, uc, prof);
  std::vector<Vec> out;
  for (const Vec &k : nullspace(stack, prof.rel_tol * scale))
    out.push_back(Jt * k);
  return out;
}

using FrameFn = std::function<std::vector<Vec>(const Point &)>;

inline CheckReport check_algebroid(const GroupoidChartModel &G, const FrameFn &expected,
                                   long long points, std::uint64_t seed,
                                   const ToleranceProfile &prof, double tol) {
  CheckReport rep("algebroid", G.name, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("algebroid", G.name)));
  for (long long i = 0; i < points; ++i) {
    Vec p = G.sampler.base(rng);
    double angle = largest_principal_angle(lie_algebroid_of(G, p, prof), expected(p));
    rep.record(angle, "principal angle", p);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Symplectic checks

/// Omega against t*w - s*w computed by finite differences, at dense arrows.
inline CheckReport check_omega_pullback(const SymplecticModel &S, long long samples,
                                        std::uint64_t seed, const ToleranceProfile &prof,
                                        double tol) {
  const auto &G = S.model;
  CheckReport rep("omega-pullback", G.name, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("omega-pullback", G.name)));
  const int d = G.arrow_dim;
  for (long long i = 0; i < samples; ++i) {
    Vec g = S.dense_arrow(rng);
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        std::vector<Vec> vs{Vec::Unit(d, a), Vec::Unit(d, b)};
        cplx lhs = S.Omega(g, vs);
        cplx rhs = pullback(G.t, S.omega_base, g, vs, prof) - pullback(G.s, S.omega_base, g, vs, prof);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    rep.record(worst, "Omega != t*w - s*w", g);
  }
  return rep;
}

inline CheckReport check_closed(const FormField &W, const std::string &model,
                                const std::function<Vec(CounterRng &)> &draw, long long samples,
                                std::uint64_t seed, const ToleranceProfile &prof, double tol) {
  CheckReport rep("closed", model, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("closed", model)));
  const int d = W.ambient_dim;
  for (long long i = 0; i < samples; ++i) {
    Vec g = draw(rng);
    double worst = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        for (int c = b + 1; c < d; ++c)
          worst = std::max(worst, std::abs(exterior_derivative(
                                      W, g, {Vec::Unit(d, a), Vec::Unit(d, b), Vec::Unit(d, c)},
                                      prof)));
    rep.record(worst, "dOmega != 0", g);
  }
  return rep;
}

/// |det| of the (real part of the) coefficient matrix must stay above `bound`;
/// the recorded residual is bound / |det| with tolerance 1.
inline CheckReport check_nondegenerate(const FormField &W, const std::string &model,
                                       const std::function<Vec(CounterRng &)> &draw,
                                       long long samples, std::uint64_t seed,
                                       const ToleranceProfile &prof, double bound) {
  CheckReport rep("nondegenerate", model, 1.0, seed, prof);
  rep.notes.push_back("residual = " + std::to_string(bound) + " / |det(Re Omega)|");
  CounterRng rng(seed, stream_id(check_stream_label("nondegenerate", model)));
  for (long long i = 0; i < samples; ++i) {
    Vec g = draw(rng);
    double det = std::abs(form_matrix(W, g).real().determinant());
    rep.record(det > 0 ? bound / det : std::numeric_limits<double>::infinity(), "small det", g);
  }
  return rep;
}

/// m*Omega = pr1*Omega + pr2*Omega on tangent vectors of the composable locus,
/// obtained by differentiating the pair chart.
inline CheckReport check_multiplicative(const SymplecticModel &S, long long samples,
                                        std::uint64_t seed, const ToleranceProfile &prof,
                                        double tol) {
  const auto &G = S.model;
  if (!G.pairs)
    throw Error(ErrorCode::ConfigError, G.name + ": no composable-pair chart");
  CheckReport rep("multiplicative", G.name, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("multiplicative", G.name)));
  const SmoothMap &P = G.pairs->param;
  const int d = G.point_dim(), q = P.domain_dim;
  SmoothMap M = compose(G.mult_map(), P);
  SmoothMap A = compose(pair_projection(d, 0), P);
  SmoothMap B = compose(pair_projection(d, 1), P);
  for (long long i = 0; i < samples; ++i) {
    Vec x = G.pairs->sample(rng);
    Mat JM = jacobian(M, x, prof), JA = jacobian(A, x, prof), JB = jacobian(B, x, prof);
    Vec pm = M(x), pa = A(x), pb = B(x);
    double worst = 0.0;
    for (int a = 0; a < q; ++a)
      for (int b = a + 1; b < q; ++b) {
        cplx lhs = S.Omega(pm, {JM.col(a), JM.col(b)});
        cplx rhs = S.Omega(pa, {JA.col(a), JA.col(b)}) + S.Omega(pb, {JB.col(a), JB.col(b)});
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    rep.record(worst, "m*Omega != pr1*Omega + pr2*Omega", x);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Morphisms covering the identity of the base

struct MorphismData {
  std::string name;
  SmoothMap f;
  const GroupoidChartModel *source = nullptr;
  const GroupoidChartModel *target = nullptr;
  const FormField *Omega_source = nullptr; // optional pullback check
  const FormField *Omega_target = nullptr;
  std::function<Vec(CounterRng &)> dense_arrow; // for the pullback check
};

inline std::vector<CheckReport> check_morphism(const MorphismData &md, long long samples,
                                               std::uint64_t seed, const ToleranceProfile &prof,
                                               double tol) {
  const auto &G = *md.source;
  const auto &H = *md.target;
  const std::string model = md.name;
  CheckReport rs("morphism:s", model, tol, seed, prof), rt("morphism:t", model, tol, seed, prof),
      rm("morphism:m", model, tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("morphism", model)));
  for (long long i = 0; i < samples; ++i) {
    Vec g = G.sampler.arrow(rng);
    Vec h = G.sampler.next(g, rng);
    Vec fg = md.f(g), fh = md.f(h);
    Vec gh = concat(g, h);
    rs.record(sup_dist(H.s(fg), G.s(g)), "s_H(f(g)) != s(g)", g);
    rt.record(sup_dist(H.t(fg), G.t(g)), "t_H(f(g)) != t(g)", g);
    double gap = H.composable_gap(fg, fh);
    double res = gap > H.composable_tol ? std::max(gap, 1.0)
                                        : sup_dist(md.f(G.m(g, h)), H.m(fg, fh));
    rm.record(res, "f(gh) != f(g)f(h)", gh);
  }
  std::vector<CheckReport> out{rs, rt, rm};
  if (md.Omega_source && md.Omega_target) {
    CheckReport ro("morphism:Omega", model, tol, seed, prof);
    const int d = G.point_dim();
    for (long long i = 0; i < samples; ++i) {
      Vec g = md.dense_arrow(rng);
      Mat J = jacobian(md.f, g, prof);
      Vec fg = md.f(g);
      double worst = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          cplx lhs = (*md.Omega_target)(fg, {J.col(a), J.col(b)});
          cplx rhs = (*md.Omega_source)(g, {Vec::Unit(d, a), Vec::Unit(d, b)});
          worst = std::max(worst, std::abs(lhs - rhs));
        }
      ro.record(worst, "f*Omega_H != Omega", g);
    }
    out.push_back(ro);
  }
  return out;
}

struct PsiResolution {
  std::vector<std::pair<GammaConvention, bool>> outcomes;
  std::vector<CheckReport> reports;
  int passing_count() const {
    int c = 0;
    for (auto &o : outcomes)
      c += o.second;
    return c;
  }
  std::string passing_names() const {
    std::string s;
    for (auto &o : outcomes)
      if (o.second)
        s += (s.empty() ? "" : "; ") + to_string(o.first);
    return s;
  }
};

/// Runs the morphism identities of psi for the four candidate conventions.
inline PsiResolution resolve_psi_convention(long long samples, std::uint64_t seed,
                                            const ToleranceProfile &prof, double tol) {
  PsiResolution res;
  GroupoidChartModel G = nonzero_residue_groupoid();
  for (GammaConvention c : all_gamma_conventions) {
    GroupoidChartModel Gamma = gamma_model(c);
    MorphismData md{"psi[" + to_string(c) + "]", morphism_psi(1e-6, prof.abs_tol), &Gamma, &G,
                      nullptr, nullptr, {}};
    auto reps = check_morphism(md, samples, seed, prof, tol);
    bool ok = true;
    for (auto &r : reps)
      ok = ok && r.pass;
    res.outcomes.push_back({c, ok});
    for (auto &r : reps)
      res.reports.push_back(std::move(r));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Poisson

using Bivector = std::function<Mat(const Vec &)>;

/// max_{i<j<k} |cyclic sum_l pi^{li} d_l pi^{jk}|, i.e. the Schouten bracket
/// [pi, pi] up to a constant factor.
inline double check_poisson_jacobi(const Bivector &pi, int dim, const Point &p,
                                   const ToleranceProfile &prof) {
  if (p.size() != dim)
    throw Error(ErrorCode::DimensionMismatch, "check_poisson_jacobi: point dimension");
  Mat P = pi(p);
  std::vector<Mat> dP(dim);
  for (int l = 0; l < dim; ++l) {
    Vec e = Vec::Unit(dim, l) * prof.h;
    Mat a = pi(p + e), b = pi(p - e);
    if (!a.allFinite() || !b.allFinite())
      throw Error(ErrorCode::NonFiniteValue, "check_poisson_jacobi: non-finite bivector");
    dP[l] = (a - b) / (2.0 * prof.h);
  }
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k) {
        double J = 0.0;
        for (int l = 0; l < dim; ++l)
          J += P(l, i) * dP[l](j, k) + P(l, j) * dP[l](k, i) + P(l, k) * dP[l](i, j);
        worst = std::max(worst, std::abs(J));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// A-paths near a smooth divisor

/// tau -> (x(tau), r(tau) e^{i theta(tau)}) in R^{n-2} x C.
struct PolarCurve {
  int n = 2;
  std::function<Vec(double)> x;
  std::function<double(double)> r;
  std::function<double(double)> theta;
};

struct APath {
  int n = 2;
  std::function<Point(double)> base;
  std::function<Vec(double)> coefficients; // frame order of algebroid_frame
};

/// A-path of t*gamma: base (x, t r e^{i theta}), coefficients
/// (x', d log r / d tau, theta'), which do not involve t.
inline APath apath_rescale(const PolarCurve &gamma, double t, const ToleranceProfile &prof = {}) {
  if (!(t > 0.0 && t <= 1.0))
    throw Error(ErrorCode::DegenerateRadius, "apath_rescale: t must lie in (0, 1]");
  for (int i = 0; i <= 100; ++i)
    if (!(gamma.r(i / 100.0) > 0.0))
      throw Error(ErrorCode::DegenerateRadius, "apath_rescale: r <= 0 on [0,1]");
  const int n = gamma.n;
  const double h = prof.h;
  APath path;
  path.n = n;
  path.base = [gamma, t, n](double tau) {
    Point p(n);
    p.head(n - 2) = gamma.x(tau);
    setc(p, n - 2, std::polar(t * gamma.r(tau), gamma.theta(tau)));
    return p;
  };
  path.coefficients = [gamma, n, h](double tau) {
    if (!(gamma.r(tau - h) > 0.0 && gamma.r(tau + h) > 0.0))
      throw Error(ErrorCode::DegenerateRadius, "apath_rescale: r <= 0 on the stencil");
    Vec c(n);
    c.head(n - 2) = (gamma.x(tau + h) - gamma.x(tau - h)) / (2 * h);
    c[n - 2] = (std::log(gamma.r(tau + h)) - std::log(gamma.r(tau - h))) / (2 * h);
    c[n - 1] = (gamma.theta(tau + h) - gamma.theta(tau - h)) / (2 * h);
    return c;
  };
  return path;
}

/// |anchor(a(tau)) - d/dtau base(tau)| in the elliptic frame of (R^n, {z=0}).
inline double apath_anchor_residual(const APath &path, double tau, const ToleranceProfile &prof) {
  DivisorLocalModel D(path.n, 1);
  Point p = path.base(tau);
  AlgebroidFrame F = algebroid_frame(D, p);
  Vec c = path.coefficients(tau);
  Vec v = Vec::Zero(path.n);
  for (int i = 0; i < path.n; ++i)
    v += c[i] * F.vectors[i];
  Vec deriv = (path.base(tau + prof.h) - path.base(tau - prof.h)) / (2 * prof.h);
  return (v - deriv).cwiseAbs().maxCoeff();
}

} // namespace egl
