#pragma once

#include <array>
#include <string>

#include "egl/elliptic_models.hpp"

namespace egl {

struct SymplecticModel {
  GroupoidChartModel model;
  FormField omega_base;  // on the base minus the divisor
  FormField Omega;       // on arrows
  std::function<Mat(const Vec &)> pi_bivector;
  std::function<Vec(CounterRng &)> dense_arrow; // arrows with s, t off the divisor
};

/// 2-form on C^m = R^{2m} given by holomorphic coefficients:
/// w(u, v) = sum_{i,j} C_ij du_i dv_j with du_i = u_{2i} + i u_{2i+1}.
inline FormField holomorphic_two_form(int m, std::function<CMat(const Vec &)> coeff,
                                      Predicate domain = {}) {
  FormField w;
  w.degree = 2;
  w.ambient_dim = 2 * m;
  w.kind = FormKind::Complex;
  w.domain = std::move(domain);
  w.eval = [coeff, m](const Vec &p, const std::vector<Vec> &vs) -> cplx {
    CMat C = coeff(p);
    Eigen::VectorXcd du(m), dv(m);
    for (int i = 0; i < m; ++i) {
      du[i] = getc(vs[0], 2 * i);
      dv[i] = getc(vs[1], 2 * i);
    }
    return (du.transpose() * C * dv)(0, 0);
  };
  return w;
}

namespace detail {

inline CMat antisym(int m, std::initializer_list<std::tuple<int, int, cplx>> entries) {
  CMat C = CMat::Zero(m, m);
  for (auto [i, j, v] : entries) {
    C(i, j) += v;
    C(j, i) -= v;
  }
  return C;
}

/// Im(conj(u) v): the area form dx^dy on a complex line.
inline double area(cplx u, cplx v) { return (std::conj(u) * v).imag(); }

} // namespace detail

// ---------------------------------------------------------------------------
// Nonzero elliptic residue: arrows (x1, x2, a, b), base R^2.

namespace nonzero {

inline Vec source(const Vec &g) {
  double r2 = g[0] * g[0] + g[1] * g[1];
  Vec p(2);
  p << g[2] * r2 + g[0], g[3] * r2 + g[1];
  return p;
}

/// |s(g)|^2 / r^2 written as a polynomial (smooth through r = 0).
inline double Dfun(const Vec &g) {
  double r2 = g[0] * g[0] + g[1] * g[1];
  return 1.0 + 2.0 * (g[2] * g[0] + g[3] * g[1]) + r2 * (g[2] * g[2] + g[3] * g[3]);
}

inline bool valid(const Vec &g) {
  if (g.size() != 4 || !g.allFinite())
    return false;
  double r2 = g[0] * g[0] + g[1] * g[1];
  if (r2 == 0.0)
    return true;
  return source(g).squaredNorm() > 0.0;
}

/// ds as a 2x4 matrix.
inline Mat ds(const Vec &g) {
  double x1 = g[0], x2 = g[1], a = g[2], b = g[3], r2 = x1 * x1 + x2 * x2;
  Mat J(2, 4);
  J << 2 * a * x1 + 1, 2 * a * x2, r2, 0, 2 * b * x1, 2 * b * x2 + 1, 0, r2;
  return J;
}

/// t*w - s*w for w = dx^dy / r^2, extended smoothly over r = 0.
inline CMat Omega_coeff(const Vec &g) {
  double x1 = g[0], x2 = g[1], a = g[2], b = g[3], r2 = x1 * x1 + x2 * x2;
  double D = Dfun(g);
  return detail::antisym(4, {{0, 1, (a * a + b * b) / D},
                             {0, 2, 2 * b * x1 / D},
                             {0, 3, -(2 * a * x1 + 1) / D},
                             {1, 2, (2 * b * x2 + 1) / D},
                             {1, 3, -2 * a * x2 / D},
                             {2, 3, -r2 / D}});
}

} // namespace nonzero

inline GroupoidChartModel nonzero_residue_groupoid() {
  GroupoidChartModel g;
  g.name = "sympl-nonzero";
  g.arrow_dim = 4;
  g.base_dim = 2;
  g.arrow_domain = nonzero::valid;
  g.s = {4, 2, nonzero::source, nonzero::valid};
  g.t = {4, 2, [](const Vec &a) -> Vec { return a.head(2); }, {}};
  g.unit = {2, 4, [](const Vec &p) { return concat(p, Vec::Zero(2)); }, {}};
  // conjugated pair swap; the form (s, -a, -b) holds only at r = 0
  g.inv = {4, 4,
           [](const Vec &a) {
             double D = nonzero::Dfun(a);
             Vec q(4);
             q << nonzero::source(a), -a[2] / D, -a[3] / D;
             return q;
           },
           nonzero::valid};
  // conjugated pair composition: third/fourth component a1 + a2 |s(g1)|^2 / r^2
  g.product = [](const Vec &u, const Vec &w) {
    double D = nonzero::Dfun(u);
    Vec q(4);
    q << u[0], u[1], u[2] + w[2] * D, u[3] + w[3] * D;
    return q;
  };
  auto draw_x = [](CounterRng &rng) {
    Vec x(2);
    if (rng.bernoulli(0.25))
      x.setZero();
    else
      x << rng.uniform(-1, 1), rng.uniform(-1, 1);
    return x;
  };
  g.sampler.base = draw_x;
  g.sampler.arrow = [draw_x](CounterRng &rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Vec x = draw_x(rng);
      Vec a(4);
      a << x, rng.uniform(-1, 1), rng.uniform(-1, 1);
      if (x.squaredNorm() == 0.0 || nonzero::source(a).norm() > 0.1)
        return a;
    }
    throw Error(ErrorCode::SamplerExhausted, "sympl-nonzero arrow");
  };
  g.sampler.next = [](const Vec &u, CounterRng &rng) {
    Vec y = nonzero::source(u);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Vec h(4);
      h << y, rng.uniform(-1, 1), rng.uniform(-1, 1);
      if (y.squaredNorm() == 0.0 || nonzero::source(h).norm() > 0.1)
        return h;
    }
    throw Error(ErrorCode::SamplerExhausted, "sympl-nonzero composable arrow");
  };
  PairChart pc;
  pc.param = {6, 8,
              [](const Vec &q) {
                Vec u = q.head(4), w(4);
                w << nonzero::source(u), q[4], q[5];
                return concat(u, w);
              },
              [](const Vec &q) {
                Vec u = q.head(4), w(4);
                w << nonzero::source(u), q[4], q[5];
                return nonzero::valid(u) && nonzero::valid(w);
              }};
  auto arrow = g.sampler.arrow;
  auto next = g.sampler.next;
  pc.sample = [arrow, next](CounterRng &rng) {
    Vec u = arrow(rng);
    Vec w = next(u, rng);
    Vec q(6);
    q << u, w[2], w[3];
    return q;
  };
  g.pairs = pc;
  return g;
}

/// f: nonvanishing function on R^2; empty means f = 1.
inline SymplecticModel symplectic_nonzero_residue_model(std::function<double(const Vec &)> f = {}) {
  SymplecticModel S;
  S.model = nonzero_residue_groupoid();
  auto fval = [f](const Vec &p) { return f ? f(p) : 1.0; };
  auto off_origin = [](const Vec &p) { return p.squaredNorm() > 0.0; };
  S.omega_base = two_form(
      2, FormKind::Real,
      [fval](const Vec &p) {
        double c = fval(p) / p.squaredNorm();
        return detail::antisym(2, {{0, 1, c}});
      },
      off_origin);
  if (!f) {
    S.Omega = two_form(4, FormKind::Real, nonzero::Omega_coeff, nonzero::valid);
  } else {
    // t*w - s*w with exact differentials, on the dense chart only
    S.Omega.degree = 2;
    S.Omega.ambient_dim = 4;
    S.Omega.kind = FormKind::Real;
    S.Omega.domain = [](const Vec &g) {
      return nonzero::valid(g) && g.head(2).squaredNorm() > 0.0 &&
             nonzero::source(g).squaredNorm() > 0.0;
    };
    auto w = S.omega_base;
    S.Omega.eval = [w](const Vec &g, const std::vector<Vec> &vs) -> cplx {
      Mat Jt = Mat::Zero(2, 4);
      Jt(0, 0) = Jt(1, 1) = 1.0;
      Mat Js = nonzero::ds(g);
      return w.eval(g.head(2), {Jt * vs[0], Jt * vs[1]}) -
             w.eval(nonzero::source(g), {Js * vs[0], Js * vs[1]});
    };
  }
  S.pi_bivector = [fval](const Vec &p) {
    Mat P = Mat::Zero(2, 2);
    P(0, 1) = p.squaredNorm() / fval(p);
    P(1, 0) = -P(0, 1);
    return P;
  };
  S.dense_arrow = [](CounterRng &rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Vec a(4);
      a << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1);
      if (a.head(2).norm() > 0.3 && nonzero::source(a).norm() > 0.3)
        return a;
    }
    throw Error(ErrorCode::SamplerExhausted, "sympl-nonzero dense arrow");
  };
  return S;
}

// ---------------------------------------------------------------------------
// Zero elliptic residue: arrows (z, a, b, c) in C^4 with b != 0, realified;
// base (w, z) in C^2 with divisor {w = 0}.

namespace zero {

inline bool valid(const Vec &g) {
  return g.size() == 8 && g.allFinite() && getc(g, 4) != cplx(0.0);
}

inline Vec pack(std::initializer_list<cplx> zs) {
  Vec v(2 * static_cast<int>(zs.size()));
  int i = 0;
  for (cplx z : zs) {
    setc(v, i, z);
    i += 2;
  }
  return v;
}

inline Vec source(const Vec &g) {
  cplx z = getc(g, 0), a = getc(g, 2), b = getc(g, 4), c = getc(g, 6);
  return pack({a * b, a * c + z});
}

inline Vec target(const Vec &g) { return pack({getc(g, 2), getc(g, 0)}); }

/// m((z,a,b,c),(ac+z,ab,b',c')) = (z, a, bb', c + b c')
inline Vec product(const Vec &u, const Vec &w) {
  return pack({getc(u, 0), getc(u, 2), getc(u, 4) * getc(w, 4),
               getc(u, 6) + getc(u, 4) * getc(w, 6)});
}

/// Same with the last component c + b' c.
inline Vec product_printed(const Vec &u, const Vec &w) {
  return pack({getc(u, 0), getc(u, 2), getc(u, 4) * getc(w, 4),
               getc(u, 6) + getc(w, 4) * getc(u, 6)});
}

/// t*w - s*w for w = dlog w ^ dz; coordinates (z, a, b, c) = (0, 1, 2, 3).
inline CMat Omega_coeff(const Vec &g) {
  cplx a = getc(g, 2), b = getc(g, 4), c = getc(g, 6);
  return detail::antisym(4, {{1, 2, c / b}, {1, 3, -1.0}, {2, 3, -a / b}, {0, 2, 1.0 / b}});
}

inline cplx sample_a(CounterRng &rng) { return rng.bernoulli(0.25) ? cplx(0.0) : rng.box(1.0); }

} // namespace zero

inline GroupoidChartModel zero_residue_groupoid(bool printed_product = false) {
  GroupoidChartModel g;
  g.name = printed_product ? "sympl-zero[printed-product]" : "sympl-zero";
  g.arrow_dim = 8;
  g.base_dim = 4;
  g.arrow_domain = zero::valid;
  g.s = {8, 4, zero::source, {}};
  g.t = {8, 4, zero::target, {}};
  g.unit = {4, 8, [](const Vec &p) { return zero::pack({getc(p, 2), getc(p, 0), 1.0, 0.0}); },
            {}};
  g.inv = {8, 8,
           [](const Vec &u) {
             cplx z = getc(u, 0), a = getc(u, 2), b = getc(u, 4), c = getc(u, 6);
             return zero::pack({a * c + z, a * b, 1.0 / b, -c / b});
           },
           zero::valid};
  g.product = printed_product ? zero::product_printed : zero::product;
  g.sampler.base = [](CounterRng &rng) {
    return zero::pack({zero::sample_a(rng), rng.box(1.0)});
  };
  g.sampler.arrow = [](CounterRng &rng) {
    return zero::pack({rng.box(1.0), zero::sample_a(rng), rng.annulus(0.5, 2.0), rng.box(1.0)});
  };
  g.sampler.next = [](const Vec &u, CounterRng &rng) {
    cplx z = getc(u, 0), a = getc(u, 2), b = getc(u, 4), c = getc(u, 6);
    return zero::pack({a * c + z, a * b, rng.annulus(0.5, 2.0), rng.box(1.0)});
  };
  const double ctol = g.composable_tol;
  g.lift = [ctol](const Vec &tp, const Vec &sp, CounterRng &rng) -> std::optional<Vec> {
    cplx w1 = getc(tp, 0), z1 = getc(tp, 2), w2 = getc(sp, 0), z2 = getc(sp, 2);
    if (std::abs(w1) > ctol) {
      cplx b = w2 / w1;
      if (std::abs(b) <= ctol)
        return std::nullopt;
      return zero::pack({z1, w1, b, (z2 - z1) / w1});
    }
    if (std::abs(w2) > ctol || std::abs(z2 - z1) > ctol)
      return std::nullopt;
    return zero::pack({z1, w1, rng.annulus(0.5, 2.0), rng.box(1.0)});
  };
  PairChart pc;
  pc.param = {12, 16,
              [](const Vec &q) {
                Vec u = q.head(8);
                cplx z = getc(u, 0), a = getc(u, 2), b = getc(u, 4), c = getc(u, 6);
                return concat(u, zero::pack({a * c + z, a * b, getc(q, 8), getc(q, 10)}));
              },
              [](const Vec &q) { return getc(q, 4) != cplx(0.0) && getc(q, 8) != cplx(0.0); }};
  auto arrow = g.sampler.arrow;
  pc.sample = [arrow](CounterRng &rng) {
    return concat(arrow(rng), zero::pack({rng.annulus(0.5, 2.0), rng.box(1.0)}));
  };
  g.pairs = pc;
  return g;
}

inline SymplecticModel symplectic_zero_residue_model() {
  SymplecticModel S;
  S.model = zero_residue_groupoid();
  S.omega_base = holomorphic_two_form(
      2,
      [](const Vec &p) { return detail::antisym(2, {{0, 1, 1.0 / getc(p, 0)}}); },
      [](const Vec &p) { return getc(p, 0) != cplx(0.0); });
  S.Omega = holomorphic_two_form(4, zero::Omega_coeff, zero::valid);
  // r d/dr ^ d/dx3 + d/dtheta ^ d/dx4 with w = x1 + i x2, z = x3 + i x4
  S.pi_bivector = [](const Vec &p) {
    Mat P = Mat::Zero(4, 4);
    auto put = [&P](int i, int j, double v) {
      P(i, j) += v;
      P(j, i) -= v;
    };
    put(0, 2, p[0]);
    put(1, 2, p[1]);
    put(1, 3, p[0]);
    put(0, 3, -p[1]);
    return P;
  };
  S.dense_arrow = [](CounterRng &rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Vec a = zero::pack({rng.box(1.0), rng.box(1.0), rng.annulus(0.5, 2.0), rng.box(1.0)});
      if (std::abs(getc(a, 2)) > 0.2)
        return a;
    }
    throw Error(ErrorCode::SamplerExhausted, "sympl-zero dense arrow");
  };
  return S;
}

// ---------------------------------------------------------------------------
// Action groupoid of C* x| C on C^2: (w, k).(p1, p2) = (w p1, p2 + k p1),
// group law (w, k)(w', k') = (w w', k' + k w'). Arrows (w, k, p1, p2), s = p.

inline GroupoidChartModel action_groupoid_model() {
  GroupoidChartModel g;
  g.name = "action-groupoid";
  g.arrow_dim = 8;
  g.base_dim = 4;
  g.arrow_domain = [](const Vec &u) {
    return u.size() == 8 && u.allFinite() && getc(u, 0) != cplx(0.0);
  };
  g.s = {8, 4, [](const Vec &u) -> Vec { return u.tail(4); }, {}};
  g.t = {8, 4,
         [](const Vec &u) {
           cplx w = getc(u, 0), k = getc(u, 2), p1 = getc(u, 4), p2 = getc(u, 6);
           return zero::pack({w * p1, p2 + k * p1});
         },
         {}};
  g.unit = {4, 8, [](const Vec &p) { return concat(zero::pack({1.0, 0.0}), p); }, {}};
  g.inv = {8, 8,
           [](const Vec &u) {
             cplx w = getc(u, 0), k = getc(u, 2), p1 = getc(u, 4), p2 = getc(u, 6);
             return zero::pack({1.0 / w, -k / w, w * p1, p2 + k * p1});
           },
           g.arrow_domain};
  g.product = [](const Vec &u, const Vec &v) {
    cplx w = getc(u, 0), k = getc(u, 2), w2 = getc(v, 0), k2 = getc(v, 2);
    return concat(zero::pack({w * w2, k2 + k * w2}), Vec(v.tail(4)));
  };
  g.sampler.base = [](CounterRng &rng) {
    return zero::pack({zero::sample_a(rng), rng.box(1.0)});
  };
  g.sampler.arrow = [](CounterRng &rng) {
    return zero::pack({rng.annulus(0.5, 2.0), rng.box(1.0), zero::sample_a(rng), rng.box(1.0)});
  };
  g.sampler.next = [](const Vec &u, CounterRng &rng) {
    cplx p1 = getc(u, 4), p2 = getc(u, 6);
    cplx w = rng.annulus(0.5, 2.0), k = rng.box(1.0);
    cplx q1 = p1 / w;
    return zero::pack({w, k, q1, p2 - k * q1});
  };
  return g;
}

/// Isomorphism from the zero-residue groupoid: (z,a,b,c) -> (1/b, -c/b, ab, ac+z).
inline SmoothMap zero_to_action_map() {
  return {8, 8,
          [](const Vec &u) {
            cplx z = getc(u, 0), a = getc(u, 2), b = getc(u, 4), c = getc(u, 6);
            return zero::pack({1.0 / b, -c / b, a * b, a * c + z});
          },
          zero::valid};
}

// ---------------------------------------------------------------------------
// ssc groupoid of the elliptic tangent bundle of (C, {0}): arrows (Z, zeta).

inline GroupoidChartModel ssc_surface_model() {
  GroupoidChartModel g;
  g.name = "ssc-surface";
  g.arrow_dim = 4;
  g.base_dim = 2;
  g.s = {4, 2, [](const Vec &u) -> Vec { return u.tail(2); }, {}};
  g.t = {4, 2,
         [](const Vec &u) {
           Vec p(2);
           setc(p, 0, getc(u, 2) * std::exp(getc(u, 0)));
           return p;
         },
         {}};
  g.unit = {2, 4, [](const Vec &p) { return concat(Vec::Zero(2), p); }, {}};
  g.inv = {4, 4,
           [](const Vec &u) {
             cplx Z = getc(u, 0), zeta = getc(u, 2);
             return zero::pack({-Z, zeta * std::exp(Z)});
           },
           {}};
  g.product = [](const Vec &u, const Vec &w) {
    return zero::pack({getc(u, 0) + getc(w, 0), getc(w, 2)});
  };
  auto draw_Z = [](CounterRng &rng) {
    return cplx(rng.uniform(-1, 1), rng.uniform(-M_PI, M_PI));
  };
  g.sampler.base = [](CounterRng &rng) { return zero::pack({zero::sample_a(rng)}); };
  g.sampler.arrow = [draw_Z](CounterRng &rng) {
    return zero::pack({draw_Z(rng), zero::sample_a(rng)});
  };
  g.sampler.next = [draw_Z](const Vec &u, CounterRng &rng) {
    cplx W = draw_Z(rng);
    return zero::pack({W, getc(u, 2) * std::exp(-W)});
  };
  return g;
}

// ---------------------------------------------------------------------------
// Candidate conventions for the integration Gamma of (x^2+y^2) d/dx ^ d/dy on
// R^2, arrows (Z, z) in C^2. The anchored endpoint is z; the other endpoint
// is z exp(E(z, Z)) with E = conj(z) Z or z conj(Z).

enum class GammaConvention {
  TargetAnchored_ZbarTimesZ, // t = z, s = z exp(conj(z) Z)
  SourceAnchored_ZbarTimesZ, // s = z, t = z exp(conj(z) Z)
  TargetAnchored_ZTimesZbar, // t = z, s = z exp(z conj(Z))
  SourceAnchored_ZTimesZbar, // s = z, t = z exp(z conj(Z))
};

inline constexpr std::array<GammaConvention, 4> all_gamma_conventions = {
    GammaConvention::TargetAnchored_ZbarTimesZ, GammaConvention::SourceAnchored_ZbarTimesZ,
    GammaConvention::TargetAnchored_ZTimesZbar, GammaConvention::SourceAnchored_ZTimesZbar};

inline std::string to_string(GammaConvention c) {
  switch (c) {
  case GammaConvention::TargetAnchored_ZbarTimesZ: return "t=z, s=z*exp(conj(z)*Z)";
  case GammaConvention::SourceAnchored_ZbarTimesZ: return "s=z, t=z*exp(conj(z)*Z)";
  case GammaConvention::TargetAnchored_ZTimesZbar: return "t=z, s=z*exp(z*conj(Z))";
  case GammaConvention::SourceAnchored_ZTimesZbar: return "s=z, t=z*exp(z*conj(Z))";
  }
  return "?";
}

inline GroupoidChartModel gamma_model(GammaConvention conv) {
  const bool target_anchored = conv == GammaConvention::TargetAnchored_ZbarTimesZ ||
                               conv == GammaConvention::TargetAnchored_ZTimesZbar;
  const bool zbar_Z = conv == GammaConvention::TargetAnchored_ZbarTimesZ ||
                      conv == GammaConvention::SourceAnchored_ZbarTimesZ;
  auto E = [zbar_Z](cplx z, cplx Z) { return zbar_Z ? std::conj(z) * Z : z * std::conj(Z); };
  auto other = [E](const Vec &u) {
    cplx Z = getc(u, 0), z = getc(u, 2);
    return z * std::exp(E(z, Z));
  };
  GroupoidChartModel g;
  g.name = "gamma[" + to_string(conv) + "]";
  g.arrow_dim = 4;
  g.base_dim = 2;
  SmoothMap anchor{4, 2, [](const Vec &u) -> Vec { return u.tail(2); }, {}};
  SmoothMap moved{4, 2, [other](const Vec &u) { return zero::pack({other(u)}); }, {}};
  g.t = target_anchored ? anchor : moved;
  g.s = target_anchored ? moved : anchor;
  g.unit = {2, 4, [](const Vec &p) { return concat(Vec::Zero(2), p); }, {}};
  g.inv = {4, 4,
           [E](const Vec &u) {
             cplx Z = getc(u, 0), z = getc(u, 2), e = E(z, Z);
             return zero::pack({-std::conj(std::exp(-e)) * Z, z * std::exp(e)});
           },
           {}};
  g.product = [E, target_anchored](const Vec &u, const Vec &w) {
    cplx Z = getc(u, 0), z = getc(u, 2), W = getc(w, 0), x = getc(w, 2);
    if (target_anchored)
      return zero::pack({Z + std::conj(std::exp(E(z, Z))) * W, z});
    return zero::pack({W + std::conj(std::exp(E(x, W))) * Z, x});
  };
  auto draw_Z = [](CounterRng &rng) { return rng.box(1.0); };
  g.sampler.base = [](CounterRng &rng) { return zero::pack({zero::sample_a(rng)}); };
  g.sampler.arrow = [draw_Z](CounterRng &rng) {
    return zero::pack({draw_Z(rng), zero::sample_a(rng)});
  };
  g.sampler.next = [draw_Z, target_anchored, zbar_Z, g](const Vec &u, CounterRng &rng) {
    cplx y = getc(g.s(u), 0);
    if (target_anchored)
      return zero::pack({draw_Z(rng), y});
    // solve w exp(E(w, W)) = y for W with w drawn
    if (y == cplx(0.0))
      return zero::pack({draw_Z(rng), 0.0});
    cplx w = rng.annulus(0.5, 1.5);
    cplx L = std::log(y / w);
    cplx W = zbar_Z ? L / std::conj(w) : std::conj(L / w);
    return zero::pack({W, w});
  };
  return g;
}

// ---------------------------------------------------------------------------
// Morphisms.

/// Target of phi_nonzero: the elliptic groupoid of (R^2, {0}), arrows (z, w)
/// with s = zw, t = z. Same chart as case1(2).
inline GroupoidChartModel nonzero_target_groupoid() {
  GroupoidChartModel h = case1_model(2);
  h.name = "elliptic:C";
  return h;
}

/// t*w - s*w on nonzero_target_groupoid for w = dx^dy / r^2.
inline FormField nonzero_target_Omega() {
  FormField W;
  W.degree = 2;
  W.ambient_dim = 4;
  W.kind = FormKind::Real;
  W.domain = [](const Vec &q) { return getc(q, 0) != cplx(0.0) && getc(q, 2) != cplx(0.0); };
  W.eval = [](const Vec &q, const std::vector<Vec> &vs) -> cplx {
    cplx a = getc(q, 0), b = getc(q, 2);
    cplx Ua = getc(vs[0], 0), Ub = getc(vs[0], 2), Va = getc(vs[1], 0), Vb = getc(vs[1], 2);
    cplx dsU = b * Ua + a * Ub, dsV = b * Va + a * Vb;
    return detail::area(Ua, Va) / std::norm(a) - detail::area(dsU, dsV) / std::norm(a * b);
  };
  return W;
}

/// phi(x1,x2,a,b) = (x1 + i x2, (a + i b)(x1 - i x2) + 1)
inline SmoothMap morphism_phi_nonzero() {
  return {4, 4,
          [](const Vec &g) {
            cplx z(g[0], g[1]), c(g[2], g[3]);
            return zero::pack({z, c * std::conj(z) + 1.0});
          },
          nonzero::valid};
}

/// Target of phi_zero: elliptic groupoid of (C^2, {z1 = 0}), arrows
/// (w1, w2, z1, z2) with s = (z1 z2, w2), t = (z1, w1), base (divisor
/// coordinate, other coordinate).
inline GroupoidChartModel zero_target_groupoid() {
  return permute_base(case1_model(4), {2, 3, 0, 1}, "elliptic:C2");
}

/// t*w - s*w on zero_target_groupoid for w = dlog p1 ^ dp2.
inline FormField zero_target_Omega() {
  FormField W;
  W.degree = 2;
  W.ambient_dim = 8;
  W.kind = FormKind::Complex;
  W.domain = [](const Vec &q) { return getc(q, 4) != cplx(0.0) && getc(q, 6) != cplx(0.0); };
  W.eval = [](const Vec &q, const std::vector<Vec> &vs) -> cplx {
    cplx z1 = getc(q, 4), z2 = getc(q, 6);
    const Vec &U = vs[0], &V = vs[1];
    auto d = [](const Vec &X, int i) { return getc(X, 2 * i); }; // 0:w1 1:w2 2:z1 3:z2
    cplx tw = (d(U, 2) * d(V, 0) - d(V, 2) * d(U, 0)) / z1;
    cplx S1U = z2 * d(U, 2) + z1 * d(U, 3), S1V = z2 * d(V, 2) + z1 * d(V, 3);
    cplx sw = (S1U * d(V, 1) - S1V * d(U, 1)) / (z1 * z2);
    return tw - sw;
  };
  return W;
}

/// phi(z,a,b,c) = (z1, z2, w1, w2) = (a, b, z, ac + z), stored in the
/// target chart's order (w1, w2, z1, z2).
inline SmoothMap morphism_phi_zero() {
  return {8, 8,
          [](const Vec &u) {
            cplx z = getc(u, 0), a = getc(u, 2), b = getc(u, 4), c = getc(u, 6);
            return zero::pack({z, a * c + z, a, b});
          },
          zero::valid};
}

/// (exp(conj(z) Z) - 1) / conj(z), by its power series when |z| < threshold.
inline cplx psi_quotient(cplx Z, cplx z, double threshold = 1e-6, double abs_tol = 1e-8) {
  cplx zb = std::conj(z);
  if (std::abs(z) >= threshold)
    return (std::exp(zb * Z) - 1.0) / zb;
  cplx term = Z, sum = 0.0;
  const double stop = abs_tol * 1e-3;
  for (int k = 1; k < 60; ++k) {
    sum += term;
    term *= zb * Z / static_cast<double>(k + 1);
    if (std::abs(term) < stop)
      break;
  }
  return sum;
}

/// psi(Z, z) = (Re z, Im z, Re q, Im q), q = (exp(conj(z) Z) - 1)/conj(z)
inline SmoothMap morphism_psi(double threshold = 1e-6, double abs_tol = 1e-8) {
  return {4, 4,
          [threshold, abs_tol](const Vec &u) {
            cplx Z = getc(u, 0), z = getc(u, 2);
            return zero::pack({z, psi_quotient(Z, z, threshold, abs_tol)});
          },
          {}};
}

// ---------------------------------------------------------------------------
// Formulas as printed, kept as regression fixtures.

namespace printed {

/// Multiplicative form as printed for the nonzero residue model.
inline FormField nonzero_Omega() {
  return two_form(
      4, FormKind::Real,
      [](const Vec &g) {
        double x1 = g[0], x2 = g[1], a = g[2], b = g[3], r2 = x1 * x1 + x2 * x2;
        double D = nonzero::Dfun(g);
        return detail::antisym(4, {{0, 1, (a * a + b * b) * r2 / D},
                                   {0, 2, -2 * b * x1 / D},
                                   {0, 3, (2 * a * x1 + 1) / D},
                                   {1, 2, -(2 * b * x2 + 1) / D},
                                   {1, 3, 2 * a * x2 / D}});
      },
      nonzero::valid);
}

/// Multiplicative form as printed for the zero residue model.
inline FormField zero_Omega() {
  return holomorphic_two_form(
      4,
      [](const Vec &g) {
        cplx a = getc(g, 2), b = getc(g, 4), c = getc(g, 6);
        return detail::antisym(4,
                               {{1, 2, c / b}, {1, 3, -1.0}, {2, 3, a / b}, {0, 2, 1.0 / b}});
      },
      zero::valid);
}

/// Inverse as printed for the nonzero residue model.
inline Vec nonzero_inverse(const Vec &g) {
  Vec q(4);
  q << nonzero::source(g), -g[2], -g[3];
  return q;
}

/// Action as printed: (w, z).(z1, z2) = (w z1, z2 + w z).
inline Vec action(cplx w, cplx z, const Vec &p) {
  return zero::pack({w * getc(p, 0), getc(p, 2) + w * z});
}

} // namespace printed

} // namespace egl
