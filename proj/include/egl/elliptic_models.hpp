#pragma once

#include <string>
#include <tuple>

#include "egl/divisor.hpp"
#include "egl/groupoid.hpp"

namespace egl {

namespace detail {

/// Real vector in [-1,1]^d; each aligned pair is zeroed with probability 1/8
/// so that samples also land on coordinate subspaces.
inline Vec sample_reals(int d, CounterRng &rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i)
    v[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i + 1 < d; i += 2)
    if (rng.bernoulli(0.125))
      v[i] = v[i + 1] = 0.0;
  return v;
}

inline cplx sample_normal_coordinate(CounterRng &rng) {
  if (rng.bernoulli(0.25))
    return 0.0;
  return rng.box(1.0);
}

} // namespace detail

/// Layout: arrows (x, y in R^{n-2k}, a in C^k, b in (C*)^k), base (x, v in C^k).
struct CaseIVLayout {
  int n, k;
  int r() const { return n - 2 * k; }
  int x() const { return 0; }
  int y() const { return r(); }
  int a(int j) const { return 2 * r() + 2 * j; }
  int b(int j) const { return 2 * r() + 2 * k + 2 * j; }
  int v(int j) const { return r() + 2 * j; }
  int arrow_dim() const { return 2 * n; }
};

inline GroupoidChartModel caseIV_model(int n, int k) {
  if (k < 1 || n < 2 * k)
    throw Error(ErrorCode::DimensionMismatch, "caseIV_model needs n >= 2k >= 2");
  const CaseIVLayout L{n, k};
  const int r = L.r(), ad = L.arrow_dim();
  GroupoidChartModel g;
  g.name = k == 1 ? "case1:" + std::to_string(n)
                  : "caseIV:" + std::to_string(n) + "," + std::to_string(k);
  g.arrow_dim = ad;
  g.base_dim = n;
  g.arrow_domain = [L](const Vec &a) {
    for (int j = 0; j < L.k; ++j)
      if (getc(a, L.b(j)) == cplx(0.0))
        return false;
    return true;
  };
  g.s = {ad, n,
         [L, r, n](const Vec &a) {
           Vec p(n);
           p.head(r) = a.segment(L.y(), r);
           for (int j = 0; j < L.k; ++j)
             setc(p, L.v(j), getc(a, L.a(j)) * getc(a, L.b(j)));
           return p;
         },
         {}};
  g.t = {ad, n,
         [L, r, n](const Vec &a) {
           Vec p(n);
           p.head(r) = a.segment(L.x(), r);
           for (int j = 0; j < L.k; ++j)
             setc(p, L.v(j), getc(a, L.a(j)));
           return p;
         },
         {}};
  g.unit = {n, ad,
            [L, r, ad](const Vec &p) {
              Vec a(ad);
              a.segment(L.x(), r) = p.head(r);
              a.segment(L.y(), r) = p.head(r);
              for (int j = 0; j < L.k; ++j) {
                setc(a, L.a(j), getc(p, L.v(j)));
                setc(a, L.b(j), 1.0);
              }
              return a;
            },
            {}};
  g.inv = {ad, ad,
           [L, r, ad](const Vec &a) {
             Vec q(ad);
             q.segment(L.x(), r) = a.segment(L.y(), r);
             q.segment(L.y(), r) = a.segment(L.x(), r);
             for (int j = 0; j < L.k; ++j) {
               cplx aj = getc(a, L.a(j)), bj = getc(a, L.b(j));
               setc(q, L.a(j), aj * bj);
               setc(q, L.b(j), 1.0 / bj);
             }
             return q;
           },
           g.arrow_domain};
  g.product = [L, r, ad](const Vec &u, const Vec &w) {
    Vec q(ad);
    q.segment(L.x(), r) = u.segment(L.x(), r);
    q.segment(L.y(), r) = w.segment(L.y(), r);
    for (int j = 0; j < L.k; ++j) {
      setc(q, L.a(j), getc(u, L.a(j)));
      setc(q, L.b(j), getc(u, L.b(j)) * getc(w, L.b(j)));
    }
    return q;
  };

  g.sampler.base = [L, r, n](CounterRng &rng) {
    Vec p(n);
    p.head(r) = detail::sample_reals(r, rng);
    for (int j = 0; j < L.k; ++j)
      setc(p, L.v(j), detail::sample_normal_coordinate(rng));
    return p;
  };
  g.sampler.arrow = [L, r, ad](CounterRng &rng) {
    Vec a(ad);
    a.segment(L.x(), r) = detail::sample_reals(r, rng);
    a.segment(L.y(), r) = detail::sample_reals(r, rng);
    for (int j = 0; j < L.k; ++j) {
      setc(a, L.a(j), detail::sample_normal_coordinate(rng));
      setc(a, L.b(j), rng.annulus(0.5, 2.0));
    }
    return a;
  };
  g.sampler.next = [L, r, ad](const Vec &u, CounterRng &rng) {
    Vec w(ad);
    w.segment(L.x(), r) = u.segment(L.y(), r);
    w.segment(L.y(), r) = detail::sample_reals(r, rng);
    for (int j = 0; j < L.k; ++j) {
      setc(w, L.a(j), getc(u, L.a(j)) * getc(u, L.b(j)));
      setc(w, L.b(j), rng.annulus(0.5, 2.0));
    }
    return w;
  };
  const double ctol = g.composable_tol;
  g.lift = [L, r, ad, ctol](const Vec &tp, const Vec &sp,
                            CounterRng &rng) -> std::optional<Vec> {
    Vec a(ad);
    a.segment(L.x(), r) = tp.head(r);
    a.segment(L.y(), r) = sp.head(r);
    for (int j = 0; j < L.k; ++j) {
      cplx v = getc(tp, L.v(j)), w = getc(sp, L.v(j));
      cplx b;
      if (std::abs(v) > ctol) {
        b = w / v;
        if (std::abs(b) <= ctol)
          return std::nullopt;
      } else {
        if (std::abs(w) > ctol)
          return std::nullopt;
        b = rng.annulus(0.5, 2.0);
      }
      setc(a, L.a(j), v);
      setc(a, L.b(j), b);
    }
    return a;
  };

  // composable pairs parametrized by (g, y', b')
  const int pd = ad + r + 2 * k;
  PairChart pc;
  pc.param = {pd, 2 * ad,
              [L, r, ad](const Vec &q) {
                Vec u = q.head(ad), w(ad);
                w.segment(L.x(), r) = u.segment(L.y(), r);
                w.segment(L.y(), r) = q.segment(ad, r);
                for (int j = 0; j < L.k; ++j) {
                  setc(w, L.a(j), getc(u, L.a(j)) * getc(u, L.b(j)));
                  setc(w, L.b(j), getc(q, ad + r + 2 * j));
                }
                return concat(u, w);
              },
              {}};
  auto arrow_sampler = g.sampler.arrow;
  pc.sample = [arrow_sampler, L, r, pd, ad](CounterRng &rng) {
    Vec q(pd);
    q.head(ad) = arrow_sampler(rng);
    q.segment(ad, r) = detail::sample_reals(r, rng);
    for (int j = 0; j < L.k; ++j)
      setc(q, ad + r + 2 * j, rng.annulus(0.5, 2.0));
    return q;
  };
  g.pairs = pc;
  return g;
}

inline GroupoidChartModel case1_model(int n) {
  if (n < 2)
    throw Error(ErrorCode::DimensionMismatch, "case1_model needs n >= 2");
  return caseIV_model(n, 1);
}

/// beta(x,y,a,b) = ((x,a),(y,ab)) = (t, s), an arrow of the pair groupoid.
inline SmoothMap beta_map(const GroupoidChartModel &g) {
  return {g.point_dim(), 2 * g.base_dim,
          [g](const Vec &a) { return concat(g.t(a), g.s(a)); }, g.arrow_domain};
}

/// Pair groupoid M x M: arrow (p, q) goes from q to p.
inline GroupoidChartModel pair_model(int n) {
  GroupoidChartModel g;
  g.name = "pair:" + std::to_string(n);
  g.arrow_dim = 2 * n;
  g.base_dim = n;
  g.s = {2 * n, n, [n](const Vec &a) -> Vec { return a.tail(n); }, {}};
  g.t = {2 * n, n, [n](const Vec &a) -> Vec { return a.head(n); }, {}};
  g.unit = {n, 2 * n, [](const Vec &p) { return concat(p, p); }, {}};
  g.inv = {2 * n, 2 * n, [n](const Vec &a) { return concat(a.tail(n), a.head(n)); }, {}};
  g.product = [n](const Vec &u, const Vec &w) { return concat(u.head(n), w.tail(n)); };
  g.sampler.base = [n](CounterRng &rng) { return detail::sample_reals(n, rng); };
  g.sampler.arrow = [n](CounterRng &rng) {
    return concat(detail::sample_reals(n, rng), detail::sample_reals(n, rng));
  };
  g.sampler.next = [n](const Vec &u, CounterRng &rng) {
    return concat(u.tail(n), detail::sample_reals(n, rng));
  };
  g.lift = [](const Vec &tp, const Vec &sp, CounterRng &) -> std::optional<Vec> {
    return concat(tp, sp);
  };
  PairChart pc;
  pc.param = {3 * n, 4 * n,
              [n](const Vec &q) {
                return concat(concat(q.head(n), q.segment(n, n)),
                              concat(q.segment(n, n), q.tail(n)));
              },
              {}};
  pc.sample = [n](CounterRng &rng) {
    Vec q(3 * n);
    for (int i = 0; i < 3 * n; ++i)
      q[i] = rng.uniform(-1.0, 1.0);
    return q;
  };
  g.pairs = pc;
  return g;
}

/// case1 for the smooth divisor {z_j = 0} inside the normal crossing chart of
/// DivisorLocalModel(n, k): the other normal factors are treated as real
/// coordinates. Base layout is that of the normal crossing chart.
inline GroupoidChartModel case1_on_factor(int n, int k, int j) {
  if (j < 0 || j >= k)
    throw Error(ErrorCode::DimensionMismatch, "case1_on_factor: factor index");
  GroupoidChartModel g = case1_model(n);
  // case1 base: (reals..., v) with reals = (x, z_1..z_k without z_j)
  const int r = n - 2 * k;
  std::vector<int> perm(n);
  for (int i = 0; i < r; ++i)
    perm[i] = i;
  int cursor = r;
  for (int f = 0; f < k; ++f) {
    int dst = r + 2 * f;
    if (f == j) {
      perm[dst] = n - 2;
      perm[dst + 1] = n - 1;
    } else {
      perm[dst] = cursor;
      perm[dst + 1] = cursor + 1;
      cursor += 2;
    }
  }
  return permute_base(g, perm, "case1@" + std::to_string(j + 1) + ":" + std::to_string(n));
}

/// Case II chart: arrows (case1 data, delta in Z/2), delta stored last.
/// (g, d) goes from alpha^d(s(g)) to t(g); alpha conjugates normal coordinates.
inline GroupoidChartModel case2_quotient_model(int n) {
  GroupoidChartModel c1 = case1_model(n);
  const CaseIVLayout L{n, 1};
  const int ad = L.arrow_dim();
  auto alpha_base = [L](Vec p) {
    p[L.v(0) + 1] = -p[L.v(0) + 1];
    return p;
  };
  auto alpha_arrow = [L](Vec a) {
    a[L.a(0) + 1] = -a[L.a(0) + 1];
    a[L.b(0) + 1] = -a[L.b(0) + 1];
    return a;
  };
  auto delta = [ad](const Vec &a) { return a[ad] != 0.0; };
  GroupoidChartModel g;
  g.name = "case2:" + std::to_string(n);
  g.arrow_dim = ad;
  g.discrete_dim = 1;
  g.base_dim = n;
  g.hausdorff = true;
  g.arrow_domain = [c1, ad](const Vec &a) {
    return (a[ad] == 0.0 || a[ad] == 1.0) && c1.valid_arrow(a.head(ad));
  };
  g.s = {ad + 1, n,
         [c1, ad, delta, alpha_base](const Vec &a) {
           Vec p = c1.s(a.head(ad));
           return delta(a) ? alpha_base(p) : p;
         },
         {}};
  g.t = {ad + 1, n, [c1, ad](const Vec &a) { return c1.t(a.head(ad)); }, {}};
  g.unit = {n, ad + 1, [c1](const Vec &p) { return concat(c1.unit(p), Vec::Zero(1)); }, {}};
  g.inv = {ad + 1, ad + 1,
           [c1, ad, delta, alpha_arrow](const Vec &a) {
             Vec gi = c1.inv(a.head(ad));
             if (delta(a))
               gi = alpha_arrow(gi);
             Vec d(1);
             d[0] = a[ad];
             return concat(gi, d);
           },
           {}};
  g.product = [c1, ad, delta, alpha_arrow](const Vec &u, const Vec &w) {
    Vec h = w.head(ad);
    if (delta(u))
      h = alpha_arrow(h);
    Vec d(1);
    d[0] = (delta(u) != delta(w)) ? 1.0 : 0.0;
    return concat(c1.m(u.head(ad), h), d);
  };
  g.sampler.base = c1.sampler.base;
  g.sampler.arrow = [c1](CounterRng &rng) {
    Vec d(1);
    Vec a = c1.sampler.arrow(rng);
    d[0] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    return concat(a, d);
  };
  g.sampler.next = [c1, ad, delta, alpha_arrow](const Vec &u, CounterRng &rng) {
    Vec h = c1.sampler.next(u.head(ad), rng);
    if (delta(u))
      h = alpha_arrow(h);
    Vec d(1);
    d[0] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    return concat(h, d);
  };
  return g;
}

struct IdealPullback {
  double s_value, t_value, ratio;
};

/// (prod |a_j b_j|^2, prod |a_j|^2, prod |b_j|^2) for a caseIV arrow.
inline IdealPullback elliptic_ideal_pullback(const GroupoidChartModel &model, const Vec &g, int n,
                                             int k) {
  if (!model.valid_arrow(g))
    throw Error(ErrorCode::ChartInvalid, "elliptic_ideal_pullback: invalid arrow");
  const CaseIVLayout L{n, k};
  IdealPullback r{1.0, 1.0, 1.0};
  for (int j = 0; j < k; ++j) {
    cplx a = getc(g, L.a(j)), b = getc(g, L.b(j));
    r.s_value *= std::norm(a * b);
    r.t_value *= std::norm(a);
    r.ratio *= std::norm(b);
  }
  return r;
}

} // namespace egl
