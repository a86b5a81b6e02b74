#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egl/geometry.hpp"
#include "egl/rng.hpp"

namespace egl {

/// Draws arrows. next(g) must return h with t(h) = s(g) (up to rounding).
struct Sampler {
  std::function<Vec(CounterRng &)> arrow;
  std::function<Vec(const Vec &, CounterRng &)> next;
  std::function<Vec(CounterRng &)> base;
};

/// Parametrization q -> (g, h) of composable pairs, used to produce tangent
/// vectors to the composable locus.
struct PairChart {
  SmoothMap param;
  std::function<Vec(CounterRng &)> sample;
};

/// Arrow from `source` to `target`, if the chart has one; free parameters drawn
/// from the stream.
using Lift = std::function<std::optional<Vec>(const Vec &target, const Vec &source, CounterRng &)>;

struct GroupoidChartModel {
  std::string name;
  int arrow_dim = 0;
  int base_dim = 0;
  int discrete_dim = 0; // trailing coordinates not differentiated (e.g. a Z/2 label)
  SmoothMap s, t, inv, unit;
  std::function<Vec(const Vec &, const Vec &)> product; // assumes a valid composable pair
  Predicate arrow_domain;
  Predicate base_domain;
  double composable_tol = 1e-9;
  bool hausdorff = true;
  std::optional<SmoothMap> constraint; // arrows are its zero set when present
  Sampler sampler;
  std::optional<PairChart> pairs;
  Lift lift;

  int point_dim() const { return arrow_dim + discrete_dim; }
  bool valid_arrow(const Vec &g) const {
    return g.size() == point_dim() && g.allFinite() && (!arrow_domain || arrow_domain(g));
  }
  bool valid_base(const Vec &p) const {
    return p.size() == base_dim && p.allFinite() && (!base_domain || base_domain(p));
  }
  double composable_gap(const Vec &g, const Vec &h) const {
    Vec sg = s(g);
    return sup_dist(sg, t(h)) / std::max(1.0, sg.cwiseAbs().maxCoeff());
  }
  bool composable(const Vec &g, const Vec &h) const {
    return composable_gap(g, h) <= composable_tol;
  }
  Vec m(const Vec &g, const Vec &h) const {
    if (!valid_arrow(g) || !valid_arrow(h))
      throw Error(ErrorCode::ChartInvalid, name + ": arrow outside chart");
    if (!composable(g, h))
      throw Error(ErrorCode::NotComposable, name + ": s(g) != t(h)");
    return product(g, h);
  }
  /// multiplication on concatenated pairs (g, h)
  SmoothMap mult_map() const {
    GroupoidChartModel self = *this;
    int d = point_dim();
    SmoothMap f;
    f.domain_dim = 2 * d;
    f.codomain_dim = d;
    f.eval = [self, d](const Vec &gh) { return self.m(gh.head(d), gh.tail(d)); };
    f.domain = [self, d](const Vec &gh) {
      return self.valid_arrow(gh.head(d)) && self.valid_arrow(gh.tail(d));
    };
    return f;
  }
};

/// f restricted to the first `cont` coordinates with the remaining ones frozen.
inline SmoothMap restrict_continuous(const SmoothMap &f, const Vec &frozen, int cont) {
  if (cont == f.domain_dim)
    return f;
  SmoothMap r;
  r.domain_dim = cont;
  r.codomain_dim = f.codomain_dim;
  Vec tail = frozen.tail(f.domain_dim - cont);
  r.eval = [f, tail](const Vec &x) { return f.eval(concat(x, tail)); };
  r.domain = [f, tail](const Vec &x) { return f.contains(concat(x, tail)); };
  return r;
}

/// Projection of concatenated pairs onto one factor.
inline SmoothMap pair_projection(int d, int which) {
  return {2 * d, d, [d, which](const Vec &gh) -> Vec { return which == 0 ? gh.head(d) : gh.tail(d); }, {}};
}

/// Relabel base coordinates: new[i] = old[perm[i]].
inline GroupoidChartModel permute_base(const GroupoidChartModel &g, const std::vector<int> &perm,
                                       const std::string &name) {
  const int n = g.base_dim;
  if (static_cast<int>(perm.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "permute_base: permutation size");
  std::vector<int> inv_perm(n);
  for (int i = 0; i < n; ++i)
    inv_perm[perm[i]] = i;
  auto fwd = [perm, n](const Vec &p) {
    Vec q(n);
    for (int i = 0; i < n; ++i)
      q[i] = p[perm[i]];
    return q;
  };
  auto back = [inv_perm, n](const Vec &q) {
    Vec p(n);
    for (int i = 0; i < n; ++i)
      p[i] = q[inv_perm[i]];
    return p;
  };
  GroupoidChartModel r = g;
  r.name = name;
  r.s.eval = [g, fwd](const Vec &a) { return fwd(g.s(a)); };
  r.t.eval = [g, fwd](const Vec &a) { return fwd(g.t(a)); };
  r.unit.eval = [g, back](const Vec &p) { return g.unit(back(p)); };
  r.unit.domain = [g, back](const Vec &p) { return g.unit.contains(back(p)); };
  if (g.base_domain)
    r.base_domain = [g, back](const Vec &p) { return g.base_domain(back(p)); };
  if (g.sampler.base)
    r.sampler.base = [g, fwd](CounterRng &rng) { return fwd(g.sampler.base(rng)); };
  if (g.lift)
    r.lift = [g, back](const Vec &tp, const Vec &sp, CounterRng &rng) {
      return g.lift(back(tp), back(sp), rng);
    };
  return r;
}

namespace detail {

inline SmoothMap endpoints_map(const GroupoidChartModel &g) {
  SmoothMap f;
  f.domain_dim = g.point_dim();
  f.codomain_dim = 2 * g.base_dim;
  f.eval = [g](const Vec &a) { return concat(g.t(a), g.s(a)); };
  f.domain = [g](const Vec &a) { return g.valid_arrow(a); };
  return f;
}

} // namespace detail

/// Strong fibre product G1 x_{MxM} G2: arrows (g1, g2) with equal endpoints.
inline GroupoidChartModel fibre_product(const GroupoidChartModel &m1, const GroupoidChartModel &m2,
                                        int transversality_samples = 32) {
  if (m1.base_dim != m2.base_dim)
    throw Error(ErrorCode::DimensionMismatch, "fibre_product: different bases");
  if (m1.discrete_dim || m2.discrete_dim)
    throw Error(ErrorCode::DimensionMismatch, "fibre_product: discrete parts unsupported");
  if (!m1.lift || !m2.lift)
    throw Error(ErrorCode::NotTransverse, "fibre_product: factors need endpoint lifts");
  const int d1 = m1.point_dim(), d2 = m2.point_dim(), n = m1.base_dim;
  auto first = [d1](const Vec &a) -> Vec { return a.head(d1); };
  auto second = [d1, d2](const Vec &a) -> Vec { return a.segment(d1, d2); };

  GroupoidChartModel r;
  r.name = "fibre:" + m1.name + "," + m2.name;
  r.arrow_dim = d1 + d2;
  r.base_dim = n;
  r.composable_tol = std::max(m1.composable_tol, m2.composable_tol);
  r.hausdorff = m1.hausdorff && m2.hausdorff;
  r.s = {d1 + d2, n, [m1, first](const Vec &a) { return m1.s(first(a)); }, {}};
  r.t = {d1 + d2, n, [m1, first](const Vec &a) { return m1.t(first(a)); }, {}};
  r.inv = {d1 + d2, d1 + d2,
           [m1, m2, first, second](const Vec &a) {
             return concat(m1.inv(first(a)), m2.inv(second(a)));
           },
           {}};
  r.unit = {n, d1 + d2, [m1, m2](const Vec &p) { return concat(m1.unit(p), m2.unit(p)); }, {}};
  r.product = [m1, m2, first, second](const Vec &g, const Vec &h) {
    return concat(m1.m(first(g), first(h)), m2.m(second(g), second(h)));
  };
  r.arrow_domain = [m1, m2, first, second](const Vec &a) {
    return m1.valid_arrow(first(a)) && m2.valid_arrow(second(a));
  };
  r.base_domain = [m1, m2](const Vec &p) { return m1.valid_base(p) && m2.valid_base(p); };
  SmoothMap c;
  c.domain_dim = d1 + d2;
  c.codomain_dim = 2 * n;
  c.eval = [m1, m2, first, second](const Vec &a) {
    Vec g1 = first(a), g2 = second(a);
    return Vec(concat(m1.t(g1) - m2.t(g2), m1.s(g1) - m2.s(g2)));
  };
  r.constraint = c;

  // Draw from one factor and lift the endpoints into the other.
  auto draw = [m1, m2](auto &&from_first, auto &&from_second, CounterRng &rng) -> Vec {
    for (int attempt = 0; attempt < 256; ++attempt) {
      if (rng.bernoulli(0.5)) {
        Vec g1 = from_first(rng);
        if (auto g2 = m2.lift(m1.t(g1), m1.s(g1), rng))
          return concat(g1, *g2);
      } else {
        Vec g2 = from_second(rng);
        if (auto g1 = m1.lift(m2.t(g2), m2.s(g2), rng))
          return concat(*g1, g2);
      }
    }
    throw Error(ErrorCode::SamplerExhausted, "fibre_product: no liftable arrow found");
  };
  r.sampler.arrow = [m1, m2, draw](CounterRng &rng) {
    return draw([&](CounterRng &q) { return m1.sampler.arrow(q); },
                [&](CounterRng &q) { return m2.sampler.arrow(q); }, rng);
  };
  r.sampler.next = [m1, m2, draw, first, second](const Vec &g, CounterRng &rng) {
    Vec g1 = first(g), g2 = second(g);
    return draw([&](CounterRng &q) { return m1.sampler.next(g1, q); },
                [&](CounterRng &q) { return m2.sampler.next(g2, q); }, rng);
  };
  r.sampler.base = m1.sampler.base;
  r.lift = [m1, m2](const Vec &tp, const Vec &sp, CounterRng &rng) -> std::optional<Vec> {
    auto g1 = m1.lift(tp, sp, rng);
    if (!g1)
      return std::nullopt;
    auto g2 = m2.lift(tp, sp, rng);
    if (!g2)
      return std::nullopt;
    return concat(*g1, *g2);
  };

  // Transversality of (t,s)_1 and (t,s)_2 on sampled arrows.
  ToleranceProfile prof;
  SmoothMap e1 = detail::endpoints_map(m1), e2 = detail::endpoints_map(m2);
  CounterRng rng(0, stream_id("fibre-transversality/" + r.name));
  for (int i = 0; i < transversality_samples; ++i) {
    Vec a = r.sampler.arrow(rng);
    Mat J(2 * n, d1 + d2);
    J << jacobian(e1, first(a), prof), jacobian(e2, second(a), prof);
    Eigen::JacobiSVD<Mat> svd(J);
    const Vec &sv = svd.singularValues();
    int rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-7 * std::max(1.0, sv[0]))
      ++rank;
    if (rank < 2 * n)
      throw Error(ErrorCode::NotTransverse, r.name + ": combined Jacobian has rank " +
                                                std::to_string(rank) + " < " +
                                                std::to_string(2 * n));
  }
  return r;
}

} // namespace egl
