#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "egl/verify.hpp"

namespace egl {

inline const std::vector<std::string> &check_names() {
  static const std::vector<std::string> names{"axioms",    "algebroid", "symplectic", "multiplicative",
                                              "morphisms", "erratum",   "poisson",    "apath"};
  return names;
}

inline const std::map<std::string, long long> &default_samples() {
  static const std::map<std::string, long long> d{
      {"axioms", 10000}, {"algebroid", 100}, {"symplectic", 1000}, {"multiplicative", 1000},
      {"morphisms", 10000}, {"erratum", 1000}, {"poisson", 100}, {"apath", 20}};
  return d;
}

struct ModelInfo {
  std::string name;
  std::string description;
};

inline const std::vector<ModelInfo> &model_catalog() {
  static const std::vector<ModelInfo> m{
      {"case1", "elliptic groupoid of (R^n, {z=0}); --dim n (default 4)"},
      {"caseIV:k", "normal crossing chart with k factors; --dim n >= 2k (default 2k)"},
      {"case2", "Z/2 quotient of case1 by conjugation of z; --dim n (default 4)"},
      {"sympl-nonzero", "symplectic integration, nonzero elliptic residue, base R^2"},
      {"sympl-zero", "symplectic integration, zero elliptic residue, base C^2"},
      {"ssc-surface", "source simply connected model over (C, {0})"},
      {"action-groupoid", "action groupoid of C* x| C on C^2"},
      {"pair", "pair groupoid of R^n; --dim n (default 2)"},
      {"fibre:A,B", "strong fibre product; A, B in {case1, pair}, case1 factors on successive z_j"},
  };
  return m;
}

/// A constructed model with everything the checks need.
struct ModelBundle {
  std::string name;
  int n = 0;
  GroupoidChartModel model;
  std::optional<SymplecticModel> symplectic;
  FrameFn expected_frame;
  std::vector<std::string> checks;
};

namespace detail {

inline int parse_positive(const std::string &s, const std::string &what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size() && v > 0)
      return v;
  } catch (const std::exception &) {
  }
  throw Error(ErrorCode::ConfigError, what + ": expected a positive integer, got '" + s + "'");
}

inline FrameFn elliptic_frame(int n, int k) {
  return [n, k](const Point &p) { return algebroid_frame(DivisorLocalModel(n, k), p).vectors; };
}

inline FrameFn residue_frame(ResidueVariant v) {
  auto f = residue_model_frame(v);
  return [f](const Point &p) { return f(p).vectors; };
}

inline FrameFn full_tangent(int n) {
  return [n](const Point &) {
    std::vector<Vec> out;
    for (int i = 0; i < n; ++i)
      out.push_back(Vec::Unit(n, i));
    return out;
  };
}

inline void require_dim(const std::optional<int> &dim, int fixed, const std::string &model) {
  if (dim && *dim != fixed)
    throw Error(ErrorCode::ConfigError,
                model + " lives on a base of dimension " + std::to_string(fixed) + ", not " + std::to_string(*dim));
}

} // namespace detail

/// Builds a model by CLI name. Throws ConfigError on unknown names or bad sizes.
inline ModelBundle make_model(const std::string &name, std::optional<int> dim = {}, std::optional<int> k = {}) {
  ModelBundle b;
  b.name = name;
  auto wrap = [&](auto &&build) {
    try {
      build();
    } catch (const Error &e) {
      if (e.code() == ErrorCode::DimensionMismatch)
        throw Error(ErrorCode::ConfigError, name + ": " + e.what());
      throw;
    }
  };
  if (name == "case1") {
    wrap([&] {
      b.n = dim.value_or(4);
      b.model = case1_model(b.n);
      b.expected_frame = detail::elliptic_frame(b.n, 1);
    });
    b.checks = {"axioms", "algebroid", "morphisms", "apath"};
  } else if (name == "caseIV" || name.rfind("caseIV:", 0) == 0) {
    int kk;
    if (name == "caseIV") {
      if (!k)
        throw Error(ErrorCode::ConfigError, "caseIV needs a factor count: caseIV:k or --k");
      kk = *k;
    } else {
      kk = detail::parse_positive(name.substr(7), "caseIV factor count");
      if (k && *k != kk)
        throw Error(ErrorCode::ConfigError, "caseIV: --k disagrees with the model name");
    }
    wrap([&] {
      b.n = dim.value_or(2 * kk);
      b.model = caseIV_model(b.n, kk);
      b.expected_frame = detail::elliptic_frame(b.n, kk);
    });
    b.checks = {"axioms", "algebroid", "morphisms"};
  } else if (name == "case2") {
    wrap([&] {
      b.n = dim.value_or(4);
      b.model = case2_quotient_model(b.n);
      b.expected_frame = detail::elliptic_frame(b.n, 1);
    });
    b.checks = {"axioms", "algebroid"};
  } else if (name == "sympl-nonzero") {
    detail::require_dim(dim, 2, name);
    b.n = 2;
    b.symplectic = symplectic_nonzero_residue_model();
    b.model = b.symplectic->model;
    b.expected_frame = detail::residue_frame(ResidueVariant::Nonzero);
    b.checks = {"axioms", "algebroid", "symplectic", "multiplicative", "morphisms", "erratum", "poisson"};
  } else if (name == "sympl-zero") {
    detail::require_dim(dim, 4, name);
    b.n = 4;
    b.symplectic = symplectic_zero_residue_model();
    b.model = b.symplectic->model;
    b.expected_frame = detail::residue_frame(ResidueVariant::Zero);
    b.checks = {"axioms", "algebroid", "symplectic", "multiplicative", "morphisms", "erratum", "poisson"};
  } else if (name == "ssc-surface") {
    detail::require_dim(dim, 2, name);
    b.n = 2;
    b.model = ssc_surface_model();
    b.expected_frame = detail::elliptic_frame(2, 1);
    b.checks = {"axioms", "algebroid"};
  } else if (name == "action-groupoid") {
    detail::require_dim(dim, 4, name);
    b.n = 4;
    b.model = action_groupoid_model();
    b.expected_frame = detail::residue_frame(ResidueVariant::Zero);
    b.checks = {"axioms", "algebroid"};
  } else if (name == "pair") {
    wrap([&] {
      b.n = dim.value_or(2);
      b.model = pair_model(b.n);
      b.expected_frame = detail::full_tangent(b.n);
    });
    b.checks = {"axioms", "algebroid"};
  } else if (name.rfind("fibre:", 0) == 0) {
    std::string rest = name.substr(6);
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::ConfigError, "fibre:A,B needs two components");
    std::vector<std::string> parts{rest.substr(0, comma), rest.substr(comma + 1)};
    int kk = 0;
    for (const auto &p : parts) {
      if (p == "case1")
        ++kk;
      else if (p != "pair")
        throw Error(ErrorCode::ConfigError, "fibre component '" + p + "' is not one of case1, pair");
    }
    wrap([&] {
      b.n = dim.value_or(std::max(4, 2 * kk));
      int j = 0;
      std::vector<GroupoidChartModel> comps;
      for (const auto &p : parts)
        comps.push_back(p == "case1" ? case1_on_factor(b.n, std::max(kk, 1), j++) : pair_model(b.n));
      b.model = fibre_product(comps[0], comps[1]);
      b.expected_frame = kk ? detail::elliptic_frame(b.n, kk) : detail::full_tangent(b.n);
    });
    b.checks = {"axioms", "algebroid"};
  } else {
    throw Error(ErrorCode::ConfigError, "unknown model '" + name + "'");
  }
  return b;
}

// ---------------------------------------------------------------------------
// Regression reports: the printed formula must violate an identity.

/// Pass iff the largest residual exceeds `threshold`.
inline CheckReport regression_report(const std::string &check, const std::string &model, double threshold,
                                     std::uint64_t seed, const ToleranceProfile &prof,
                                     const std::vector<std::pair<double, Vec>> &samples) {
  CheckReport r(check, model, threshold, seed, prof);
  r.mode = "regression";
  r.notes.push_back("the printed formula must violate the identity");
  const Vec *worst = nullptr;
  for (const auto &[res, x] : samples) {
    ++r.attempted;
    if (res > threshold)
      ++r.passed;
    if (std::isfinite(res) && res >= r.max_residual) {
      r.max_residual = res;
      worst = &x;
    }
  }
  r.pass = r.max_residual > threshold;
  if (!r.pass && worst)
    r.witnesses.push_back({"printed formula agrees with the identity",
                           std::vector<double>(worst->data(), worst->data() + worst->size()), r.max_residual});
  return r;
}

inline double associativity_residual(const std::function<Vec(const Vec &, const Vec &)> &P, const Vec &g,
                                     const Vec &h, const Vec &k) {
  return sup_dist(P(P(g, h), k), P(g, P(h, k)));
}

/// Derived vs printed product of the zero residue model.
inline std::vector<CheckReport> erratum_zero_product(long long samples, std::uint64_t seed,
                                                     const ToleranceProfile &prof) {
  GroupoidChartModel G = zero_residue_groupoid();
  CounterRng rng(seed, stream_id("erratum/zero-product"));
  CheckReport derived("erratum:product-derived", G.name, prof.abs_tol, seed, prof);
  std::vector<std::pair<double, Vec>> printed;
  for (long long i = 0; i < samples; ++i) {
    Vec g = G.sampler.arrow(rng);
    Vec h = G.sampler.next(g, rng);
    Vec k = G.sampler.next(h, rng);
    Vec x = concat(concat(g, h), k);
    derived.record(associativity_residual(zero::product, g, h, k), "(gh)k != g(hk)", x);
    printed.push_back({associativity_residual(zero::product_printed, g, h, k), x});
  }
  return {derived, regression_report("erratum:product-printed", G.name, 1e-2, seed, prof, printed)};
}

/// Derived vs printed inverse of the nonzero residue model: g inv(g) = u(t(g)).
inline std::vector<CheckReport> erratum_nonzero_inverse(long long samples, std::uint64_t seed,
                                                        const ToleranceProfile &prof) {
  GroupoidChartModel G = nonzero_residue_groupoid();
  CounterRng rng(seed, stream_id("erratum/nonzero-inverse"));
  CheckReport derived("erratum:inverse-derived", G.name, prof.abs_tol, seed, prof);
  std::vector<std::pair<double, Vec>> printed;
  for (long long i = 0; i < samples; ++i) {
    Vec g = G.sampler.arrow(rng);
    Vec u = G.unit(G.t(g));
    derived.record(sup_dist(G.product(g, G.inv(g)), u), "g inv(g) != u(t(g))", g);
    printed.push_back({sup_dist(G.product(g, printed::nonzero_inverse(g)), u), g});
  }
  return {derived, regression_report("erratum:inverse-printed", G.name, 1e-2, seed, prof, printed)};
}

/// Printed multiplicative forms: the nonzero residue one against t*w - s*w, the zero residue one against dOmega = 0.
inline std::vector<CheckReport> erratum_printed_forms(const SymplecticModel &S, long long samples,
                                                      std::uint64_t seed, const ToleranceProfile &prof) {
  CounterRng rng(seed, stream_id("erratum/forms/" + S.model.name));
  std::vector<std::pair<double, Vec>> printed;
  const int d = S.model.arrow_dim;
  const bool nonzero_model = S.model.name == "sympl-nonzero";
  FormField P = nonzero_model ? printed::nonzero_Omega() : printed::zero_Omega();
  for (long long i = 0; i < samples; ++i) {
    Vec g = S.dense_arrow(rng);
    double worst = 0.0;
    if (nonzero_model) {
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
          std::vector<Vec> vs{Vec::Unit(d, a), Vec::Unit(d, b)};
          cplx ref = pullback(S.model.t, S.omega_base, g, vs, prof) - pullback(S.model.s, S.omega_base, g, vs, prof);
          worst = std::max(worst, std::abs(P(g, vs) - ref));
        }
    } else {
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
          for (int c = b + 1; c < d; ++c)
            worst = std::max(worst, std::abs(exterior_derivative(
                                        P, g, {Vec::Unit(d, a), Vec::Unit(d, b), Vec::Unit(d, c)}, prof)));
    }
    printed.push_back({worst, g});
  }
  return {regression_report(nonzero_model ? "erratum:Omega-printed-pullback" : "erratum:Omega-printed-closed",
                            S.model.name, 1e-2, seed, prof, printed)};
}

// ---------------------------------------------------------------------------
// Poisson: Jacobi identity and anchor span of pi

inline std::vector<CheckReport> check_poisson(const ModelBundle &b, long long points, std::uint64_t seed,
                                              const ToleranceProfile &prof) {
  const SymplecticModel &S = *b.symplectic;
  CheckReport jac("poisson:jacobi", b.name, prof.rel_tol, seed, prof);
  CheckReport span("poisson:anchor-span", b.name, prof.subspace_tol, seed, prof);
  CounterRng rng(seed, stream_id(check_stream_label("poisson", b.name)));
  for (long long i = 0; i < points; ++i) {
    Vec p = S.model.sampler.base(rng);
    jac.record(check_poisson_jacobi(S.pi_bivector, b.n, p, prof), "[pi, pi] != 0", p);
    Mat P = S.pi_bivector(p);
    std::vector<Vec> cols;
    for (int j = 0; j < b.n; ++j)
      cols.push_back(P.col(j));
    span.record(largest_principal_angle(cols, b.expected_frame(p)), "pi#(T*M) != algebroid", p);
  }
  return {jac, span};
}

// ---------------------------------------------------------------------------
// A-paths: rescaling random polar curves towards the divisor

inline std::vector<CheckReport> check_apath(const ModelBundle &b, long long curves, std::uint64_t seed,
                                            const ToleranceProfile &prof) {
  const int n = b.n;
  const double exact_tol = 1e-12;
  CheckReport coeff("apath:coefficients", b.name, exact_tol, seed, prof);
  CheckReport limit("apath:limit", b.name, exact_tol, seed, prof);
  CheckReport anchor("apath:anchor", b.name, prof.rel_tol, seed, prof);
  coeff.notes.push_back("max |a_t(tau) - a_1(tau)| over t = 1, 1e-1, ..., 1e-6");
  limit.notes.push_back("max(|x_t - x|, ||z_t| - t r| / t): base path is (x, t r e^{i theta}) -> (x, 0)");
  anchor.notes.push_back("|anchor(a) - d/dtau base| / max(1, |d/dtau base|)");
  CounterRng rng(seed, stream_id(check_stream_label("apath", b.name)));
  for (long long c = 0; c < curves; ++c) {
    Vec x0 = Vec::Zero(n - 2), x1 = Vec::Zero(n - 2);
    for (int i = 0; i < n - 2; ++i) {
      x0[i] = rng.uniform(-1, 1);
      x1[i] = rng.uniform(-1, 1);
    }
    double c0 = rng.uniform(-1, 1), c1 = rng.uniform(-2, 2), c2 = rng.uniform(-2, 2);
    double th0 = rng.uniform(-M_PI, M_PI), th1 = rng.uniform(-6, 6), th2 = rng.uniform(-3, 3);
    PolarCurve gamma;
    gamma.n = n;
    gamma.x = [x0, x1](double tau) -> Vec { return x0 + tau * x1; };
    gamma.r = [c0, c1, c2](double tau) { return std::exp(c0 + c1 * tau + c2 * std::sin(tau)); };
    gamma.theta = [th0, th1, th2](double tau) { return th0 + th1 * tau + th2 * tau * tau; };
    Vec label(6);
    label << c0, c1, c2, th0, th1, th2;

    APath ref = apath_rescale(gamma, 1.0, prof);
    double worst_coeff = 0.0, worst_limit = 0.0, worst_anchor = 0.0;
    for (double t = 1.0; t >= 0.5e-6; t /= 10.0) {
      APath path = apath_rescale(gamma, t, prof);
      for (int s = 0; s <= 10; ++s) {
        double tau = s / 10.0;
        worst_coeff = std::max(worst_coeff, (path.coefficients(tau) - ref.coefficients(tau)).cwiseAbs().maxCoeff());
        Point p = path.base(tau);
        double dx = n > 2 ? (p.head(n - 2) - gamma.x(tau)).cwiseAbs().maxCoeff() : 0.0;
        double dz = std::abs(std::abs(getc(p, n - 2)) - t * gamma.r(tau)) / t;
        worst_limit = std::max({worst_limit, dx, dz});
        Vec deriv = (path.base(tau + prof.h) - path.base(tau - prof.h)) / (2 * prof.h);
        worst_anchor = std::max(worst_anchor, apath_anchor_residual(path, tau, prof) /
                                                  std::max(1.0, deriv.cwiseAbs().maxCoeff()));
      }
    }
    coeff.record(worst_coeff, "coefficients depend on t", label);
    limit.record(worst_limit, "base path does not approach the stratum linearly", label);
    anchor.record(worst_anchor, "anchor(a) != base derivative", label);
  }
  return {coeff, limit, anchor};
}

// ---------------------------------------------------------------------------
// Dispatch

inline std::vector<CheckReport> run_check(const ModelBundle &b, const std::string &check, long long samples,
                                          std::uint64_t seed, const ToleranceProfile &prof) {
  const auto &G = b.model;
  if (check == "axioms") {
    CheckReport r = check_groupoid_axioms(G, G.sampler, samples, seed, prof, prof.abs_tol);
    r.model = b.name;
    if (b.name == "sympl-zero") {
      CheckReport printed = erratum_zero_product(std::min<long long>(samples, 200), seed, prof)[1];
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", printed.max_residual);
      r.notes.push_back("derived product c + b c'; the printed c + b' c fails associativity (max residual " +
                        std::string(buf) + ", see check 'erratum')");
    }
    return {r};
  }
  if (check == "algebroid") {
    CheckReport r = check_algebroid(G, b.expected_frame, samples, seed, prof, prof.subspace_tol);
    r.model = b.name;
    return {r};
  }
  if (check == "symplectic") {
    const SymplecticModel &S = *b.symplectic;
    std::vector<CheckReport> out{check_omega_pullback(S, samples, seed, prof, 10 * prof.abs_tol),
                                 check_closed(S.Omega, b.name, S.dense_arrow, samples, seed, prof, prof.rel_tol),
                                 check_nondegenerate(S.Omega, b.name, S.dense_arrow, samples, seed, prof, 1e-6)};
    if (S.Omega.kind == FormKind::Complex)
      for (auto &r : out)
        r.notes.push_back("complex-valued form; residuals are complex moduli");
    return out;
  }
  if (check == "multiplicative")
    return {check_multiplicative(*b.symplectic, samples, seed, prof, prof.rel_tol)};
  if (check == "morphisms") {
    const double tol = 10 * prof.abs_tol;
    if (b.symplectic && b.name == "sympl-nonzero") {
      static const GroupoidChartModel H = nonzero_target_groupoid();
      static const FormField OH = nonzero_target_Omega();
      const SymplecticModel &S = *b.symplectic;
      auto out = check_morphism({"phi:sympl-nonzero->elliptic:C", morphism_phi_nonzero(), &S.model, &H, &S.Omega, &OH,
                                 S.dense_arrow},
                                samples, seed, prof, tol);
      PsiResolution psi = resolve_psi_convention(samples, seed, prof, tol);
      CheckReport r("psi-convention", "psi:gamma->sympl-nonzero", tol, seed, prof);
      r.attempted = static_cast<long long>(psi.outcomes.size());
      r.passed = psi.passing_count();
      for (const auto &[c, ok] : psi.outcomes)
        r.notes.push_back(to_string(c) + ": " + (ok ? "morphism" : "not a morphism"));
      for (const auto &rep : psi.reports)
        if (rep.pass)
          r.max_residual = std::max(r.max_residual, rep.max_residual);
      r.pass = psi.passing_count() == 1;
      if (r.pass)
        r.notes.push_back("passing convention: " + psi.passing_names());
      else
        r.witnesses.push_back({std::to_string(psi.passing_count()) + " conventions pass, expected exactly one", {}, 0.0});
      out.push_back(r);
      return out;
    }
    if (b.symplectic && b.name == "sympl-zero") {
      static const GroupoidChartModel H = zero_target_groupoid();
      static const FormField OH = zero_target_Omega();
      static const GroupoidChartModel A = action_groupoid_model();
      const SymplecticModel &S = *b.symplectic;
      auto out = check_morphism({"phi:sympl-zero->elliptic:C2", morphism_phi_zero(), &S.model, &H, &S.Omega, &OH,
                                 S.dense_arrow},
                                samples, seed, prof, tol);
      for (auto &r : check_morphism({"iso:sympl-zero->action-groupoid", zero_to_action_map(), &S.model, &A, nullptr,
                                     nullptr, {}},
                                    samples, seed, prof, tol))
        out.push_back(std::move(r));
      return out;
    }
    GroupoidChartModel P = pair_model(b.n);
    return check_morphism({"beta:" + b.name + "->pair", beta_map(G), &G, &P, nullptr, nullptr, {}}, samples, seed,
                          prof, tol);
  }
  if (check == "erratum") {
    std::vector<CheckReport> out;
    auto add = [&out](std::vector<CheckReport> v) {
      for (auto &r : v)
        out.push_back(std::move(r));
    };
    if (b.name == "sympl-zero")
      add(erratum_zero_product(samples, seed, prof));
    else
      add(erratum_nonzero_inverse(samples, seed, prof));
    add(erratum_printed_forms(*b.symplectic, samples, seed, prof));
    return out;
  }
  if (check == "poisson")
    return check_poisson(b, samples, seed, prof);
  if (check == "apath")
    return check_apath(b, samples, seed, prof);
  throw Error(ErrorCode::ConfigError, "unknown check '" + check + "'");
}

} // namespace egl
