// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "oracles.hpp"

#ifndef EGL_DEFAULT_FIXTURE_DIR
#define EGL_DEFAULT_FIXTURE_DIR "fixtures"
#endif

using namespace egl;

namespace {

const ToleranceProfile prof{};
const std::string fixtures = EGL_DEFAULT_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct ModelEntry {
  std::string name;
  std::optional<int> dim;
};

const std::vector<ModelEntry> axiom_models{{"case1", 2},         {"case1", 4},          {"case1", 6},
                                     {"caseIV:2", 4},      {"caseIV:3", 6},       {"case2", {}},
                                     {"sympl-nonzero", {}}, {"sympl-zero", {}},    {"ssc-surface", {}},
                                     {"action-groupoid", {}}, {"fibre:case1,case1", {}}};

std::string label(const ModelEntry &s) { return s.dim ? s.name + "(n=" + std::to_string(*s.dim) + ")" : s.name; }

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

json load(const std::string &name) {
  std::ifstream in(fixtures + "/" + name);
  if (!in)
    throw Error(ErrorCode::ConfigError, "missing fixture " + name);
  return json::parse(in);
}

Outcome ac1() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto &s : axiom_models) {
    auto b = make_model(s.name, s.dim);
    auto r = run_check(b, "axioms", 10000, 1, prof)[0];
    worst = std::max(worst, r.max_residual);
    o.require(r.pass && r.attempted == 10000 && r.max_residual < 1e-8, label(s) + " max " + sci(r.max_residual));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 120.0, "runtime " + std::to_string(secs) + " s");
  if (o.pass)
    o.detail = std::to_string(axiom_models.size()) + " models x 1e4 samples, max residual " + sci(worst) + ", " + sci(secs) + " s";
  return o;
}

Outcome ac2() {
  Outcome o;
  double worst = 0.0;
  std::vector<ModelEntry> models = axiom_models;
  models.push_back({"pair", 3});
  for (const auto &s : models) {
    auto b = make_model(s.name, s.dim);
    auto r = run_check(b, "algebroid", 100, 2, prof)[0];
    worst = std::max(worst, r.max_residual);
    o.require(r.attempted == 100 && r.max_residual < 1e-5, label(s) + " angle " + sci(r.max_residual));
  }
  if (o.pass)
    o.detail = std::to_string(models.size()) + " models x 100 base points, largest principal angle " + sci(worst);
  return o;
}

Outcome ac3() {
  Outcome o;
  std::string summary;
  for (auto S : {symplectic_nonzero_residue_model(), symplectic_zero_residue_model()}) {
    const std::string &n = S.model.name;
    auto pb = check_omega_pullback(S, 1000, 3, prof, 1e-7);
    auto cl = check_closed(S.Omega, n, S.dense_arrow, 1000, 3, prof, 1e-6);
    auto nd = check_nondegenerate(S.Omega, n, S.dense_arrow, 1000, 3, prof, 1e-6);
    auto mu = check_multiplicative(S, 1000, 3, prof, 1e-6);
    o.require(pb.pass, n + " pullback " + sci(pb.max_residual));
    o.require(cl.pass, n + " closed " + sci(cl.max_residual));
    o.require(nd.pass, n + " nondegenerate " + sci(nd.max_residual));
    o.require(mu.pass, n + " multiplicative " + sci(mu.max_residual));
    summary += (summary.empty() ? "" : "; ") + n + ": pullback " + sci(pb.max_residual) + ", d " +
               sci(cl.max_residual) + ", mult " + sci(mu.max_residual);
  }
  if (o.pass)
    o.detail = summary;
  return o;
}

Outcome ac4() {
  Outcome o;
  double worst = 0.0;
  {
    auto S = symplectic_nonzero_residue_model();
    auto H = nonzero_target_groupoid();
    auto OH = nonzero_target_Omega();
    for (auto &r : check_morphism({"phi-nonzero", morphism_phi_nonzero(), &S.model, &H, &S.Omega, &OH, S.dense_arrow},
                                  10000, 4, prof, 1e-7)) {
      worst = std::max(worst, r.max_residual);
      o.require(r.pass, "phi nonzero " + r.check + " " + sci(r.max_residual));
    }
  }
  {
    auto S = symplectic_zero_residue_model();
    auto H = zero_target_groupoid();
    auto OH = zero_target_Omega();
    for (auto &r : check_morphism({"phi-zero", morphism_phi_zero(), &S.model, &H, &S.Omega, &OH, S.dense_arrow},
                                  10000, 4, prof, 1e-7)) {
      worst = std::max(worst, r.max_residual);
      o.require(r.pass, "phi zero " + r.check + " " + sci(r.max_residual));
    }
  }
  auto psi = resolve_psi_convention(10000, 4, prof, 1e-7);
  o.require(psi.passing_count() == 1, std::to_string(psi.passing_count()) + " psi conventions pass");
  if (o.pass)
    o.detail = "phi residual " + sci(worst) + ", psi convention: " + psi.passing_names();
  return o;
}

Outcome ac5() {
  Outcome o;
  auto reps = erratum_zero_product(1000, 5, prof);
  const auto &derived = reps[0], &printed = reps[1];
  o.require(derived.pass, "derived product associativity " + sci(derived.max_residual));
  o.require(printed.max_residual > 1e-2, "printed product residual only " + sci(printed.max_residual));
  o.require(printed.pass, "regression report did not pass");
  if (o.pass)
    o.detail = "derived c+bc' max " + sci(derived.max_residual) + "; printed c+b'c max " + sci(printed.max_residual);
  return o;
}

Outcome ac6() {
  Outcome o;
  json klein = load("klein_t4.json");
  bool h = decide(klein, DecisionKind::Smooth)["hausdorff"].get<bool>();
  bool dc = decide(klein, DecisionKind::DoubleCover)["exists"].get<bool>();
  o.require(h && !dc, "klein_t4 gave hausdorff=" + std::to_string(h) + " double_cover=" + std::to_string(dc));

  CounterRng rng(6, stream_id("acceptance/smooth-oracle"));
  int done = 0, agree = 0, attempts = 0;
  while (done < 20 && attempts++ < 10000) {
    auto c = oracle::random_case(rng);
    if (!c)
      continue;
    auto expected = oracle::extension_oracle(*c);
    if (!expected)
      continue;
    ++done;
    agree += decide(oracle::to_doc(*c), DecisionKind::Smooth)["hausdorff"].get<bool>() == *expected;
  }
  o.require(done == 20 && agree == 20, std::to_string(agree) + "/" + std::to_string(done) + " random fixtures agree");

  json cases = load("nc_cases.json");
  int nc_agree = 0;
  for (const auto &c : cases["cases"]) {
    json doc = {{"schema", "egl.decision/1"}, {"normal_crossing", c["normal_crossing"]}};
    nc_agree += decide(doc, DecisionKind::NormalCrossing)["hausdorff"].get<bool>() == c["expected"].get<bool>();
  }
  o.require(cases["cases"].size() == 10 && nc_agree == 10,
            std::to_string(nc_agree) + "/" + std::to_string(cases["cases"].size()) + " normal crossing cases");
  if (o.pass)
    o.detail = "klein_t4 (true, false); 20/20 random smooth fixtures; 10/10 normal crossing cases";
  return o;
}

Outcome ac7() {
  Outcome o;
  CounterRng rng(7, stream_id("acceptance/snf"));
  int snf_ok = 0;
  for (int t = 0; t < 1000; ++t) {
    int m = static_cast<int>(rng.integer(1, 6)), n = static_cast<int>(rng.integer(1, 6));
    IntMatrix A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        A(i, j) = rng.integer(-9, 9);
    auto f = smith_normal_form(A);
    bool ok = f.U * A * f.V == f.S && abs(determinant(f.U)) == 1 && abs(determinant(f.V)) == 1;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        ok = ok && (i == j || f.S(i, j) == 0);
    for (int i = 0; i + 1 < f.rank; ++i)
      ok = ok && f.S(i, i) > 0 && f.S(i + 1, i + 1) % f.S(i, i) == 0;
    snf_ok += ok;
  }
  o.require(snf_ok == 1000, std::to_string(snf_ok) + "/1000 Smith forms verified");

  long long triples = 0, bad = 0;
  for (int k = 1; k <= 3; ++k) {
    auto all = all_signed_permutations(k);
    auto e = SignedPermutation::identity(k);
    for (const auto &a : all) {
      bad += !(a * e == a && e * a == a && a * a.inverse() == e && a.inverse() * a == e);
      for (const auto &b : all)
        for (const auto &c : all) {
          ++triples;
          bad += !((a * b) * c == a * (b * c));
        }
    }
  }
  o.require(bad == 0, std::to_string(bad) + " group axiom violations");

  int closures = 0, closure_bad = 0;
  CounterRng grng(7, stream_id("acceptance/closure"));
  for (int k = 1; k <= 3; ++k) {
    auto all = all_signed_permutations(k);
    for (int t = 0; t < 50; ++t) {
      std::vector<SignedPermutation> gens;
      for (int i = static_cast<int>(grng.integer(0, 3)); i > 0; --i)
        gens.push_back(all[grng.below(all.size())]);
      auto expected = oracle::closure(k, gens);
      ++closures;
      closure_bad += twist_group(k, gens).elements != std::vector<SignedPermutation>(expected.begin(), expected.end());
    }
  }
  o.require(closure_bad == 0, std::to_string(closure_bad) + " twist-group closures differ from enumeration");
  if (o.pass)
    o.detail = "1000 Smith forms; " + std::to_string(triples) + " associativity triples (k <= 3); " +
               std::to_string(closures) + " closures";
  return o;
}

Outcome ac8() {
  Outcome o;
  std::string summary;
  for (int n : {2, 4, 6}) {
    auto b = make_model("case1", n);
    for (const auto &r : run_check(b, "apath", 20, 8, prof)) {
      o.require(r.pass, "n=" + std::to_string(n) + " " + r.check + " " + sci(r.max_residual));
      if (n == 4)
        summary += (summary.empty() ? "" : ", ") + r.check + " " + sci(r.max_residual);
    }
  }
  if (o.pass)
    o.detail = "t = 1 .. 1e-6, n = 2, 4, 6; " + summary;
  return o;
}

Outcome ac9() {
  Outcome o;
  RunConfig c;
  c.models = {"case1", "sympl-zero", "sympl-nonzero"};
  c.seed = 11;
  c.samples = 200;
  std::string a = to_json(run_verify(c)).dump(2);
  std::string b = to_json(run_verify(c)).dump(2);
  o.require(a == b, "reports differ");
  if (o.pass)
    o.detail = "two runs, " + std::to_string(a.size()) + " identical bytes";
  return o;
}

} // namespace

int main() {
  std::vector<std::pair<const char *, Outcome (*)()>> criteria{
      {"AC1 groupoid axioms", ac1},  {"AC2 Lie algebroids", ac2},       {"AC3 multiplicative forms", ac3},
      {"AC4 morphisms", ac4},        {"AC5 product regression", ac5},   {"AC6 decision procedures", ac6},
      {"AC7 exact algebra", ac7},    {"AC8 A-path rescaling", ac8},     {"AC9 determinism", ac9}};
  int failures = 0;
  for (const auto &[name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures ? 1 : 0;
}
