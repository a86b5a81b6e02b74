#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"

#ifndef EGL_DEFAULT_FIXTURE_DIR
#define EGL_DEFAULT_FIXTURE_DIR "fixtures"
#endif

using namespace egl;
using namespace oracle;

namespace {

const std::string fixtures = EGL_DEFAULT_FIXTURE_DIR;

json load(const std::string &name) {
  std::ifstream in(fixtures + "/" + name);
  EXPECT_TRUE(in.good()) << name;
  return json::parse(in);
}

ErrorCode code_of(const std::function<void()> &f, std::string *msg = nullptr) {
  try {
    f();
  } catch (const Error &e) {
    if (msg)
      *msg = e.what();
    return e.code();
  }
  return ErrorCode::ConfigError;
}

} // namespace

TEST(SmoothDecision, KleinBottleFixture) {
  json doc = load("klein_t4.json");
  json d = decide(doc, DecisionKind::Smooth);
  EXPECT_TRUE(d["hausdorff"].get<bool>());
  EXPECT_TRUE(d["agrees"].get<bool>());
  ASSERT_EQ(d["kernel_generators"].size(), 1u);
  EXPECT_EQ(d["kernel_generators"][0][0], 0);
  json c = decide(doc, DecisionKind::DoubleCover);
  EXPECT_FALSE(c["exists"].get<bool>());
  EXPECT_TRUE(c["agrees"].get<bool>());
}

TEST(SmoothDecision, OtherFixtures) {
  EXPECT_TRUE(decide(load("eta_zero.json"), DecisionKind::Smooth)["hausdorff"].get<bool>());
  EXPECT_TRUE(decide(load("eta_zero.json"), DecisionKind::DoubleCover)["exists"].get<bool>());
  json d = decide(load("not_smooth.json"), DecisionKind::Smooth);
  EXPECT_FALSE(d["hausdorff"].get<bool>());
  EXPECT_EQ(d["witness"], json::array({1}));
  EXPECT_TRUE(d["agrees"].get<bool>());
}

TEST(SmoothDecision, RandomPresentationsAgainstCharacterOracle) {
  CounterRng rng(61, stream_id("smooth-oracle"));
  int done = 0, positive = 0, attempts = 0;
  while (done < 20 && attempts < 10000) {
    ++attempts;
    auto c = random_case(rng);
    if (!c)
      continue;
    auto oracle = extension_oracle(*c);
    if (!oracle)
      continue;
    json doc = to_doc(*c);
    json d = decide(doc, DecisionKind::Smooth);
    ASSERT_EQ(d["hausdorff"].get<bool>(), *oracle) << doc.dump();
    positive += *oracle;
    ++done;
  }
  EXPECT_EQ(done, 20);
  EXPECT_GT(positive, 0);
  EXPECT_LT(positive, 20);
}

TEST(NormalCrossingDecision, HandComputedCases) {
  json cases = load("nc_cases.json");
  ASSERT_EQ(cases["schema"], "egl.decision-cases/1");
  ASSERT_EQ(cases["cases"].size(), 10u);
  for (const auto &c : cases["cases"]) {
    json doc = {{"schema", "egl.decision/1"},
                {"name", c["name"]},
                {"normal_crossing", c["normal_crossing"]},
                {"expected", {{"normal_crossing", c["expected"]}}}};
    json d = decide(doc, DecisionKind::NormalCrossing);
    EXPECT_EQ(d["hausdorff"].get<bool>(), c["expected"].get<bool>()) << c["name"];
    EXPECT_TRUE(d["agrees"].get<bool>());
    EXPECT_EQ(d["witness"].is_null(), d["hausdorff"].get<bool>());
  }
}

TEST(NormalCrossingDecision, TwistedFixture) {
  json d = decide(load("nc_twisted.json"), DecisionKind::NormalCrossing);
  EXPECT_FALSE(d["hausdorff"].get<bool>());
  EXPECT_EQ(d["witness"]["word"], json::array({"s"}));
}

TEST(NormalCrossingDecision, RankOneAgreesWithSmoothDecision) {
  // k = 1: the monodromy is eta, kernel words spell the kernel generators
  CounterRng rng(62, stream_id("nc-vs-smooth"));
  int done = 0;
  while (done < 20) {
    auto c = random_case(rng);
    if (!c)
      continue;
    json sdoc = to_doc(*c);
    bool smooth = decide(sdoc, DecisionKind::Smooth)["hausdorff"].get<bool>();
    HomologyPresentation dom(c->g, cols_of(c->rel_dom, c->g));
    HomologyPresentation cod(c->h, cols_of(c->rel_cod, c->h));
    IntMatrix F(c->h, c->g);
    for (int i = 0; i < c->h; ++i)
      for (int j = 0; j < c->g; ++j)
        F(i, j) = c->F[i][j];
    json words = json::array();
    auto spell = [&](const IntVec &x) {
      json w = json::array();
      for (int j = 0; j < c->g; ++j)
        for (Int n = 0; n < abs(x[j]); ++n)
          w.push_back("a" + std::to_string(j) + (x[j] < 0 ? "^-1" : ""));
      return w;
    };
    for (const auto &k : kernel_generators(IntHom(F, dom, cod)))
      words.push_back(spell(k));
    for (const auto &r : c->rel_dom)
      words.push_back(spell(IntVec(r.begin(), r.end())));
    json gens = json::array(), images = json::object();
    for (int j = 0; j < c->g; ++j) {
      gens.push_back("a" + std::to_string(j));
      images["a" + std::to_string(j)] = {{"perm", {0}}, {"flips", {c->eta[j]}}};
    }
    json ndoc = {{"schema", "egl.decision/1"},
                 {"normal_crossing",
                  {{"strata", json::array({{{"name", "N"},
                                            {"k", 1},
                                            {"generators", gens},
                                            {"images", images},
                                            {"kernel_words", words}}})}}}};
    ASSERT_EQ(decide(ndoc, DecisionKind::NormalCrossing)["hausdorff"].get<bool>(), smooth) << sdoc.dump();
    ++done;
  }
}

TEST(Schema, Diagnostics) {
  json klein = load("klein_t4.json");
  std::string msg;

  json bad = klein;
  bad["schema"] = "egl.decision/2";
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::Smooth); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("/schema"), std::string::npos) << msg;

  bad = klein;
  bad.erase("double_cover");
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::DoubleCover); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("double_cover"), std::string::npos) << msg;

  bad = klein;
  bad["smooth"]["eta"] = json::array({"one", 0});
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::Smooth); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("/smooth/eta/0"), std::string::npos) << msg;

  bad = klein;
  bad["smooth"]["i_star"] = json::array({{2, 0}});
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::Smooth); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("/smooth/i_star"), std::string::npos) << msg;

  bad = klein;
  bad["smooth"]["i_star"] = json::array({{1, 1}, {0, 0}, {0, 0}, {0, 0}});
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::Smooth); }), ErrorCode::MalformedPresentation);

  bad = klein;
  bad["expected"]["smooth"] = "yes";
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::Smooth); }), ErrorCode::SchemaError);

  EXPECT_EQ(code_of([&] { decide(json::array(), DecisionKind::Smooth); }), ErrorCode::SchemaError);
}

TEST(Schema, NormalCrossingDiagnostics) {
  json doc = load("nc_twisted.json");
  std::string msg;
  json bad = doc;
  bad["normal_crossing"]["strata"][0]["images"]["s"]["perm"] = json::array({0, 0});
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::NormalCrossing); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("/normal_crossing/strata/0/images/s"), std::string::npos) << msg;

  bad = doc;
  bad["normal_crossing"]["strata"][0]["k"] = 9;
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::NormalCrossing); }), ErrorCode::KTooLarge);

  bad = doc;
  bad["normal_crossing"]["strata"][0]["kernel_words"] = json::array({json::array({"q"})});
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::NormalCrossing); }), ErrorCode::UnknownGenerator);

  bad = doc;
  bad["normal_crossing"]["strata"][0]["images"]["t"] = {{"perm", {0, 1}}, {"flips", {0, 0}}};
  EXPECT_EQ(code_of([&] { decide(bad, DecisionKind::NormalCrossing); }, &msg), ErrorCode::SchemaError);
  EXPECT_NE(msg.find("undeclared"), std::string::npos) << msg;
}

TEST(Schema, DecisionKinds) {
  EXPECT_EQ(parse_decision_kind("smooth"), DecisionKind::Smooth);
  EXPECT_EQ(parse_decision_kind("double-cover"), DecisionKind::DoubleCover);
  EXPECT_EQ(parse_decision_kind("normal-crossing"), DecisionKind::NormalCrossing);
  EXPECT_EQ(code_of([] { parse_decision_kind("nc"); }), ErrorCode::ConfigError);
}
