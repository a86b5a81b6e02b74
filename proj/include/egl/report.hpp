#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "egl/integer.hpp"
#include "egl/suite.hpp"
#include "egl/twist.hpp"

namespace egl {

inline constexpr const char *artifact_version = "1.0.0";
inline constexpr const char *rng_name = "splitmix64-counter";
inline constexpr int rng_version = 1;

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// CheckReport <-> JSON

inline json to_json(const ToleranceProfile &p) {
  return {{"h", p.h},
          {"abs_tol", p.abs_tol},
          {"rel_tol", p.rel_tol},
          {"subspace_tol", p.subspace_tol},
          {"curvature_budget", p.curvature_budget}};
}

inline ToleranceProfile profile_from_json(const json &j) {
  ToleranceProfile p;
  p.h = j.at("h").get<double>();
  p.abs_tol = j.at("abs_tol").get<double>();
  p.rel_tol = j.at("rel_tol").get<double>();
  p.subspace_tol = j.at("subspace_tol").get<double>();
  p.curvature_budget = j.at("curvature_budget").get<double>();
  return p;
}

inline json to_json(const CheckReport &r) {
  json w = json::array();
  for (const auto &x : r.witnesses)
    w.push_back({{"label", x.label}, {"inputs", x.inputs}, {"residual", x.residual}});
  return {{"check", r.check},
          {"model", r.model},
          {"mode", r.mode},
          {"attempted", r.attempted},
          {"passed", r.passed},
          {"max_residual", r.max_residual},
          {"tolerance", r.tolerance},
          {"seed", r.seed},
          {"pass", r.pass},
          {"profile", to_json(r.profile)},
          {"witnesses", w},
          {"notes", r.notes}};
}

inline CheckReport check_report_from_json(const json &j) {
  CheckReport r;
  r.check = j.at("check").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.attempted = j.at("attempted").get<long long>();
  r.passed = j.at("passed").get<long long>();
  r.max_residual = j.at("max_residual").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.pass = j.at("pass").get<bool>();
  r.profile = profile_from_json(j.at("profile"));
  for (const auto &w : j.at("witnesses"))
    r.witnesses.push_back({w.at("label").get<std::string>(), w.at("inputs").get<std::vector<double>>(),
                           w.at("residual").get<double>()});
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

// ---------------------------------------------------------------------------
// Run configuration

enum class OutputFormat { Text, Json };

struct RunConfig {
  std::vector<std::string> models;
  std::vector<std::string> checks; // empty: every check the model supports
  std::uint64_t seed = 1;
  std::optional<long long> samples;            // all checks
  std::map<std::string, long long> samples_by; // per check
  ToleranceProfile profile;
  std::optional<int> dim, k;
  std::string out;
  OutputFormat format = OutputFormat::Text;
  bool timings = false;

  long long samples_for(const std::string &check) const {
    if (auto it = samples_by.find(check); it != samples_by.end())
      return it->second;
    if (samples)
      return *samples;
    return default_samples().at(check);
  }
};

/// "key=value" onto the profile; unknown keys are config errors.
inline void apply_tolerance(ToleranceProfile &p, const std::string &kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw Error(ErrorCode::ConfigError, "--tol expects key=value, got '" + kv + "'");
  std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  double v;
  try {
    std::size_t used = 0;
    v = std::stod(val, &used);
    if (used != val.size())
      throw std::invalid_argument("trailing");
  } catch (const std::exception &) {
    throw Error(ErrorCode::ConfigError, "--tol " + key + ": '" + val + "' is not a number");
  }
  std::map<std::string, double *> fields{{"h", &p.h},
                                         {"abs_tol", &p.abs_tol},
                                         {"rel_tol", &p.rel_tol},
                                         {"subspace_tol", &p.subspace_tol},
                                         {"curvature_budget", &p.curvature_budget}};
  auto it = fields.find(key);
  if (it == fields.end())
    throw Error(ErrorCode::ConfigError, "--tol: unknown key '" + key + "'");
  *it->second = v;
}

inline json to_json(const RunConfig &c) {
  json samples = json::object();
  for (const auto &name : check_names())
    if (std::find(c.checks.begin(), c.checks.end(), name) != c.checks.end() || c.checks.empty())
      samples[name] = c.samples_for(name);
  json j = {{"models", c.models},
            {"checks", c.checks},
            {"seed", c.seed},
            {"samples", samples},
            {"profile", to_json(c.profile)}};
  j["dim"] = c.dim ? json(*c.dim) : json(nullptr);
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  return j;
}

inline RunConfig config_from_json(const json &j) {
  RunConfig c;
  c.models = j.at("models").get<std::vector<std::string>>();
  c.checks = j.at("checks").get<std::vector<std::string>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  for (const auto &[name, v] : j.at("samples").items())
    c.samples_by[name] = v.get<long long>();
  c.profile = profile_from_json(j.at("profile"));
  if (!j.at("dim").is_null())
    c.dim = j.at("dim").get<int>();
  if (!j.at("k").is_null())
    c.k = j.at("k").get<int>();
  return c;
}

// ---------------------------------------------------------------------------
// Run report

struct RunReport {
  std::string command;
  RunConfig config;
  std::vector<CheckReport> checks;
  std::vector<double> wall_ms; // per check entry of the plan, not serialized unless asked
  json decisions = json::array();
  bool verdict = true;
};

inline json to_json(const RunReport &r, bool with_timings = false) {
  json checks = json::array();
  for (const auto &c : r.checks)
    checks.push_back(to_json(c));
  json j = {{"artifact", "egl"},
            {"version", artifact_version},
            {"rng", {{"name", rng_name}, {"version", rng_version}}},
            {"command", r.command},
            {"config", to_json(r.config)},
            {"checks", checks},
            {"decisions", r.decisions},
            {"verdict", r.verdict}};
  if (with_timings)
    j["wall_clock_ms"] = r.wall_ms;
  return j;
}

inline RunReport run_report_from_json(const json &j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.config = config_from_json(j.at("config"));
  for (const auto &c : j.at("checks"))
    r.checks.push_back(check_report_from_json(c));
  r.decisions = j.at("decisions");
  r.verdict = j.at("verdict").get<bool>();
  if (j.contains("wall_clock_ms"))
    r.wall_ms = j.at("wall_clock_ms").get<std::vector<double>>();
  return r;
}

// ---------------------------------------------------------------------------
// verify

struct PlannedCheck {
  std::size_t model;
  std::string check;
};

/// Validates names and applicability; no sampling happens here.
inline std::vector<ModelBundle> prepare_models(const RunConfig &c, std::vector<PlannedCheck> &plan) {
  if (c.models.empty())
    throw Error(ErrorCode::ConfigError, "no model given");
  if (c.seed == 0)
    throw Error(ErrorCode::ConfigError, "seed must be positive");
  if (c.samples && *c.samples <= 0)
    throw Error(ErrorCode::ConfigError, "sample counts must be positive");
  for (const auto &[name, n] : c.samples_by) {
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end())
      throw Error(ErrorCode::ConfigError, "--samples: unknown check '" + name + "'");
    if (n <= 0)
      throw Error(ErrorCode::ConfigError, "sample counts must be positive");
  }
  for (const auto &ch : c.checks)
    if (std::find(check_names().begin(), check_names().end(), ch) == check_names().end())
      throw Error(ErrorCode::ConfigError, "unknown check '" + ch + "'");
  try {
    c.profile.validate();
  } catch (const Error &e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  std::vector<ModelBundle> models;
  for (const auto &name : c.models)
    models.push_back(make_model(name, c.dim, c.k));
  plan.clear();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto &supported = models[i].checks;
    if (c.checks.empty()) {
      for (const auto &ch : supported)
        plan.push_back({i, ch});
      continue;
    }
    for (const auto &ch : c.checks) {
      if (std::find(supported.begin(), supported.end(), ch) == supported.end())
        throw Error(ErrorCode::ConfigError, "check '" + ch + "' does not apply to model '" + models[i].name + "'");
      plan.push_back({i, ch});
    }
  }
  return models;
}

inline RunReport run_verify(const RunConfig &c) {
  std::vector<PlannedCheck> plan;
  auto models = prepare_models(c, plan);
  RunReport r;
  r.command = "verify";
  r.config = c;
  for (const auto &p : plan) {
    auto t0 = std::chrono::steady_clock::now();
    for (auto &rep : run_check(models[p.model], p.check, c.samples_for(p.check), c.seed, c.profile)) {
      r.verdict = r.verdict && rep.pass;
      r.checks.push_back(std::move(rep));
    }
    auto t1 = std::chrono::steady_clock::now();
    r.wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decision documents

inline constexpr const char *decision_schema_id = "egl.decision/1";

enum class DecisionKind { Smooth, DoubleCover, NormalCrossing };

inline DecisionKind parse_decision_kind(const std::string &s) {
  if (s == "smooth")
    return DecisionKind::Smooth;
  if (s == "double-cover")
    return DecisionKind::DoubleCover;
  if (s == "normal-crossing")
    return DecisionKind::NormalCrossing;
  throw Error(ErrorCode::ConfigError, "--kind must be smooth, double-cover or normal-crossing, not '" + s + "'");
}

inline std::string to_string(DecisionKind k) {
  switch (k) {
  case DecisionKind::Smooth:
    return "smooth";
  case DecisionKind::DoubleCover:
    return "double-cover";
  case DecisionKind::NormalCrossing:
    return "normal-crossing";
  }
  return "?";
}

namespace detail {

/// Field access with JSON-pointer style paths in diagnostics.
class Reader {
public:
  Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {}

  const json &raw() const { return j_; }
  const std::string &path() const { return path_; }

  [[noreturn]] void fail(const std::string &what) const {
    throw Error(ErrorCode::SchemaError, (path_.empty() ? std::string("/") : path_) + ": " + what);
  }
  bool has(const std::string &key) const { return j_.is_object() && j_.contains(key); }
  Reader at(const std::string &key) const {
    if (!j_.is_object())
      fail("expected an object");
    if (!j_.contains(key))
      fail("missing field '" + key + "'");
    return {j_.at(key), path_ + "/" + key};
  }
  Reader at(std::size_t i) const { return {j_.at(i), path_ + "/" + std::to_string(i)}; }
  std::size_t array_size() const {
    if (!j_.is_array())
      fail("expected an array");
    return j_.size();
  }
  std::string str() const {
    if (!j_.is_string())
      fail("expected a string");
    return j_.get<std::string>();
  }
  long long integer() const {
    if (!j_.is_number_integer())
      fail("expected an integer");
    return j_.get<long long>();
  }
  int bit() const {
    long long v = integer();
    if (v != 0 && v != 1)
      fail("expected 0 or 1");
    return static_cast<int>(v);
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < array_size(); ++i)
      out.push_back(at(i).str());
    return out;
  }
  std::vector<int> bits() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < array_size(); ++i)
      out.push_back(at(i).bit());
    return out;
  }
  std::vector<int> ints() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < array_size(); ++i)
      out.push_back(static_cast<int>(at(i).integer()));
    return out;
  }
  /// rows x cols integer matrix, row-major
  IntMatrix matrix(int rows, int cols) const {
    if (static_cast<int>(array_size()) != rows)
      fail("expected " + std::to_string(rows) + " rows");
    IntMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      Reader row = at(i);
      if (static_cast<int>(row.array_size()) != cols)
        row.fail("expected " + std::to_string(cols) + " entries");
      for (int j = 0; j < cols; ++j)
        m(i, j) = row.at(j).integer();
    }
    return m;
  }

private:
  const json &j_;
  std::string path_;
};

inline HomologyPresentation read_presentation(const Reader &r) {
  auto gens = r.at("generators").strings();
  const int g = static_cast<int>(gens.size());
  IntMatrix rel(g, 0);
  if (r.has("relations")) {
    Reader rr = r.at("relations");
    const int nrel = static_cast<int>(rr.array_size());
    // each entry is one relation, a column of the relation matrix
    IntMatrix cols = rr.matrix(nrel, g);
    rel = cols.transpose();
  }
  return HomologyPresentation(g, rel);
}

inline json int_to_json(const Int &x) {
  if (x >= std::numeric_limits<long long>::min() && x <= std::numeric_limits<long long>::max())
    return json(static_cast<long long>(x));
  return json(x.str());
}

inline json vec_to_json(const IntVec &v) {
  json a = json::array();
  for (const auto &x : v)
    a.push_back(int_to_json(x));
  return a;
}

inline SignedPermutation read_signed_permutation(const Reader &r, int k) {
  SignedPermutation p{r.at("perm").ints(), r.at("flips").bits()};
  if (p.k() != k || static_cast<int>(p.flips.size()) != k)
    r.fail("expected perm and flips of length " + std::to_string(k));
  try {
    p.validate();
  } catch (const Error &e) {
    r.fail(e.what());
  }
  return p;
}

inline std::vector<Word> read_words(const Reader &r) {
  std::vector<Word> out;
  for (std::size_t i = 0; i < r.array_size(); ++i)
    out.push_back(r.at(i).strings());
  return out;
}

} // namespace detail

/// Strata of a normal crossing section: {"strata": [...]}.
inline std::vector<Stratum> read_strata(const json &section, const std::string &path = "/normal_crossing") {
  detail::Reader nc(section, path);
  detail::Reader sr = nc.at("strata");
  std::vector<Stratum> strata;
  for (std::size_t i = 0; i < sr.array_size(); ++i) {
    detail::Reader s = sr.at(i);
    int k = static_cast<int>(s.at("k").integer());
    if (k < 1)
      s.at("k").fail("k must be at least 1");
    if (k > max_twist_k)
      throw Error(ErrorCode::KTooLarge, s.path() + "/k: k exceeds 8");
    auto gens = s.at("generators").strings();
    std::map<std::string, SignedPermutation> images;
    detail::Reader im = s.at("images");
    if (!im.raw().is_object())
      im.fail("expected an object");
    for (const auto &[name, _] : im.raw().items())
      images.emplace(name, detail::read_signed_permutation(im.at(name), k));
    for (const auto &g : gens)
      if (!images.count(g))
        im.fail("missing image for generator '" + g + "'");
    for (const auto &[name, _] : images)
      if (std::find(gens.begin(), gens.end(), name) == gens.end())
        im.fail("image given for undeclared generator '" + name + "'");
    Stratum st{s.has("name") ? s.at("name").str() : "stratum " + std::to_string(i), MonodromyRep(k, gens, images),
               detail::read_words(s.at("kernel_words"))};
    strata.push_back(std::move(st));
  }
  return strata;
}

/// Parses text as JSON, converting parse errors into SchemaError with line and column.
inline json parse_json_text(const std::string &text, const std::string &source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    std::size_t byte = e.byte ? e.byte - 1 : 0, line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::SchemaError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON");
  }
}

/// Runs one decision procedure on a parsed document.
inline json decide(const json &doc, DecisionKind kind) {
  detail::Reader root(doc, "");
  if (!doc.is_object())
    root.fail("expected an object");
  if (root.at("schema").str() != decision_schema_id)
    root.at("schema").fail(std::string("expected \"") + decision_schema_id + "\"");
  json out = {{"kind", to_string(kind)}, {"input", root.has("name") ? root.at("name").str() : ""}};
  std::optional<bool> expected;
  auto expect_field = [&](const char *key) {
    if (root.has("expected") && root.at("expected").has(key)) {
      const auto &v = root.at("expected").at(key).raw();
      if (!v.is_boolean())
        root.at("expected").at(key).fail("expected a boolean");
      expected = v.get<bool>();
    }
  };
  bool answer = false;
  switch (kind) {
  case DecisionKind::Smooth: {
    detail::Reader s = root.at("smooth");
    HomologyPresentation dom = detail::read_presentation(s.at("domain"));
    HomologyPresentation cod = detail::read_presentation(s.at("codomain"));
    IntMatrix m = s.at("i_star").matrix(cod.generators, dom.generators);
    std::vector<int> eta = s.at("eta").bits();
    if (static_cast<int>(eta.size()) != dom.generators)
      s.at("eta").fail("expected one entry per domain generator");
    IntHom f(m, dom, cod);
    SmoothDecision d = hausdorff_smooth_decision(f, eta);
    json kernel = json::array();
    for (const auto &v : d.kernel)
      kernel.push_back(detail::vec_to_json(v));
    out["hausdorff"] = d.hausdorff;
    out["kernel_generators"] = kernel;
    out["witness"] = d.witness ? detail::vec_to_json(*d.witness) : json(nullptr);
    answer = d.hausdorff;
    expect_field("smooth");
    break;
  }
  case DecisionKind::DoubleCover: {
    detail::Reader s = root.at("double_cover");
    std::vector<int> eta = s.at("eta_class").bits();
    detail::Reader pr = s.at("i_pullback");
    std::vector<std::vector<int>> pull;
    for (std::size_t i = 0; i < pr.array_size(); ++i)
      pull.push_back(pr.at(i).bits());
    if (pull.size() != eta.size())
      pr.fail("expected one row per entry of eta_class");
    for (std::size_t i = 1; i < pull.size(); ++i)
      if (pull[i].size() != pull[0].size())
        pr.at(i).fail("rows must have equal length");
    answer = double_cover_exists(pull, eta);
    out["exists"] = answer;
    expect_field("double_cover");
    break;
  }
  case DecisionKind::NormalCrossing: {
    NCDecision d = hausdorff_nc_decision(read_strata(root.at("normal_crossing").raw()));
    out["hausdorff"] = d.hausdorff;
    out["witness"] = d.witness_stratum ? json{{"stratum", *d.witness_stratum}, {"word", *d.witness_word}} : json(nullptr);
    answer = d.hausdorff;
    expect_field("normal_crossing");
    break;
  }
  }
  if (expected) {
    out["expected"] = *expected;
    out["agrees"] = *expected == answer;
  }
  return out;
}

/// Fixture lookup: the path as given, else under $EGL_FIXTURES, else under the default directory.
inline std::filesystem::path resolve_fixture(const std::string &p, const std::string &default_dir) {
  namespace fs = std::filesystem;
  if (fs::exists(p))
    return p;
  fs::path name = fs::path(p).filename();
  const char *env = std::getenv("EGL_FIXTURES");
  fs::path dir = env && *env ? fs::path(env) : fs::path(default_dir);
  if (fs::exists(dir / p))
    return dir / p;
  if (fs::exists(dir / name))
    return dir / name;
  throw Error(ErrorCode::ConfigError, "input '" + p + "' not found (fixture directory " + dir.string() + ")");
}

inline RunReport run_decide(const std::string &path, DecisionKind kind, const std::string &default_dir) {
  auto file = resolve_fixture(path, default_dir);
  std::ifstream in(file);
  if (!in)
    throw Error(ErrorCode::ConfigError, "cannot read " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc = parse_json_text(ss.str(), file.filename().string());
  RunReport r;
  r.command = "decide";
  json d = decide(doc, kind);
  if (d.contains("agrees"))
    r.verdict = d["agrees"].get<bool>();
  r.decisions.push_back(d);
  return r;
}

// ---------------------------------------------------------------------------
// Text rendering (lossy)

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline std::string render_text(const RunReport &r, bool with_timings) {
  std::ostringstream o;
  if (r.command == "verify") {
    o << "seed " << r.config.seed << ", rng " << rng_name << " v" << rng_version << "\n";
    for (std::size_t i = 0; i < r.checks.size(); ++i) {
      const auto &c = r.checks[i];
      o << (c.pass ? "PASS " : "FAIL ") << c.check << " [" << c.model << "] " << c.passed << "/" << c.attempted
        << " max " << fmt_double(c.max_residual) << (c.mode == "regression" ? " > " : " <= ")
        << fmt_double(c.tolerance) << "\n";
      for (const auto &n : c.notes)
        o << "  note: " << n << "\n";
      for (const auto &w : c.witnesses)
        o << "  witness: " << w.label << " residual " << fmt_double(w.residual) << "\n";
    }
    if (with_timings) {
      double total = 0.0;
      for (double t : r.wall_ms)
        total += t;
      o << "wall clock: " << fmt_double(total / 1000.0) << " s\n";
    }
  } else {
    for (const auto &d : r.decisions) {
      if (d.contains("hausdorff"))
        o << "hausdorff: " << (d["hausdorff"].get<bool>() ? "true" : "false") << "\n";
      if (d.contains("exists"))
        o << "exists: " << (d["exists"].get<bool>() ? "true" : "false") << "\n";
      if (d.contains("witness") && !d["witness"].is_null())
        o << "witness: " << d["witness"].dump() << "\n";
      if (d.contains("agrees"))
        o << "expected: " << (d["expected"].get<bool>() ? "true" : "false")
          << (d["agrees"].get<bool>() ? " (agrees)" : " (DISAGREES)") << "\n";
    }
  }
  o << "verdict: " << (r.verdict ? "pass" : "fail") << "\n";
  return o.str();
}

} // namespace egl
