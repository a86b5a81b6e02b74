// Command line front end: verify, decide, list-models, list-checks.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "egl/report.hpp"

#ifndef EGL_DEFAULT_FIXTURE_DIR
#define EGL_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace {

constexpr int exit_fail = 1;
constexpr int exit_config = 2;

std::vector<std::string> split_commas(const std::vector<std::string> &in) {
  std::vector<std::string> out;
  for (const auto &s : in) {
    std::size_t start = 0;
    while (start <= s.size()) {
      auto comma = s.find(',', start);
      std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!part.empty())
        out.push_back(part);
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
  }
  return out;
}

/// "fibre:case1,case1" keeps its comma; plain lists split.
std::vector<std::string> split_models(const std::vector<std::string> &in) {
  std::vector<std::string> out;
  for (const auto &s : in) {
    if (s.rfind("fibre:", 0) == 0)
      out.push_back(s);
    else
      for (auto &m : split_commas({s}))
        out.push_back(m);
  }
  return out;
}

int emit(const egl::RunReport &r, egl::OutputFormat fmt, const std::string &out, bool timings) {
  std::string text = fmt == egl::OutputFormat::Json ? egl::to_json(r, timings).dump(2) + "\n"
                                                    : egl::render_text(r, true);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return exit_config;
    }
    f << text;
    std::cout << egl::render_text(r, timings || fmt == egl::OutputFormat::Text);
  }
  return r.verdict ? 0 : exit_fail;
}

egl::OutputFormat parse_format(const std::string &s) {
  if (s == "json")
    return egl::OutputFormat::Json;
  if (s == "text")
    return egl::OutputFormat::Text;
  throw egl::Error(egl::ErrorCode::ConfigError, "--format must be json or text");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Chart-level elliptic groupoid models, verification suites and integrability decisions"};
  app.require_subcommand(1);

  auto *verify = app.add_subcommand("verify", "run verification checks on models");
  std::vector<std::string> models, checks, tols, samples;
  std::uint64_t seed = 1;
  std::optional<int> dim, k;
  std::string out, format = "text";
  bool timings = false;
  verify->add_option("--model", models, "model name(s); see list-models")->required();
  verify->add_option("--checks", checks, "comma separated checks; default: all that apply");
  verify->add_option("--seed", seed, "seed of the random streams (positive)");
  verify->add_option("--samples", samples, "N for every check, or check=N");
  verify->add_option("--tol", tols, "tolerance override key=value (h, abs_tol, rel_tol, subspace_tol, curvature_budget)");
  verify->add_option("--dim", dim, "base dimension n");
  verify->add_option("--k", k, "number of normal crossing factors");
  verify->add_option("--out", out, "write the report to this file");
  verify->add_option("--format", format, "json or text");
  verify->add_flag("--timings", timings, "include wall-clock times in JSON reports (breaks byte-identical output)");

  auto *dec = app.add_subcommand("decide", "run an integrability decision on a JSON document");
  std::string input, kind, dout, dformat = "text";
  dec->add_option("input", input, "decision document (path or fixture name)")->required();
  dec->add_option("--kind", kind, "smooth, double-cover or normal-crossing")->required();
  dec->add_option("--out", dout, "write the report to this file");
  dec->add_option("--format", dformat, "json or text");

  auto *lm = app.add_subcommand("list-models", "list model names");
  auto *lc = app.add_subcommand("list-checks", "list check names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (lm->parsed()) {
      for (const auto &m : egl::model_catalog())
        std::cout << m.name << "\t" << m.description << "\n";
      return 0;
    }
    if (lc->parsed()) {
      for (const auto &c : egl::check_names())
        std::cout << c << "\t" << egl::default_samples().at(c) << " samples by default\n";
      return 0;
    }
    if (verify->parsed()) {
      egl::RunConfig c;
      c.models = split_models(models);
      c.checks = split_commas(checks);
      c.seed = seed;
      c.dim = dim;
      c.k = k;
      c.out = out;
      c.format = parse_format(format);
      c.timings = timings;
      for (const auto &s : split_commas(samples)) {
        auto eq = s.find('=');
        std::string name = eq == std::string::npos ? "" : s.substr(0, eq);
        std::string val = eq == std::string::npos ? s : s.substr(eq + 1);
        long long n = 0;
        try {
          std::size_t used = 0;
          n = std::stoll(val, &used);
          if (used != val.size())
            n = 0;
        } catch (const std::exception &) {
        }
        if (n <= 0)
          throw egl::Error(egl::ErrorCode::ConfigError, "--samples: '" + s + "' is not a positive count");
        if (name.empty())
          c.samples = n;
        else
          c.samples_by[name] = n;
      }
      for (const auto &t : tols)
        egl::apply_tolerance(c.profile, t);
      return emit(egl::run_verify(c), c.format, c.out, c.timings);
    }
    if (dec->parsed()) {
      auto fmt = parse_format(dformat);
      auto r = egl::run_decide(input, egl::parse_decision_kind(kind), EGL_DEFAULT_FIXTURE_DIR);
      return emit(r, fmt, dout, false);
    }
  } catch (const egl::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
    case egl::ErrorCode::ConfigError:
    case egl::ErrorCode::SchemaError:
    case egl::ErrorCode::MalformedPresentation:
    case egl::ErrorCode::UnknownGenerator:
    case egl::ErrorCode::KTooLarge:
    case egl::ErrorCode::DimensionMismatch:
    case egl::ErrorCode::InvalidTolerance:
      return exit_config;
    default:
      return exit_fail;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fail;
  }
  return 0;
}
