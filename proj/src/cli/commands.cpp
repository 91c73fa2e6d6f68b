#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <ostream>

#include "prequant/cli.hpp"
#include "prequant/errors.hpp"
#include "prequant/kernels.hpp"

namespace prequant::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInput = 4;

struct Flags {
  std::optional<int> grid;
  std::optional<double> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
  std::vector<std::string> params;
  std::string twisting;
  int threads = 0;
};

std::optional<long long> env_integer(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long long x = std::strtoll(v, &end, 10);
  if (*end != '\0') throw ParseError(std::string("environment variable ") + name + " is not an integer: " + v);
  return x;
}

Params parse_params(const std::vector<std::string>& raw) {
  Params p;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("--param expects name=value, got '" + item + "'");
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw ParseError("--param value is not a number: '" + value + "'");
    p[item.substr(0, eq)] = x;
  }
  return p;
}

std::optional<bool> parse_twisting(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "on") return true;
  if (s == "off") return false;
  throw ParseError("--twisting expects on or off");
}

// Scenario file values, then environment, then flags.
RunOptions resolve(const ScenarioDoc& doc, const Flags& f) {
  RunOptions o;
  if (doc.tol) o.analysis.vanish_tol = *doc.tol;
  if (doc.samples) o.analysis.samples = *doc.samples;
  if (doc.seed) o.analysis.seed = *doc.seed;
  o.grid = doc.grid;
  if (auto g = env_integer("PREQUANT_GRID")) o.grid = static_cast<int>(*g);
  if (auto s = env_integer("PREQUANT_SEED")) o.analysis.seed = static_cast<std::uint64_t>(*s);
  if (f.grid) o.grid = *f.grid;
  if (f.tol) o.analysis.vanish_tol = *f.tol;
  if (f.samples) o.analysis.samples = *f.samples;
  if (f.seed) o.analysis.seed = *f.seed;
  if (o.analysis.samples < 0) throw ParseError("--samples must be non-negative");
  if (!(o.analysis.vanish_tol > 0)) throw ParseError("--tol must be positive");
  return o;
}

ScenarioDoc load_target(const std::string& target, const Flags& f) {
  const Params params = parse_params(f.params);
  const std::optional<bool> twisting = parse_twisting(f.twisting);
  std::error_code ec;
  if (std::filesystem::is_regular_file(target, ec)) {
    if (!params.empty()) throw ParseError("--param applies to builtins only");
    ScenarioDoc doc = load_scenario_file(target);
    if (twisting) doc.twisting_enabled = *twisting;
    return doc;
  }
  if (const Builtin* b = find_builtin(target)) return make_builtin(*b, params, twisting);
  if (target.find('/') != std::string::npos || target.ends_with(".json")) {
    throw ParseError("no such scenario file: " + target);
  }
  throw CatalogError("unknown builtin '" + target + "' (see 'prequant list')");
}

Report run_doc(const ScenarioDoc& doc, const Flags& f) {
  const RunOptions o = resolve(doc, f);
  Report r;
  r.doc = doc;
  r.scenario = build_scenario(doc, o.grid);
  r.verdict = analyze(r.scenario, o.analysis);
  r.checks = compare(doc.expect, r.verdict);
  if (doc.chern && !r.verdict.chern.empty()) {
    const int actual = r.verdict.chern.front();
    r.checks.push_back({"chern", std::to_string(*doc.chern), std::to_string(actual), actual == *doc.chern});
  }
  return r;
}

// Runs `body`, mapping library errors to exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CatalogError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const PreconditionError& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int worst(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case kExitInput:
        return 3;
      case kExitNumerical:
        return 2;
      case kExitMismatch:
        return 1;
      default:
        return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

int cmd_run(const std::string& target, const Flags& f, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Report r = run_doc(load_target(target, f), f);
    if (f.format == "json") {
      out << report_json(r).dump(2) << "\n";
    } else {
      out << report_text(r);
    }
    return r.expectations_met() ? kExitOk : kExitMismatch;
  });
}

int cmd_list(std::ostream& out) {
  std::size_t width = 0;
  for (const Builtin& b : builtins()) width = std::max(width, b.name.size());
  for (const Builtin& b : builtins()) {
    out << b.name << std::string(width + 2 - b.name.size(), ' ') << b.description << "\n";
  }
  return kExitOk;
}

int cmd_show(const std::string& name, const Flags& f, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Builtin* b = find_builtin(name);
    if (!b) throw CatalogError("unknown builtin '" + name + "'");
    out << to_json(make_builtin(*b, parse_params(f.params), parse_twisting(f.twisting))).dump(2) << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const std::string& dir, const Flags& f, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    err << "error: not a directory: " << dir << "\n";
    return kExitInput;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (!f.params.empty()) {
    err << "error: --param applies to builtins only\n";
    return kExitInput;
  }
  int code = kExitOk;
  json reports = json::array();
  for (const auto& path : files) {
    std::string status;
    const int c = guarded(err, [&] {
      ScenarioDoc doc = load_scenario_file(path);
      if (auto t = parse_twisting(f.twisting)) doc.twisting_enabled = *t;
      const Report r = run_doc(doc, f);
      if (f.format == "json") reports.push_back(report_json(r));
      status = r.expectations_met() ? "ok" : "MISMATCH";
      return r.expectations_met() ? kExitOk : kExitMismatch;
    });
    if (status.empty()) status = c == kExitNumerical ? "NUMERICAL FAILURE" : "INPUT ERROR";
    if (f.format != "json") out << path.filename().string() << ": " << status << "\n";
    code = worst(code, c);
  }
  if (f.format == "json") out << reports.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide prequantizability and equivariant prequantizability of invariant 2-forms"};
  app.name("prequant");
  app.require_subcommand(1);
  Flags f;

  auto add_analysis = [&](CLI::App* sub) {
    sub->add_option("--grid", f.grid, "chart grid cells per axis (default 256, env PREQUANT_GRID)");
    sub->add_option("--tol", f.tol, "verdict vanishing tolerance (default 5e-5)");
    sub->add_option("--samples", f.samples, "random ker exp samples beyond the generators (default 32)");
    sub->add_option("--seed", f.seed, "sampler seed (default 0, env PREQUANT_SEED)");
    sub->add_option("--format", f.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--twisting", f.twisting, "allow flat retwisting of the connection: on or off")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
  };

  std::string target;
  CLI::App* run = app.add_subcommand("run", "run a scenario file or builtin");
  run->add_option("target", target, "scenario file or builtin name")->required();
  run->add_option("--param", f.params, "builtin parameter name=value");
  add_analysis(run);

  app.add_subcommand("list", "list builtin scenarios");

  std::string dir;
  CLI::App* sweep = app.add_subcommand("sweep", "run every *.json scenario in a directory");
  sweep->add_option("dir", dir, "directory")->required();
  add_analysis(sweep);

  std::string shown;
  CLI::App* show = app.add_subcommand("show", "print a builtin as scenario JSON");
  show->add_option("builtin", shown, "builtin name")->required();
  show->add_option("--param", f.params, "builtin parameter name=value");
  show->add_option("--twisting", f.twisting, "on or off")->check(CLI::IsMember({"on", "off"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }
  if (f.threads > 0) kernels::set_threads(f.threads);

  if (run->parsed()) return cmd_run(target, f, out, err);
  if (sweep->parsed()) return cmd_sweep(dir, f, out, err);
  if (show->parsed()) return cmd_show(shown, f, out, err);
  return cmd_list(out);
}

}  // namespace prequant::cli
