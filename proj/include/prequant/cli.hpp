#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "prequant/verdict.hpp"

namespace prequant::cli {

using json = nlohmann::ordered_json;

/// Verdict fields a scenario file may assert.
struct Expectation {
  std::optional<bool> prequantizable;
  std::optional<bool> equivariant_fixed_mu;
  std::optional<bool> equivariant_some_mu;
  std::optional<int> tensor_power;
  std::optional<std::vector<double>> moment_shift;  // compared within 1e-6
};

/// The serializable form of a scenario.
struct ScenarioDoc {
  std::string name;
  std::string description;
  std::string manifold = "sphere2";
  std::optional<int> grid;
  std::string group;
  std::string action;
  std::optional<Eigen::Vector3d> axis;
  std::string omega_kind = "zero";  // "zero" | "scalar_times_volume"
  double lambda = 0.0;
  std::string moment_id;  // "height" | "constant"
  double moment_scale = 0.0;
  std::vector<double> moment_c;
  std::vector<double> moment_shift;
  std::optional<int> chern;
  std::vector<double> beta;
  bool twisting_enabled = false;
  std::optional<double> tol;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::vector<ScenarioDoc> tensor;  // non-empty: the scenario is the tensor product of these
  Expectation expect;
};

/// Throws ParseError on malformed input or unknown keys.
ScenarioDoc parse_scenario(const json& j);
json to_json(const ScenarioDoc& doc);
/// Throws ParseError if the file is missing or not valid JSON.
ScenarioDoc load_scenario_file(const std::filesystem::path& path);
/// Resolves catalog ids. Throws CatalogError. grid_override replaces the document's grid.
Scenario build_scenario(const ScenarioDoc& doc, std::optional<int> grid_override = std::nullopt);

using Params = std::map<std::string, double>;

struct Builtin {
  std::string name;
  std::string description;
  Params defaults;
  bool twisting_default = false;
  ScenarioDoc (*make)(const Params&, bool twisting);
};

const std::vector<Builtin>& builtins();
const Builtin* find_builtin(const std::string& name);
/// Builds a builtin with `overrides` applied to its parameters. Throws CatalogError on unknown parameters.
ScenarioDoc make_builtin(const Builtin& b, const Params& overrides, std::optional<bool> twisting);

struct ExpectationCheck {
  std::string field;
  std::string expected;
  std::string actual;
  bool met = false;
};
std::vector<ExpectationCheck> compare(const Expectation& e, const Verdict& v);

struct RunOptions {
  AnalysisOptions analysis;
  std::optional<int> grid;
};

struct Report {
  ScenarioDoc doc;
  Scenario scenario;
  Verdict verdict;
  std::vector<ExpectationCheck> checks;
  [[nodiscard]] bool expectations_met() const;
};

json report_json(const Report& r);
std::string report_text(const Report& r);

/// Entry point of the prequant tool. Returns the process exit code:
/// 0 ok, 2 expectation not met, 3 numerical or verification failure,
/// 4 parse error, unknown catalog id, or missing file.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prequant::cli
