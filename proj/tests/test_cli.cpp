#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "prequant/cli.hpp"
#include "prequant/errors.hpp"

using namespace prequant;
using prequant::cli::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "prequant");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

const char* kSmall = "--samples=4";

}  // namespace

TEST(ScenarioDoc, RoundTripsThroughJson) {
  for (const cli::Builtin& b : cli::builtins()) {
    const cli::ScenarioDoc doc = cli::make_builtin(b, {}, std::nullopt);
    const json j = cli::to_json(doc);
    EXPECT_EQ(cli::to_json(cli::parse_scenario(j)), j) << b.name;
  }
}

TEST(ScenarioDoc, RejectsUnknownKeysAndBadTypes) {
  json j = cli::to_json(cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {}, std::nullopt));
  j["colour"] = "blue";
  EXPECT_THROW(cli::parse_scenario(j), ParseError);
  json k = cli::to_json(cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {}, std::nullopt));
  k["group"] = 3;
  EXPECT_THROW(cli::parse_scenario(k), ParseError);
  EXPECT_THROW(cli::load_scenario_file("/nonexistent/x.json"), ParseError);
  EXPECT_THROW(cli::load_scenario_file(write_temp("prequant_bad.json", "{ not json")), ParseError);
}

TEST(ScenarioDoc, UnknownCatalogIds) {
  cli::ScenarioDoc doc = cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {}, std::nullopt);
  doc.group = "g2";
  EXPECT_THROW(cli::build_scenario(doc), CatalogError);
  EXPECT_THROW(cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {{"m", 1.0}}, std::nullopt), CatalogError);
  EXPECT_EQ(cli::find_builtin("nope"), nullptr);
}

TEST(ScenarioDoc, GridOverride) {
  const cli::ScenarioDoc doc = cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {}, std::nullopt);
  EXPECT_EQ(cli::build_scenario(doc, 64).manifold.grid, 64);
}

TEST(Commands, ListNamesEveryBuiltin) {
  const Outcome r = run({"list"});
  EXPECT_EQ(r.code, 0);
  for (const cli::Builtin& b : cli::builtins()) EXPECT_NE(r.out.find(b.name), std::string::npos);
}

TEST(Commands, ExitCodes) {
  EXPECT_EQ(run({"run", "sphere-so3-n1", kSmall}).code, 0);
  // Builtin expectations follow the switch; a file's are fixed.
  EXPECT_EQ(run({"run", "torus-flat-twist", "--twisting", "off", kSmall}).code, 0);
  const auto twist = write_temp("prequant_twist.json",
                                cli::to_json(cli::make_builtin(*cli::find_builtin("torus-flat-twist"), {}, true)).dump());
  EXPECT_EQ(run({"run", twist.string(), "--twisting", "off", kSmall}).code, 2);
  EXPECT_EQ(run({"run", "no-such-builtin"}).code, 4);
  EXPECT_EQ(run({"run", "missing/file.json"}).code, 4);
  EXPECT_EQ(run({"run", "sphere-so3-n1", "--param", "n"}).code, 4);
  EXPECT_EQ(run({"frobnicate"}).code, 4);

  json j = cli::to_json(cli::make_builtin(*cli::find_builtin("sphere-so3-n1"), {}, std::nullopt));
  j["moment_map"]["scale"] = 1.0;
  const auto broken = write_temp("prequant_broken_moment.json", j.dump());
  const Outcome r = run({"run", broken.string(), kSmall});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical"), std::string::npos);
}

TEST(Commands, ParamsReachTheBuiltin) {
  const Outcome r = run({"run", "sphere-so3-n1", "--param", "n=2", "--format", "json", kSmall});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["equivariant_fixed_mu"].get<bool>());
  EXPECT_EQ(j["chern"][0].get<int>(), 2);
}

TEST(Commands, OutputIsDeterministic) {
  const Outcome a = run({"run", "sphere-s1-shift", "--format", "json", kSmall});
  const Outcome b = run({"run", "sphere-s1-shift", "--format", "json", kSmall});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Commands, JsonReportCarriesTheObstruction) {
  const Outcome r = run({"run", "torus-flat-twist", "--format", "json", kSmall});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  for (const char* key : {"scenario", "prequantizable", "equivariant_fixed_mu", "equivariant_some_mu", "reasons",
                          "obstruction", "expectations_met"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["obstruction"]["flat_twist"]["feasible"].get<bool>());
  EXPECT_TRUE(j["expectations_met"].get<bool>());
}

TEST(Commands, TextReportListsReasons) {
  const Outcome r = run({"run", "sphere-so3-n1", kSmall});
  EXPECT_NE(r.out.find("reasons:"), std::string::npos);
  EXPECT_NE(r.out.find("expectations:"), std::string::npos);
}

TEST(Commands, ShowEmitsAParsableScenario) {
  const Outcome r = run({"show", "trivial-circle", "--param", "c=0.3"});
  ASSERT_EQ(r.code, 0);
  const cli::ScenarioDoc doc = cli::parse_scenario(json::parse(r.out));
  EXPECT_EQ(doc.moment_c, (std::vector<double>{0.3}));
  const auto path = write_temp("prequant_shown.json", r.out);
  EXPECT_EQ(run({"run", path.string(), kSmall}).code, 0);
}

TEST(Commands, EnvironmentGridYieldsToTheFlag) {
  ::setenv("PREQUANT_GRID", "64", 1);
  const Outcome env = run({"run", "sphere-so3-n2", "--format", "json", kSmall});
  const Outcome flag = run({"run", "sphere-so3-n2", "--format", "json", "--grid", "128", kSmall});
  ::setenv("PREQUANT_GRID", "x", 1);
  const Outcome bad = run({"run", "sphere-so3-n2", kSmall});
  ::unsetenv("PREQUANT_GRID");
  ASSERT_EQ(env.code, 0) << env.err;
  ASSERT_EQ(flag.code, 0) << flag.err;
  EXPECT_EQ(json::parse(env.out)["grid"].get<int>(), 64);
  EXPECT_EQ(json::parse(flag.out)["grid"].get<int>(), 128);
  EXPECT_EQ(bad.code, 4);
}

TEST(Commands, SweepReportsEveryFile) {
  const auto dir = std::filesystem::temp_directory_path() / "prequant_sweep";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (const char* name : {"sphere-so3-n2", "trivial-circle"}) {
    std::ofstream(dir / (std::string(name) + ".json"))
        << cli::to_json(cli::make_builtin(*cli::find_builtin(name), {}, std::nullopt)).dump();
  }
  std::ofstream(dir / "zz-broken.json") << "[]";
  const Outcome r = run({"sweep", dir.string(), kSmall});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("sphere-so3-n2.json: ok"), std::string::npos);
  EXPECT_NE(r.out.find("zz-broken.json: INPUT ERROR"), std::string::npos);
  std::filesystem::remove_all(dir);
}
