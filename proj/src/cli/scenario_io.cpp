#include <fstream>
#include <set>
#include <sstream>

#include "prequant/cli.hpp"
#include "prequant/errors.hpp"

namespace prequant::cli {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ParseError("unknown key '" + key + "' in " + where);
  }
}

std::vector<double> number_or_list(const json& j) {
  if (j.is_number()) return {j.get<double>()};
  return j.get<std::vector<double>>();
}

json vec_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Expectation parse_expect(const json& j) {
  reject_unknown(j, {"prequantizable", "equivariant_fixed_mu", "equivariant_some_mu", "tensor_power", "moment_shift"},
                 "expect");
  Expectation e;
  if (j.contains("prequantizable")) e.prequantizable = j.at("prequantizable").get<bool>();
  if (j.contains("equivariant_fixed_mu")) e.equivariant_fixed_mu = j.at("equivariant_fixed_mu").get<bool>();
  if (j.contains("equivariant_some_mu")) e.equivariant_some_mu = j.at("equivariant_some_mu").get<bool>();
  if (j.contains("tensor_power")) e.tensor_power = j.at("tensor_power").get<int>();
  if (j.contains("moment_shift")) e.moment_shift = number_or_list(j.at("moment_shift"));
  return e;
}

json expect_json(const Expectation& e) {
  json j = json::object();
  if (e.prequantizable) j["prequantizable"] = *e.prequantizable;
  if (e.equivariant_fixed_mu) j["equivariant_fixed_mu"] = *e.equivariant_fixed_mu;
  if (e.equivariant_some_mu) j["equivariant_some_mu"] = *e.equivariant_some_mu;
  if (e.tensor_power) j["tensor_power"] = *e.tensor_power;
  if (e.moment_shift) j["moment_shift"] = vec_json(*e.moment_shift);
  return j;
}

ScenarioDoc parse_doc(const json& j, bool nested) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  reject_unknown(j,
                 {"name", "description", "manifold", "grid", "group", "action", "omega", "moment_map", "connection",
                  "flags", "tensor", "expect"},
                 "scenario");
  ScenarioDoc d;
  d.name = j.value("name", std::string{});
  d.description = j.value("description", std::string{});
  if (!nested && d.name.empty()) throw ParseError("scenario needs a name");
  if (j.contains("grid")) d.grid = j.at("grid").get<int>();
  if (j.contains("flags")) {
    const json& f = j.at("flags");
    reject_unknown(f, {"twisting_enabled", "tol", "samples", "seed"}, "flags");
    d.twisting_enabled = f.value("twisting_enabled", false);
    if (f.contains("tol")) d.tol = f.at("tol").get<double>();
    if (f.contains("samples")) d.samples = f.at("samples").get<int>();
    if (f.contains("seed")) d.seed = f.at("seed").get<std::uint64_t>();
  }
  if (j.contains("expect")) d.expect = parse_expect(j.at("expect"));
  if (j.contains("tensor")) {
    for (const json& f : j.at("tensor")) d.tensor.push_back(parse_doc(f, true));
    if (d.tensor.size() < 2) throw ParseError("tensor needs at least two factors");
    return d;
  }

  d.manifold = j.at("manifold").get<std::string>();
  d.group = j.at("group").get<std::string>();
  const json& a = j.at("action");
  if (a.is_string()) {
    d.action = a.get<std::string>();
  } else {
    reject_unknown(a, {"id", "axis"}, "action");
    d.action = a.at("id").get<std::string>();
    if (a.contains("axis")) {
      const auto v = a.at("axis").get<std::vector<double>>();
      if (v.size() != 3) throw ParseError("action axis needs three components");
      d.axis = Eigen::Vector3d(v[0], v[1], v[2]);
    }
  }
  const json& w = j.at("omega");
  reject_unknown(w, {"kind", "lambda"}, "omega");
  d.omega_kind = w.at("kind").get<std::string>();
  if (d.omega_kind == "scalar_times_volume") {
    d.lambda = w.at("lambda").get<double>();
  } else if (d.omega_kind != "zero") {
    throw ParseError("unknown omega kind '" + d.omega_kind + "'");
  }
  const json& m = j.at("moment_map");
  reject_unknown(m, {"id", "scale", "c", "shift"}, "moment_map");
  d.moment_id = m.at("id").get<std::string>();
  if (d.moment_id == "height") {
    d.moment_scale = m.at("scale").get<double>();
  } else if (d.moment_id == "constant") {
    d.moment_c = number_or_list(m.at("c"));
  } else {
    throw ParseError("unknown moment map id '" + d.moment_id + "'");
  }
  if (m.contains("shift")) d.moment_shift = number_or_list(m.at("shift"));
  if (j.contains("connection")) {
    const json& c = j.at("connection");
    reject_unknown(c, {"chern", "beta", "lambda"}, "connection");
    if (c.contains("chern")) {
      const json& ch = c.at("chern");
      d.chern = ch.is_array() ? ch.at(0).get<int>() : ch.get<int>();
    }
    if (c.contains("beta")) d.beta = c.at("beta").get<std::vector<double>>();
    if (c.contains("lambda") && c.at("lambda").get<double>() != d.lambda) {
      throw ParseError("connection lambda differs from omega lambda");
    }
  }
  return d;
}

}  // namespace

ScenarioDoc parse_scenario(const json& j) {
  try {
    return parse_doc(j, false);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
}

json to_json(const ScenarioDoc& d) {
  json j;
  if (!d.name.empty()) j["name"] = d.name;
  if (!d.description.empty()) j["description"] = d.description;
  if (d.tensor.empty()) {
    j["manifold"] = d.manifold;
  }
  if (d.grid) j["grid"] = *d.grid;
  if (d.tensor.empty()) {
    j["group"] = d.group;
    if (d.axis) {
      j["action"] = {{"id", d.action}, {"axis", {(*d.axis)[0], (*d.axis)[1], (*d.axis)[2]}}};
    } else {
      j["action"] = d.action;
    }
    if (d.omega_kind == "zero") {
      j["omega"] = {{"kind", "zero"}};
    } else {
      j["omega"] = {{"kind", d.omega_kind}, {"lambda", d.lambda}};
    }
    json m = {{"id", d.moment_id}};
    if (d.moment_id == "height") m["scale"] = d.moment_scale;
    if (d.moment_id == "constant") m["c"] = vec_json(d.moment_c);
    if (!d.moment_shift.empty()) m["shift"] = vec_json(d.moment_shift);
    j["moment_map"] = m;
    json c = json::object();
    if (d.chern) c["chern"] = *d.chern;
    if (!d.beta.empty()) c["beta"] = vec_json(d.beta);
    if (!c.empty()) j["connection"] = c;
  } else {
    json factors = json::array();
    for (const ScenarioDoc& f : d.tensor) factors.push_back(to_json(f));
    j["tensor"] = factors;
  }
  json f = {{"twisting_enabled", d.twisting_enabled}};
  if (d.tol) f["tol"] = *d.tol;
  if (d.samples) f["samples"] = *d.samples;
  if (d.seed) f["seed"] = *d.seed;
  j["flags"] = f;
  const json e = expect_json(d.expect);
  if (!e.empty()) j["expect"] = e;
  return j;
}

ScenarioDoc load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

Scenario build_scenario(const ScenarioDoc& d, std::optional<int> grid_override) {
  if (!d.tensor.empty()) {
    Scenario s = build_scenario(d.tensor.front(), grid_override ? grid_override : d.grid);
    for (std::size_t i = 1; i < d.tensor.size(); ++i) {
      s = tensor_scenario(s, build_scenario(d.tensor[i], grid_override ? grid_override : d.grid));
    }
    s.name = d.name;
    s.description = d.description;
    s.twisting_enabled = d.twisting_enabled;
    return s;
  }
  Scenario s;
  s.name = d.name;
  s.description = d.description;
  s.manifold.kind = parse_manifold_id(d.manifold);
  if (d.grid) s.manifold.grid = *d.grid;
  if (grid_override) s.manifold.grid = *grid_override;
  if (s.manifold.grid < 8) throw CatalogError("grid must be at least 8");
  s.group = parse_group_id(d.group);
  if (!s.group.concrete()) throw CatalogError("scenarios need a concrete group, got " + s.group.id());
  s.omega = d.omega_kind == "zero" ? zero_form() : scalar_times_volume(d.lambda);
  s.action = make_action(d.action, s.group, s.manifold.kind, d.axis.value_or(Eigen::Vector3d::UnitX()));
  if (d.moment_id == "height") {
    s.moment = height_moment(s.action, d.moment_scale);
  } else {
    s.moment = constant_moment(s.group, d.moment_c);
  }
  if (!d.moment_shift.empty()) {
    if (static_cast<int>(d.moment_shift.size()) != s.group.h1_algebra_dim) {
      throw CatalogError("moment shift needs " + std::to_string(s.group.h1_algebra_dim) + " coefficients");
    }
    s.moment = shifted(s.moment, s.group, d.moment_shift);
  }
  if (d.beta.empty()) {
    s.beta.assign(static_cast<std::size_t>(s.manifold.h1_rank()), ModOne{});
  } else {
    if (static_cast<int>(d.beta.size()) != s.manifold.h1_rank()) {
      throw CatalogError("connection beta needs " + std::to_string(s.manifold.h1_rank()) + " entries on " + d.manifold);
    }
    for (double b : d.beta) s.beta.push_back(ModOne::from_real(b));
  }
  s.twisting_enabled = d.twisting_enabled;
  return s;
}

}  // namespace prequant::cli
