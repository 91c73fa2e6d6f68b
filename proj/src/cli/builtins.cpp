#include <cmath>
#include <numbers>

#include "prequant/cli.hpp"
#include "prequant/errors.hpp"

namespace prequant::cli {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_integer(double x, double tol = 1e-9) { return std::abs(x - std::round(x)) < tol; }

ScenarioDoc sphere_rotation(const std::string& name, const std::string& group, double n) {
  ScenarioDoc d;
  d.name = name;
  d.manifold = "sphere2";
  d.group = group;
  d.action = "rotation";
  d.omega_kind = "scalar_times_volume";
  d.lambda = n / (4.0 * kPi);
  d.moment_id = "height";
  d.moment_scale = d.lambda;
  if (is_integer(n)) d.chern = static_cast<int>(std::lround(n));
  d.expect.prequantizable = is_integer(n);
  return d;
}

// lambda = n / 4 pi, mu = lambda h. Delta(X) = n k / 2 for |v_X| = 2 pi k, so
// the lift with mu fixed exists iff n is even.
ScenarioDoc so3_sphere(const std::string& name, const Params& p) {
  const double n = p.at("n");
  ScenarioDoc d = sphere_rotation(name, "so3", n);
  d.description = "SO(3) rotating S^2, omega = n/(4 pi) vol, mu = omega-scaled height";
  const bool integral = is_integer(n);
  const bool even = integral && is_integer(n / 2.0);
  d.expect.equivariant_fixed_mu = even;
  d.expect.equivariant_some_mu = even;
  if (integral) d.expect.tensor_power = even ? 1 : 2;
  return d;
}

ScenarioDoc make_so3_n1(const Params& p, bool twisting) {
  ScenarioDoc d = so3_sphere("sphere-so3-n1", p);
  d.twisting_enabled = twisting;
  return d;
}

ScenarioDoc make_so3_n2(const Params& p, bool twisting) {
  ScenarioDoc d = so3_sphere("sphere-so3-n2", p);
  d.twisting_enabled = twisting;
  return d;
}

ScenarioDoc make_su2_n1(const Params& p, bool twisting) {
  const double n = p.at("n");
  ScenarioDoc d = sphere_rotation("sphere-su2-n1", "su2", n);
  d.description = "SU(2) rotating S^2 through SO(3), omega = n/(4 pi) vol";
  const bool integral = is_integer(n);
  d.expect.equivariant_fixed_mu = integral;
  d.expect.equivariant_some_mu = integral;
  if (integral) d.expect.tensor_power = 1;
  d.twisting_enabled = twisting;
  return d;
}

// Circle rotating S^2 about the x axis. Delta(2 pi k) = n k / 2; the shift
// b = -1/(4 pi) removes it when n is odd.
ScenarioDoc make_s1_shift(const Params& p, bool twisting) {
  const double n = p.at("n");
  ScenarioDoc d = sphere_rotation("sphere-s1-shift", "circle", n);
  d.description = "circle rotating S^2 about the x axis, omega = n/(4 pi) vol; fixed mu obstructed, shifted mu not";
  d.axis = Eigen::Vector3d::UnitX();
  const bool integral = is_integer(n);
  const bool even = integral && is_integer(n / 2.0);
  d.expect.equivariant_fixed_mu = even;
  d.expect.equivariant_some_mu = integral;
  if (integral) d.expect.tensor_power = 1;
  if (integral && !even) d.expect.moment_shift = std::vector<double>{-1.0 / (4.0 * kPi)};
  d.twisting_enabled = twisting;
  return d;
}

// Flat torus, circle translating alpha, mu = c. Delta(2 pi z) = 2 pi z c, which
// a flat twist beta_1 = 2 pi c cancels.
ScenarioDoc make_torus_twist(const Params& p, bool twisting) {
  const double c = p.at("c");
  ScenarioDoc d;
  d.name = "torus-flat-twist";
  d.description = "circle translating the flat torus, omega = 0, constant mu = c; cancelled by a flat twist";
  d.manifold = "torus2";
  d.group = "circle";
  d.action = "translation";
  d.omega_kind = "zero";
  d.moment_id = "constant";
  d.moment_c = {c};
  d.chern = 0;
  d.beta = {0.0, 0.0};
  d.twisting_enabled = twisting;
  d.expect.prequantizable = true;
  d.expect.equivariant_fixed_mu = twisting || is_integer(2.0 * kPi * c);
  d.expect.equivariant_some_mu = true;
  d.expect.tensor_power = 1;
  return d;
}

// Trivial bundle on S^2 with omega = 0 and the constant moment map c: the
// lift with mu fixed exists iff 2 pi c is an integer.
ScenarioDoc make_trivial_circle(const Params& p, bool twisting) {
  const double c = p.at("c");
  ScenarioDoc d;
  d.name = "trivial-circle";
  d.description = "trivial bundle on S^2, circle rotation, constant mu = c";
  d.manifold = "sphere2";
  d.group = "circle";
  d.action = "rotation";
  d.axis = Eigen::Vector3d::UnitX();
  d.omega_kind = "zero";
  d.moment_id = "constant";
  d.moment_c = {c};
  d.chern = 0;
  d.twisting_enabled = twisting;
  d.expect.prequantizable = true;
  d.expect.equivariant_fixed_mu = is_integer(2.0 * kPi * c);
  d.expect.equivariant_some_mu = true;
  d.expect.tensor_power = 1;
  return d;
}

ScenarioDoc make_tensor_so3(const Params& p, bool twisting) {
  ScenarioDoc a = so3_sphere("factor-1", p);
  ScenarioDoc b = so3_sphere("factor-2", p);
  a.expect = {};
  b.expect = {};
  ScenarioDoc d;
  d.name = "tensor-so3";
  d.description = "square of the SO(3) sphere scenario; omega and mu double";
  d.tensor = {a, b};
  d.twisting_enabled = twisting;
  const double n = 2.0 * p.at("n");
  const bool integral = is_integer(n);
  const bool even = integral && is_integer(n / 2.0);
  d.expect.prequantizable = integral;
  d.expect.equivariant_fixed_mu = even;
  d.expect.equivariant_some_mu = even;
  if (integral) d.expect.tensor_power = even ? 1 : 2;
  return d;
}

}  // namespace

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> catalog = {
      {"sphere-so3-n1", "SO(3) on S^2, omega = vol/(4 pi): prequantizable, not equivariant, r = 2", {{"n", 1.0}}, false,
       make_so3_n1},
      {"sphere-so3-n2", "SO(3) on S^2, omega = vol/(2 pi): equivariant", {{"n", 2.0}}, false, make_so3_n2},
      {"sphere-su2-n1", "SU(2) on S^2, omega = vol/(4 pi): equivariant", {{"n", 1.0}}, false, make_su2_n1},
      {"sphere-s1-shift", "circle on S^2, omega = vol/(4 pi): moment shift c = -1/(4 pi)", {{"n", 1.0}}, false,
       make_s1_shift},
      {"torus-flat-twist", "circle on T^2, omega = 0, mu = c: flat twist", {{"c", 0.3}}, true, make_torus_twist},
      {"trivial-circle", "trivial bundle, circle, mu = c: equivariant iff 2 pi c is an integer",
       {{"c", 1.0 / (2.0 * std::numbers::pi)}}, false, make_trivial_circle},
      {"tensor-so3", "tensor square of sphere-so3-n1: equivariant", {{"n", 1.0}}, false, make_tensor_so3},
  };
  return catalog;
}

const Builtin* find_builtin(const std::string& name) {
  for (const Builtin& b : builtins()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

ScenarioDoc make_builtin(const Builtin& b, const Params& overrides, std::optional<bool> twisting) {
  Params p = b.defaults;
  for (const auto& [key, value] : overrides) {
    if (!p.contains(key)) throw CatalogError("builtin " + b.name + " has no parameter '" + key + "'");
    p[key] = value;
  }
  return b.make(p, twisting.value_or(b.twisting_default));
}

}  // namespace prequant::cli
