// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "prequant/errors.hpp"
#include "prequant/verdict.hpp"

using namespace prequant;

namespace {

constexpr double kPi = std::numbers::pi;
const ManifoldSpec kSphere{ManifoldKind::Sphere2, 256};

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a failed check; keeps the first message.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

AlgebraElement rotation(const Eigen::Vector3d& w) { return AlgebraElement{w[0], w[1], w[2]}; }

AnalysisOptions opts(int samples = 8) { return fixture::quick(samples); }

// Loop based at p: small random trigonometric wobble around p.
Path wobble_loop(const Point& p, std::mt19937_64& rng) {
  const Eigen::Vector3d e1 = p.unitOrthogonal(), e2 = p.cross(e1);
  double a[3], b[3];
  for (int m = 0; m < 3; ++m) {
    a[m] = gen::uniform(rng, -0.5, 0.5) / (m + 1);
    b[m] = gen::uniform(rng, -0.5, 0.5) / (m + 1);
  }
  return make_path(ManifoldKind::Sphere2, [=](double t) -> Point {
    Eigen::Vector3d q = p;
    for (int m = 0; m < 3; ++m) {
      const double s = 2 * kPi * (m + 1) * t;
      q += a[m] * std::sin(s) * e1 + b[m] * (1 - std::cos(s)) * e2;
    }
    return q.normalized();
  });
}

LoopSpec capped(const Path& p) { return make_loop(p, auto_cap(p)); }

Path latitude(const Eigen::Vector3d& a, double alpha) {
  const Eigen::Vector3d e1 = a.unitOrthogonal(), e2 = a.cross(e1);
  return make_path(ManifoldKind::Sphere2, [=](double t) -> Point {
    return std::cos(alpha) * a + std::sin(alpha) * (std::cos(2 * kPi * t) * e1 + std::sin(2 * kPi * t) * e2);
  });
}

// ---------------------------------------------------------------------------

Outcome sphere_integrality() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double lambda = gen::uniform(rng, -2.0, 2.0);
    const double flux = integrate_two_form(kSphere, scalar_times_volume(lambda));
    worst = std::max(worst, std::abs(flux - oracle::sphere_flux(lambda)));
  }
  o.require(worst < 1e-6, fmt("flux error %.3g", worst));
  // 17 integral values n / 4 pi and 83 values strictly between them.
  std::vector<std::pair<double, bool>> sweep;
  for (int n = -8; n <= 8; ++n) sweep.emplace_back(n / (4 * kPi), true);
  while (sweep.size() < 100) {
    const double n = gen::uniform(rng, -8.5, 8.5);
    if (oracle::mod1_distance(n) > 1e-3) sweep.emplace_back(n / (4 * kPi), false);
  }
  int wrong = 0;
  for (const auto& [lambda, expected] : sweep) {
    if (is_integral(kSphere, scalar_times_volume(lambda)).integral != expected) ++wrong;
  }
  o.require(wrong == 0, fmt("%g of 100 integrality calls wrong", wrong));
  if (o.pass) o.detail = fmt("flux error %.2g; 100-value sweep exact", worst);
  return o;
}

Outcome so3_obstruction() {
  Outcome o;
  std::mt19937_64 rng(102);
  double worst = 0.0;
  int values = 0;
  for (int n : {1, 2, 3}) {
    const Scenario s = fixture::builtin("sphere-so3-n1", {{"n", n}});
    const ConnectionSpec conn = base_connection(s);
    for (int i = 0; i < 20; ++i) {
      const int k = gen::integer(rng, 1, 3);
      const DeltaResult r = delta(s, conn, rotation(2 * kPi * k * gen::unit_vector(rng)), opts());
      const ModOne expected = ModOne::from_real(oracle::sphere_delta(n, k));
      o.require(r.routes.size() == 3, "a sphere route did not apply");
      for (const RouteValue& v : r.routes) {
        worst = std::max(worst, v.value.distance(expected));
        ++values;
      }
      for (double b : r.base_samples) {
        worst = std::max(worst, ModOne::from_real(b).distance(expected));
        ++values;
      }
    }
  }
  o.require(worst < 5e-5, fmt("worst deviation from nk/2: %.3g", worst));
  if (o.pass) o.detail = fmt("%g route values, worst %.2g", values, worst);
  return o;
}

Outcome equivariant_verdicts() {
  Outcome o;
  // lambda = n / 4 pi: equivariant iff lambda = m / 2 pi, i.e. n even.
  for (double n : {-2.0, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    const Verdict v = analyze(fixture::builtin("sphere-so3-n1", {{"n", n}}), opts());
    const bool expected = oracle::mod1_distance(n / 2) < 1e-12;
    o.require(v.equivariant_fixed_mu == expected && v.equivariant_some_mu == expected,
              fmt("so3 verdict wrong at n = %g", n));
  }
  for (double n : {1.0, 2.0, 3.0, -1.0}) {
    const Verdict v = analyze(fixture::builtin("sphere-su2-n1", {{"n", n}}), opts());
    o.require(v.equivariant_fixed_mu && v.equivariant_some_mu, fmt("su2 not equivariant at n = %g", n));
  }
  const Verdict half = analyze(fixture::builtin("sphere-su2-n1", {{"n", 0.5}}), opts());
  o.require(!half.equivariant_fixed_mu, "su2 equivariant at a non-integral form");
  if (o.pass) o.detail = "so3 at 8 values of n, su2 at 5";
  return o;
}

Outcome moment_shift_witness() {
  Outcome o;
  const Scenario s = fixture::builtin("sphere-s1-shift");
  const ConnectionSpec conn = base_connection(s);
  const MomentShift m = solve_moment_shift(s, conn, opts());
  o.require(m.feasible && m.b.size() == 1, "solver found no shift: " + m.reason);
  if (!o.pass) return o;
  const double err = std::abs(m.b[0] + 1 / (4 * kPi));
  o.require(err < 1e-6, fmt("c = %.9g, error %.3g", m.b[0], err));
  const Scenario shifted = with_moment_shift(s, m.b);
  double worst = 0.0;
  for (int k = 1; k <= 5; ++k) {
    worst = std::max(worst, delta(shifted, conn, AlgebraElement{2 * kPi * k}, opts()).value.distance(ModOne{}));
  }
  o.require(worst < 5e-5, fmt("corrected Delta %.3g", worst));
  if (o.pass) o.detail = fmt("c = %.9f; corrected Delta <= %.2g", m.b[0], worst);
  return o;
}

Outcome trivial_bundle() {
  Outcome o;
  const std::vector<double> cs = {0.0, 1 / (2 * kPi), -1 / (2 * kPi), 3 / (2 * kPi), 0.1, 0.3, -0.25, 0.5, 1.0, 2.7};
  double worst = 0.0;
  for (double c : cs) {
    const Scenario s = fixture::builtin("trivial-circle", {{"c", c}});
    const ConnectionSpec conn = base_connection(s);
    for (int z = -5; z <= 5; ++z) {
      const ModOne d = delta(s, conn, AlgebraElement{2 * kPi * z}, opts()).value;
      worst = std::max(worst, d.distance(ModOne::from_real(oracle::trivial_delta(c, z))));
    }
    const bool expected = oracle::mod1_distance(2 * kPi * c) < 1e-9;
    o.require(analyze(s, opts()).equivariant_fixed_mu == expected, fmt("verdict wrong at c = %g", c));
  }
  o.require(worst < 1e-9, fmt("closed form missed by %.3g", worst));
  if (o.pass) o.detail = fmt("10 values of c, |z| <= 5, worst %.2g", worst);
  return o;
}

Outcome torus_twist() {
  Outcome o;
  const std::vector<double> cs = {0.3, 0.1, -0.2, 0.45, 0.77, 1.3, -1.1, 0.05, 2.2, 1 / (2 * kPi)};
  double worst = 0.0;
  for (double c : cs) {
    const Scenario s = fixture::builtin("torus-flat-twist", {{"c", c}});
    const ConnectionSpec conn = base_connection(s);
    const FlatTwist f = solve_flat_twist(s, conn, opts());
    o.require(f.feasible, fmt("no twist at c = %g", c));
    if (!f.feasible) continue;
    const ConnectionSpec twisted = with_twist(conn, f.beta);
    for (int z = -5; z <= 5; ++z) {
      worst = std::max(worst, delta(s, twisted, AlgebraElement{2 * kPi * z}, opts()).value.distance(ModOne{}));
    }
    const bool integral = oracle::mod1_distance(2 * kPi * c) < 1e-9;
    const Verdict off = analyze(fixture::builtin("torus-flat-twist", {{"c", c}}, false), opts());
    o.require(off.equivariant_fixed_mu == integral, fmt("twisting-off verdict wrong at c = %g", c));
  }
  o.require(worst < 5e-5, fmt("twisted Delta %.3g", worst));
  if (o.pass) o.detail = fmt("10 values of c, twisted Delta <= %.2g", worst);
  return o;
}

Outcome tensor_power() {
  Outcome o;
  const Verdict so3 = analyze(fixture::builtin("sphere-so3-n1"), opts());
  o.require(so3.tensor_power == 2, "sphere-so3-n1 tensor power is not 2");
  o.require(so3.power_statement == true, "r = 2 scenario not equivariant");
  const Scenario s2 = power_scenario(fixture::builtin("sphere-so3-n1"), 2);
  o.require(analyze(s2, opts()).equivariant_some_mu, "squared scenario not equivariant");
  for (const char* name : {"sphere-su2-n1", "sphere-s1-shift", "torus-flat-twist", "trivial-circle"}) {
    const Verdict v = analyze(fixture::builtin(name), opts());
    o.require(v.tensor_power == 1, std::string(name) + " tensor power is not 1");
  }
  if (o.pass) o.detail = "r = 2 for so3, r = 1 for the four abelian/su2 builtins";
  return o;
}

Outcome holonomy_laws() {
  Outcome o;
  std::mt19937_64 rng(108);
  const ConnectionSpec conn = make_connection(kSphere, scalar_times_volume(1 / (4 * kPi)));
  const ActionSpec act = make_action("rotation", GroupSpec::so3(), ManifoldKind::Sphere2);
  const MomentMapSpec mu = height_moment(act, 1 / (4 * kPi));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Point p = random_point(ManifoldKind::Sphere2, rng);
    const Path a = wobble_loop(p, rng), b = wobble_loop(p, rng);
    const ModOne ha = holonomy(conn, capped(a)), hb = holonomy(conn, capped(b));
    // composition
    worst = std::max(worst, holonomy(conn, capped(concat(a, b))).distance(ha + hb));
    // reverse
    worst = std::max(worst, (holonomy(conn, capped(reverse(a))) + ha).distance(ModOne{}));
    // conjugation of the equivariant holonomy along gamma = tau * b'
    const AlgebraElement xi = random_algebra_element(act.group, rng, 2.0);
    const Path tau = orbit_path(act, p, xi);
    const Path gamma = concat(tau, wobble_loop(tau.end(), rng));
    const GroupElement phi = exp_group(act.group, random_algebra_element(act.group, rng, 3.0));
    const ModOne before = equivariant_holonomy(conn, act, mu, xi, gamma);
    const ModOne after =
        equivariant_holonomy(conn, act, mu, adjoint_action(act.group, phi, xi), translate(act, phi, gamma));
    worst = std::max(worst, before.distance(after));
  }
  o.require(worst < 1e-5, fmt("worst law violation %.3g", worst));
  if (o.pass) o.detail = fmt("50 curve pairs, worst %.2g", worst);
  return o;
}

Outcome route_agreement() {
  Outcome o;
  std::mt19937_64 rng(109);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = gen::integer(rng, 1, 4);
    const ConnectionSpec conn = make_connection(kSphere, scalar_times_volume(n / (4 * kPi)));
    const Eigen::Vector3d a = gen::at_angle(Eigen::Vector3d::UnitZ(), gen::uniform(rng, 0.0, 1.2), rng);
    const double alpha = gen::uniform(rng, 0.1, 1.2);
    const Path loop = latitude(a, alpha);
    const LoopSpec up = make_loop(loop, Cap{a, 1}), down = make_loop(loop, Cap{-a, 1});
    o.require(route_applies(conn, up, HolonomyRoute::Potential), "potential route unavailable");
    worst = std::max(worst, holonomy(conn, up).distance(holonomy(conn, up, HolonomyRoute::Potential)));
    worst = std::max(worst, holonomy(conn, up).distance(ModOne::from_real(oracle::cap_flux(n / (4 * kPi), alpha))));
    const double gap = cap_flux(conn.curvature, loop, Cap{a, 1}) - cap_flux(conn.curvature, loop, Cap{-a, 1});
    worst = std::max(worst, std::abs(gap - conn.chern[0]));
  }
  o.require(worst < 1e-5, fmt("worst disagreement %.3g", worst));
  if (o.pass) o.detail = fmt("20 latitude loops, worst %.2g", worst);
  return o;
}

Outcome base_point_independence() {
  Outcome o;
  double worst = 0.0;
  int rows = 0;
  AnalysisOptions ao = opts(0);
  ao.base_points = 4;
  for (const cli::Builtin& b : cli::builtins()) {
    const Scenario s = fixture::builtin(b.name);
    const ConnectionSpec conn = base_connection(s);
    for (const AlgebraElement& x : ker_exp_generators(s.group)) {
      const DeltaResult r = delta(s, conn, x, ao);
      o.require(r.base_samples.size() >= 3, b.name + ": fewer than 3 base points");
      for (double v : r.base_samples) worst = std::max(worst, oracle::mod1_gap(v, r.base_samples.front()));
      ++rows;
    }
  }
  o.require(worst < 1e-5, fmt("base points differ by %.3g", worst));
  if (o.pass) o.detail = fmt("%g generators, 4 base points each, spread %.2g", rows, worst);
  return o;
}

Outcome extremum_integrality() {
  Outcome o;
  double worst = 0.0;
  for (const char* name : {"sphere-so3-n1", "sphere-so3-n2", "sphere-su2-n1", "sphere-s1-shift", "tensor-so3"}) {
    const Scenario s = fixture::builtin(name);
    KerExpSampler sampler(s.group, 111);
    for (int i = 0; i < 6; ++i) {
      const AlgebraElement x = sampler.next();
      const double hi = extremum_of_moment(s.moment, x, s.manifold, ExtremumMode::Max).value;
      const double lo = extremum_of_moment(s.moment, x, s.manifold, ExtremumMode::Min).value;
      worst = std::max(worst, oracle::mod1_distance(hi - lo));
      const ZeroSearch z = find_action_zeros(s.action, x, s.manifold);
      o.require(z.zeros.size() >= 2, std::string(name) + ": fewer than two fixed points");
      for (const Point& p : z.zeros) {
        worst = std::max(worst, oracle::mod1_distance(s.moment(x, p) - s.moment(x, z.zeros.front())));
      }
    }
  }
  o.require(worst < 1e-5, fmt("non-integral difference %.3g", worst));
  if (o.pass) o.detail = fmt("5 scenarios x 6 elements, worst %.2g", worst);
  return o;
}

Outcome shift_invariance() {
  Outcome o;
  std::mt19937_64 rng(112);
  double worst = 0.0;
  int compared = 0;
  for (const char* name : {"sphere-s1-shift", "trivial-circle", "torus-flat-twist"}) {
    const Scenario s = fixture::builtin(name);
    const ConnectionSpec conn = base_connection(s);
    const DeltaTable before = lambda_on_torsion(s, conn, opts());
    for (int i = 0; i < 10; ++i) {
      const Scenario t = with_moment_shift(s, {gen::uniform(rng, -3.0, 3.0)});
      const DeltaTable after = lambda_on_torsion(t, conn, opts());
      o.require(after.rows.size() == before.rows.size(), "torsion table changed size");
      for (std::size_t j = 0; j < before.rows.size() && j < after.rows.size(); ++j) {
        worst = std::max(worst, before.rows[j].value.distance(after.rows[j].value));
        ++compared;
      }
    }
  }
  o.require(worst < 1e-9, fmt("torsion Delta moved by %.3g", worst));
  if (o.pass) o.detail = fmt("30 shifts, %g torsion values, worst %.2g", compared, worst);
  return o;
}

Outcome tensor_additivity() {
  Outcome o;
  std::mt19937_64 rng(113);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    Scenario a, b;
    AlgebraElement x;
    if (i % 2 == 0) {
      int na = 0, nb = 0;
      while (na == 0) na = gen::integer(rng, -3, 3);
      while (nb == 0) nb = gen::integer(rng, -3, 3);
      const char* name = i % 4 == 0 ? "sphere-so3-n1" : "sphere-su2-n1";
      a = fixture::builtin(name, {{"n", na}});
      b = fixture::builtin(name, {{"n", nb}});
      x = KerExpSampler(a.group, 200 + i).next();
    } else {
      const char* name = i % 4 == 1 ? "torus-flat-twist" : "trivial-circle";
      a = fixture::builtin(name, {{"c", gen::uniform(rng, -1.0, 1.0)}}, false);
      b = fixture::builtin(name, {{"c", gen::uniform(rng, -1.0, 1.0)}}, false);
      x = AlgebraElement{2 * kPi * gen::integer(rng, 1, 4)};
    }
    const ModOne sum = delta(a, base_connection(a), x, opts()).value + delta(b, base_connection(b), x, opts()).value;
    worst = std::max(worst, tensor_delta(a, b, x, opts()).distance(sum));
  }
  o.require(worst < 1e-5, fmt("additivity violated by %.3g", worst));
  if (o.pass) o.detail = fmt("10 scenario pairs, worst %.2g", worst);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1  sphere integrality", sphere_integrality},
      {"2  so3 obstruction nk/2", so3_obstruction},
      {"3  equivariant verdicts", equivariant_verdicts},
      {"4  moment-shift witness", moment_shift_witness},
      {"5  trivial-bundle closed form", trivial_bundle},
      {"6  torus flat twist", torus_twist},
      {"7  tensor power", tensor_power},
      {"8a holonomy laws", holonomy_laws},
      {"8b cap/potential agreement", route_agreement},
      {"8c base-point independence", base_point_independence},
      {"8d extremum and fixed-point integrality", extremum_integrality},
      {"8e torsion Delta under moment shifts", shift_invariance},
      {"8f tensor additivity", tensor_additivity},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %-42s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
