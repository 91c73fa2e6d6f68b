#include "prequant/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "prequant/errors.hpp"
#include "prequant/kernels.hpp"

namespace prequant {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

double wrapped_difference(double a) { return a - kTwoPi * std::round(a / kTwoPi); }

}  // namespace

std::string ManifoldSpec::id() const { return kind == ManifoldKind::Sphere2 ? "sphere2" : "torus2"; }

ManifoldKind parse_manifold_id(std::string_view id) {
  if (id == "sphere2") return ManifoldKind::Sphere2;
  if (id == "torus2") return ManifoldKind::Torus2;
  throw CatalogError("unknown manifold id: " + std::string(id));
}

Point from_chart(ManifoldKind kind, double u, double v) {
  if (kind == ManifoldKind::Torus2) return {u, v, 0.0};
  return {std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)};
}

ChartPoint to_chart(ManifoldKind kind, const Point& p) {
  if (kind == ManifoldKind::Torus2) return {wrap_angle(p.x()), wrap_angle(p.y())};
  const Point q = p.normalized();
  return {std::acos(std::clamp(q.z(), -1.0, 1.0)), wrap_angle(std::atan2(q.y(), q.x()))};
}

std::array<Tangent, 2> chart_frame(ManifoldKind kind, double u, double v) {
  if (kind == ManifoldKind::Torus2) return {Tangent::UnitX(), Tangent::UnitY()};
  const double su = std::sin(u), cu = std::cos(u), sv = std::sin(v), cv = std::cos(v);
  return {Tangent{cu * cv, cu * sv, -su}, Tangent{-su * sv, su * cv, 0.0}};
}

std::array<Tangent, 2> tangent_frame(ManifoldKind kind, const Point& p) {
  if (kind == ManifoldKind::Torus2) return {Tangent::UnitX(), Tangent::UnitY()};
  const Point n = p.normalized();
  Eigen::Index axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  Tangent e1 = Tangent::Unit(axis);
  e1 = (e1 - e1.dot(n) * n).normalized();
  return {e1, n.cross(e1)};
}

Point retract(ManifoldKind kind, const Point& p, double s, double t) {
  if (kind == ManifoldKind::Torus2) return {p.x() + s, p.y() + t, 0.0};
  const auto [e1, e2] = tangent_frame(kind, p);
  return (p + s * e1 + t * e2).normalized();
}

Point canonical(ManifoldKind kind, const Point& p) {
  if (kind == ManifoldKind::Torus2) return {wrap_angle(p.x()), wrap_angle(p.y()), 0.0};
  return p.normalized();
}

double point_distance(ManifoldKind kind, const Point& p, const Point& q) {
  if (kind == ManifoldKind::Torus2) return std::hypot(wrapped_difference(p.x() - q.x()), wrapped_difference(p.y() - q.y()));
  return (p - q).norm();
}

double area_form(ManifoldKind kind, const Point& p, const Tangent& a, const Tangent& b) {
  if (kind == ManifoldKind::Torus2) return a.x() * b.y() - a.y() * b.x();
  return p.dot(a.cross(b));
}

double total_area(ManifoldKind kind) { return kind == ManifoldKind::Sphere2 ? 4.0 * kPi : kTwoPi * kTwoPi; }

Point random_point(ManifoldKind kind, std::mt19937_64& rng) {
  if (kind == ManifoldKind::Torus2) {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    const double a = angle(rng);
    return {a, angle(rng), 0.0};
  }
  std::normal_distribution<double> normal;
  Point p;
  do {
    p = {normal(rng), normal(rng), normal(rng)};
  } while (p.norm() < 1e-6);
  return p.normalized();
}

double ChartGrid::du() const { return (kind == ManifoldKind::Sphere2 ? kPi : kTwoPi) / n; }
double ChartGrid::dv() const { return kTwoPi / n; }

ChartPoint ChartGrid::node(std::size_t k) const {
  const auto i = static_cast<double>(k / static_cast<std::size_t>(n));
  const auto j = static_cast<double>(k % static_cast<std::size_t>(n));
  return {(i + 0.5) * du(), (j + 0.5) * dv()};
}

Point ChartGrid::point(std::size_t k) const {
  const ChartPoint c = node(k);
  return from_chart(kind, c.u, c.v);
}

double ChartGrid::area_weight(std::size_t k) const {
  const double w = du() * dv();
  return kind == ManifoldKind::Sphere2 ? w * std::sin(node(k).u) : w;
}

// ---------------------------------------------------------------------------

TwoFormSpec zero_form() { return TwoFormSpec{[](const Point&) { return 0.0; }, 0.0, true}; }

TwoFormSpec scalar_times_volume(double lambda) {
  if (lambda == 0.0) return zero_form();
  return TwoFormSpec{[lambda](const Point&) { return lambda; }, lambda, false};
}

TwoFormSpec operator+(const TwoFormSpec& a, const TwoFormSpec& b) {
  if (a.zero) return b;
  if (b.zero) return a;
  std::optional<double> scale;
  if (a.volume_scale && b.volume_scale) scale = *a.volume_scale + *b.volume_scale;
  return TwoFormSpec{[da = a.density, db = b.density](const Point& p) { return da(p) + db(p); }, scale, false};
}

TwoFormSpec scaled(const TwoFormSpec& a, double s) {
  if (a.zero || s == 0.0) return zero_form();
  std::optional<double> scale;
  if (a.volume_scale) scale = *a.volume_scale * s;
  return TwoFormSpec{[d = a.density, s](const Point& p) { return s * d(p); }, scale, false};
}

ActionSpec make_action(std::string_view id, const GroupSpec& g, ManifoldKind kind, const Eigen::Vector3d& axis) {
  ActionSpec a;
  a.id = std::string(id);
  a.group = g;
  a.manifold = kind;
  if (id == "rotation" && kind == ManifoldKind::Sphere2) {
    if (g.kind == GroupKind::SO3 || g.kind == GroupKind::SU2) {
      a.act = [](const GroupElement& phi, const Point& p) -> Point { return rotation_of(phi) * p; };
      a.rotation_vector = [](const AlgebraElement& x) -> Eigen::Vector3d { return x.vec3(); };
    } else if (g.kind == GroupKind::Circle) {
      if (axis.norm() < 1e-12) throw CatalogError("rotation axis must be nonzero");
      const Eigen::Vector3d w = axis.normalized();
      const GroupSpec so3 = GroupSpec::so3();
      a.act = [w, so3](const GroupElement& phi, const Point& p) -> Point {
        const Eigen::Vector3d v = circle_angle(phi) * w;
        return exp_group(so3, AlgebraElement{v[0], v[1], v[2]}).matrix.real() * p;
      };
      a.rotation_vector = [w](const AlgebraElement& x) -> Eigen::Vector3d { return x[0] * w; };
    } else {
      throw CatalogError("action 'rotation' is not defined for group " + g.id());
    }
    a.vector_field = [rv = a.rotation_vector](const AlgebraElement& x, const Point& p) -> Tangent {
      return rv(x).cross(p);
    };
    return a;
  }
  if (id == "translation" && kind == ManifoldKind::Torus2) {
    if (g.kind == GroupKind::Circle) {
      a.act = [](const GroupElement& phi, const Point& p) -> Point { return {p.x() + circle_angle(phi), p.y(), 0.0}; };
      a.vector_field = [](const AlgebraElement& x, const Point&) -> Tangent { return {-x[0], 0.0, 0.0}; };
      a.flow = [](const AlgebraElement& x, double s, const Point& p) -> Point { return {p.x() + s * x[0], p.y(), 0.0}; };
    } else if (g.kind == GroupKind::Torus && g.torus_rank == 2) {
      a.act = [](const GroupElement& phi, const Point& p) -> Point {
        return {p.x() + std::arg(phi.matrix(0, 0)), p.y() + std::arg(phi.matrix(1, 1)), 0.0};
      };
      a.vector_field = [](const AlgebraElement& x, const Point&) -> Tangent { return {-x[0], -x[1], 0.0}; };
      a.flow = [](const AlgebraElement& x, double s, const Point& p) -> Point {
        return {p.x() + s * x[0], p.y() + s * x[1], 0.0};
      };
    } else {
      throw CatalogError("action 'translation' is not defined for group " + g.id());
    }
    return a;
  }
  throw CatalogError("unknown action '" + std::string(id) + "' on this manifold");
}

MomentMapSpec height_moment(const ActionSpec& act, double scale) {
  if (!act.rotation_vector) throw CatalogError("height moment map needs a rotation action on the sphere");
  std::ostringstream os;
  os << "height(" << scale << ")";
  return MomentMapSpec{os.str(), [rv = act.rotation_vector, scale](const AlgebraElement& x, const Point& p) {
                         return scale * rv(x).dot(p);
                       }};
}

MomentMapSpec constant_moment(const GroupSpec& g, std::vector<double> c) {
  if (!g.abelian()) throw CatalogError("constant moment map needs an abelian group");
  if (static_cast<int>(c.size()) != g.algebra_dim) throw PreconditionError("constant moment map: wrong number of coefficients");
  return MomentMapSpec{"constant", [g, c = std::move(c)](const AlgebraElement& x, const Point&) {
                         check_dimension(g, x);
                         double s = 0.0;
                         for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x[static_cast<int>(i)];
                         return s;
                       }};
}

MomentMapSpec shifted(const MomentMapSpec& mu, const GroupSpec& g, std::vector<double> b) {
  if (static_cast<int>(b.size()) != g.h1_algebra_dim) throw PreconditionError("moment shift has wrong dimension");
  return MomentMapSpec{mu.id + "+b", [e = mu.eval, g, b = std::move(b)](const AlgebraElement& x, const Point& p) {
                         return e(x, p) + h1_pairing(g, b, x);
                       }};
}

MomentMapSpec scaled(const MomentMapSpec& mu, double s) {
  return MomentMapSpec{mu.id, [e = mu.eval, s](const AlgebraElement& x, const Point& p) { return s * e(x, p); }};
}

MomentMapSpec operator+(const MomentMapSpec& a, const MomentMapSpec& b) {
  return MomentMapSpec{a.id + "+" + b.id, [ea = a.eval, eb = b.eval](const AlgebraElement& x, const Point& p) {
                         return ea(x, p) + eb(x, p);
                       }};
}

// ---------------------------------------------------------------------------

namespace {

double midpoint_rule(ManifoldKind kind, int n, const TwoFormSpec& omega) {
  const ChartGrid grid{kind, n};
  return kernels::sum(grid.size(), [&](std::size_t k) { return omega.at(grid.point(k)) * grid.area_weight(k); });
}

}  // namespace

QuadratureEstimate integrate_two_form_estimate(const ManifoldSpec& m, const TwoFormSpec& omega) {
  if (m.grid < 2) throw PreconditionError("quadrature grid must have at least two cells per axis");
  if (omega.zero) return {0.0, 0.0};
  const double q1 = midpoint_rule(m.kind, m.grid, omega);
  const double q2 = midpoint_rule(m.kind, 2 * m.grid, omega);
  const double q4 = midpoint_rule(m.kind, 4 * m.grid, omega);
  return {(4.0 * q2 - q1) / 3.0, (4.0 * q4 - q2) / 3.0};
}

double integrate_two_form(const ManifoldSpec& m, const TwoFormSpec& omega) {
  const QuadratureEstimate e = integrate_two_form_estimate(m, omega);
  if (!(std::abs(e.value - e.check) < 1e-6)) {
    std::ostringstream os;
    os.precision(17);
    os << "two-form quadrature did not converge: " << e.value << " at grid " << m.grid << " vs " << e.check
       << " at grid " << 2 * m.grid;
    throw NumericalError(os.str());
  }
  return e.value;
}

IntegralityReport is_integral(const ManifoldSpec& m, const TwoFormSpec& omega, double tol) {
  IntegralityReport r;
  const double flux = integrate_two_form(m, omega);
  r.flux.push_back(flux);
  r.distance.push_back(std::abs(flux - std::round(flux)));
  r.integral = r.distance.back() < tol;
  return r;
}

bool is_nondegenerate(const ManifoldSpec& m, const TwoFormSpec& omega) {
  if (omega.zero) return false;
  const ChartGrid grid{m.kind, m.grid};
  const auto smallest = kernels::argmin(grid.size(), [&](std::size_t k) { return std::abs(omega.at(grid.point(k))); });
  return smallest.value > 1e-12;
}

CompatibilityReport check_moment_compatibility(const ManifoldSpec& m, const TwoFormSpec& omega, const ActionSpec& act,
                                               const MomentMapSpec& mu, std::optional<double> tol) {
  if (act.manifold != m.kind) throw PreconditionError("action and manifold differ");
  const GroupSpec& g = act.group;
  const ChartGrid grid{m.kind, m.grid};
  const std::size_t cells = grid.size();
  const auto dim = static_cast<std::size_t>(g.algebra_dim);
  std::vector<AlgebraElement> basis;
  for (int i = 0; i < g.algebra_dim; ++i) basis.push_back(AlgebraElement::basis(g, i));

  const double hu = grid.du(), hv = grid.dv();
  auto residual = [&](std::size_t idx) {
    const AlgebraElement& x = basis[idx / cells];
    const ChartPoint c = grid.node(idx % cells);
    const Point p = from_chart(m.kind, c.u, c.v);
    const auto frame = chart_frame(m.kind, c.u, c.v);
    const Tangent field = act.vector_field(x, p);
    auto f = [&](double u, double v) { return mu(x, from_chart(m.kind, u, v)); };
    const double d_u = (8.0 * (f(c.u + hu, c.v) - f(c.u - hu, c.v)) - (f(c.u + 2 * hu, c.v) - f(c.u - 2 * hu, c.v))) / (12.0 * hu);
    const double d_v = (8.0 * (f(c.u, c.v + hv) - f(c.u, c.v - hv)) - (f(c.u, c.v + 2 * hv) - f(c.u, c.v - 2 * hv))) / (12.0 * hv);
    const double e_u = omega.evaluate(m.kind, p, field, frame[0]);
    const double e_v = omega.evaluate(m.kind, p, field, frame[1]);
    return std::max(std::abs(d_u - e_u), std::abs(d_v - e_v));
  };
  const auto worst = kernels::argmax(dim * cells, residual);
  const auto amplitude = kernels::argmax(dim * cells, [&](std::size_t idx) {
    return std::abs(mu(basis[idx / cells], grid.point(idx % cells)));
  });

  CompatibilityReport r;
  r.max_residual = worst.value;
  r.worst_basis = static_cast<int>(worst.index / cells);
  r.worst_point = grid.point(worst.index % cells);
  const double ratio = 256.0 / m.grid;
  r.tolerance = tol.value_or(kCompatibilityTolerance * ratio * ratio * std::max(1.0, amplitude.value));
  r.pass = r.max_residual < r.tolerance;
  return r;
}

EquivarianceReport check_equivariance(const ActionSpec& act, const MomentMapSpec& mu, int samples, std::uint64_t seed,
                                      double tol) {
  const GroupSpec& g = act.group;
  std::mt19937_64 rng(seed);
  EquivarianceReport r;
  r.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const GroupElement phi = exp_group(g, random_algebra_element(g, rng, kPi));
    const AlgebraElement x = random_algebra_element(g, rng);
    const Point p = random_point(act.manifold, rng);
    const double lhs = mu(adjoint_action(g, phi, x), act.act(phi, p));
    r.max_residual = std::max(r.max_residual, std::abs(lhs - mu(x, p)));
  }
  r.pass = r.max_residual < tol;
  return r;
}

namespace {

// Newton iteration for X_M = 0 in the local frame at the current point.
std::optional<Point> refine_zero(const ActionSpec& act, const AlgebraElement& x, Point p) {
  const ManifoldKind kind = act.manifold;
  constexpr double kStep = 1e-6;
  for (int iter = 0; iter < 60; ++iter) {
    const Tangent field = act.vector_field(x, p);
    if (field.norm() < 1e-13) break;
    const auto [e1, e2] = tangent_frame(kind, p);
    auto project = [&](const Point& q) {
      const Tangent f = act.vector_field(x, q);
      return Eigen::Vector2d{f.dot(e1), f.dot(e2)};
    };
    Eigen::Matrix2d jac;
    jac.col(0) = (project(retract(kind, p, kStep, 0)) - project(retract(kind, p, -kStep, 0))) / (2 * kStep);
    jac.col(1) = (project(retract(kind, p, 0, kStep)) - project(retract(kind, p, 0, -kStep))) / (2 * kStep);
    if (std::abs(jac.determinant()) < 1e-300) return std::nullopt;
    const Eigen::Vector2d delta = jac.fullPivLu().solve(-Eigen::Vector2d{field.dot(e1), field.dot(e2)});
    if (!delta.allFinite() || delta.norm() > 1.0) return std::nullopt;
    p = retract(kind, p, delta[0], delta[1]);
    if (delta.norm() < 1e-15) break;
  }
  if (act.vector_field(x, p).norm() < 1e-9) return canonical(kind, p);
  return std::nullopt;
}

}  // namespace

ZeroSearch find_action_zeros(const ActionSpec& act, const AlgebraElement& x, const ManifoldSpec& m) {
  check_dimension(act.group, x);
  if (x.is_zero()) throw PreconditionError("find_action_zeros: X must be nonzero");
  if (act.manifold != m.kind) throw PreconditionError("action and manifold differ");
  const ChartGrid grid{m.kind, m.grid};
  const int n = m.grid;
  std::vector<double> speed;
  kernels::evaluate(grid.size(), speed, [&](std::size_t k) { return act.vector_field(x, grid.point(k)).norm(); });

  std::vector<std::pair<double, Point>> candidates;
  std::vector<Point> specials;
  if (m.kind == ManifoldKind::Sphere2) specials = {Point::UnitZ(), -Point::UnitZ()};
  double max_speed = *std::max_element(speed.begin(), speed.end());
  double min_speed = *std::min_element(speed.begin(), speed.end());
  for (const Point& s : specials) {
    const double v = act.vector_field(x, s).norm();
    max_speed = std::max(max_speed, v);
    min_speed = std::min(min_speed, v);
  }
  if (max_speed < 1e-14) throw PreconditionError("find_action_zeros: X_M vanishes identically");
  const double threshold = 0.25 * max_speed;

  const bool periodic_u = m.kind == ManifoldKind::Torus2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = speed[static_cast<std::size_t>(i * n + j)];
      if (s >= threshold) continue;
      bool local_min = true;
      for (int di = -1; di <= 1 && local_min; ++di) {
        int ii = i + di;
        if (periodic_u) {
          ii = (ii + n) % n;
        } else if (ii < 0 || ii >= n) {
          continue;
        }
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int jj = (j + dj + n) % n;
          if (speed[static_cast<std::size_t>(ii * n + jj)] < s) {
            local_min = false;
            break;
          }
        }
      }
      if (local_min) candidates.emplace_back(s, grid.point(static_cast<std::size_t>(i * n + j)));
    }
  }
  for (const Point& s : specials) {
    const double v = act.vector_field(x, s).norm();
    if (v < threshold) candidates.emplace_back(v, s);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (candidates.size() > 64) candidates.resize(64);

  ZeroSearch out;
  out.resolution = n;
  out.min_grid_speed = min_speed;
  for (const auto& [s, p] : candidates) {
    const auto z = refine_zero(act, x, p);
    if (!z) {
      ++out.dropped;
      continue;
    }
    const bool seen = std::any_of(out.zeros.begin(), out.zeros.end(),
                                  [&](const Point& q) { return point_distance(m.kind, q, *z) < 1e-6; });
    if (!seen) out.zeros.push_back(*z);
  }
  return out;
}

Extremum extremum_of_moment(const MomentMapSpec& mu, const AlgebraElement& x, const ManifoldSpec& m, ExtremumMode mode) {
  const double sign = mode == ExtremumMode::Max ? 1.0 : -1.0;
  const ChartGrid grid{m.kind, m.grid};
  auto objective = [&](const Point& p) { return sign * mu(x, p); };
  const auto best = kernels::argmax(grid.size(), [&](std::size_t k) { return objective(grid.point(k)); });
  Point p = grid.point(best.index);
  double f = best.value;
  if (m.kind == ManifoldKind::Sphere2) {
    for (const Point& s : {Point(Point::UnitZ()), Point(-Point::UnitZ())}) {
      const double v = objective(s);
      if (v > f) {
        f = v;
        p = s;
      }
    }
  }

  // Newton ascent in local coordinates with a backtracking safeguard.
  const ManifoldKind kind = m.kind;
  constexpr double hg = 1e-5, hh = 1e-4;
  for (int iter = 0; iter < 100; ++iter) {
    auto at = [&](double s, double t) { return objective(retract(kind, p, s, t)); };
    const Eigen::Vector2d grad{(at(hg, 0) - at(-hg, 0)) / (2 * hg), (at(0, hg) - at(0, -hg)) / (2 * hg)};
    if (grad.norm() < 1e-14) break;
    Eigen::Matrix2d hess;
    hess(0, 0) = (at(hh, 0) - 2 * f + at(-hh, 0)) / (hh * hh);
    hess(1, 1) = (at(0, hh) - 2 * f + at(0, -hh)) / (hh * hh);
    hess(0, 1) = hess(1, 0) = (at(hh, hh) - at(hh, -hh) - at(-hh, hh) + at(-hh, -hh)) / (4 * hh * hh);
    Eigen::Vector2d step = grad;
    if (hess(0, 0) < 0 && hess.determinant() > 0) step = -hess.inverse() * grad;
    double scale = 1.0;
    double trial = at(step[0], step[1]);
    while (!(trial > f) && scale > 1e-12) {
      scale *= 0.5;
      trial = at(scale * step[0], scale * step[1]);
    }
    if (!(trial > f)) break;
    p = retract(kind, p, scale * step[0], scale * step[1]);
    f = trial;
    if (scale * step.norm() < 1e-13) break;
  }
  return {canonical(kind, p), sign * f};
}

}  // namespace prequant
