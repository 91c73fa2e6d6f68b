#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "prequant/lie.hpp"

namespace prequant {

enum class ManifoldKind { Sphere2, Torus2 };

// Points and tangent vectors on the catalog surfaces share one representation.
// Sphere2: unit vectors of R^3 and tangent vectors in R^3, so the poles are
// ordinary points. Torus2: (alpha, beta, 0) in unwrapped angles, tangent
// vectors (d alpha, d beta, 0).
using Point = Eigen::Vector3d;
using Tangent = Eigen::Vector3d;

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere2;
  int grid = 256;

  [[nodiscard]] std::string id() const;
  [[nodiscard]] int h1_rank() const { return kind == ManifoldKind::Torus2 ? 2 : 0; }
  [[nodiscard]] int h2_rank() const { return 1; }
};

ManifoldKind parse_manifold_id(std::string_view id);

// Chart: Sphere2 (theta, phi) in (0, pi) x [0, 2 pi); Torus2 (alpha, beta).
struct ChartPoint {
  double u = 0.0;
  double v = 0.0;
};

Point from_chart(ManifoldKind kind, double u, double v);
ChartPoint to_chart(ManifoldKind kind, const Point& p);
/// Coordinate tangent vectors (d/du, d/dv) at the chart point.
std::array<Tangent, 2> chart_frame(ManifoldKind kind, double u, double v);
/// Orthonormal, positively oriented tangent frame at p.
std::array<Tangent, 2> tangent_frame(ManifoldKind kind, const Point& p);
/// Point reached from p by the local coordinates (s, t) of tangent_frame(p).
Point retract(ManifoldKind kind, const Point& p, double s, double t);
Point canonical(ManifoldKind kind, const Point& p);
double point_distance(ManifoldKind kind, const Point& p, const Point& q);
/// Riemannian area form of the unit sphere / flat square torus evaluated on (a, b).
double area_form(ManifoldKind kind, const Point& p, const Tangent& a, const Tangent& b);
double total_area(ManifoldKind kind);
Point random_point(ManifoldKind kind, std::mt19937_64& rng);

/// Midpoint tensor grid of the chart, n cells per axis.
struct ChartGrid {
  ManifoldKind kind;
  int n;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); }
  [[nodiscard]] double du() const;
  [[nodiscard]] double dv() const;
  [[nodiscard]] ChartPoint node(std::size_t k) const;
  [[nodiscard]] Point point(std::size_t k) const;
  /// Integration weight of node k for the area form (includes sin(theta) on the sphere).
  [[nodiscard]] double area_weight(std::size_t k) const;
};

/// A closed 2-form written as density * (area form).
struct TwoFormSpec {
  std::function<double(const Point&)> density;
  /// Set when the form is lambda * area form.
  std::optional<double> volume_scale;
  bool zero = false;

  [[nodiscard]] double at(const Point& p) const { return zero ? 0.0 : density(p); }
  [[nodiscard]] double evaluate(ManifoldKind kind, const Point& p, const Tangent& a, const Tangent& b) const {
    return at(p) * area_form(kind, p, a, b);
  }
};

TwoFormSpec zero_form();
TwoFormSpec scalar_times_volume(double lambda);
TwoFormSpec operator+(const TwoFormSpec& a, const TwoFormSpec& b);
TwoFormSpec scaled(const TwoFormSpec& a, double s);

/// A group action on a catalog surface. vector_field(X, p) is the fundamental
/// field X_M(p) = d/dt exp(-tX)_M(p) at t = 0. For rotation actions on the
/// sphere rotation_vector(X) = w with X_M(p) = w x p.
struct ActionSpec {
  std::string id;
  GroupSpec group;
  ManifoldKind manifold = ManifoldKind::Sphere2;
  std::function<Point(const GroupElement&, const Point&)> act;
  std::function<Tangent(const AlgebraElement&, const Point&)> vector_field;
  std::function<Eigen::Vector3d(const AlgebraElement&)> rotation_vector;
  /// exp(sX)_M(p) without passing through a group element, so torus angles
  /// stay unwrapped along orbits. Optional.
  std::function<Point(const AlgebraElement&, double, const Point&)> flow;

  [[nodiscard]] Point orbit_point(const AlgebraElement& x, double s, const Point& p) const {
    if (flow) return flow(x, s, p);
    return act(exp_group(group, s * x), p);
  }
};

/// Catalog actions:
///   "rotation"    so3/su2 on sphere2 (su2 through the covering map); circle on
///                 sphere2 generated by the rotation vector `axis`.
///   "translation" circle on torus2 along alpha; torus:2 on torus2.
ActionSpec make_action(std::string_view id, const GroupSpec& g, ManifoldKind kind,
                       const Eigen::Vector3d& axis = Eigen::Vector3d::UnitX());

/// A moment map X -> mu_X, linear in X.
struct MomentMapSpec {
  std::string id;
  std::function<double(const AlgebraElement&, const Point&)> eval;

  [[nodiscard]] double operator()(const AlgebraElement& x, const Point& p) const { return eval(x, p); }
};

/// mu_X(p) = scale * <w(X), p> for a rotation action on the sphere.
MomentMapSpec height_moment(const ActionSpec& act, double scale);
/// mu_X(p) = sum_i c_i X_i, independent of the point (abelian groups).
MomentMapSpec constant_moment(const GroupSpec& g, std::vector<double> c);
/// mu + b with b in H^1(g).
MomentMapSpec shifted(const MomentMapSpec& mu, const GroupSpec& g, std::vector<double> b);
MomentMapSpec scaled(const MomentMapSpec& mu, double s);
MomentMapSpec operator+(const MomentMapSpec& a, const MomentMapSpec& b);

// ---------------------------------------------------------------------------

/// Integral of omega over M: midpoint tensor rule at n and 2n cells with one
/// Richardson step; the estimate at n is checked against the estimate at 2n.
struct QuadratureEstimate {
  double value = 0.0;
  double check = 0.0;  // estimate from the doubled resolution
};
QuadratureEstimate integrate_two_form_estimate(const ManifoldSpec& m, const TwoFormSpec& omega);
/// Throws NumericalError (reporting both values) if the two estimates differ by 1e-6 or more.
double integrate_two_form(const ManifoldSpec& m, const TwoFormSpec& omega);

struct IntegralityReport {
  bool integral = false;
  std::vector<double> flux;      // per H_2 generator
  std::vector<double> distance;  // to the nearest integer
};
IntegralityReport is_integral(const ManifoldSpec& m, const TwoFormSpec& omega, double tol = 1e-6);

/// omega is non-degenerate iff its density does not vanish on the grid.
bool is_nondegenerate(const ManifoldSpec& m, const TwoFormSpec& omega);

struct CompatibilityReport {
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  int worst_basis = 0;
  Point worst_point = Point::Zero();
};
/// Compares chart derivatives of mu_X (fourth-order central differences with
/// the grid step) against omega(X_M, .) for each basis element of g.
/// Default tolerance: kCompatibilityTolerance * (h / h_256)^2 * max(1, max |mu|).
CompatibilityReport check_moment_compatibility(const ManifoldSpec& m, const TwoFormSpec& omega,
                                               const ActionSpec& act, const MomentMapSpec& mu,
                                               std::optional<double> tol = std::nullopt);
inline constexpr double kCompatibilityTolerance = 1e-4;

struct EquivarianceReport {
  bool pass = false;
  double max_residual = 0.0;
  int samples = 0;
};
/// Checks mu_{Ad_phi X}(phi_M(x)) = mu_X(x) on random (phi, X, x).
EquivarianceReport check_equivariance(const ActionSpec& act, const MomentMapSpec& mu, int samples = 100,
                                      std::uint64_t seed = 0, double tol = 1e-6);

/// Zeros of X_M found by a grid scan (plus the sphere poles) and Newton
/// refinement to |X_M| < 1e-9. An empty list means none were found at this
/// resolution; min_grid_speed then bounds |X_M| away from zero on the grid.
struct ZeroSearch {
  std::vector<Point> zeros;
  int dropped = 0;  // candidates where Newton failed
  double min_grid_speed = 0.0;
  int resolution = 0;
};
ZeroSearch find_action_zeros(const ActionSpec& act, const AlgebraElement& x, const ManifoldSpec& m);

enum class ExtremumMode { Max, Min };
struct Extremum {
  Point point = Point::Zero();
  double value = 0.0;
};
Extremum extremum_of_moment(const MomentMapSpec& mu, const AlgebraElement& x, const ManifoldSpec& m,
                            ExtremumMode mode);

}  // namespace prequant
