#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "prequant/geometry.hpp"
#include "prequant/mod_one.hpp"

namespace prequant {

/// A piecewise smooth curve [0, 1] -> M. breaks lists the parameter values
/// (including 0 and 1) between which the curve is smooth; quadrature runs
/// per piece. Torus curves are continuous in unwrapped angles.
struct Path {
  ManifoldKind kind = ManifoldKind::Sphere2;
  std::function<Point(double)> at;
  std::function<Tangent(double)> velocity;
  std::vector<double> breaks{0.0, 1.0};

  [[nodiscard]] Point start() const { return at(0.0); }
  [[nodiscard]] Point end() const { return at(1.0); }
};

/// Smooth path from a formula. Without a velocity, derivatives are taken by
/// central differences of `at`, which must then be smooth slightly beyond [0, 1].
Path make_path(ManifoldKind kind, std::function<Point(double)> at, std::function<Tangent(double)> velocity = {});
Path constant_path(ManifoldKind kind, const Point& p);
Path reverse(const Path& p);
/// a * b; requires a.end() == b.start() on M within 1e-9.
Path concat(const Path& a, const Path& b);
/// phi . path
Path translate(const ActionSpec& act, const GroupElement& phi, const Path& path);

/// Cone patch (r, t) -> normalize((1 - r) center + r curve(t)) on the sphere,
/// linear interpolation on the torus. Its boundary is the loop with the
/// orientation that makes the holonomy equal to +flux.
struct Cap {
  Point center = Point::UnitZ();
  int orientation = 1;
};

struct LoopSpec {
  Path path;
  std::optional<Cap> cap;
  std::optional<std::vector<int>> homology;
};

/// Checks closure within 1e-9.
LoopSpec make_loop(Path path, std::optional<Cap> cap = std::nullopt,
                   std::optional<std::vector<int>> homology = std::nullopt);

/// Cap center from a fixed candidate set that keeps the loop farthest from the
/// antipode. Throws PreconditionError if every candidate comes within ~25 degrees of it.
Cap auto_cap(const Path& loop);

/// Signed flux of the density over the cap, adaptive Gauss-Legendre.
double cap_flux(const TwoFormSpec& omega, const Path& loop, const Cap& cap);

/// Torus2: winding numbers (p, q). Sphere2: empty.
std::vector<int> homology_class(ManifoldKind kind, const Path& loop);

/// A 1-form A(p)(w) on the set where covers(p) holds.
struct OneForm {
  std::function<double(const Point&, const Tangent&)> eval;
  std::function<bool(const Point&)> covers;
};

/// Adaptive composite Gauss-Legendre integral of A along the path.
double line_integral(const OneForm& a, const Path& path);

struct ConnectionSpec {
  ManifoldSpec manifold;
  TwoFormSpec curvature;
  std::vector<int> chern;
  std::vector<ModOne> flat_twist;  // one per H_1 generator of M
  std::optional<OneForm> potential;
};

/// Connection with the given curvature and twist. Throws PreconditionError if
/// the curvature is not integral or the twist has the wrong length.
/// Attaches a chart potential when one is known: the monopole
/// lambda (1 - cos theta) d phi on the sphere minus the south pole, and the
/// flat form sum beta_i d theta_i / 2 pi on the torus when the curvature is zero.
ConnectionSpec make_connection(const ManifoldSpec& m, const TwoFormSpec& curvature, std::vector<ModOne> beta = {});
ConnectionSpec trivial_connection(const ManifoldSpec& m);
ConnectionSpec tensor(const ConnectionSpec& a, const ConnectionSpec& b);
ConnectionSpec power(const ConnectionSpec& a, int r);
/// Same curvature, flat twist shifted by beta.
ConnectionSpec with_twist(const ConnectionSpec& a, const std::vector<ModOne>& beta);

enum class HolonomyRoute { Auto, Cap, Flat, Potential };

/// Ordinary holonomy in R/Z. Auto picks cap, then flat, then potential.
ModOne holonomy(const ConnectionSpec& conn, const LoopSpec& loop, HolonomyRoute route = HolonomyRoute::Auto);
bool route_applies(const ConnectionSpec& conn, const LoopSpec& loop, HolonomyRoute route);

/// tau_{x,X}(s) = exp(sX)_M(x), s in [0, 1].
Path orbit_path(const ActionSpec& act, const Point& x, const AlgebraElement& xi);
/// The orbit as a loop (requires X in ker exp): with a cone cap centered on the
/// rotation axis on the sphere, with its homology class on the torus.
LoopSpec orbit_curve(const ActionSpec& act, const Point& x, const AlgebraElement& xi);

/// hol_{exp X}(gamma) for gamma(1) = exp(X)_M(gamma(0)), computed as
/// hol_e(gamma * reverse tau_{gamma(0), X}) + mu_X(gamma(0)).
ModOne equivariant_holonomy(const ConnectionSpec& conn, const ActionSpec& act, const MomentMapSpec& mu,
                            const AlgebraElement& xi, const Path& gamma);

}  // namespace prequant
