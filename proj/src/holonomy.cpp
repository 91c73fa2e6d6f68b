#include "prequant/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "prequant/errors.hpp"
#include "prequant/kernels.hpp"

namespace prequant {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kClosureTol = 1e-9;
constexpr double kAdaptiveTol = 1e-8;
constexpr int kMaxPanels = 4096;

using RuleT = boost::math::quadrature::gauss<double, 15>;
// Radial direction of a cap: adaptive, since the cone patch sharpens near the
// origin when the loop approaches the antipode of the center.
using RuleR = boost::math::quadrature::gauss_kronrod<double, 21>;
constexpr unsigned kRadialDepth = 12;
constexpr double kRadialTol = 1e-12;

// Composite 15-point Gauss-Legendre on each smooth piece of the path, panels
// doubled until two successive totals differ by less than kAdaptiveTol.
template <class F>
double adaptive_over_pieces(const std::vector<double>& breaks, F&& integrand, const char* what) {
  double total = 0.0;
  for (std::size_t piece = 0; piece + 1 < breaks.size(); ++piece) {
    const double a = breaks[piece], b = breaks[piece + 1];
    if (b <= a) continue;
    auto composite = [&](int panels) {
      const double h = (b - a) / panels;
      return kernels::sum(static_cast<std::size_t>(panels), [&](std::size_t k) {
        const double lo = a + static_cast<double>(k) * h;
        return RuleT::integrate(integrand, lo, lo + h);
      });
    };
    int panels = 2;
    double prev = composite(panels);
    for (;;) {
      panels *= 2;
      const double next = composite(panels);
      if (std::abs(next - prev) < kAdaptiveTol) {
        total += next;
        break;
      }
      if (panels >= kMaxPanels) {
        std::ostringstream os;
        os << what << " did not converge: " << prev << " vs " << next << " with " << panels << " panels";
        throw NumericalError(os.str());
      }
      prev = next;
    }
  }
  return total;
}

double cross2(const Tangent& a, const Tangent& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<Point> sample_path(const Path& p, int n) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out.push_back(p.at(static_cast<double>(i) / n));
  return out;
}

void attach_potential(ConnectionSpec& c) {
  c.potential.reset();
  if (c.manifold.kind == ManifoldKind::Sphere2) {
    if (c.curvature.zero) {
      c.potential = OneForm{[](const Point&, const Tangent&) { return 0.0; }, [](const Point&) { return true; }};
    } else if (c.curvature.volume_scale) {
      const double lambda = *c.curvature.volume_scale;
      c.potential = OneForm{[lambda](const Point& p, const Tangent& w) {
                              return lambda * (p.x() * w.y() - p.y() * w.x()) / (1.0 + p.z());
                            },
                            [](const Point& p) { return 1.0 + p.z() > 1e-2; }};
    }
    return;
  }
  if (c.curvature.zero) {
    const double b1 = c.flat_twist.at(0).centered(), b2 = c.flat_twist.at(1).centered();
    c.potential = OneForm{[b1, b2](const Point&, const Tangent& w) { return (b1 * w.x() + b2 * w.y()) / kTwoPi; },
                          [](const Point&) { return true; }};
  }
}

}  // namespace

Path make_path(ManifoldKind kind, std::function<Point(double)> at, std::function<Tangent(double)> velocity) {
  Path p;
  p.kind = kind;
  if (!velocity) {
    velocity = [at](double t) -> Tangent {
      constexpr double h = 1e-4;
      return (8.0 * (at(t + h) - at(t - h)) - (at(t + 2 * h) - at(t - 2 * h))) / (12.0 * h);
    };
  }
  p.at = std::move(at);
  p.velocity = std::move(velocity);
  return p;
}

Path constant_path(ManifoldKind kind, const Point& x) {
  return make_path(kind, [x](double) { return x; }, [](double) -> Tangent { return Tangent::Zero(); });
}

Path reverse(const Path& p) {
  Path r;
  r.kind = p.kind;
  r.at = [f = p.at](double t) { return f(1.0 - t); };
  r.velocity = [v = p.velocity](double t) -> Tangent { return -v(1.0 - t); };
  r.breaks.clear();
  for (auto it = p.breaks.rbegin(); it != p.breaks.rend(); ++it) r.breaks.push_back(1.0 - *it);
  return r;
}

Path concat(const Path& a, const Path& b) {
  if (a.kind != b.kind) throw PreconditionError("concat: paths live on different manifolds");
  const Point a_end = a.end(), b_start = b.start();
  if (point_distance(a.kind, a_end, b_start) >= kClosureTol) throw PreconditionError("concat: endpoints do not match");
  const Point offset = a.kind == ManifoldKind::Torus2 ? Point(a_end - b_start) : Point::Zero();
  Path c;
  c.kind = a.kind;
  c.at = [fa = a.at, fb = b.at, offset](double t) -> Point {
    return t <= 0.5 ? fa(2.0 * t) : Point(fb(2.0 * t - 1.0) + offset);
  };
  c.velocity = [va = a.velocity, vb = b.velocity](double t) -> Tangent {
    return t <= 0.5 ? Tangent(2.0 * va(2.0 * t)) : Tangent(2.0 * vb(2.0 * t - 1.0));
  };
  c.breaks.clear();
  for (double s : a.breaks) c.breaks.push_back(0.5 * s);
  for (std::size_t i = 1; i < b.breaks.size(); ++i) c.breaks.push_back(0.5 + 0.5 * b.breaks[i]);
  return c;
}

Path translate(const ActionSpec& act, const GroupElement& phi, const Path& path) {
  if (act.manifold != path.kind) throw PreconditionError("translate: action and path live on different manifolds");
  Path out;
  out.kind = path.kind;
  out.at = [f = path.at, a = act.act, phi](double t) { return a(phi, f(t)); };
  // Catalog actions are linear in the ambient coordinates.
  out.velocity = [f = path.at, v = path.velocity, a = act.act, phi](double t) -> Tangent {
    const Point p = f(t);
    return a(phi, p + v(t)) - a(phi, p);
  };
  out.breaks = path.breaks;
  return out;
}

LoopSpec make_loop(Path path, std::optional<Cap> cap, std::optional<std::vector<int>> homology) {
  const double gap = point_distance(path.kind, path.start(), path.end());
  if (!(gap < kClosureTol)) {
    std::ostringstream os;
    os << "loop is not closed: endpoint gap " << gap;
    throw PreconditionError(os.str());
  }
  if (homology && static_cast<int>(homology->size()) != (path.kind == ManifoldKind::Torus2 ? 2 : 0)) {
    throw PreconditionError("homology class has the wrong rank");
  }
  return LoopSpec{std::move(path), cap, std::move(homology)};
}

Cap auto_cap(const Path& loop) {
  if (loop.kind == ManifoldKind::Torus2) {
    const auto h = homology_class(loop.kind, loop);
    if (h[0] != 0 || h[1] != 0) throw PreconditionError("auto_cap: torus loop is not null-homologous");
    return Cap{loop.start(), 1};
  }
  const std::vector<Point> pts = sample_path(loop, 512);
  std::vector<Point> candidates;
  for (int i = 0; i < 3; ++i) {
    candidates.push_back(Point::Unit(i));
    candidates.push_back(-Point::Unit(i));
  }
  Point mean = Point::Zero();
  for (const Point& p : pts) mean += p;
  if (mean.norm() > 1e-9) candidates.push_back(mean.normalized());
  // Fibonacci lattice
  constexpr int kLattice = 128;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < kLattice; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / kLattice;
    const double r = std::sqrt(1.0 - z * z);
    candidates.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  double best_score = -2.0;
  Point best = candidates.front();
  for (const Point& c : candidates) {
    double score = 2.0;
    for (const Point& p : pts) score = std::min(score, c.dot(p));
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  if (best_score <= -0.9) throw PreconditionError("auto_cap: loop comes too close to every cap center's antipode");
  return Cap{best, 1};
}

double cap_flux(const TwoFormSpec& omega, const Path& loop, const Cap& cap) {
  if (omega.zero) return 0.0;
  const Point c = cap.center;
  auto integrand = [&](double t) {
    const Point g = loop.at(t);
    const Tangent gv = loop.velocity(t);
    auto radial = [&](double r) {
      if (loop.kind == ManifoldKind::Torus2) {
        const Point s = (1.0 - r) * c + r * g;
        return omega.at(s) * r * cross2(g - c, gv);
      }
      const Point q = (1.0 - r) * c + r * g;
      const double n = q.norm();
      if (n < 1e-12) throw NumericalError("cap_flux: cone patch passes through the origin");
      return omega.at(q / n) * q.dot((g - c).cross(r * gv)) / (n * n * n);
    };
    return RuleR::integrate(radial, 0.0, 1.0, kRadialDepth, kRadialTol);
  };
  return cap.orientation * adaptive_over_pieces(loop.breaks, integrand, "cap flux");
}

std::vector<int> homology_class(ManifoldKind kind, const Path& loop) {
  if (kind == ManifoldKind::Sphere2) return {};
  constexpr int kSamples = 8192;
  Point prev = loop.at(0.0);
  double da = 0.0, db = 0.0;
  for (int i = 1; i <= kSamples; ++i) {
    const Point p = loop.at(static_cast<double>(i) / kSamples);
    da += std::remainder(p.x() - prev.x(), kTwoPi);
    db += std::remainder(p.y() - prev.y(), kTwoPi);
    prev = p;
  }
  const double wa = da / kTwoPi, wb = db / kTwoPi;
  const double residual = std::max(std::abs(wa - std::round(wa)), std::abs(wb - std::round(wb)));
  if (!(residual < 1e-6)) {
    std::ostringstream os;
    os << "homology_class: winding residual " << residual << " (loop not closed or sampled too coarsely)";
    throw NumericalError(os.str());
  }
  return {static_cast<int>(std::lround(wa)), static_cast<int>(std::lround(wb))};
}

double line_integral(const OneForm& a, const Path& path) {
  auto integrand = [&](double t) {
    const Point p = path.at(t);
    if (!a.covers(p)) throw PreconditionError("line_integral: path leaves the domain of the potential");
    return a.eval(p, path.velocity(t));
  };
  return adaptive_over_pieces(path.breaks, integrand, "line integral");
}

ConnectionSpec make_connection(const ManifoldSpec& m, const TwoFormSpec& curvature, std::vector<ModOne> beta) {
  if (beta.empty()) beta.assign(static_cast<std::size_t>(m.h1_rank()), ModOne{});
  if (static_cast<int>(beta.size()) != m.h1_rank()) throw PreconditionError("flat twist has the wrong length");
  ConnectionSpec c;
  c.manifold = m;
  c.curvature = curvature;
  const IntegralityReport integral = is_integral(m, curvature);
  if (!integral.integral) {
    std::ostringstream os;
    os << "curvature is not integral: flux " << integral.flux.front();
    throw PreconditionError(os.str());
  }
  for (double f : integral.flux) c.chern.push_back(static_cast<int>(std::lround(f)));
  c.flat_twist = std::move(beta);
  attach_potential(c);
  return c;
}

ConnectionSpec trivial_connection(const ManifoldSpec& m) { return make_connection(m, zero_form()); }

ConnectionSpec tensor(const ConnectionSpec& a, const ConnectionSpec& b) {
  if (a.manifold.kind != b.manifold.kind) throw PreconditionError("tensor: connections live on different manifolds");
  std::vector<ModOne> beta(a.flat_twist.size());
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = a.flat_twist[i] + b.flat_twist[i];
  ConnectionSpec c = make_connection(a.manifold, a.curvature + b.curvature, beta);
  for (std::size_t i = 0; i < c.chern.size(); ++i) {
    if (c.chern[i] != a.chern[i] + b.chern[i]) throw NumericalError("tensor: chern numbers do not add");
  }
  return c;
}

ConnectionSpec power(const ConnectionSpec& a, int r) {
  std::vector<ModOne> beta;
  for (ModOne b : a.flat_twist) beta.push_back(b.scaled(r));
  return make_connection(a.manifold, scaled(a.curvature, r), beta);
}

ConnectionSpec with_twist(const ConnectionSpec& a, const std::vector<ModOne>& beta) {
  if (beta.size() != a.flat_twist.size()) throw PreconditionError("flat twist has the wrong length");
  ConnectionSpec c = a;
  for (std::size_t i = 0; i < beta.size(); ++i) c.flat_twist[i] += beta[i];
  attach_potential(c);
  return c;
}

bool route_applies(const ConnectionSpec& conn, const LoopSpec& loop, HolonomyRoute route) {
  switch (route) {
    case HolonomyRoute::Auto:
      return route_applies(conn, loop, HolonomyRoute::Cap) || route_applies(conn, loop, HolonomyRoute::Flat) ||
             route_applies(conn, loop, HolonomyRoute::Potential);
    case HolonomyRoute::Cap:
      return loop.cap.has_value();
    case HolonomyRoute::Flat:
      return conn.curvature.zero;
    case HolonomyRoute::Potential: {
      if (!conn.potential) return false;
      const auto pts = sample_path(loop.path, 1024);
      return std::all_of(pts.begin(), pts.end(), [&](const Point& p) { return conn.potential->covers(p); });
    }
  }
  return false;
}

namespace {

ModOne twist_term(const ConnectionSpec& conn, const std::vector<int>& h) {
  ModOne out;
  for (std::size_t i = 0; i < h.size() && i < conn.flat_twist.size(); ++i) out += conn.flat_twist[i].scaled(h[i]);
  return out;
}

}  // namespace

ModOne holonomy(const ConnectionSpec& conn, const LoopSpec& loop, HolonomyRoute route) {
  if (loop.path.kind != conn.manifold.kind) throw PreconditionError("holonomy: loop and connection differ in manifold");
  if (route == HolonomyRoute::Auto) {
    if (route_applies(conn, loop, HolonomyRoute::Cap)) {
      route = HolonomyRoute::Cap;
    } else if (route_applies(conn, loop, HolonomyRoute::Flat)) {
      route = HolonomyRoute::Flat;
    } else if (route_applies(conn, loop, HolonomyRoute::Potential)) {
      route = HolonomyRoute::Potential;
    } else {
      throw PreconditionError("holonomy: no applicable route for this loop");
    }
  } else if (!route_applies(conn, loop, route)) {
    throw PreconditionError("holonomy: requested route does not apply");
  }
  switch (route) {
    case HolonomyRoute::Cap: {
      ModOne v = ModOne::from_real(cap_flux(conn.curvature, loop.path, *loop.cap));
      if (loop.homology) v += twist_term(conn, *loop.homology);
      return v;
    }
    case HolonomyRoute::Flat: {
      const std::vector<int> h = loop.homology ? *loop.homology : homology_class(loop.path.kind, loop.path);
      return twist_term(conn, h);
    }
    case HolonomyRoute::Potential:
      return ModOne::from_real(line_integral(*conn.potential, loop.path));
    case HolonomyRoute::Auto:
      break;
  }
  throw PreconditionError("holonomy: no applicable route for this loop");
}

Path orbit_path(const ActionSpec& act, const Point& x, const AlgebraElement& xi) {
  check_dimension(act.group, xi);
  if (xi.is_zero()) return constant_path(act.manifold, x);
  return make_path(
      act.manifold, [act, x, xi](double s) { return act.orbit_point(xi, s, x); },
      [act, x, xi](double s) -> Tangent { return -act.vector_field(xi, act.orbit_point(xi, s, x)); });
}

LoopSpec orbit_curve(const ActionSpec& act, const Point& x, const AlgebraElement& xi) {
  if (!in_ker_exp(act.group, xi)) throw PreconditionError("orbit_curve: X is not in ker exp, the orbit is not closed");
  Path path = orbit_path(act, x, xi);
  if (act.manifold == ManifoldKind::Torus2) {
    auto h = homology_class(act.manifold, path);
    return make_loop(std::move(path), std::nullopt, std::move(h));
  }
  Cap cap{x, 1};
  if (!xi.is_zero()) {
    if (act.rotation_vector) {
      const Eigen::Vector3d w = act.rotation_vector(xi);
      if (w.norm() > 0) cap.center = w.dot(x) >= 0 ? Point(w.normalized()) : Point(-w.normalized());
    } else {
      cap = auto_cap(path);
    }
  }
  return make_loop(std::move(path), cap, std::vector<int>{});
}

ModOne equivariant_holonomy(const ConnectionSpec& conn, const ActionSpec& act, const MomentMapSpec& mu,
                            const AlgebraElement& xi, const Path& gamma) {
  const Point x = gamma.start();
  const double gap = point_distance(act.manifold, gamma.end(), act.orbit_point(xi, 1.0, x));
  if (!(gap < kClosureTol)) {
    std::ostringstream os;
    os << "equivariant_holonomy: gamma(1) differs from exp(X) gamma(0) by " << gap;
    throw PreconditionError(os.str());
  }
  Path loop_path = concat(gamma, reverse(orbit_path(act, x, xi)));
  LoopSpec loop;
  if (act.manifold == ManifoldKind::Torus2) {
    auto h = homology_class(act.manifold, loop_path);
    loop = make_loop(std::move(loop_path), std::nullopt, std::move(h));
  } else if (conn.curvature.zero) {
    loop = make_loop(std::move(loop_path));
  } else {
    const Cap cap = auto_cap(loop_path);
    loop = make_loop(std::move(loop_path), cap, std::vector<int>{});
  }
  return holonomy(conn, loop) + ModOne::from_real(mu(xi, x));
}

}  // namespace prequant
