#include "prequant/obstruction.hpp"

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "prequant/errors.hpp"

namespace prequant {

namespace {

// Lift into (-1/2, 1/2]; values numerically at -1/2 go to +1/2.
double lift(ModOne v) {
  double c = v.centered();
  if (c < -0.5 + 1e-6) c += 1.0;
  return c;
}

std::string describe(const AlgebraElement& x) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << "]";
  return os.str();
}

bool fixed_point_value(const Scenario& s, const AlgebraElement& x, ModOne& value, Point& witness) {
  try {
    const ZeroSearch zs = find_action_zeros(s.action, x, s.manifold);
    if (zs.zeros.empty()) return false;
    witness = zs.zeros.front();
  } catch (const PreconditionError&) {
    // X_M vanishes identically: every point is fixed.
    witness = from_chart(s.manifold.kind, 1.0, 1.0);
  }
  value = ModOne::from_real(s.moment(x, witness));
  return true;
}

DeltaTable tabulate(std::vector<DeltaResult> rows) {
  DeltaTable t;
  t.rows = std::move(rows);
  for (const DeltaResult& r : t.rows) t.max_distance = std::max(t.max_distance, r.value.distance(ModOne{}));
  return t;
}

DeltaTable finish(DeltaTable t, double tol) {
  t.vanishes = t.max_distance < tol;
  return t;
}

}  // namespace

DeltaTable torsion_subtable(const GroupSpec& g, const DeltaTable& full, double tol) {
  std::vector<DeltaResult> rows;
  DeltaResult zero;
  zero.x = AlgebraElement::zero(g);
  zero.route = DeltaRoute::FixedPoint;
  zero.routes.push_back({DeltaRoute::FixedPoint, ModOne{}});
  rows.push_back(zero);
  for (const DeltaResult& r : full.rows) {
    if (!r.x.is_zero() && in_torsion_cone(g, r.x)) rows.push_back(r);
  }
  return finish(tabulate(std::move(rows)), tol);
}

std::string to_string(DeltaRoute r) {
  switch (r) {
    case DeltaRoute::FixedPoint:
      return "fixed_point";
    case DeltaRoute::Extremum:
      return "extremum";
    case DeltaRoute::Holonomy:
      return "holonomy";
  }
  return "unknown";
}

DeltaResult delta(const Scenario& s, const ConnectionSpec& conn, const AlgebraElement& x, const AnalysisOptions& opts) {
  check_dimension(s.group, x);
  if (!in_ker_exp(s.group, x)) throw PreconditionError("delta: X = " + describe(x) + " is not in ker exp");
  if (conn.manifold.kind != s.manifold.kind) throw PreconditionError("delta: connection lives on another manifold");

  DeltaResult out;
  out.x = x;
  if (x.is_zero()) {
    out.route = DeltaRoute::FixedPoint;
    out.routes.push_back({DeltaRoute::FixedPoint, ModOne{}});
    return out;
  }

  ModOne fixed_value;
  Point fixed_witness;
  if (fixed_point_value(s, x, fixed_value, fixed_witness)) out.routes.push_back({DeltaRoute::FixedPoint, fixed_value});

  Point max_point = Point::Zero();
  if (is_nondegenerate(s.manifold, s.omega)) {
    const Extremum e = extremum_of_moment(s.moment, x, s.manifold, ExtremumMode::Max);
    max_point = e.point;
    out.routes.push_back({DeltaRoute::Extremum, ModOne::from_real(e.value)});
  }

  std::mt19937_64 rng(opts.seed ^ 0x5deece66dULL);
  std::vector<Point> bases;
  std::vector<ModOne> values;
  for (int i = 0; i < std::max(opts.base_points, 1); ++i) {
    const Point p = random_point(s.manifold.kind, rng);
    const ModOne v = ModOne::from_real(s.moment(x, p)) - holonomy(conn, orbit_curve(s.action, p, x));
    bases.push_back(p);
    values.push_back(v);
    out.base_samples.push_back(v.centered());
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!values[i].near(values[0], opts.agree_tol)) {
      std::ostringstream os;
      os << "delta: base points disagree for X = " << describe(x) << ":";
      for (double v : out.base_samples) os << " " << v;
      throw NumericalError(os.str());
    }
  }
  out.routes.push_back({DeltaRoute::Holonomy, values[0]});

  const RouteValue& primary = out.routes.front();
  for (const RouteValue& r : out.routes) {
    if (!r.value.near(primary.value, opts.agree_tol)) {
      std::ostringstream os;
      os << "delta: routes disagree for X = " << describe(x) << ":";
      for (const RouteValue& q : out.routes) os << " " << to_string(q.route) << "=" << q.value.centered();
      throw NumericalError(os.str());
    }
  }
  out.route = primary.route;
  out.value = primary.value;
  switch (out.route) {
    case DeltaRoute::FixedPoint:
      out.witness = fixed_witness;
      break;
    case DeltaRoute::Extremum:
      out.witness = max_point;
      break;
    case DeltaRoute::Holonomy:
      out.witness = bases.front();
      break;
  }
  return out;
}

std::vector<AlgebraElement> ker_exp_batch(const GroupSpec& g, const AnalysisOptions& opts) {
  std::vector<AlgebraElement> out = ker_exp_generators(g);
  KerExpSampler sampler(g, opts.seed);
  for (AlgebraElement& x : sampler.take(opts.samples)) out.push_back(std::move(x));
  return out;
}

DeltaTable lift_exists_fixed_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  std::vector<DeltaResult> rows;
  for (const AlgebraElement& x : ker_exp_batch(s.group, opts)) rows.push_back(delta(s, conn, x, opts));
  return finish(tabulate(std::move(rows)), opts.vanish_tol);
}

DeltaTable lambda_on_torsion(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  std::vector<DeltaResult> rows;
  for (const AlgebraElement& x : ker_exp_batch(s.group, opts)) {
    if (!x.is_zero() && in_torsion_cone(s.group, x)) rows.push_back(delta(s, conn, x, opts));
  }
  return torsion_subtable(s.group, tabulate(std::move(rows)), opts.vanish_tol);
}

Scenario with_moment_shift(const Scenario& s, const std::vector<double>& b) {
  Scenario out = s;
  out.moment = shifted(s.moment, s.group, b);
  return out;
}

MomentShift solve_moment_shift(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  MomentShift out;
  const DeltaTable torsion = lambda_on_torsion(s, conn, opts);
  if (!torsion.vanishes) {
    std::ostringstream os;
    os << "torsion obstruction " << torsion.max_distance << " cannot be removed by a moment shift";
    out.reason = os.str();
    return out;
  }
  const std::vector<AlgebraElement> gens = free_generators(s.group);
  if (s.group.h1_algebra_dim == 0 || gens.empty()) {
    const DeltaTable full = lift_exists_fixed_mu(s, conn, opts);
    out.feasible = full.vanishes;
    out.reason = full.vanishes ? "already unobstructed" : "H^1(g) = 0 and Delta does not vanish";
    return out;
  }
  const auto k = static_cast<Eigen::Index>(gens.size());
  const Eigen::Index dim = s.group.h1_algebra_dim;
  Eigen::MatrixXd lattice(k, dim);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    lattice.row(i) = gens[static_cast<std::size_t>(i)].coords().transpose();
    rhs[i] = -lift(delta(s, conn, gens[static_cast<std::size_t>(i)], opts).value);
  }
  const Eigen::VectorXd b = lattice.colPivHouseholderQr().solve(rhs);
  out.b.assign(b.data(), b.data() + b.size());
  const DeltaTable check = lift_exists_fixed_mu(with_moment_shift(s, out.b), conn, opts);
  out.feasible = check.vanishes;
  if (!check.vanishes) {
    std::ostringstream os;
    os << "shifted moment map still obstructed: " << check.max_distance;
    out.reason = os.str();
  } else {
    out.reason = "shift cancels Delta on the free generators";
  }
  return out;
}

SmithForm smith_normal_form(const Eigen::MatrixX<long long>& a) {
  using Mat = Eigen::MatrixX<long long>;
  const Eigen::Index m = a.rows(), n = a.cols();
  Mat d = a;
  Mat u = Mat::Identity(m, m);
  Mat v = Mat::Identity(n, n);
  for (Eigen::Index t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = t; i < m; ++i) {
        for (Eigen::Index j = t; j < n; ++j) {
          if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) {
            pi = i;
            pj = j;
          }
        }
      }
      if (pi < 0) return {u, d, v};
      d.row(t).swap(d.row(pi));
      u.row(t).swap(u.row(pi));
      d.col(t).swap(d.col(pj));
      v.col(t).swap(v.col(pj));
      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        const long long q = d(i, t) / d(t, t);
        d.row(i) -= q * d.row(t);
        u.row(i) -= q * u.row(t);
        if (d(i, t) != 0) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        const long long q = d(t, j) / d(t, t);
        d.col(j) -= q * d.col(t);
        v.col(j) -= q * v.col(t);
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (Eigen::Index i = t + 1; i < m && divides; ++i) {
        for (Eigen::Index j = t + 1; j < n; ++j) {
          if (d(i, j) % d(t, t) != 0) {
            d.row(t) += d.row(i);
            u.row(t) += u.row(i);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    if (d(t, t) < 0) {
      d.row(t) *= -1;
      u.row(t) *= -1;
    }
  }
  return {u, d, v};
}

FlatTwist solve_flat_twist(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  FlatTwist out;
  const int rank = s.manifold.h1_rank();
  if (rank == 0) {
    const DeltaTable full = lift_exists_fixed_mu(s, conn, opts);
    out.feasible = full.vanishes;
    out.reason = full.vanishes ? "already unobstructed" : "H_1(M) = 0, no flat twist is available";
    return out;
  }
  std::mt19937_64 rng(opts.seed);
  const Point x0 = random_point(s.manifold.kind, rng);
  const std::vector<AlgebraElement> gens = ker_exp_generators(s.group);
  const auto m = static_cast<Eigen::Index>(gens.size());
  Eigen::MatrixX<long long> h(m, rank);
  Eigen::VectorXd d(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const AlgebraElement& x = gens[static_cast<std::size_t>(i)];
    const LoopSpec orbit = orbit_curve(s.action, x0, x);
    const std::vector<int> cls = orbit.homology.value_or(homology_class(s.manifold.kind, orbit.path));
    out.classes.push_back(cls);
    for (int j = 0; j < rank; ++j) h(i, j) = cls[static_cast<std::size_t>(j)];
    d[i] = lift(delta(s, conn, x, opts).value);
  }
  const SmithForm snf = smith_normal_form(h);
  const Eigen::VectorXd ud = snf.u.cast<double>() * d;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rank);
  for (Eigen::Index i = 0; i < m; ++i) {
    const long long diag = i < rank ? snf.d(i, i) : 0;
    const ModOne target = ModOne::from_real(ud[i]);
    if (diag == 0) {
      if (!target.near_zero(opts.vanish_tol)) {
        out.reason = "orbit classes do not reach the obstruction (singular winding system)";
        return out;
      }
      continue;
    }
    y[i] = lift(target) / static_cast<double>(diag);
  }
  const Eigen::VectorXd beta = snf.v.cast<double>() * y;
  for (Eigen::Index j = 0; j < rank; ++j) out.beta.push_back(ModOne::from_real(beta[j]));
  const DeltaTable check = lift_exists_fixed_mu(s, with_twist(conn, out.beta), opts);
  out.feasible = check.vanishes;
  if (!check.vanishes) {
    std::ostringstream os;
    os << "retwisted connection still obstructed: " << check.max_distance;
    out.reason = os.str();
  } else {
    out.reason = "twist cancels Delta on the orbit classes";
  }
  return out;
}

std::optional<int> min_tensor_power(const Scenario& s, const ConnectionSpec& conn, int r_max,
                                    const AnalysisOptions& opts) {
  return min_tensor_power(s.group, lambda_on_torsion(s, conn, opts), r_max, opts.vanish_tol);
}

std::optional<int> min_tensor_power(const GroupSpec& g, const DeltaTable& torsion, int r_max, double tol) {
  for (int r = 1; r <= r_max; ++r) {
    bool ok = true;
    for (const DeltaResult& row : torsion.rows) {
      if (!row.value.scaled(r).near_zero(tol)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const int exponent = torsion_exponent(g);
    if (exponent % r != 0) {
      std::ostringstream os;
      os << "min_tensor_power: r = " << r << " does not divide the torsion exponent " << exponent;
      throw NumericalError(os.str());
    }
    return r;
  }
  return std::nullopt;
}

Scenario tensor_scenario(const Scenario& a, const Scenario& b) {
  if (a.manifold.kind != b.manifold.kind || !(a.group == b.group) || a.action.id != b.action.id) {
    throw PreconditionError("tensor_scenario: scenarios differ in manifold, group, or action");
  }
  Scenario out = a;
  out.name = a.name + "+" + b.name;
  out.description = "tensor product";
  out.omega = a.omega + b.omega;
  out.moment = a.moment + b.moment;
  for (std::size_t i = 0; i < out.beta.size(); ++i) out.beta[i] = a.beta[i] + b.beta[i];
  out.twisting_enabled = a.twisting_enabled || b.twisting_enabled;
  return out;
}

Scenario power_scenario(const Scenario& s, int r) {
  if (r < 1) throw PreconditionError("power_scenario: r must be positive");
  Scenario out = s;
  out.name = s.name + "^" + std::to_string(r);
  out.omega = scaled(s.omega, r);
  out.moment = scaled(s.moment, r);
  for (ModOne& b : out.beta) b = b.scaled(r);
  return out;
}

ModOne tensor_delta(const Scenario& a, const Scenario& b, const AlgebraElement& x, const AnalysisOptions& opts) {
  const Scenario ab = tensor_scenario(a, b);
  return delta(ab, base_connection(ab), x, opts).value;
}

}  // namespace prequant
