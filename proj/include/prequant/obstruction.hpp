#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prequant/scenario.hpp"

namespace prequant {

enum class DeltaRoute { FixedPoint, Extremum, Holonomy };
std::string to_string(DeltaRoute r);

struct RouteValue {
  DeltaRoute route;
  ModOne value;
};

struct DeltaResult {
  AlgebraElement x;
  ModOne value;
  DeltaRoute route = DeltaRoute::Holonomy;  // route that produced `value`
  Point witness = Point::Zero();            // fixed point, maximizer, or first base point
  std::vector<RouteValue> routes;           // every route that applied
  std::vector<double> base_samples;         // holonomy route, one per base point (centered)
};

/// Delta(X) = mu_X(x) - hol(tau_{x,X}) mod 1 for X in ker exp. Evaluates every
/// applicable route (action zero, symplectic maximum, holonomy at
/// opts.base_points random base points) and throws NumericalError if the
/// base points or routes disagree by opts.agree_tol or more. The reported
/// value comes from the first route in that order.
DeltaResult delta(const Scenario& s, const ConnectionSpec& conn, const AlgebraElement& x,
                  const AnalysisOptions& opts = {});

/// ker_exp_generators followed by opts.samples draws of KerExpSampler(opts.seed).
std::vector<AlgebraElement> ker_exp_batch(const GroupSpec& g, const AnalysisOptions& opts);

struct DeltaTable {
  std::vector<DeltaResult> rows;
  double max_distance = 0.0;  // largest wrap-around distance of a value from 0
  bool vanishes = true;
};

/// Lift with mu fixed exists iff Delta vanishes on the generators and samples.
DeltaTable lift_exists_fixed_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});

/// Delta restricted to the batch elements in the torsion cone (X = 0 always included).
DeltaTable lambda_on_torsion(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});
/// The torsion-cone rows of an already computed table, plus X = 0.
DeltaTable torsion_subtable(const GroupSpec& g, const DeltaTable& full, double tol);

struct MomentShift {
  bool feasible = false;
  std::vector<double> b;  // coefficients over the H^1(g) basis
  std::string reason;
};
/// b with b(X_i) = -Delta(X_i), Delta lifted to (-1/2, 1/2], on the free generators.
/// Verified by recomputing Delta with mu + b on the full batch.
MomentShift solve_moment_shift(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});
Scenario with_moment_shift(const Scenario& s, const std::vector<double>& b);

struct FlatTwist {
  bool feasible = false;
  std::vector<ModOne> beta;  // added to the connection's twist
  std::vector<std::vector<int>> classes;  // [tau_{x, X_i}] per generator
  std::string reason;
};
/// beta with beta . [tau_{x, X_i}] = Delta(X_i) mod 1, so the retwisted
/// connection has Delta' = Delta - beta([tau]) = 0. Verified on the full batch.
FlatTwist solve_flat_twist(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});

/// Smallest r <= r_max with r Delta(X) = 0 for every torsion-cone X of the
/// batch. Throws NumericalError if it does not divide torsion_exponent(g).
std::optional<int> min_tensor_power(const Scenario& s, const ConnectionSpec& conn, int r_max = 12,
                                    const AnalysisOptions& opts = {});
std::optional<int> min_tensor_power(const GroupSpec& g, const DeltaTable& torsion, int r_max, double tol);

/// Scenario for (omega_1 + omega_2, mu_1 + mu_2, beta_1 + beta_2). Same manifold, group, and action.
Scenario tensor_scenario(const Scenario& a, const Scenario& b);
/// r-fold tensor power.
Scenario power_scenario(const Scenario& s, int r);
ModOne tensor_delta(const Scenario& a, const Scenario& b, const AlgebraElement& x, const AnalysisOptions& opts = {});

/// Smith normal form over Z: U A V = D with U, V unimodular and D diagonal,
/// each diagonal entry dividing the next.
struct SmithForm {
  Eigen::MatrixX<long long> u, d, v;
};
SmithForm smith_normal_form(const Eigen::MatrixX<long long>& a);

}  // namespace prequant
