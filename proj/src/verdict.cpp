#include "prequant/verdict.hpp"

#include <cmath>
#include <sstream>

#include "prequant/errors.hpp"

namespace prequant {

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr int kMaxPower = 12;

std::string format_x(const AlgebraElement& x) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << "]";
  return os.str();
}

// Row of the table farthest from zero.
const DeltaResult* worst_row(const DeltaTable& t) {
  const DeltaResult* worst = nullptr;
  double d = -1.0;
  for (const DeltaResult& r : t.rows) {
    const double e = r.value.distance(ModOne{});
    if (e > d) {
      d = e;
      worst = &r;
    }
  }
  return worst;
}

Reason table_reason(const std::string& check, const std::string& clause, const DeltaTable& t, double tol) {
  Reason r{check, clause, "", t.max_distance, tol, t.vanishes};
  std::ostringstream os;
  os << t.rows.size() << " elements of ker exp";
  if (const DeltaResult* w = worst_row(t); w && !t.vanishes) {
    os << "; Delta(" << format_x(w->x) << ") = " << w->value.centered() << " via " << to_string(w->route);
  } else {
    os << "; Delta vanishes";
  }
  r.detail = os.str();
  return r;
}

void integrality_into(const Scenario& s, Verdict& v) {
  const IntegralityReport ir = is_integral(s.manifold, s.omega, kIntegralityTol);
  v.flux = ir.flux;
  for (double f : ir.flux) v.chern.push_back(static_cast<int>(std::lround(f)));
  v.prequantizable = ir.integral;
  std::ostringstream os;
  os.precision(12);
  os << "flux " << ir.flux.front();
  v.reasons.push_back({"integrality", "prequantizable iff omega is integral", os.str(), ir.distance.front(),
                       kIntegralityTol, ir.integral});
}

// Fixed-mu stage given the full Delta table of the base connection.
void fixed_mu_into(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts, DeltaTable table,
                   Verdict& v) {
  v.reasons.push_back(table_reason("fixed_mu", "lift with mu fixed iff Delta = 0 on ker exp", table, opts.vanish_tol));
  v.equivariant_fixed_mu = table.vanishes;
  if (!table.vanishes && s.twisting_enabled) {
    FlatTwist ft = solve_flat_twist(s, conn, opts);
    std::ostringstream os;
    os << ft.reason;
    if (ft.feasible) {
      os << "; beta =";
      for (ModOne b : ft.beta) os << " " << b.value();
    }
    v.reasons.push_back({"flat_twist", "retwisting shifts Delta by beta of the orbit class", os.str(), 0.0,
                         opts.vanish_tol, ft.feasible});
    if (ft.feasible) {
      v.equivariant_fixed_mu = true;
      v.fixed_mu_uses_twist = true;
    }
    v.flat_twist = std::move(ft);
  }
  v.fixed_table = std::move(table);
}

void some_mu_into(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts, Verdict& v) {
  DeltaTable torsion = torsion_subtable(s.group, *v.fixed_table, opts.vanish_tol);
  v.reasons.push_back(
      table_reason("some_mu", "lift for some mu iff Delta = 0 on the torsion cone", torsion, opts.vanish_tol));
  v.equivariant_some_mu = torsion.vanishes || v.equivariant_fixed_mu;
  if (torsion.vanishes && !v.fixed_table->vanishes) {
    MomentShift ms = solve_moment_shift(s, conn, opts);
    std::ostringstream os;
    os << ms.reason;
    if (ms.feasible && !ms.b.empty()) {
      os << "; b =";
      for (double b : ms.b) os << " " << b;
    }
    v.reasons.push_back({"moment_shift", "mu + b removes Delta on the free part", os.str(), 0.0, opts.vanish_tol,
                         ms.feasible});
    v.moment_shift = std::move(ms);
    if (s.twisting_enabled && !v.flat_twist) v.flat_twist = solve_flat_twist(s, conn, opts);
  }
  v.torsion_table = std::move(torsion);
}

}  // namespace

Verdict check_prequantizable(const Scenario& s) {
  Verdict v;
  v.scenario = s.name;
  integrality_into(s, v);
  return v;
}

void validate_moment_map(const Scenario& s, const AnalysisOptions& opts, std::vector<Reason>& reasons) {
  const CompatibilityReport cr = check_moment_compatibility(s.manifold, s.omega, s.action, s.moment);
  reasons.push_back({"moment_compatibility", "d mu_X = i_{X_M} omega", "fourth-order differences on the chart grid",
                     cr.max_residual, cr.tolerance, cr.pass});
  if (!cr.pass) {
    std::ostringstream os;
    os << "moment map is not compatible with omega: residual " << cr.max_residual << " > " << cr.tolerance;
    throw NumericalError(os.str());
  }
  const EquivarianceReport er = check_equivariance(s.action, s.moment, 100, opts.seed);
  reasons.push_back({"moment_equivariance", "mu_{Ad_g X}(g x) = mu_X(x)", "100 random samples", er.max_residual, 1e-6,
                     er.pass});
  if (!er.pass) {
    std::ostringstream os;
    os << "moment map is not equivariant: residual " << er.max_residual;
    throw NumericalError(os.str());
  }
}

Verdict check_equivariant_fixed_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  Verdict v = check_prequantizable(s);
  if (!v.prequantizable) return v;
  validate_moment_map(s, opts, v.reasons);
  fixed_mu_into(s, conn, opts, lift_exists_fixed_mu(s, conn, opts), v);
  return v;
}

Verdict check_equivariant_some_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  Verdict v = check_equivariant_fixed_mu(s, conn, opts);
  if (!v.prequantizable) return v;
  some_mu_into(s, conn, opts, v);
  return v;
}

PowerStatement check_power_statement(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts) {
  const auto r = min_tensor_power(s, conn, kMaxPower, opts);
  if (!r) throw NumericalError("check_power_statement: no tensor power up to " + std::to_string(kMaxPower));
  const Scenario sr = power_scenario(s, *r);
  return {*r, check_equivariant_some_mu(sr, base_connection(sr), opts)};
}

Verdict analyze(const Scenario& s, const AnalysisOptions& opts) {
  Verdict v = check_prequantizable(s);
  if (!v.prequantizable) {
    v.reasons.push_back({"equivariance", "requires a prequantization", "omega is not integral, no bundle exists", 0.0,
                         0.0, false});
    return v;
  }
  const ConnectionSpec conn = base_connection(s);
  validate_moment_map(s, opts, v.reasons);
  fixed_mu_into(s, conn, opts, lift_exists_fixed_mu(s, conn, opts), v);
  some_mu_into(s, conn, opts, v);

  v.tensor_power = min_tensor_power(s.group, *v.torsion_table, kMaxPower, opts.vanish_tol);
  if (v.tensor_power) {
    const int r = *v.tensor_power;
    bool holds = v.equivariant_some_mu;
    if (r > 1) {
      const Scenario sr = power_scenario(s, r);
      holds = check_equivariant_some_mu(sr, base_connection(sr), opts).equivariant_some_mu;
    }
    v.power_statement = holds;
    std::ostringstream os;
    os << "r = " << r << " divides r_G = " << torsion_exponent(s.group);
    v.reasons.push_back({"tensor_power", "r_G omega is equivariantly prequantizable", os.str(), static_cast<double>(r),
                         static_cast<double>(torsion_exponent(s.group)), holds});
  } else {
    v.reasons.push_back({"tensor_power", "r_G omega is equivariantly prequantizable",
                         "no power up to " + std::to_string(kMaxPower), 0.0, 0.0, false});
  }
  return v;
}

}  // namespace prequant
