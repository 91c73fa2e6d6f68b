#include <cmath>
#include <iomanip>
#include <sstream>

#include "prequant/cli.hpp"

namespace prequant::cli {

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

json algebra_json(const AlgebraElement& x) {
  json j = json::array();
  for (int i = 0; i < x.size(); ++i) j.push_back(x[i]);
  return j;
}

json table_json(const DeltaTable& t) {
  json rows = json::array();
  for (const DeltaResult& r : t.rows) {
    json routes = json::object();
    for (const RouteValue& v : r.routes) routes[to_string(v.route)] = v.value.value();
    rows.push_back({{"X", algebra_json(r.x)},
                    {"delta", r.value.value()},
                    {"route", to_string(r.route)},
                    {"witness", point_json(r.witness)},
                    {"routes", routes}});
  }
  return rows;
}

void check_bool(std::vector<ExpectationCheck>& out, const char* field, const std::optional<bool>& e, bool actual) {
  if (!e) return;
  out.push_back({field, *e ? "true" : "false", actual ? "true" : "false", *e == actual});
}

}  // namespace

std::vector<ExpectationCheck> compare(const Expectation& e, const Verdict& v) {
  std::vector<ExpectationCheck> out;
  check_bool(out, "prequantizable", e.prequantizable, v.prequantizable);
  check_bool(out, "equivariant_fixed_mu", e.equivariant_fixed_mu, v.equivariant_fixed_mu);
  check_bool(out, "equivariant_some_mu", e.equivariant_some_mu, v.equivariant_some_mu);
  if (e.tensor_power) {
    const std::string actual = v.tensor_power ? std::to_string(*v.tensor_power) : "none";
    out.push_back({"tensor_power", std::to_string(*e.tensor_power), actual, v.tensor_power == e.tensor_power});
  }
  if (e.moment_shift) {
    const bool have = v.moment_shift && v.moment_shift->feasible;
    bool met = have && v.moment_shift->b.size() == e.moment_shift->size();
    if (met) {
      for (std::size_t i = 0; i < e.moment_shift->size(); ++i) {
        if (std::abs(v.moment_shift->b[i] - (*e.moment_shift)[i]) >= 1e-6) met = false;
      }
    }
    out.push_back({"moment_shift", fmt_list(*e.moment_shift), have ? fmt_list(v.moment_shift->b) : "none", met});
  }
  return out;
}

bool Report::expectations_met() const {
  for (const ExpectationCheck& c : checks) {
    if (!c.met) return false;
  }
  return true;
}

json report_json(const Report& r) {
  const Verdict& v = r.verdict;
  json j;
  j["scenario"] = r.scenario.name;
  j["manifold"] = r.scenario.manifold.id();
  j["group"] = r.scenario.group.id();
  j["action"] = r.scenario.action.id;
  j["grid"] = r.scenario.manifold.grid;
  j["prequantizable"] = v.prequantizable;
  j["equivariant_fixed_mu"] = v.equivariant_fixed_mu;
  j["equivariant_some_mu"] = v.equivariant_some_mu;
  j["fixed_mu_uses_twist"] = v.fixed_mu_uses_twist;
  j["flux"] = v.flux;
  j["chern"] = v.chern;
  json reasons = json::array();
  for (const Reason& x : v.reasons) {
    reasons.push_back({{"check", x.check},
                       {"clause", x.clause},
                       {"detail", x.detail},
                       {"value", x.value},
                       {"threshold", x.threshold},
                       {"passed", x.passed}});
  }
  j["reasons"] = reasons;

  json ob;
  ob["generators"] = v.fixed_table ? table_json(*v.fixed_table) : json::array();
  ob["torsion_only"] = v.torsion_table ? table_json(*v.torsion_table) : json::array();
  if (v.moment_shift) {
    ob["moment_shift"] = {{"feasible", v.moment_shift->feasible},
                          {"b", v.moment_shift->b},
                          {"reason", v.moment_shift->reason}};
  } else {
    ob["moment_shift"] = nullptr;
  }
  if (v.flat_twist) {
    json beta = json::array();
    for (ModOne b : v.flat_twist->beta) beta.push_back(b.value());
    ob["flat_twist"] = {{"feasible", v.flat_twist->feasible},
                        {"beta", beta},
                        {"classes", v.flat_twist->classes},
                        {"reason", v.flat_twist->reason}};
  } else {
    ob["flat_twist"] = nullptr;
  }
  ob["tensor_power"] = v.tensor_power ? json(*v.tensor_power) : json(nullptr);
  ob["power_statement"] = v.power_statement ? json(*v.power_statement) : json(nullptr);
  j["obstruction"] = ob;

  json ex = json::array();
  for (const ExpectationCheck& c : r.checks) {
    ex.push_back({{"field", c.field}, {"expected", c.expected}, {"actual", c.actual}, {"met", c.met}});
  }
  j["expectations"] = ex;
  j["expectations_met"] = r.expectations_met();
  return j;
}

std::string report_text(const Report& r) {
  const Verdict& v = r.verdict;
  std::ostringstream os;
  os << "scenario " << r.scenario.name << ": " << r.scenario.manifold.id() << ", group " << r.scenario.group.id()
     << ", action " << r.scenario.action.id << ", grid " << r.scenario.manifold.grid << "\n";
  if (!r.scenario.description.empty()) os << "  " << r.scenario.description << "\n";
  os << "  prequantizable          " << yes_no(v.prequantizable) << "\n";
  os << "  equivariant, fixed mu   " << yes_no(v.equivariant_fixed_mu)
     << (v.fixed_mu_uses_twist ? " (after flat twist)" : "") << "\n";
  os << "  equivariant, some mu    " << yes_no(v.equivariant_some_mu) << "\n";
  if (v.tensor_power) {
    os << "  tensor power r          " << *v.tensor_power;
    if (v.power_statement) os << " (r omega equivariant: " << yes_no(*v.power_statement) << ")";
    os << "\n";
  }
  if (v.moment_shift && v.moment_shift->feasible && !v.moment_shift->b.empty()) {
    os << "  moment shift b          " << fmt_list(v.moment_shift->b) << "\n";
  }
  if (v.flat_twist && v.flat_twist->feasible) {
    std::vector<double> beta;
    for (ModOne b : v.flat_twist->beta) beta.push_back(b.value());
    os << "  flat twist beta         " << fmt_list(beta) << "\n";
  }
  os << "reasons:\n";
  for (const Reason& x : v.reasons) {
    os << "  [" << (x.passed ? "pass" : "FAIL") << "] " << x.check << ": " << x.detail << " (value " << fmt(x.value)
       << ", threshold " << fmt(x.threshold) << ")\n";
  }
  if (!r.checks.empty()) {
    os << "expectations:\n";
    for (const ExpectationCheck& c : r.checks) {
      os << "  [" << (c.met ? "ok" : "MISMATCH") << "] " << c.field << ": expected " << c.expected << ", got "
         << c.actual << "\n";
    }
  }
  return os.str();
}

}  // namespace prequant::cli
