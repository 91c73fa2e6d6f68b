#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prequant/obstruction.hpp"
#include "prequant/scenario.hpp"

namespace prequant {

/// One step of the reasoning trail.
struct Reason {
  std::string check;   // e.g. "integrality", "fixed_mu"
  std::string clause;  // criterion the check implements
  std::string detail;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct Verdict {
  std::string scenario;
  bool prequantizable = false;
  bool equivariant_fixed_mu = false;
  bool equivariant_some_mu = false;
  bool fixed_mu_uses_twist = false;  // fixed-mu lift exists only after retwisting
  std::optional<int> tensor_power;
  std::optional<bool> power_statement;  // r omega equivariant for the r found
  std::vector<double> flux;
  std::vector<int> chern;
  std::vector<Reason> reasons;
  std::optional<DeltaTable> fixed_table;
  std::optional<DeltaTable> torsion_table;
  std::optional<MomentShift> moment_shift;
  std::optional<FlatTwist> flat_twist;
};

/// Integrality of omega on every H_2 generator.
Verdict check_prequantizable(const Scenario& s);

/// Checks dmu_X = i_{X_M} omega and equivariance of mu; throws NumericalError
/// with the residual if either fails. Appends reasons.
void validate_moment_map(const Scenario& s, const AnalysisOptions& opts, std::vector<Reason>& reasons);

/// Integral and Delta = 0 on ker exp. With twisting enabled a flat twist that
/// removes Delta also counts, and the verdict records that it was needed.
Verdict check_equivariant_fixed_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});

/// Integral and Delta = 0 on the torsion cone. Embeds the moment-shift witness
/// (and the flat-twist witness when twisting is enabled) when mu itself is obstructed.
Verdict check_equivariant_some_mu(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});

struct PowerStatement {
  int r = 1;
  Verdict verdict;  // of the r-fold scenario
};
/// r = min_tensor_power and the some-mu verdict of the r-fold tensor power.
PowerStatement check_power_statement(const Scenario& s, const ConnectionSpec& conn, const AnalysisOptions& opts = {});

/// Full pipeline: integrality, moment-map validation, fixed-mu and some-mu
/// verdicts with witnesses, tensor power and the power statement.
Verdict analyze(const Scenario& s, const AnalysisOptions& opts = {});

}  // namespace prequant
