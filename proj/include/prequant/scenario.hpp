#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prequant/geometry.hpp"
#include "prequant/holonomy.hpp"
#include "prequant/lie.hpp"
#include "prequant/mod_one.hpp"

namespace prequant {

/// Everything the decision procedures need: (M, G, omega, action, mu) plus the
/// flat twist of the base prequantization. Scenarios are immutable values.
struct Scenario {
  std::string name;
  std::string description;
  ManifoldSpec manifold;
  GroupSpec group;
  TwoFormSpec omega;
  ActionSpec action;
  MomentMapSpec moment;
  std::vector<ModOne> beta;  // flat twist of the base connection, one per H_1 generator
  bool twisting_enabled = false;
};

struct AnalysisOptions {
  double vanish_tol = 5e-5;  // verdict-level vanishing of mod-1 values
  double agree_tol = 1e-5;   // route and base-point agreement
  int samples = 32;          // randomized ker exp samples on top of the generators
  std::uint64_t seed = 0;
  int base_points = 3;
};

/// The base connection of a scenario. Throws PreconditionError if omega is not integral.
inline ConnectionSpec base_connection(const Scenario& s) { return make_connection(s.manifold, s.omega, s.beta); }

}  // namespace prequant
