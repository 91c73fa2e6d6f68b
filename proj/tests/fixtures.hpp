#pragma once

#include <optional>
#include <string>

#include "prequant/cli.hpp"

namespace fixture {

inline prequant::Scenario builtin(const std::string& name, const prequant::cli::Params& params = {},
                                  std::optional<bool> twisting = std::nullopt) {
  const auto* b = prequant::cli::find_builtin(name);
  return prequant::cli::build_scenario(prequant::cli::make_builtin(*b, params, twisting));
}

/// Fewer random samples than the CLI default; generators are always included.
inline prequant::AnalysisOptions quick(int samples = 6) {
  prequant::AnalysisOptions o;
  o.samples = samples;
  return o;
}

}  // namespace fixture
