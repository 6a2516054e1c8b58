#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskgrid/assignment.hpp"

namespace riskgrid {

/// What gets written next to a solution so it can be read back whole.
struct SolutionRecord {
  AssignmentSolution solution;
  std::uint64_t seed = 0;
  int draws = 0;
  /// lambda per path index; empty when the candidates are unknown (e.g. an
  /// imported efficiency matrix), in which case "lambda" is written as null.
  std::vector<double> lambdas;
};

/// JSON with alpha, gamma, delta, seed, draws, tau_star, h_value,
/// assignments [{vehicle, demand, path, lambda}], the per-tau trace and a
/// diagnostics block.
std::string solution_to_json(const SolutionRecord& record);
SolutionRecord solution_from_json(std::string_view text);

}  // namespace riskgrid
