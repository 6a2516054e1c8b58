#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "riskgrid/efficiency.hpp"

namespace riskgrid {

/// Header "i,j,k,draw,efficiency", then one row per (tuple, draw), tuples in
/// lexicographic order and draws ascending.
std::string efficiency_to_csv(const EfficiencyMatrix& matrix);
/// Accepts rows in any order; every tuple of the ground set must appear
/// with every draw exactly once. The seed is recorded as 0 and the layer
/// log is left empty.
EfficiencyMatrix efficiency_from_csv(std::string_view text);

/// Header "draw,f", one row per draw.
std::string distribution_to_csv(const std::vector<double>& samples);
std::vector<double> distribution_from_csv(std::string_view text);

}  // namespace riskgrid
