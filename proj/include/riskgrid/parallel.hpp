#pragma once

#include <cstddef>
#include <functional>

namespace riskgrid {

/// Worker cap: RISKGRID_THREADS if set to a positive integer, otherwise the
/// hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Each index runs exactly once; callers must
/// write results into per-index slots so output does not depend on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace riskgrid
