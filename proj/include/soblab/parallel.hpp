#pragma once

#include <cstddef>
#include <functional>

namespace soblab {

/// Worker count for integration, from the SOBLAB_WORKERS environment variable
/// (default 1). Results are bit-identical for any worker count: workers only
/// fill independent slots; the reduction order is fixed.
int workerCount();

/// Runs fn(i) for i in [0, n), chunked across workers.
void parallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace soblab
