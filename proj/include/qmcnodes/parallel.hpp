#pragma once

// Deterministic data parallelism: a static contiguous partition of an index
// range over a fixed number of threads.  Each index runs exactly once and
// writes only caller-provided slots, so results are bitwise independent of
// the worker count.

#include <cstddef>
#include <functional>

namespace qmcnodes {

/// Run fn(i) for every i in [0, n).  workers < 1 throws; workers == 1 runs
/// inline.  The first exception thrown by any fn is rethrown after all
/// threads join.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace qmcnodes
