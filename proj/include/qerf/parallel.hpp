#ifndef QERF_PARALLEL_HPP
#define QERF_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qerf {

/// Default worker count: QERF_WORKERS env var if set, else hardware
/// concurrency capped at 8.
int default_workers();

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
/// results are identical for any worker count. workers <= 1 runs inline.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace qerf

#endif  // QERF_PARALLEL_HPP
