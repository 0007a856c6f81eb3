#pragma once

/** @file parallel.hpp
 *  @brief Deterministic fork-join helper. Workers write disjoint, index-addressed
 *         slots only, so results are bitwise independent of the thread count.
 */

#include <cstddef>
#include <functional>

namespace pfecc {

/// Worker-thread count: the PFECC_THREADS environment variable if set and
/// positive, hardware concurrency when it is 0 or unset. Invalid values raise
/// a UsageError.
int thread_count();

/// Override the environment-derived count for this process (0 = auto).
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n). Each invocation must touch only state owned by
/// index i; any cross-index reduction must happen after the call, in index
/// order, so that results never depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pfecc
