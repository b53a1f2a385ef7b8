#pragma once

#include <cstddef>
#include <functional>

namespace plh {

/// Hardware concurrency, at least 1.
unsigned default_threads();

/// Calls fn(i) for every i in [0, n) on up to `threads` workers. Callers write
/// results into slot i, so output never depends on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace plh
