#pragma once

#include <cstddef>
#include <functional>

namespace bgw {

unsigned default_threads();

// Runs fn(i) for i in [0, n); work is claimed through an atomic counter.
// Callers must make fn(i) write only to slot i of any shared output so the
// result is identical for every thread count. The first exception thrown by
// a worker is rethrown after all workers join. threads == 0 means auto.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace bgw
