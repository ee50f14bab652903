#pragma once

#include <cstddef>
#include <functional>

namespace ccdist {

// Worker count used by parallel_for when none is given: CCDIST_THREADS if
// set, else hardware concurrency.
int default_thread_count();
void set_default_thread_count(int threads);

// Runs body(i) for i in [0, n). Results must be written to slot i by the
// caller so the outcome does not depend on scheduling. The first exception
// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int threads = 0);

}  // namespace ccdist
