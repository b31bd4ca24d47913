#pragma once

#include <cstddef>
#include <functional>

namespace brirsim {

struct ExecutionOptions {
  unsigned workers = 1;  // 0 picks std::thread::hardware_concurrency()
};

unsigned resolve_workers(unsigned requested);

/// Runs body(i) for every i in [0, count) on up to `workers` threads.
/// Work items are claimed dynamically; callers must make results independent
/// of which thread ran which item. The first exception thrown by any item is
/// rethrown after all threads have stopped.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace brirsim
