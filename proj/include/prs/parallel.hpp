#pragma once

#include <cstddef>
#include <functional>

namespace prs {

/// Worker count used when a caller passes 0.
unsigned default_thread_count();

/// Calls body(i) for i in [0, count) on up to `threads` std::threads. The
/// first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace prs
