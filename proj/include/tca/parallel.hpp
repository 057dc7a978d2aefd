#pragma once

#include <cstddef>
#include <functional>

namespace tca {

// min(hardware threads, TCA_THREADS when set and positive); at least 1.
[[nodiscard]] unsigned default_thread_count();

// Resolves 0 to default_thread_count() and applies the TCA_THREADS cap.
[[nodiscard]] unsigned resolve_threads(unsigned requested);

// Calls body(i) for i in [0, n) on up to `threads` workers. The first
// exception thrown (lowest index wins) is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace tca
