#pragma once

#include <cstddef>
#include <functional>

namespace kldsel {

/// Worker count: `requested` if nonzero, else KLDSEL_THREADS if set and
/// nonzero, else the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; results must be written to index-addressed storage.
/// The exception thrown by the lowest failing index is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace kldsel
