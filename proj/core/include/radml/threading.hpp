#pragma once

#include <cstddef>
#include <functional>

namespace radml {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
/// independent; each writes only to its own output slot, so the result is
/// identical to sequential execution for any thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Resolves a --threads argument: 0 means "use hardware concurrency".
int resolve_threads(int requested);

} // namespace radml
