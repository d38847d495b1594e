#pragma once

#include <cstddef>
#include <functional>

namespace ctrltab::util {

/// Runs fn(i) for i in [0, n) on up to `threads` workers with a static
/// contiguous partition. Callers write results into per-index slots and
/// reduce them in index order afterwards, so output never depends on the
/// worker count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

} // namespace ctrltab::util
