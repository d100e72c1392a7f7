#pragma once

// Fixed-chunk worker pool. Work is always split into the same chunks no
// matter how many threads run them, so reductions combined in chunk order
// are bit-identical for any thread count.

#include <cstddef>
#include <functional>

namespace convid {

/// 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(chunk, begin, end) for `chunks` contiguous pieces of
/// [0, count). Exceptions from workers are rethrown on the caller.
void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Calls body(i) for i in [0, count).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace convid
